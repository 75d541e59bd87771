#include "pinyinasr/emission_sim.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "pinyinasr/ctc.hpp"
#include "pinyinasr/errors.hpp"

namespace pinyinasr {

ConfusionPolicy parse_confusion_policy(std::string_view text) {
  if (text == "tone-neighbor") return ConfusionPolicy::ToneNeighbor;
  if (text == "final-neighbor") return ConfusionPolicy::FinalNeighbor;
  if (text == "uniform") return ConfusionPolicy::Uniform;
  throw ConfigError("unknown confusion policy '" + std::string(text) +
                    "' (tone-neighbor, final-neighbor, uniform)");
}

std::string_view to_string(ConfusionPolicy policy) {
  switch (policy) {
    case ConfusionPolicy::ToneNeighbor: return "tone-neighbor";
    case ConfusionPolicy::FinalNeighbor: return "final-neighbor";
    case ConfusionPolicy::Uniform: return "uniform";
  }
  return "?";
}

double SimRandom::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SimRandom::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EmissionSimulator::EmissionSimulator(std::vector<Syllable> alphabet) : alphabet_(std::move(alphabet)) {
  if (alphabet_.empty()) throw std::invalid_argument("empty unit alphabet");
  const std::size_t v = alphabet_.size();
  for (std::size_t i = 0; i < v; ++i) {
    if (alphabet_[i].has_tone() != alphabet_[0].has_tone())
      throw std::invalid_argument("alphabet mixes tonal and toneless units");
    labels_.push_back(alphabet_[i].str());
    index_.emplace(alphabet_[i], i);
  }

  std::map<std::pair<Initial, Rime>, std::vector<std::size_t>> by_segment;
  std::map<std::pair<Initial, int>, std::vector<std::size_t>> by_onset;
  for (std::size_t i = 0; i < v; ++i) {
    by_segment[{alphabet_[i].initial(), alphabet_[i].rime()}].push_back(i);
    by_onset[{alphabet_[i].initial(), alphabet_[i].tone()}].push_back(i);
  }
  tone_neighbors_.resize(v);
  final_neighbors_.resize(v);
  uniform_.resize(v);
  for (std::size_t i = 0; i < v; ++i) {
    for (std::size_t j : by_segment[{alphabet_[i].initial(), alphabet_[i].rime()}])
      if (j != i) tone_neighbors_[i].push_back(j);
    for (std::size_t j : by_onset[{alphabet_[i].initial(), alphabet_[i].tone()}])
      if (j != i) final_neighbors_[i].push_back(j);
    for (std::size_t j = 0; j < v; ++j)
      if (j != i) uniform_[i].push_back(j);
  }
}

const std::vector<std::size_t>& EmissionSimulator::confusables(std::size_t unit,
                                                               ConfusionPolicy policy) const {
  switch (policy) {
    case ConfusionPolicy::ToneNeighbor: return tone_neighbors_.at(unit);
    case ConfusionPolicy::FinalNeighbor: return final_neighbors_.at(unit);
    case ConfusionPolicy::Uniform: break;
  }
  return uniform_.at(unit);
}

EmissionMatrix EmissionSimulator::synth(std::span<const Syllable> pinyin, const SimConfig& cfg) const {
  if (cfg.frames_per_unit < 2) throw ConfigError("frames_per_unit must be >= 2");
  if (!(cfg.blank_fill > 0.0 && cfg.blank_fill <= 1.0)) throw ConfigError("blank_fill must lie in (0, 1]");
  if (!(cfg.confusion_temperature >= 0.0)) throw ConfigError("confusion_temperature must be >= 0");

  std::vector<std::size_t> units;
  units.reserve(pinyin.size());
  for (const auto& s : pinyin) {
    auto it = index_.find(s);
    if (it == index_.end()) throw InvalidSyllable("'" + s.str() + "' is not in the simulator alphabet");
    units.push_back(it->second);
  }

  const std::size_t classes = alphabet_.size() + 1;
  const std::size_t blank = alphabet_.size();
  const auto fpu = static_cast<std::size_t>(cfg.frames_per_unit);
  const std::size_t frames = 1 + units.size() * (fpu + 1);
  std::vector<double> data(frames * classes, kLogZero);
  const bool noisy = cfg.confusion_temperature > 0.0;
  SimRandom rng(cfg.seed);

  auto separator = [&](std::size_t t, std::size_t neighbor, bool has_neighbor) {
    double* row = &data[t * classes];
    if (!noisy || !has_neighbor || cfg.blank_fill >= 1.0) {
      row[blank] = 0.0;
      return;
    }
    row[blank] = std::log10(cfg.blank_fill);
    row[neighbor] = std::log10(1.0 - cfg.blank_fill);
  };

  std::size_t t = 0;
  separator(t++, units.empty() ? 0 : units.front(), !units.empty());
  std::vector<std::size_t> support;
  std::vector<double> segment_logit, logit;
  for (std::size_t u : units) {
    support.assign(1, u);
    if (noisy) {
      const auto& extra = confusables(u, cfg.policy);
      support.insert(support.end(), extra.begin(), extra.end());
    }
    segment_logit.assign(support.size(), 0.0);
    if (noisy) {
      for (std::size_t k = 0; k < support.size(); ++k)
        segment_logit[k] = (k == 0 ? 0.0 : -1.0 / cfg.confusion_temperature) + rng.normal();
    }
    for (std::size_t f = 0; f < fpu; ++f, ++t) {
      double* row = &data[t * classes];
      if (!noisy) {
        row[u] = 0.0;
        continue;
      }
      logit.resize(support.size());
      double top = kLogZero;
      for (std::size_t k = 0; k < support.size(); ++k) {
        logit[k] = segment_logit[k] + 0.5 * rng.normal();
        top = std::max(top, logit[k]);
      }
      double norm = 0.0;
      for (double l : logit) norm += std::exp(l - top);
      const double log_norm = std::log(norm);
      for (std::size_t k = 0; k < support.size(); ++k)
        row[support[k]] = (logit[k] - top - log_norm) / std::numbers::ln10;
    }
    separator(t++, u, true);
  }
  return EmissionMatrix(labels_, blank, std::move(data));
}

}  // namespace pinyinasr
