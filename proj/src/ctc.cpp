#include "pinyinasr/ctc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "pinyinasr/errors.hpp"

namespace pinyinasr {

double log10_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log10(1.0 + std::pow(10.0, b - a));
}

std::vector<std::size_t> collapse_alignment(std::span<const std::size_t> frames, std::size_t blank) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (t > 0 && frames[t] == frames[t - 1]) continue;
    if (frames[t] != blank) out.push_back(frames[t]);
  }
  return out;
}

LabelSeq greedy_decode(const EmissionMatrix& e) {
  std::vector<std::size_t> best(e.frames());
  for (std::size_t t = 0; t < e.frames(); ++t) {
    const auto row = e.row(t);
    best[t] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return collapse_alignment(best, e.blank());
}

std::size_t min_frames(std::span<const std::size_t> labels) {
  std::size_t n = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

double sequence_logprob(const EmissionMatrix& e, std::span<const std::size_t> labels) {
  for (std::size_t c : labels)
    if (c >= e.classes() || c == e.blank()) throw std::invalid_argument("label is blank or out of range");
  if (min_frames(labels) > e.frames())
    throw InfeasibleLength(std::to_string(labels.size()) + " labels need " +
                           std::to_string(min_frames(labels)) + " frames, have " +
                           std::to_string(e.frames()));

  const std::size_t states = 2 * labels.size() + 1;
  auto symbol = [&](std::size_t s) { return s % 2 == 0 ? e.blank() : labels[s / 2]; };

  std::vector<double> alpha(states, kLogZero), next(states);
  alpha[0] = e.at(0, e.blank());
  if (states > 1) alpha[1] = e.at(0, labels[0]);
  for (std::size_t t = 1; t < e.frames(); ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = alpha[s];
      if (s >= 1) acc = log10_add(acc, alpha[s - 1]);
      if (s >= 2 && s % 2 == 1 && symbol(s) != symbol(s - 2)) acc = log10_add(acc, alpha[s - 2]);
      next[s] = acc == kLogZero ? kLogZero : acc + e.at(t, symbol(s));
    }
    alpha.swap(next);
  }
  return states > 1 ? log10_add(alpha[states - 1], alpha[states - 2]) : alpha[0];
}

std::vector<std::string> label_strings(const EmissionMatrix& e, const LabelSeq& labels) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (std::size_t c : labels) out.push_back(e.label(c));
  return out;
}

namespace {

struct LabelSeqHash {
  std::size_t operator()(const LabelSeq& s) const noexcept {
    std::uint64_t h = 1469598103934665603ULL ^ s.size();
    for (std::size_t c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Orders hypotheses by fused score, then by label text.
class Ranking {
 public:
  explicit Ranking(const EmissionMatrix& e) : rank_(e.classes(), 0) {
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < e.classes(); ++c)
      if (c != e.blank()) order.push_back(c);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return e.label(a) < e.label(b); });
    for (std::size_t i = 0; i < order.size(); ++i) rank_[order[i]] = i;
  }

  bool text_less(const LabelSeq& a, const LabelSeq& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [&](std::size_t x, std::size_t y) { return rank_[x] < rank_[y]; });
  }

  bool better(double score_a, const LabelSeq& a, double score_b, const LabelSeq& b) const {
    if (score_a != score_b) return score_a > score_b;
    return text_less(a, b);
  }

 private:
  std::vector<std::size_t> rank_;
};

/// Maps unit classes to LM tokens and scores one-unit extensions.
class LmScorer {
 public:
  LmScorer(const EmissionMatrix& e, const NGramModel* lm) : lm_(lm), tokens_(e.classes(), 0) {
    if (!lm_) return;
    for (std::size_t c = 0; c < e.classes(); ++c) {
      if (c == e.blank()) continue;
      if (!lm_->vocab().contains(e.label(c)))
        throw VocabularyMismatch("unit '" + e.label(c) + "' is not in the language model vocabulary");
      tokens_[c] = lm_->vocab().id(e.label(c));
    }
  }

  /// log10 P(unit | <s> prefix).
  double extend(const LabelSeq& prefix, std::size_t cls) const {
    if (!lm_) return 0.0;
    const std::size_t n = std::min(prefix.size(), static_cast<std::size_t>(lm_->order() - 1));
    ctx_.clear();
    if (n == prefix.size()) ctx_.push_back(Vocabulary::kBos);
    for (std::size_t i = prefix.size() - n; i < prefix.size(); ++i) ctx_.push_back(tokens_[prefix[i]]);
    return lm_->score(ctx_, tokens_[cls]);
  }

 private:
  const NGramModel* lm_;
  std::vector<TokenId> tokens_;
  mutable std::vector<TokenId> ctx_;
};

struct BeamEntry {
  double p_blank = kLogZero;
  double p_nonblank = kLogZero;
  double lm = 0.0;
};

}  // namespace

std::vector<Hypothesis> prefix_beam_search(const EmissionMatrix& e, const NGramModel* lm,
                                           const DecoderConfig& cfg) {
  if (cfg.beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  const LmScorer scorer(e, lm);
  const Ranking ranking(e);
  const std::size_t blank = e.blank();

  auto fused = [&](const LabelSeq& prefix, const BeamEntry& b) {
    return log10_add(b.p_blank, b.p_nonblank) + cfg.lm_weight * b.lm +
           cfg.insertion_bonus * static_cast<double>(prefix.size());
  };

  using BeamMap = std::unordered_map<LabelSeq, BeamEntry, LabelSeqHash>;
  BeamMap beams;
  beams[{}] = BeamEntry{0.0, kLogZero, 0.0};

  std::vector<std::size_t> active;
  for (std::size_t t = 0; t < e.frames(); ++t) {
    const auto row = e.row(t);
    active.clear();
    for (std::size_t c = 0; c < e.classes(); ++c)
      if (c != blank && row[c] != kLogZero && row[c] >= cfg.prune_threshold) active.push_back(c);

    BeamMap next;
    next.reserve(beams.size() * (active.size() + 1));
    for (const auto& [prefix, b] : beams) {
      const double total = log10_add(b.p_blank, b.p_nonblank);
      if (row[blank] != kLogZero) {
        auto& n = next.try_emplace(prefix, BeamEntry{kLogZero, kLogZero, b.lm}).first->second;
        n.p_blank = log10_add(n.p_blank, total + row[blank]);
      }
      const bool has_last = !prefix.empty();
      const std::size_t last = has_last ? prefix.back() : blank;
      if (has_last && row[last] != kLogZero && b.p_nonblank != kLogZero) {
        auto& n = next.try_emplace(prefix, BeamEntry{kLogZero, kLogZero, b.lm}).first->second;
        n.p_nonblank = log10_add(n.p_nonblank, b.p_nonblank + row[last]);
      }
      for (std::size_t c : active) {
        const double from = c == last ? b.p_blank : total;
        if (from == kLogZero) continue;
        LabelSeq ext = prefix;
        ext.push_back(c);
        auto [it, inserted] = next.try_emplace(std::move(ext), BeamEntry{});
        if (inserted) it->second.lm = b.lm + scorer.extend(prefix, c);
        it->second.p_nonblank = log10_add(it->second.p_nonblank, from + row[c]);
      }
    }

    if (next.size() > cfg.beam_width) {
      std::vector<std::pair<double, BeamMap::iterator>> ranked;
      ranked.reserve(next.size());
      for (auto it = next.begin(); it != next.end(); ++it) ranked.emplace_back(fused(it->first, it->second), it);
      std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(cfg.beam_width - 1),
                       ranked.end(), [&](const auto& a, const auto& b) {
                         return ranking.better(a.first, a.second->first, b.first, b.second->first);
                       });
      BeamMap kept;
      kept.reserve(cfg.beam_width);
      for (std::size_t i = 0; i < cfg.beam_width; ++i)
        kept.emplace(ranked[i].second->first, ranked[i].second->second);
      next = std::move(kept);
    }
    beams = std::move(next);
  }

  std::vector<Hypothesis> out;
  out.reserve(beams.size());
  for (const auto& [prefix, b] : beams)
    out.push_back({prefix, log10_add(b.p_blank, b.p_nonblank), b.lm, fused(prefix, b)});
  std::sort(out.begin(), out.end(), [&](const Hypothesis& a, const Hypothesis& b) {
    return ranking.better(a.fused, a.labels, b.fused, b.labels);
  });
  if (out.size() > cfg.beam_width) out.resize(cfg.beam_width);
  return out;
}

Hypothesis brute_force_decode(const EmissionMatrix& e, const NGramModel* lm, double lm_weight,
                              double insertion_bonus) {
  constexpr std::size_t kMaxFrames = 8;
  constexpr std::size_t kMaxUnits = 5;
  if (e.frames() > kMaxFrames || e.units() > kMaxUnits)
    throw InstanceTooLarge("brute force limited to T<=8, V<=5 (got T=" + std::to_string(e.frames()) +
                           ", V=" + std::to_string(e.units()) + ")");
  const LmScorer scorer(e, lm);
  const Ranking ranking(e);

  std::vector<std::size_t> units;
  for (std::size_t c = 0; c < e.classes(); ++c)
    if (c != e.blank()) units.push_back(c);

  Hypothesis best;
  LabelSeq seq;
  // Depth-first over sequences; LM scores accumulate left to right like the beam.
  auto visit = [&](auto&& self, double lm_score) -> void {
    if (min_frames(seq) > e.frames()) return;
    const double acoustic = sequence_logprob(e, seq);
    const double score = acoustic + lm_weight * lm_score + insertion_bonus * static_cast<double>(seq.size());
    if (acoustic != kLogZero &&
        (best.acoustic == kLogZero || ranking.better(score, seq, best.fused, best.labels)))
      best = {seq, acoustic, lm_score, score};
    if (seq.size() == e.frames()) return;
    for (std::size_t c : units) {
      const double ext = scorer.extend(seq, c);
      seq.push_back(c);
      self(self, lm_score + ext);
      seq.pop_back();
    }
  };
  visit(visit, 0.0);
  return best;
}

}  // namespace pinyinasr
