#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pinyinasr/emission.hpp"
#include "pinyinasr/syllable.hpp"

namespace pinyinasr {

/// Which units absorb probability mass leaked from the true unit.
enum class ConfusionPolicy {
  ToneNeighbor,   // same initial and rime, other tones
  FinalNeighbor,  // same initial and tone, other rimes
  Uniform,        // every other unit
};

ConfusionPolicy parse_confusion_policy(std::string_view text);
std::string_view to_string(ConfusionPolicy policy);

struct SimConfig {
  int frames_per_unit = 3;
  /// Blank mass on separator frames (the rest goes to the adjacent unit).
  double blank_fill = 0.9;
  /// 0 gives one-hot frames; larger values push mass to confusable units.
  double confusion_temperature = 0.0;
  ConfusionPolicy policy = ConfusionPolicy::ToneNeighbor;
  std::uint64_t seed = 0;
};

/// Seeded random source used by the simulator: std::mt19937_64 (fully
/// specified by the standard) with doubles built from the top 53 bits and
/// normals from Box-Muller, so streams match across platforms.
class SimRandom {
 public:
  explicit SimRandom(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with an utterance index (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Synthesizes CTC emission matrices over a fixed unit alphabet.
///
/// Layout: one separator frame, then for every syllable `frames_per_unit`
/// unit frames followed by one separator frame. At temperature 0 unit
/// frames are one-hot on the true unit and separator frames one-hot on
/// blank. Above 0, each unit segment draws logits
///   l_c = -[c != true] / temperature + z_c + 0.5 * z_{c,t}
/// over the true unit and its confusable set (z ~ N(0,1) per segment and
/// per frame), and separator frames put `blank_fill` on blank and the rest
/// on the neighboring true unit. Blank is the last class.
class EmissionSimulator {
 public:
  /// All units must share the same tonality.
  explicit EmissionSimulator(std::vector<Syllable> alphabet);

  const std::vector<Syllable>& alphabet() const { return alphabet_; }
  std::size_t blank() const { return alphabet_.size(); }

  /// Throws InvalidSyllable for a unit outside the alphabet.
  EmissionMatrix synth(std::span<const Syllable> pinyin, const SimConfig& cfg) const;

  const std::vector<std::size_t>& confusables(std::size_t unit, ConfusionPolicy policy) const;

 private:
  std::vector<Syllable> alphabet_;
  std::vector<std::string> labels_;
  std::unordered_map<Syllable, std::size_t, SyllableHash> index_;
  std::vector<std::vector<std::size_t>> tone_neighbors_;
  std::vector<std::vector<std::size_t>> final_neighbors_;
  std::vector<std::vector<std::size_t>> uniform_;
};

}  // namespace pinyinasr
