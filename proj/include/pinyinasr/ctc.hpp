#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pinyinasr/emission.hpp"
#include "pinyinasr/ngram.hpp"

namespace pinyinasr {

/// Non-blank class indices of an EmissionMatrix.
using LabelSeq = std::vector<std::size_t>;

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log10(10^a + 10^b) without leaving log space.
double log10_add(double a, double b);

/// Merge adjacent repeats, then drop blanks.
std::vector<std::size_t> collapse_alignment(std::span<const std::size_t> frames, std::size_t blank);

/// Per-frame argmax (ties to the lower class index), then collapse.
LabelSeq greedy_decode(const EmissionMatrix& e);

/// Frames needed to emit `labels`: one per label plus a blank between repeats.
std::size_t min_frames(std::span<const std::size_t> labels);

/// log10 of the total probability of all alignments collapsing to
/// `labels` (CTC forward algorithm). Throws InfeasibleLength.
double sequence_logprob(const EmissionMatrix& e, std::span<const std::size_t> labels);

struct DecoderConfig {
  std::size_t beam_width = 16;
  double lm_weight = 0.0;         // alpha
  double insertion_bonus = 0.0;   // beta, per emitted unit
  /// Unit classes below this log10 probability are not expanded at a frame.
  double prune_threshold = kLogZero;
};

struct Hypothesis {
  LabelSeq labels;
  double acoustic = kLogZero;  // log10 CTC probability of the prefix
  double lm = 0.0;             // log10 LM probability, <s>-conditioned, no </s>
  double fused = kLogZero;     // acoustic + alpha * lm + beta * |labels|
};

/// CTC prefix beam search with shallow LM fusion. Unit labels are the LM
/// tokens (every unit is its own pronunciation). Returns at most
/// beam_width hypotheses, best first; equal scores are ordered by the
/// unit label strings. Throws VocabularyMismatch if the LM lacks a unit.
std::vector<Hypothesis> prefix_beam_search(const EmissionMatrix& e, const NGramModel* lm,
                                           const DecoderConfig& cfg);

/// Exact argmax of fused score over every feasible label sequence.
/// Test oracle; throws InstanceTooLarge beyond T=8 frames or V=5 units.
Hypothesis brute_force_decode(const EmissionMatrix& e, const NGramModel* lm, double lm_weight,
                              double insertion_bonus);

std::vector<std::string> label_strings(const EmissionMatrix& e, const LabelSeq& labels);

}  // namespace pinyinasr
