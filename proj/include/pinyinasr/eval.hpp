#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pinyinasr/syllable.hpp"

namespace pinyinasr {

using TokenSeq = std::vector<std::string>;

struct EditCounts {
  std::size_t distance = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;  // extra hypothesis tokens
  std::size_t deletions = 0;   // missing reference tokens

  friend bool operator==(const EditCounts&, const EditCounts&) = default;
};

/// Unit-cost Levenshtein with a deterministic traceback that prefers
/// substitution (or match) over insertion over deletion.
EditCounts edit_distance(std::span<const std::string> ref, std::span<const std::string> hyp);

struct UtteranceScore {
  std::string id;
  std::size_t ref_len = 0;
  EditCounts counts;
};

/// Pooled error counts: rate = (S + I + D) / sum of reference lengths.
struct ScoreReport {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t ref_len = 0;
  double error_rate = 0.0;
  /// Set when every reference is empty; the rate is then 0 if there are no
  /// errors and +inf otherwise.
  bool degenerate = false;
  std::vector<UtteranceScore> utterances;

  std::size_t errors() const { return substitutions + insertions + deletions; }
};

/// Throws LengthMismatch when the lists differ in size. Utterance ids
/// default to the 0-based index.
ScoreReport error_rate(std::span<const TokenSeq> refs, std::span<const TokenSeq> hyps,
                       std::span<const std::string> ids = {});

/// Parses both sides as tonal syllables, strips tones, then scores.
ScoreReport tone_stripped_rescore(std::span<const TokenSeq> refs, std::span<const TokenSeq> hyps,
                                  const SyllableInventory& inv, std::span<const std::string> ids = {});

/// One character per token (for CER).
TokenSeq characters(const std::string& text);

/// `metric<TAB>rate<TAB>S<TAB>I<TAB>D<TAB>ref_len`, rate as a percentage.
void write_summary_tsv(std::ostream& out, const std::string& metric, const ScoreReport& report);
/// One JSON object per utterance.
void write_detail_jsonl(std::ostream& out, const ScoreReport& report);

}  // namespace pinyinasr
