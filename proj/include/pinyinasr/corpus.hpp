#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "pinyinasr/lexicon.hpp"
#include "pinyinasr/syllable.hpp"

namespace pinyinasr {

/// Strips whitespace and punctuation. nullopt if the line is not valid UTF-8.
std::optional<std::string> normalize_sentence(std::string_view line);

struct LengthBounds {
  std::size_t min_len = 5;
  std::size_t max_len = 40;
};

struct FilterReport {
  std::size_t kept = 0;
  std::size_t too_short = 0;
  std::size_t too_long = 0;
  std::size_t excluded = 0;
  std::size_t duplicates = 0;
  std::size_t malformed = 0;
};

/// Keeps normalized sentences whose character count is within `bounds`,
/// that are not in `exclusion` (compared after normalization) and not
/// already kept. Input order is preserved.
std::vector<std::string> filter_sentences(std::span<const std::string> lines, LengthBounds bounds,
                                          const std::unordered_set<std::string>& exclusion = {},
                                          FilterReport* report = nullptr);
std::vector<std::string> filter_sentences(std::istream& in, LengthBounds bounds,
                                          const std::unordered_set<std::string>& exclusion = {},
                                          FilterReport* report = nullptr);

std::vector<std::string> read_lines(std::istream& in);

struct ParallelPair {
  std::string hanzi;
  std::vector<Syllable> pinyin;  // one tonal syllable per character
};

struct ParallelCorpus {
  std::vector<ParallelPair> pairs;
  std::string source_tag;
  std::size_t skipped = 0;  // sentences with a character missing from the lexicon
};

ParallelCorpus build_parallel(std::span<const std::string> sentences,
                              const PronunciationLexicon& lex, std::string source_tag = {});

/// `hanzi<TAB>space-joined-pinyin` per line.
void write_parallel_tsv(std::ostream& out, const ParallelCorpus& corpus);
ParallelCorpus read_parallel_tsv(std::istream& in, const SyllableInventory& inv,
                                 std::string source_tag = {});

}  // namespace pinyinasr
