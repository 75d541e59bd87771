#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "pinyinasr/corpus.hpp"

namespace pinyinasr {

/// How many distinct Hanzi n-grams realize each distinct pinyin n-gram.
/// Averages are over pinyin n-gram types, unweighted by frequency.
struct MappingStats {
  int n = 0;
  std::size_t keys = 0;          // distinct pinyin n-grams
  std::size_t realizations = 0;  // sum over keys of distinct Hanzi n-grams
  double average = 0.0;
  std::size_t maximum = 0;
  double pct_unique = 0.0;  // share of keys with exactly one realization, in %

  friend bool operator==(const MappingStats&, const MappingStats&) = default;
};

/// Slides a length-n window over each sentence pair (windows never cross
/// sentences). With tonal=false the pinyin keys are tone-stripped. A corpus
/// with no window of length n yields all-zero stats. Throws EmptyCorpus.
MappingStats mapping_stats(const ParallelCorpus& corpus, int n, bool tonal);

struct StatsRow {
  MappingStats tonal;
  MappingStats toneless;
};

std::vector<StatsRow> stats_report(const ParallelCorpus& corpus, int n_max);

/// n, avg/max/pct for tonal, then the same for toneless.
void write_stats_tsv(std::ostream& out, const std::vector<StatsRow>& rows);
/// Table with toneless values in parentheses under the tonal ones.
void write_stats_table(std::ostream& out, const std::vector<StatsRow>& rows);

}  // namespace pinyinasr
