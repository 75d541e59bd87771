#include "pinyinasr/ambiguity.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "pinyinasr/errors.hpp"
#include "pinyinasr/utf8.hpp"

namespace pinyinasr {

MappingStats mapping_stats(const ParallelCorpus& corpus, int n, bool tonal) {
  if (n < 1) throw std::invalid_argument("n-gram order must be >= 1");
  if (corpus.pairs.empty()) throw EmptyCorpus();

  const auto width = static_cast<std::size_t>(n);
  std::unordered_map<std::string, std::unordered_set<std::string>> groups;
  for (const auto& pair : corpus.pairs) {
    const auto chars = utf8::split_chars(pair.hanzi);
    if (!chars || chars->size() != pair.pinyin.size())
      throw LengthMismatch("pinyin and Hanzi lengths differ for '" + pair.hanzi + "'");
    if (chars->size() < width) continue;

    std::vector<std::string> units;
    units.reserve(pair.pinyin.size());
    for (const auto& s : pair.pinyin) units.push_back(tonal ? s.str() : s.toneless().str());

    for (std::size_t i = 0; i + width <= units.size(); ++i) {
      std::string key, value;
      for (std::size_t k = i; k < i + width; ++k) {
        key += units[k];
        key += ' ';
        value += (*chars)[k];
      }
      groups[key].insert(std::move(value));
    }
  }

  MappingStats stats;
  stats.n = n;
  stats.keys = groups.size();
  std::size_t unique = 0;
  for (const auto& [key, values] : groups) {
    stats.realizations += values.size();
    stats.maximum = std::max(stats.maximum, values.size());
    if (values.size() == 1) ++unique;
  }
  if (stats.keys > 0) {
    stats.average = static_cast<double>(stats.realizations) / static_cast<double>(stats.keys);
    stats.pct_unique = 100.0 * static_cast<double>(unique) / static_cast<double>(stats.keys);
  }
  return stats;
}

std::vector<StatsRow> stats_report(const ParallelCorpus& corpus, int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<StatsRow> rows;
  for (int n = 1; n <= n_max; ++n)
    rows.push_back({mapping_stats(corpus, n, true), mapping_stats(corpus, n, false)});
  return rows;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_stats_tsv(std::ostream& out, const std::vector<StatsRow>& rows) {
  out << "n\tavg_tonal\tmax_tonal\tpct_unique_tonal\tavg_toneless\tmax_toneless\tpct_unique_toneless\n";
  for (const auto& r : rows) {
    out << r.tonal.n << '\t' << fixed(r.tonal.average, 4) << '\t' << r.tonal.maximum << '\t'
        << fixed(r.tonal.pct_unique, 4) << '\t' << fixed(r.toneless.average, 4) << '\t'
        << r.toneless.maximum << '\t' << fixed(r.toneless.pct_unique, 4) << '\n';
  }
}

void write_stats_table(std::ostream& out, const std::vector<StatsRow>& rows) {
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out << pad("N-gram", 8) << pad("Average", 10) << pad("Maximum", 10) << "Percentage\n";
  for (const auto& r : rows) {
    out << pad(std::to_string(r.tonal.n) + "-gram", 8) << pad(fixed(r.tonal.average, 2), 10)
        << pad(std::to_string(r.tonal.maximum), 10) << fixed(r.tonal.pct_unique, 1) << "%\n";
    out << pad("", 8) << pad("(" + fixed(r.toneless.average, 2) + ")", 10)
        << pad("(" + std::to_string(r.toneless.maximum) + ")", 10) << "("
        << fixed(r.toneless.pct_unique, 1) << "%)\n";
  }
}

}  // namespace pinyinasr
