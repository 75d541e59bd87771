#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pinyinasr/ambiguity.hpp"
#include "pinyinasr/ctc.hpp"
#include "pinyinasr/emission.hpp"
#include "pinyinasr/lexicon.hpp"
#include "pinyinasr/ngram.hpp"
#include "pinyinasr/syllable.hpp"
#include "pinyinasr/transcriber.hpp"
#include "pinyinasr/utf8.hpp"

namespace testing {

inline std::string data_path(const std::string& rel) { return std::string(PINYINASR_DATA_DIR) + "/" + rel; }
inline std::string fixture_path(const std::string& rel) { return std::string(PINYINASR_FIXTURE_DIR) + "/" + rel; }

inline const pinyinasr::SyllableInventory& inventory() {
  static const auto inv = pinyinasr::SyllableInventory::load(data_path("inventory.txt"));
  return inv;
}

inline const pinyinasr::PronunciationLexicon& lexicon() {
  static const auto lex = pinyinasr::PronunciationLexicon::load(data_path("lexicon.tsv"), inventory());
  return lex;
}

inline std::vector<std::string> lines_of(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

/// Non-comment rows of a TSV file, split on tabs.
inline std::vector<std::vector<std::string>> tsv_rows(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : lines_of(path)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1)
      cols.push_back(line.substr(start, tab - start));
    cols.push_back(line.substr(start));
    rows.push_back(std::move(cols));
  }
  return rows;
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline pinyinasr::NGramModel train_words(const std::vector<std::string>& sentences, int order, double discount) {
  std::vector<std::vector<std::string>> corpus;
  for (const auto& s : sentences) corpus.push_back(words(s));
  pinyinasr::TrainOptions opts;
  opts.order = order;
  opts.discount = discount;
  return pinyinasr::train(corpus, opts);
}

/// Random emission matrix; with `sparsity` > 0 some cells are exactly zero.
inline pinyinasr::EmissionMatrix random_emissions(std::mt19937_64& rng, std::size_t frames,
                                                  std::size_t units, double sparsity = 0.0) {
  std::vector<std::string> labels;
  for (std::size_t u = 0; u < units; ++u) labels.push_back(std::string(1, static_cast<char>('a' + u)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> data;
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> row(units + 1);
    double sum = 0.0;
    for (auto& x : row) {
      x = unit(rng) < sparsity ? 0.0 : -std::log(unit(rng) + 1e-12);
      sum += x;
    }
    if (sum == 0.0) {
      row[units] = 1.0;
      sum = 1.0;
    }
    for (double x : row) data.push_back(x > 0.0 ? std::log10(x / sum) : pinyinasr::kLogZero);
  }
  return pinyinasr::EmissionMatrix(std::move(labels), units, std::move(data));
}

/// A small LM over the letters of random_emissions.
inline pinyinasr::NGramModel random_letter_lm(std::mt19937_64& rng, std::size_t units, int order) {
  std::uniform_int_distribution<std::size_t> len(1, 5), letter(0, units - 1);
  std::vector<std::vector<std::string>> corpus(6);
  for (auto& s : corpus)
    for (std::size_t i = len(rng); i > 0; --i) s.push_back(std::string(1, static_cast<char>('a' + letter(rng))));
  pinyinasr::TrainOptions opts;
  opts.order = order;
  opts.discount = std::uniform_real_distribution<double>(0.2, 0.9)(rng);
  for (std::size_t u = 0; u < units; ++u) opts.vocabulary.push_back(std::string(1, static_cast<char>('a' + u)));
  return pinyinasr::train(corpus, opts);
}

/// Exhaustive path enumeration over a lattice, accumulating scores in the
/// same left-to-right order as the DP. Ties go to the smaller character
/// sequence.
inline pinyinasr::TranscriptionResult enumerate_lattice(const pinyinasr::HomophoneLattice& lattice,
                                                        const pinyinasr::NGramModel& lm,
                                                        double channel_weight) {
  using namespace pinyinasr;
  TranscriptionResult best;
  bool found = false;
  std::vector<TokenId> history{Vocabulary::kBos};
  std::vector<std::string> chars;
  auto visit = [&](auto&& self, std::size_t i, double score) -> void {
    if (i == lattice.size()) {
      const double total = score + lm.score(history, Vocabulary::kEos);
      if (!found || total > best.total_score || (total == best.total_score && chars < best.hanzi)) {
        best = {chars, total};
        found = true;
      }
      return;
    }
    for (const auto& c : lattice.positions[i]) {
      const TokenId tok = lm.vocab().id(c.hanzi);
      const double step = lm.score(history, tok) + channel_weight * c.channel;
      history.push_back(tok);
      chars.push_back(c.hanzi);
      self(self, i + 1, score + step);
      history.pop_back();
      chars.pop_back();
    }
  };
  visit(visit, 0, 0.0);
  return best;
}

/// Lattice over single-character tokens drawn from `alphabet`, with random
/// channel weights (some exactly equal, to exercise tie-breaking).
inline pinyinasr::HomophoneLattice random_lattice(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                                                  std::size_t max_positions, std::size_t max_candidates) {
  std::uniform_int_distribution<std::size_t> npos(1, max_positions), ncand(1, max_candidates);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  pinyinasr::HomophoneLattice lattice;
  for (std::size_t i = npos(rng); i > 0; --i) {
    auto pool = alphabet;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min(ncand(rng), pool.size()));
    auto& slot = lattice.positions.emplace_back();
    for (const auto& ch : pool) slot.push_back({ch, unit(rng) < 0.3 ? std::log10(0.5) : std::log10(unit(rng) + 1e-3)});
  }
  return lattice;
}

/// Character LM over `alphabet` trained on random strings.
inline pinyinasr::NGramModel random_char_lm(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                                            int order) {
  std::uniform_int_distribution<std::size_t> len(2, 8), pick(0, alphabet.size() - 1);
  std::vector<std::vector<std::string>> corpus(12);
  for (auto& s : corpus)
    for (std::size_t i = len(rng); i > 0; --i) s.push_back(alphabet[pick(rng)]);
  pinyinasr::TrainOptions opts;
  opts.order = order;
  opts.discount = std::uniform_real_distribution<double>(0.3, 0.9)(rng);
  opts.vocabulary = alphabet;
  return pinyinasr::train(corpus, opts);
}

inline const std::vector<std::string>& hanzi_alphabet() {
  static const std::vector<std::string> a = {"一", "二", "三", "四", "五", "六", "七", "八",
                                             "九", "十", "百", "千", "万", "亿", "上", "下"};
  return a;
}

/// Recount without the grouper: for each distinct key, rescan the corpus.
inline pinyinasr::MappingStats naive_mapping_stats(const pinyinasr::ParallelCorpus& corpus, int n, bool tonal) {
  std::set<std::string> keys;
  auto key_at = [&](const pinyinasr::ParallelPair& p, std::size_t i) {
    std::string k;
    for (int j = 0; j < n; ++j) k += (tonal ? p.pinyin[i + j] : p.pinyin[i + j].toneless()).str() + " ";
    return k;
  };
  for (const auto& p : corpus.pairs)
    for (std::size_t i = 0; i + n <= p.pinyin.size(); ++i) keys.insert(key_at(p, i));
  pinyinasr::MappingStats s;
  s.n = n;
  std::size_t unique = 0;
  for (const auto& k : keys) {
    std::set<std::string> hanzi;
    for (const auto& p : corpus.pairs) {
      const auto chars = *pinyinasr::utf8::split_chars(p.hanzi);
      for (std::size_t i = 0; i + n <= p.pinyin.size(); ++i) {
        if (key_at(p, i) != k) continue;
        std::string h;
        for (int j = 0; j < n; ++j) h += chars[i + j];
        hanzi.insert(h);
      }
    }
    s.realizations += hanzi.size();
    s.maximum = std::max(s.maximum, hanzi.size());
    if (hanzi.size() == 1) ++unique;
  }
  s.keys = keys.size();
  if (s.keys) {
    s.average = static_cast<double>(s.realizations) / static_cast<double>(s.keys);
    s.pct_unique = 100.0 * static_cast<double>(unique) / static_cast<double>(s.keys);
  }
  return s;
}

/// Full-matrix Levenshtein, kept separate from the library code.
inline std::size_t reference_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
  return d[a.size()][b.size()];
}

}  // namespace testing
