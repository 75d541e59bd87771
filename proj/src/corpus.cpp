#include "pinyinasr/corpus.hpp"

#include "pinyinasr/errors.hpp"
#include "pinyinasr/utf8.hpp"

namespace pinyinasr {

std::optional<std::string> normalize_sentence(std::string_view line) {
  auto cps = utf8::decode(line);
  if (!cps) return std::nullopt;
  std::u32string kept;
  for (char32_t cp : *cps) {
    if (utf8::is_space(cp) || utf8::is_punctuation(cp)) continue;
    kept.push_back(cp);
  }
  return utf8::encode(kept);
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> filter_sentences(std::span<const std::string> lines, LengthBounds bounds,
                                          const std::unordered_set<std::string>& exclusion,
                                          FilterReport* report) {
  if (bounds.min_len < 1 || bounds.max_len < bounds.min_len)
    throw ConfigError("length bounds require 1 <= min <= max");

  std::unordered_set<std::string> excluded;
  for (const auto& e : exclusion)
    if (auto n = normalize_sentence(e)) excluded.insert(*n);

  FilterReport local;
  FilterReport& rep = report ? *report : local;
  rep = {};
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& line : lines) {
    auto norm = normalize_sentence(line);
    if (!norm) {
      ++rep.malformed;
      continue;
    }
    const std::size_t len = utf8::decode(*norm)->size();
    if (len < bounds.min_len) {
      ++rep.too_short;
    } else if (len > bounds.max_len) {
      ++rep.too_long;
    } else if (excluded.contains(*norm)) {
      ++rep.excluded;
    } else if (!seen.insert(*norm).second) {
      ++rep.duplicates;
    } else {
      out.push_back(std::move(*norm));
    }
  }
  rep.kept = out.size();
  return out;
}

std::vector<std::string> filter_sentences(std::istream& in, LengthBounds bounds,
                                          const std::unordered_set<std::string>& exclusion,
                                          FilterReport* report) {
  const auto lines = read_lines(in);
  return filter_sentences(lines, bounds, exclusion, report);
}

ParallelCorpus build_parallel(std::span<const std::string> sentences,
                              const PronunciationLexicon& lex, std::string source_tag) {
  ParallelCorpus corpus;
  corpus.source_tag = std::move(source_tag);
  for (const auto& s : sentences) {
    try {
      corpus.pairs.push_back({s, lex.to_pinyin(s)});
    } catch (const UnknownCharacter&) {
      ++corpus.skipped;
    }
  }
  return corpus;
}

void write_parallel_tsv(std::ostream& out, const ParallelCorpus& corpus) {
  for (const auto& p : corpus.pairs) out << p.hanzi << '\t' << join(p.pinyin) << '\n';
}

ParallelCorpus read_parallel_tsv(std::istream& in, const SyllableInventory& inv,
                                 std::string source_tag) {
  ParallelCorpus corpus;
  corpus.source_tag = std::move(source_tag);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(corpus.source_tag, lineno, "expected hanzi<TAB>pinyin");
    ParallelPair pair;
    pair.hanzi = line.substr(0, tab);
    try {
      pair.pinyin = inv.parse_sequence(std::string_view(line).substr(tab + 1), true);
    } catch (const Error& e) {
      throw DataError(corpus.source_tag, lineno, e.what());
    }
    auto chars = utf8::decode(pair.hanzi);
    if (!chars || chars->size() != pair.pinyin.size())
      throw DataError(corpus.source_tag, lineno, "pinyin length differs from character count");
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

}  // namespace pinyinasr
