#include "pinyinasr/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "pinyinasr/errors.hpp"
#include "pinyinasr/utf8.hpp"

namespace pinyinasr {

PronunciationLexicon PronunciationLexicon::load(const std::filesystem::path& path,
                                                const SyllableInventory& inv) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open lexicon file");
  return parse(in, inv, path.string());
}

PronunciationLexicon PronunciationLexicon::parse(std::istream& in, const SyllableInventory& inv,
                                                 const std::string& source) {
  PronunciationLexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos || line.find('\t', tab2 + 1) != std::string::npos)
      throw DataError(source, lineno, "expected character<TAB>syllable<TAB>weight");
    const std::string character = line.substr(0, tab1);
    const std::string syl = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string weight_text = line.substr(tab2 + 1);

    auto cps = utf8::decode(character);
    if (!cps || cps->size() != 1)
      throw DataError(source, lineno, "first column must be a single character");

    Syllable reading = Syllable(Initial::None, Rime::A);
    try {
      reading = inv.parse_tonal(syl);
    } catch (const Error& e) {
      throw DataError(source, lineno, e.what());
    }

    double weight = 0.0;
    auto [ptr, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
    if (ec != std::errc{} || ptr != weight_text.data() + weight_text.size() ||
        !std::isfinite(weight) || weight <= 0.0)
      throw DataError(source, lineno, "weight must be a positive number");

    auto& readings = lex.entries_[character];
    for (auto& r : readings) {
      if (r.syllable == reading)
        throw DataError(source, lineno, "duplicate reading " + syl + " for " + character);
    }
    readings.push_back({reading, weight});
  }

  for (auto& [ch, readings] : lex.entries_) {
    std::sort(readings.begin(), readings.end(), [](const Reading& a, const Reading& b) {
      if (a.weight != b.weight) return a.weight > b.weight;
      return a.syllable.str() < b.syllable.str();
    });
  }
  lex.index();
  return lex;
}

void PronunciationLexicon::index() {
  for (const auto& [ch, readings] : entries_) {
    double total = 0.0;
    for (const auto& r : readings) total += r.weight;
    std::unordered_map<Syllable, double, SyllableHash> toneless;
    for (const auto& r : readings) {
      by_syllable_[r.syllable].push_back({ch, r.weight / total});
      toneless[r.syllable.toneless()] += r.weight;
    }
    for (const auto& [s, w] : toneless) by_syllable_[s].push_back({ch, w / total});
  }
  // entries_ is ordered, so each list is already sorted by character.
}

const std::vector<Reading>* PronunciationLexicon::find(std::string_view character) const {
  auto it = entries_.find(std::string(character));
  return it == entries_.end() ? nullptr : &it->second;
}

Syllable PronunciationLexicon::primary_reading(std::string_view character) const {
  const auto* readings = find(character);
  if (!readings) throw UnknownCharacter(std::string(character), 0);
  return readings->front().syllable;
}

std::vector<Syllable> PronunciationLexicon::to_pinyin(std::string_view sentence) const {
  auto chars = utf8::split_chars(sentence);
  if (!chars) throw Error("sentence is not valid UTF-8");
  std::vector<Syllable> out;
  out.reserve(chars->size());
  for (std::size_t i = 0; i < chars->size(); ++i) {
    const auto* readings = find((*chars)[i]);
    if (!readings) throw UnknownCharacter((*chars)[i], i);
    out.push_back(readings->front().syllable);
  }
  return out;
}

const std::vector<Homophone>& PronunciationLexicon::homophones(const Syllable& s) const {
  static const std::vector<Homophone> kNone;
  auto it = by_syllable_.find(s);
  return it == by_syllable_.end() ? kNone : it->second;
}

}  // namespace pinyinasr
