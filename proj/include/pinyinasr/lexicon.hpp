#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pinyinasr/syllable.hpp"

namespace pinyinasr {

struct Reading {
  Syllable syllable;
  double weight;  // relative frequency, > 0
};

/// A character read as some syllable, with the channel probability
/// P(syllable | character) derived from the reading weights.
struct Homophone {
  std::string character;
  double probability;
};

/// Hanzi -> readings, plus the reverse (syllable -> characters) index
/// the transcriber searches over.
class PronunciationLexicon {
 public:
  static PronunciationLexicon load(const std::filesystem::path& path, const SyllableInventory& inv);
  static PronunciationLexicon parse(std::istream& in, const SyllableInventory& inv,
                                    const std::string& source = "<stream>");

  /// Readings sorted by descending weight, ties by syllable text. nullptr if absent.
  const std::vector<Reading>* find(std::string_view character) const;
  const std::map<std::string, std::vector<Reading>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Most frequent reading per character (the heteronym policy).
  Syllable primary_reading(std::string_view character) const;

  /// One syllable per character. Throws UnknownCharacter.
  std::vector<Syllable> to_pinyin(std::string_view sentence) const;

  /// Characters with a reading equal to `s` (tonal) or stripping to `s`
  /// (toneless), sorted by character. Empty if none.
  const std::vector<Homophone>& homophones(const Syllable& s) const;

 private:
  void index();

  std::map<std::string, std::vector<Reading>> entries_;
  std::unordered_map<Syllable, std::vector<Homophone>, SyllableHash> by_syllable_;
};

inline std::vector<Syllable> hanzi_to_pinyin(std::string_view sentence,
                                             const PronunciationLexicon& lex) {
  return lex.to_pinyin(sentence);
}

}  // namespace pinyinasr
