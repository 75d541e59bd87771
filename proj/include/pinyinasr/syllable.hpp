#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pinyinasr {

/// Orthographic onset. y and w are kept as initials so that rendering
/// round-trips ("yi" is y + i, not a bare final).
enum class Initial : std::uint8_t {
  None, B, P, M, F, D, T, N, L, G, K, H, J, Q, X, Zh, Ch, Sh, R, Z, C, S, Y, W
};

/// Orthographic rime. V stands for u-umlaut (lv, nve).
enum class Rime : std::uint8_t {
  A, O, E, I, U, V, Ai, Ei, Ao, Ou, An, En, Ang, Eng, Ong, Er,
  Ia, Ie, Iao, Iu, Ian, In, Iang, Ing, Iong,
  Ua, Uo, Uai, Ui, Uan, Un, Uang, Ue, Ve
};

std::string_view to_string(Initial initial);
std::string_view to_string(Rime rime);

/// A pinyin unit: initial + rime + optional tone (1-4, 5 = neutral).
/// A syllable without a tone is a toneless unit.
class Syllable {
 public:
  static constexpr int kNeutralTone = 5;

  constexpr Syllable(Initial initial, Rime rime, int tone = 0)
      : initial_(initial), rime_(rime), tone_(static_cast<std::uint8_t>(tone)) {}

  Initial initial() const { return initial_; }
  Rime rime() const { return rime_; }
  /// 0 when toneless.
  int tone() const { return tone_; }
  bool has_tone() const { return tone_ != 0; }

  Syllable toneless() const { return {initial_, rime_, 0}; }
  Syllable with_tone(int tone) const { return {initial_, rime_, tone}; }

  /// Canonical lowercase rendering, e.g. "zhong1", "lv4", "ma".
  std::string str() const;

  /// Splits romanized text into initial/rime/tone without consulting an
  /// inventory. Throws InvalidTone for a digit outside 1-5 and
  /// InvalidSyllable for text that is not initial + rime.
  static Syllable split(std::string_view text);

  friend auto operator<=>(const Syllable&, const Syllable&) = default;

 private:
  Initial initial_;
  Rime rime_;
  std::uint8_t tone_;
};

inline Syllable strip_tone(const Syllable& s) { return s.toneless(); }
std::vector<Syllable> strip_tones(const std::vector<Syllable>& seq);

struct SyllableHash {
  std::size_t operator()(const Syllable& s) const noexcept {
    return (static_cast<std::size_t>(s.initial()) << 16) ^
           (static_cast<std::size_t>(s.rime()) << 8) ^
           static_cast<std::size_t>(s.tone());
  }
};

std::string join(const std::vector<Syllable>& seq, char sep = ' ');

/// The set of valid units. Loaded from a data file of tonal syllables;
/// the toneless set is derived by stripping.
class SyllableInventory {
 public:
  static SyllableInventory load(const std::filesystem::path& path);
  static SyllableInventory parse(std::istream& in, const std::string& source = "<stream>");
  static SyllableInventory from_units(std::vector<Syllable> tonal, std::string version = "inline");

  /// Sorted by canonical rendering.
  const std::vector<Syllable>& tonal_units() const { return tonal_; }
  const std::vector<Syllable>& toneless_units() const { return toneless_; }
  const std::vector<Syllable>& units(bool tonal) const { return tonal ? tonal_ : toneless_; }
  const std::string& version() const { return version_; }

  bool contains(const Syllable& s) const;

  /// Requires a tone digit. InvalidTone if missing or outside 1-5,
  /// InvalidSyllable if not in the inventory.
  Syllable parse_tonal(std::string_view text) const;
  /// Rejects a tone digit.
  Syllable parse_toneless(std::string_view text) const;
  Syllable parse_unit(std::string_view text, bool tonal) const {
    return tonal ? parse_tonal(text) : parse_toneless(text);
  }
  std::vector<Syllable> parse_sequence(std::string_view text, bool tonal) const;

 private:
  std::vector<Syllable> tonal_;
  std::vector<Syllable> toneless_;
  std::unordered_map<Syllable, std::size_t, SyllableHash> index_;
  std::string version_;
};

}  // namespace pinyinasr
