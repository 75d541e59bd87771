#include "pinyinasr/syllable.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "pinyinasr/assets.hpp"
#include "pinyinasr/errors.hpp"

namespace pinyinasr {
namespace {

constexpr std::array<std::string_view, 24> kInitials = {
    "", "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h",
    "j", "q", "x", "zh", "ch", "sh", "r", "z", "c", "s", "y", "w"};

constexpr std::array<std::string_view, 34> kRimes = {
    "a",  "o",   "e",    "i",   "u",   "v",   "ai",   "ei",  "ao",
    "ou", "an",  "en",   "ang", "eng", "ong", "er",   "ia",  "ie",
    "iao", "iu", "ian",  "in",  "iang", "ing", "iong", "ua", "uo",
    "uai", "ui", "uan",  "un",  "uang", "ue",  "ve"};

std::optional<Rime> find_rime(std::string_view text) {
  for (std::size_t i = 0; i < kRimes.size(); ++i)
    if (kRimes[i] == text) return static_cast<Rime>(i);
  return std::nullopt;
}

}  // namespace

std::string_view to_string(Initial initial) {
  return kInitials[static_cast<std::size_t>(initial)];
}

std::string_view to_string(Rime rime) { return kRimes[static_cast<std::size_t>(rime)]; }

std::string Syllable::str() const {
  std::string out(to_string(initial_));
  out += to_string(rime_);
  if (tone_ != 0) out += static_cast<char>('0' + tone_);
  return out;
}

Syllable Syllable::split(std::string_view text) {
  std::string lower;
  lower.reserve(text.size());
  for (char ch : text) {
    if (static_cast<unsigned char>(ch) >= 0x80)
      throw InvalidSyllable("non-ASCII syllable '" + std::string(text) + "'");
    lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  if (lower.empty()) throw InvalidSyllable("empty syllable");

  int tone = 0;
  if (std::isdigit(static_cast<unsigned char>(lower.back()))) {
    tone = lower.back() - '0';
    if (tone < 1 || tone > 5)
      throw InvalidTone("tone digit outside 1-5 in '" + std::string(text) + "'");
    lower.pop_back();
  }
  std::string_view body = lower;

  // Longest initial first so zh/ch/sh win over z/c/s.
  Initial initial = Initial::None;
  std::size_t best = 0;
  for (std::size_t i = 1; i < kInitials.size(); ++i) {
    const auto cand = kInitials[i];
    if (cand.size() > best && body.starts_with(cand)) {
      initial = static_cast<Initial>(i);
      best = cand.size();
    }
  }
  if (auto rime = find_rime(body.substr(best))) return Syllable(initial, *rime, tone);
  throw InvalidSyllable("not a pinyin syllable: '" + std::string(text) + "'");
}

std::vector<Syllable> strip_tones(const std::vector<Syllable>& seq) {
  std::vector<Syllable> out;
  out.reserve(seq.size());
  for (const auto& s : seq) out.push_back(s.toneless());
  return out;
}

std::string join(const std::vector<Syllable>& seq, char sep) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += sep;
    out += seq[i].str();
  }
  return out;
}

SyllableInventory SyllableInventory::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open inventory file");
  std::stringstream buf;
  buf << in.rdbuf();
  auto inv = parse(buf, path.string());
  inv.version_ = path.filename().string() + "@" + sha256_hex(buf.str()).substr(0, 12);
  return inv;
}

SyllableInventory SyllableInventory::parse(std::istream& in, const std::string& source) {
  std::vector<Syllable> units;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      auto s = Syllable::split(line);
      if (!s.has_tone()) throw InvalidTone("missing tone digit");
      if (s.str() != line) throw InvalidSyllable("not in canonical form");
      units.push_back(s);
    } catch (const Error& e) {
      throw DataError(source, lineno, e.what());
    }
  }
  return from_units(std::move(units), source);
}

SyllableInventory SyllableInventory::from_units(std::vector<Syllable> tonal, std::string version) {
  SyllableInventory inv;
  auto by_text = [](const Syllable& a, const Syllable& b) { return a.str() < b.str(); };
  std::sort(tonal.begin(), tonal.end(), by_text);
  tonal.erase(std::unique(tonal.begin(), tonal.end()), tonal.end());
  std::set<Syllable> toneless;
  for (const auto& s : tonal) toneless.insert(s.toneless());
  inv.tonal_ = std::move(tonal);
  inv.toneless_.assign(toneless.begin(), toneless.end());
  std::sort(inv.toneless_.begin(), inv.toneless_.end(), by_text);
  for (std::size_t i = 0; i < inv.tonal_.size(); ++i) inv.index_.emplace(inv.tonal_[i], i);
  for (std::size_t i = 0; i < inv.toneless_.size(); ++i) inv.index_.emplace(inv.toneless_[i], i);
  inv.version_ = std::move(version);
  return inv;
}

bool SyllableInventory::contains(const Syllable& s) const { return index_.contains(s); }

Syllable SyllableInventory::parse_tonal(std::string_view text) const {
  auto s = Syllable::split(text);
  if (!s.has_tone()) throw InvalidTone("missing tone digit in '" + std::string(text) + "'");
  if (!contains(s)) throw InvalidSyllable("'" + std::string(text) + "' is not in the inventory");
  return s;
}

Syllable SyllableInventory::parse_toneless(std::string_view text) const {
  auto s = Syllable::split(text);
  if (s.has_tone())
    throw InvalidTone("unexpected tone digit in toneless unit '" + std::string(text) + "'");
  if (!contains(s)) throw InvalidSyllable("'" + std::string(text) + "' is not in the inventory");
  return s;
}

std::vector<Syllable> SyllableInventory::parse_sequence(std::string_view text, bool tonal) const {
  std::vector<Syllable> out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) out.push_back(parse_unit(tok, tonal));
  return out;
}

}  // namespace pinyinasr
