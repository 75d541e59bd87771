#include "pinyinasr/assets.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "pinyinasr/corpus.hpp"
#include "pinyinasr/errors.hpp"
#include "pinyinasr/lexicon.hpp"
#include "pinyinasr/syllable.hpp"

namespace pinyinasr {

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

AssetManifest AssetManifest::load(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError(manifest_path.string(), 0, "cannot open manifest");
  AssetManifest m;
  m.root = manifest_path.parent_path();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    ManifestEntry e;
    std::string count;
    if (!std::getline(fields, e.path, '\t') || !std::getline(fields, e.hash, '\t') ||
        !std::getline(fields, count))
      throw DataError(manifest_path.string(), lineno, "expected path<TAB>hash<TAB>count");
    try {
      e.count = std::stoul(count);
    } catch (const std::exception&) {
      throw DataError(manifest_path.string(), lineno, "bad record count");
    }
    m.files.push_back(std::move(e));
  }
  return m;
}

std::size_t count_records(const std::filesystem::path& path) {
  const auto name = path.filename().string();
  if (name == "inventory.txt") return SyllableInventory::load(path).tonal_units().size();
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (path.extension() == ".tsv" && name.find("lexicon") != std::string::npos) {
    std::set<std::string> chars;
    while (std::getline(in, line))
      if (!line.empty() && line.front() != '#') chars.insert(line.substr(0, line.find('\t')));
    return chars.size();
  }
  std::size_t n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

std::string render_manifest(const AssetManifest& manifest) {
  std::ostringstream out;
  out << "# path\tsha256\trecords\n";
  for (const auto& e : manifest.files) {
    const auto full = manifest.root / e.path;
    out << e.path << '\t' << sha256_file(full) << '\t' << count_records(full) << '\n';
  }
  return out.str();
}

ValidationReport validate_assets(const std::filesystem::path& manifest_path) {
  ValidationReport report;
  AssetManifest manifest;
  try {
    manifest = AssetManifest::load(manifest_path);
  } catch (const Error& e) {
    report.errors.push_back(e.what());
    return report;
  }

  std::filesystem::path inventory_path, lexicon_path;
  std::vector<std::filesystem::path> corpora;
  for (const auto& e : manifest.files) {
    const auto full = manifest.root / e.path;
    if (!std::filesystem::exists(full)) {
      report.errors.push_back(e.path + ": missing");
      continue;
    }
    const auto hash = sha256_file(full);
    if (hash != e.hash) report.errors.push_back(e.path + ": hash mismatch (manifest " + e.hash + ", file " + hash + ")");
    try {
      const auto n = count_records(full);
      if (n != e.count)
        report.errors.push_back(e.path + ": " + std::to_string(n) + " records, manifest says " +
                                std::to_string(e.count));
    } catch (const Error& err) {
      report.errors.push_back(err.what());
    }
    const auto name = full.filename().string();
    if (name == "inventory.txt") inventory_path = full;
    else if (name == "lexicon.tsv") lexicon_path = full;
    else if (full.extension() == ".txt") corpora.push_back(full);
  }

  if (inventory_path.empty() || lexicon_path.empty()) {
    report.errors.push_back("manifest must list inventory.txt and lexicon.tsv");
    return report;
  }

  std::optional<SyllableInventory> inv;
  try {
    inv = SyllableInventory::load(inventory_path);
  } catch (const Error& e) {
    report.errors.push_back(e.what());
    return report;
  }

  std::set<Syllable> image;
  for (const auto& s : inv->tonal_units()) image.insert(s.toneless());
  const std::set<Syllable> toneless(inv->toneless_units().begin(), inv->toneless_units().end());
  if (image != toneless) report.errors.push_back("toneless units are not the tone-stripped image of the tonal units");

  report.notes.push_back("tonal units: " + std::to_string(inv->tonal_units().size()) +
                         " (reference large-corpus inventory: 2020)");
  report.notes.push_back("toneless units: " + std::to_string(inv->toneless_units().size()) +
                         " (reference large-corpus inventory: 408)");

  std::optional<PronunciationLexicon> lex;
  try {
    lex = PronunciationLexicon::load(lexicon_path, *inv);
  } catch (const Error& e) {
    report.errors.push_back(e.what());
    return report;
  }
  report.notes.push_back("lexicon characters: " + std::to_string(lex->size()) +
                         " (reference large-corpus character units: 4333)");

  std::size_t uncovered = 0;
  for (const auto& s : inv->tonal_units())
    if (lex->homophones(s).empty()) ++uncovered;
  if (uncovered > 0)
    report.notes.push_back(std::to_string(uncovered) + " tonal units have no lexicon character");

  for (const auto& path : corpora) {
    std::ifstream in(path);
    std::size_t lineno = 0;
    for (const auto& line : read_lines(in)) {
      ++lineno;
      auto norm = normalize_sentence(line);
      if (!norm) {
        report.errors.push_back(path.string() + ":" + std::to_string(lineno) + ": invalid UTF-8");
        continue;
      }
      try {
        lex->to_pinyin(*norm);
      } catch (const UnknownCharacter& e) {
        report.errors.push_back(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  return report;
}

}  // namespace pinyinasr
