#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pinyinasr {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  std::string hash;  // SHA-256, hex
  std::size_t count = 0;
};

/// `path<TAB>hash<TAB>count` per line; '#' starts a comment.
struct AssetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> files;

  static AssetManifest load(const std::filesystem::path& manifest_path);
};

/// What a record count means depends on the file kind, inferred from the
/// name: inventory.txt counts tonal units, *.tsv lexicons count characters,
/// corpus text files count non-empty lines.
std::size_t count_records(const std::filesystem::path& path);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> notes;
  bool ok() const { return errors.empty(); }
};

/// Checks hashes and counts, inventory closure of the lexicon, tone-strip
/// surjectivity and lexicon coverage of the bundled corpora.
ValidationReport validate_assets(const std::filesystem::path& manifest_path);

/// Rebuilds a manifest for the files listed in an existing one.
std::string render_manifest(const AssetManifest& manifest);

}  // namespace pinyinasr
