#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pinyinasr/assets.hpp"
#include "support.hpp"

using namespace pinyinasr;
namespace fs = std::filesystem;

namespace {

fs::path copy_data(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pinyinasr_assets_" + name);
  fs::remove_all(dir);
  fs::copy(PINYINASR_DATA_DIR, dir, fs::copy_options::recursive);
  return dir;
}

bool mentions(const ValidationReport& r, const std::string& needle) {
  for (const auto& e : r.errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("data_assets") {

TEST_CASE("pristine checkout validates") {
  const auto report = validate_assets(testing::data_path("manifest.tsv"));
  for (const auto& e : report.errors) MESSAGE(e);
  CHECK(report.ok());
  bool reference_counts = false;
  for (const auto& n : report.notes) reference_counts |= n.find("2020") != std::string::npos;
  CHECK(reference_counts);
}

TEST_CASE("manifest counts match the parsed files") {
  const auto m = AssetManifest::load(testing::data_path("manifest.tsv"));
  for (const auto& e : m.files) {
    if (e.path == "inventory.txt") CHECK(e.count == testing::inventory().tonal_units().size());
    if (e.path == "lexicon.tsv") CHECK(e.count == testing::lexicon().size());
  }
  CHECK(render_manifest(m) == read_file(testing::data_path("manifest.tsv")));
}

TEST_CASE("corrupted lexicon line is reported with file and line") {
  const auto dir = copy_data("corrupt");
  auto text = read_file(dir / "lexicon.tsv");
  const auto first = text.find('\n');
  const auto second = text.find('\n', first + 1);
  text.replace(first + 1, second - first - 1, "坏\tnotasyllable9\t1");
  write_file_atomic(dir / "lexicon.tsv", text);
  const auto report = validate_assets(dir / "manifest.tsv");
  CHECK_FALSE(report.ok());
  CHECK(mentions(report, "lexicon.tsv: hash mismatch"));
  CHECK(mentions(report, "lexicon.tsv:2"));
  fs::remove_all(dir);
}

TEST_CASE("uncovered corpus character and missing file") {
  const auto dir = copy_data("uncovered");
  {
    std::ofstream out(dir / "corpus/toy.txt", std::ios::app);
    out << "这是\xF0\x9F\x98\x80\n";
  }
  fs::remove(dir / "corpus/eval.txt");
  const auto report = validate_assets(dir / "manifest.tsv");
  CHECK(mentions(report, "toy.txt:21"));
  CHECK(mentions(report, "corpus/eval.txt: missing"));
  fs::remove_all(dir);
}

TEST_CASE("atomic writes replace the whole file") {
  const auto path = fs::temp_directory_path() / "pinyinasr_atomic.txt";
  write_file_atomic(path, "first version\n");
  write_file_atomic(path, "second\n");
  CHECK(read_file(path) == "second\n");
  for (const auto& entry : fs::directory_iterator(fs::temp_directory_path()))
    CHECK(entry.path().filename().string().find("pinyinasr_atomic.txt.tmp") == std::string::npos);
  fs::remove(path);
}

}
