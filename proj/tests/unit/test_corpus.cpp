#include <random>
#include <sstream>

#include "doctest.h"
#include "pinyinasr/corpus.hpp"
#include "pinyinasr/errors.hpp"
#include "pinyinasr/utf8.hpp"
#include "support.hpp"

using namespace pinyinasr;
using testing::lexicon;

namespace {

std::string hanzi(std::size_t n, std::size_t offset = 0) {
  static const std::vector<std::string> pool = {"我", "们", "你", "他", "天", "气", "很", "好", "中", "国"};
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += pool[(i + offset) % pool.size()];
  return s;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("length bounds are inclusive") {
  const std::vector<std::string> lines = {hanzi(3), hanzi(5), hanzi(40), hanzi(41)};
  FilterReport rep;
  const auto kept = filter_sentences(lines, {5, 40}, {}, &rep);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == hanzi(5));
  CHECK(kept[1] == hanzi(40));
  CHECK(rep.too_short == 1);
  CHECK(rep.too_long == 1);
}

TEST_CASE("exclusion set, duplicates, and order") {
  const std::vector<std::string> lines = {hanzi(6, 1), hanzi(6, 2), hanzi(6, 1), hanzi(6, 3)};
  FilterReport rep;
  const auto kept = filter_sentences(lines, {5, 40}, {hanzi(6, 2) + "。"}, &rep);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == hanzi(6, 1));
  CHECK(kept[1] == hanzi(6, 3));
  CHECK(rep.excluded == 1);
  CHECK(rep.duplicates == 1);
}

TEST_CASE("normalization drops whitespace and punctuation before counting") {
  CHECK(normalize_sentence(" 今天，天气 很好！").value() == "今天天气很好");
  CHECK(normalize_sentence("“你好”。").value() == "你好");
  CHECK_FALSE(normalize_sentence("\xff\xfe").has_value());
  // four characters plus punctuation stays below a bound of 5
  const std::vector<std::string> lines = {"今天，好吗？", "\xff\xfe"};
  FilterReport rep;
  CHECK(filter_sentences(lines, {5, 40}, {}, &rep).empty());
  CHECK(rep.too_short == 1);
  CHECK(rep.malformed == 1);
}

TEST_CASE("filtering is idempotent") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> len(0, 50), off(0, 9), dup(0, 4);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::string> lines;
    for (int i = 0; i < 40; ++i) {
      auto s = hanzi(len(rng), off(rng));
      if (dup(rng) == 0) s += "，";
      lines.push_back(s);
      if (dup(rng) == 0) lines.push_back(s);
    }
    const auto once = filter_sentences(lines, {5, 40});
    CHECK(filter_sentences(once, {5, 40}) == once);
    for (const auto& s : once) {
      const auto n = utf8::split_chars(s)->size();
      CHECK((n >= 5 && n <= 40));
    }
  }
}

TEST_CASE("build_parallel") {
  const std::vector<std::string> one = {"中国"};
  const auto pc = build_parallel(one, lexicon());
  REQUIRE(pc.pairs.size() == 1);
  CHECK(pc.pairs[0].hanzi == "中国");
  CHECK(join(pc.pairs[0].pinyin) == "zhong1 guo2");

  CHECK(build_parallel(std::vector<std::string>{}, lexicon()).pairs.empty());

  const std::vector<std::string> mixed = {"中国", "中\xF0\x9F\x98\x80"};
  const auto pm = build_parallel(mixed, lexicon());
  CHECK(pm.pairs.size() == 1);
  CHECK(pm.skipped == 1);
}

TEST_CASE("parallel pairs keep pinyin length equal to character count") {
  std::ifstream in(testing::data_path("corpus/train.txt"));
  const auto pc = build_parallel(filter_sentences(in, {5, 40}), lexicon(), "train");
  CHECK(pc.skipped == 0);
  CHECK(pc.pairs.size() > 500);
  for (const auto& p : pc.pairs) CHECK(utf8::split_chars(p.hanzi)->size() == p.pinyin.size());
}

TEST_CASE("parallel TSV round trip") {
  const std::vector<std::string> s = {"今天天气很好", "我们一起去公园散步吧"};
  const auto pc = build_parallel(s, lexicon(), "x");
  std::stringstream buf;
  write_parallel_tsv(buf, pc);
  const auto back = read_parallel_tsv(buf, testing::inventory(), "x");
  REQUIRE(back.pairs.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.pairs[i].hanzi == pc.pairs[i].hanzi);
    CHECK(back.pairs[i].pinyin == pc.pairs[i].pinyin);
  }
  std::istringstream bad("中国\tzhong1\n");
  CHECK_THROWS_AS(read_parallel_tsv(bad, testing::inventory(), "bad.tsv"), DataError);
}

TEST_CASE("bundled train and eval corpora are disjoint after normalization") {
  std::ifstream tr(testing::data_path("corpus/train.txt"));
  std::ifstream ev(testing::data_path("corpus/eval.txt"));
  const auto train = filter_sentences(tr, {1, 1000});
  const auto eval = filter_sentences(ev, {1, 1000});
  const std::unordered_set<std::string> eval_set(eval.begin(), eval.end());
  for (const auto& s : train) CHECK_FALSE(eval_set.contains(s));
}

}
