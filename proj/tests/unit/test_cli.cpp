#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pinyinasr/assets.hpp"
#include "pinyinasr/ngram.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;  // stdout and stderr
};

Run cli(const std::string& args) {
  const std::string cmd = std::string("\"") + PINYINASR_CLI + "\" " + args + " 2>&1";
  Run r{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pinyinasr_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists every subcommand") {
  const auto r = cli("--help");
  CHECK(r.code == 0);
  for (const char* sub : {"pipeline", "train-lm", "decode", "transcribe", "stats", "score", "synth", "validate-assets"})
    CHECK(contains(r.out, sub));
  const auto train = cli("train-lm --help");
  CHECK(train.code == 0);
  CHECK(contains(train.out, "--order"));
  CHECK(contains(train.out, "--discount"));
  const auto pipe = cli("pipeline --help");
  CHECK(contains(pipe.out, "--config"));
  CHECK(contains(pipe.out, "--set"));
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("no-such-command").code == 2);
  CHECK(cli("train-lm").code == 2);
  CHECK(cli("score --unit syllable a b").code == 2);
}

TEST_CASE("pipeline on the clean suite") {
  const auto dir = scratch("pipeline");
  const auto r = cli("pipeline -c " + testing::data_path("configs/clean.conf") + " -o " + dir.string());
  CHECK(r.code == 0);
  CHECK(contains(r.out, "cer\t0.0000"));
  const auto report = pinyinasr::read_file(dir / "report.tsv");
  CHECK(contains(report, "config_hash"));
  CHECK(contains(report, "uer\t0.0000"));
  CHECK(fs::exists(dir / "utterances.jsonl"));
  CHECK(fs::exists(dir / "hyps.tsv"));
}

TEST_CASE("pipeline config errors exit 2 with the offending path") {
  const auto r = cli("pipeline -c " + testing::data_path("configs/clean.conf") + " -s lexicon=/missing/lex.tsv -o " +
                     scratch("bad").string());
  CHECK(r.code == 2);
  CHECK(contains(r.out, "/missing/lex.tsv"));
  CHECK(cli("pipeline -c /missing/config.conf").code == 2);
  CHECK(cli("pipeline -c " + testing::data_path("configs/clean.conf") + " -s beam=0").code == 2);
}

TEST_CASE("pipeline stage errors exit 1") {
  const auto dir = scratch("stage");
  pinyinasr::write_file_atomic(dir / "utt0001.emis", "1 1 1\nnot_a_unit\n-inf 0\n");
  const auto r = cli("pipeline -c " + testing::data_path("configs/noisy.conf") + " -s emissions_dir=" + dir.string() +
                     " -s max_utterances=1 -o " + (dir / "out").string());
  CHECK(r.code == 1);
  CHECK(contains(r.out, "decode"));
  CHECK(contains(r.out, "utt0001"));
}

TEST_CASE("train-lm writes a deterministic ARPA that round-trips") {
  const auto dir = scratch("train");
  const auto toy = testing::data_path("corpus/toy.txt");
  const auto a = cli("train-lm " + toy + " -n 2 -o " + (dir / "a.arpa").string());
  CHECK(a.code == 0);
  CHECK(contains(a.out, "ngram 2"));
  CHECK(cli("train-lm " + toy + " -n 2 -o " + (dir / "b.arpa").string()).code == 0);
  const auto text = pinyinasr::read_file(dir / "a.arpa");
  CHECK(text == pinyinasr::read_file(dir / "b.arpa"));
  std::istringstream in(text);
  const auto m = pinyinasr::read_arpa(in);
  CHECK(m.order() == 2);
  std::ostringstream again;
  pinyinasr::write_arpa(m, again);
  CHECK(again.str() == text);

  CHECK(cli("train-lm " + toy + " -n 0 -o " + (dir / "c.arpa").string()).code == 2);
  CHECK(cli("train-lm " + toy + " -d 1.5 -o " + (dir / "c.arpa").string()).code == 2);
  const auto empty = dir / "empty.txt";
  pinyinasr::write_file_atomic(empty, "\n");
  CHECK(cli("train-lm " + empty.string() + " -o " + (dir / "c.arpa").string()).code == 1);
  CHECK(cli("train-lm " + toy + " --units pinyin -n 2 -o " + (dir / "p.arpa").string()).code == 0);
}

TEST_CASE("stats reproduces the fixture") {
  const auto toy = testing::data_path("corpus/toy.txt");
  const auto r = cli("stats " + toy + " -n 6");
  CHECK(r.code == 0);
  CHECK(r.out == pinyinasr::read_file(testing::fixture_path("toy_stats.tsv")));
  const auto one = cli("stats " + toy + " -n 1");
  CHECK(testing::words(one.out).size() == 7 * 2);
  const auto table = cli("stats " + toy + " -n 2 --table");
  CHECK(contains(table.out, "2-gram"));
  CHECK(cli("stats " + toy + " -n 0").code == 2);
}

TEST_CASE("synth, decode, transcribe and score chain together") {
  const auto dir = scratch("chain");
  pinyinasr::write_file_atomic(dir / "ref.txt", "今天天气很好\n我们应该保护环境\n");
  CHECK(cli("synth " + (dir / "ref.txt").string() + " --hanzi -o " + (dir / "emis").string()).code == 0);
  CHECK(fs::exists(dir / "emis/utt0002.emis"));

  const auto dec = cli("decode " + (dir / "emis/utt0001.emis").string() + " " + (dir / "emis/utt0002.emis").string());
  CHECK(dec.code == 0);
  CHECK(contains(dec.out, "utt0001\tjin1 tian1 tian1 qi4 hen3 hao3\t"));
  const auto greedy = cli("decode --greedy " + (dir / "emis/utt0002.emis").string());
  CHECK(contains(greedy.out, "wo3 men5 ying1 gai1 bao3 hu4 huan2 jing4"));

  CHECK(cli("train-lm " + testing::data_path("corpus/train.txt") + " -n 3 -o " + (dir / "char.arpa").string()).code == 0);
  pinyinasr::write_file_atomic(dir / "py.txt", "jin1 tian1 tian1 qi4 hen3 hao3\nwo3 men5 ying1 gai1 bao3 hu4 huan2 jing4\n");
  const auto tr = cli("transcribe " + (dir / "py.txt").string() + " --lm " + (dir / "char.arpa").string());
  CHECK(tr.code == 0);
  CHECK(contains(tr.out, "今天天气很好\t"));
  CHECK(contains(tr.out, "我们应该保护环境\t"));
  CHECK(cli("transcribe " + (dir / "py.txt").string() + " --toneless --lm " + (dir / "char.arpa").string()).code == 1);

  pinyinasr::write_file_atomic(dir / "hyp.txt", "今天天汽很好\n我们应该保护环境\n");
  const auto sc = cli("score " + (dir / "ref.txt").string() + " " + (dir / "hyp.txt").string() + " --detail " +
                      (dir / "detail.jsonl").string());
  CHECK(sc.code == 0);
  CHECK(contains(sc.out, "cer\t7.1429\t1\t0\t0\t14"));
  CHECK(fs::exists(dir / "detail.jsonl"));
  pinyinasr::write_file_atomic(dir / "short.txt", "今天\n");
  CHECK(cli("score " + (dir / "ref.txt").string() + " " + (dir / "short.txt").string()).code == 1);
}

TEST_CASE("score strips tones on request") {
  const auto dir = scratch("tones");
  pinyinasr::write_file_atomic(dir / "r.txt", "ma1 shi4\n");
  pinyinasr::write_file_atomic(dir / "h.txt", "ma3 shi4\n");
  const auto r = (dir / "r.txt").string(), h = (dir / "h.txt").string();
  CHECK(contains(cli("score --unit token " + r + " " + h).out, "uer\t50.0000"));
  CHECK(contains(cli("score --unit token --strip-tones " + r + " " + h).out, "uer_tone_stripped\t0.0000"));
  CHECK(cli("score --strip-tones " + r + " " + h).code == 2);
}

TEST_CASE("validate-assets") {
  const auto r = cli("validate-assets " + testing::data_path("manifest.tsv"));
  CHECK(r.code == 0);
  CHECK(contains(r.out, "assets ok"));
  CHECK(contains(r.out, "408"));
  CHECK(cli("validate-assets /missing/manifest.tsv").code == 1);
}

}
