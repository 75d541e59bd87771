#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pinyinasr/errors.hpp"
#include "support.hpp"

using namespace pinyinasr;

namespace {

EmissionMatrix from_probs(std::vector<std::string> labels, const std::vector<std::vector<double>>& rows) {
  std::vector<double> data;
  for (const auto& r : rows)
    for (double p : r) data.push_back(p > 0.0 ? std::log10(p) : kLogZero);
  const std::size_t blank = labels.size();
  return EmissionMatrix(std::move(labels), blank, std::move(data));
}

/// Sum over every frame path, grouped by collapsed sequence.
std::map<LabelSeq, double> enumerate_paths(const EmissionMatrix& e) {
  std::map<LabelSeq, double> out;
  std::vector<std::size_t> path(e.frames(), 0);
  while (true) {
    double p = 1.0;
    for (std::size_t t = 0; t < e.frames(); ++t) p *= std::pow(10.0, e.at(t, path[t]));
    out[collapse_alignment(path, e.blank())] += p;
    std::size_t t = 0;
    while (t < path.size() && ++path[t] == e.classes()) path[t++] = 0;
    if (t == path.size()) break;
  }
  return out;
}

}  // namespace

TEST_SUITE("ctc_decoder") {

TEST_CASE("collapse merges repeats before dropping blanks") {
  const std::size_t B = 9;
  CHECK(collapse_alignment(std::vector<std::size_t>{0, 0, B, 0}, B) == LabelSeq{0, 0});
  CHECK(collapse_alignment(std::vector<std::size_t>{0, 0, 0}, B) == LabelSeq{0});
  CHECK(collapse_alignment(std::vector<std::size_t>{B, B}, B).empty());
  CHECK(collapse_alignment(std::vector<std::size_t>{1, B, 2, 2, B, B, 1}, B) == LabelSeq{1, 2, 1});
}

TEST_CASE("greedy decoding and its tie rule") {
  const auto e = from_probs({"a", "b"}, {{0.6, 0.3, 0.1}, {0.6, 0.3, 0.1}, {0.1, 0.1, 0.8}, {0.2, 0.7, 0.1}});
  CHECK(label_strings(e, greedy_decode(e)) == std::vector<std::string>{"a", "b"});
  const auto tie = from_probs({"a", "b"}, {{0.4, 0.4, 0.2}});
  CHECK(greedy_decode(tie) == LabelSeq{0});
}

TEST_CASE("sequence_logprob on a hand example") {
  // two frames: paths a-, -a, aa collapse to [a]
  const auto e = from_probs({"a"}, {{0.6, 0.4}, {0.3, 0.7}});
  const LabelSeq a{0};
  CHECK(std::pow(10.0, sequence_logprob(e, a)) == doctest::Approx(0.6 * 0.7 + 0.4 * 0.3 + 0.6 * 0.3));
  CHECK(std::pow(10.0, sequence_logprob(e, LabelSeq{})) == doctest::Approx(0.4 * 0.7));
  CHECK_THROWS_AS(sequence_logprob(e, LabelSeq{0, 0}), InfeasibleLength);
}

TEST_CASE("infeasible lengths") {
  const auto e = from_probs({"a", "b"}, {{0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}, {0.3, 0.3, 0.4}});
  CHECK_NOTHROW(sequence_logprob(e, LabelSeq{0, 1, 0}));
  CHECK_NOTHROW(sequence_logprob(e, LabelSeq{0, 0}));
  CHECK_THROWS_AS(sequence_logprob(e, LabelSeq{0, 0, 1}), InfeasibleLength);
  CHECK_THROWS_AS(sequence_logprob(e, LabelSeq{0, 1, 0, 1}), InfeasibleLength);
}

TEST_CASE("forward algorithm matches path enumeration") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 60; ++round) {
    const std::size_t T = 1 + round % 5;
    const std::size_t V = 1 + round % 3;
    const auto e = testing::random_emissions(rng, T, V, round % 2 ? 0.3 : 0.0);
    double total = 0.0;
    for (const auto& [seq, p] : enumerate_paths(e)) {
      const double lp = sequence_logprob(e, seq);
      if (p == 0.0)
        CHECK(lp == kLogZero);
      else
        CHECK(std::pow(10.0, lp) == doctest::Approx(p).epsilon(1e-9));
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("prefix beam search with an exhaustive beam equals brute force") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 80; ++round) {
    const std::size_t T = 1 + round % 6;
    const std::size_t V = 1 + (round / 6) % 4;
    const auto e = testing::random_emissions(rng, T, V, round % 3 == 0 ? 0.25 : 0.0);
    std::optional<NGramModel> lm;
    DecoderConfig cfg;
    cfg.beam_width = 100000;
    if (round % 2) {
      lm = testing::random_letter_lm(rng, V, 1 + round % 3);
      cfg.lm_weight = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
      cfg.insertion_bonus = std::uniform_real_distribution<double>(-0.5, 1.0)(rng);
    }
    const auto* model = lm ? &*lm : nullptr;
    const auto beam = prefix_beam_search(e, model, cfg);
    const auto best = brute_force_decode(e, model, cfg.lm_weight, cfg.insertion_bonus);
    REQUIRE_FALSE(beam.empty());
    CHECK(beam.front().labels == best.labels);
    CHECK(std::abs(beam.front().fused - best.fused) <= 1e-9);
    CHECK(std::abs(beam.front().acoustic - sequence_logprob(e, beam.front().labels)) <= 1e-9);
  }
}

TEST_CASE("exhaustive beam without LM returns every feasible sequence's probability") {
  std::mt19937_64 rng(4);
  const auto e = testing::random_emissions(rng, 4, 2);
  DecoderConfig cfg;
  cfg.beam_width = 1000;
  const auto hyps = prefix_beam_search(e, nullptr, cfg);
  double total = 0.0;
  for (const auto& h : hyps) {
    CHECK(h.acoustic == doctest::Approx(sequence_logprob(e, h.labels)).epsilon(1e-12));
    total += std::pow(10.0, h.acoustic);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < hyps.size(); ++i) CHECK(hyps[i - 1].fused >= hyps[i].fused);
}

TEST_CASE("LM weight flips the best sequence at the closed-form threshold") {
  const auto lm = testing::train_words({"a b", "a b", "a c"}, 2, 0.5);
  const auto e = from_probs({"a", "b", "c"}, {{1.0, 0.0, 0.0, 0.0}, {0.0, 0.4, 0.6, 0.0}});
  const std::vector<std::string> bos{"<s>"}, ctx_a{"a"};
  const double lm_ab = lm.score(bos, "a") + lm.score(ctx_a, "b");
  const double lm_ac = lm.score(bos, "a") + lm.score(ctx_a, "c");
  const double alpha = (std::log10(0.6) - std::log10(0.4)) / (lm_ab - lm_ac);
  const auto fixture = testing::tsv_rows(testing::fixture_path("ctc_lm_flip.txt"));
  CHECK(alpha == doctest::Approx(std::stod(fixture[0][1])).epsilon(1e-12));

  DecoderConfig cfg;
  cfg.beam_width = 4;
  cfg.lm_weight = 0.0;
  CHECK(label_strings(e, prefix_beam_search(e, &lm, cfg).front().labels) == std::vector<std::string>{"a", "c"});
  cfg.lm_weight = alpha * 0.99;
  CHECK(label_strings(e, prefix_beam_search(e, &lm, cfg).front().labels) == std::vector<std::string>{"a", "c"});
  cfg.lm_weight = alpha * 1.01;
  CHECK(label_strings(e, prefix_beam_search(e, &lm, cfg).front().labels) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("exact score ties are ordered by label text") {
  const auto e = from_probs({"b", "a"}, {{0.5, 0.5, 0.0}});
  DecoderConfig cfg;
  const auto hyps = prefix_beam_search(e, nullptr, cfg);
  REQUIRE(hyps.size() == 2);
  CHECK(e.label(hyps[0].labels[0]) == "a");
  CHECK(e.label(brute_force_decode(e, nullptr, 0, 0).labels[0]) == "a");
}

TEST_CASE("the best hypothesis never gets worse as the beam widens") {
  std::mt19937_64 rng(1234);
  for (int round = 0; round < 40; ++round) {
    const std::size_t V = 2 + round % 3;
    const auto e = testing::random_emissions(rng, 6, V);
    const auto lm = testing::random_letter_lm(rng, V, 2);
    const auto exact = brute_force_decode(e, &lm, 0.8, 0.1);
    DecoderConfig cfg{1, 0.8, 0.1, kLogZero};
    for (std::size_t w : {1, 2, 4, 8, 100000}) {
      cfg.beam_width = w;
      CHECK(prefix_beam_search(e, &lm, cfg).front().fused <= exact.fused + 1e-9);
    }
    CHECK(prefix_beam_search(e, &lm, cfg).front().fused == doctest::Approx(exact.fused).epsilon(1e-12));
  }
}

TEST_CASE("decoder errors") {
  const auto lm = testing::train_words({"a b"}, 2, 0.5);
  const auto e = from_probs({"a", "zz"}, {{0.5, 0.5, 0.0}});
  CHECK_THROWS_AS(prefix_beam_search(e, &lm, {}), VocabularyMismatch);
  std::mt19937_64 rng(1);
  const auto big = testing::random_emissions(rng, 9, 2);
  CHECK_THROWS_AS(brute_force_decode(big, nullptr, 0, 0), InstanceTooLarge);
  DecoderConfig zero;
  zero.beam_width = 0;
  CHECK_THROWS_AS(prefix_beam_search(e, nullptr, zero), std::invalid_argument);
}

TEST_CASE("prune threshold skips unlikely expansions") {
  const auto e = from_probs({"a", "b"}, {{0.98, 0.01, 0.01}, {0.01, 0.01, 0.98}});
  DecoderConfig cfg;
  cfg.beam_width = 100;
  const auto all = prefix_beam_search(e, nullptr, cfg);
  cfg.prune_threshold = -1.0;
  const auto pruned = prefix_beam_search(e, nullptr, cfg);
  CHECK(pruned.size() < all.size());
  for (const auto& h : pruned)
    for (std::size_t c : h.labels) CHECK(e.label(c) == "a");
}

TEST_CASE("emission file round trip and validation") {
  std::mt19937_64 rng(8);
  const auto e = testing::random_emissions(rng, 5, 3, 0.3);
  std::stringstream buf;
  write_emissions(buf, e);
  const auto back = read_emissions(buf);
  CHECK(back.frames() == e.frames());
  CHECK(back.unit_labels() == e.unit_labels());
  for (std::size_t t = 0; t < e.frames(); ++t)
    for (std::size_t c = 0; c < e.classes(); ++c) CHECK(back.at(t, c) == e.at(t, c));

  std::istringstream bad_sum("1 1 1\na\n-0.1 -0.1\n");
  CHECK_THROWS_AS(read_emissions(bad_sum), MalformedEmissions);
  std::istringstream short_row("1 1 1\na\n0\n");
  CHECK_THROWS_AS(read_emissions(short_row), MalformedEmissions);
  std::istringstream blank_first("1 1 0\na\n0 -inf\n");
  const auto bf = read_emissions(blank_first);
  CHECK(bf.blank() == 0);
  CHECK(bf.label(1) == "a");
}

}
