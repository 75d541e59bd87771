#include "pinyinasr/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "json.hpp"

#include "pinyinasr/errors.hpp"
#include "pinyinasr/utf8.hpp"

namespace pinyinasr {

EditCounts edit_distance(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  EditCounts counts;
  counts.distance = at(n, m);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++counts.substitutions;
      --i;
      --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++counts.insertions;
      --j;
    } else {
      ++counts.deletions;
      --i;
    }
  }
  return counts;
}

ScoreReport error_rate(std::span<const TokenSeq> refs, std::span<const TokenSeq> hyps,
                       std::span<const std::string> ids) {
  if (refs.size() != hyps.size())
    throw LengthMismatch(std::to_string(refs.size()) + " references vs " +
                         std::to_string(hyps.size()) + " hypotheses");
  if (!ids.empty() && ids.size() != refs.size()) throw LengthMismatch("utterance id count differs");

  ScoreReport report;
  for (std::size_t k = 0; k < refs.size(); ++k) {
    UtteranceScore u;
    u.id = ids.empty() ? std::to_string(k) : ids[k];
    u.ref_len = refs[k].size();
    u.counts = edit_distance(refs[k], hyps[k]);
    report.substitutions += u.counts.substitutions;
    report.insertions += u.counts.insertions;
    report.deletions += u.counts.deletions;
    report.ref_len += u.ref_len;
    report.utterances.push_back(std::move(u));
  }
  if (report.ref_len == 0) {
    report.degenerate = true;
    report.error_rate = report.errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    report.error_rate = static_cast<double>(report.errors()) / static_cast<double>(report.ref_len);
  }
  return report;
}

ScoreReport tone_stripped_rescore(std::span<const TokenSeq> refs, std::span<const TokenSeq> hyps,
                                  const SyllableInventory& inv, std::span<const std::string> ids) {
  auto strip = [&](std::span<const TokenSeq> side) {
    std::vector<TokenSeq> out;
    out.reserve(side.size());
    for (const auto& seq : side) {
      TokenSeq stripped;
      stripped.reserve(seq.size());
      for (const auto& tok : seq) stripped.push_back(inv.parse_tonal(tok).toneless().str());
      out.push_back(std::move(stripped));
    }
    return out;
  };
  const auto r = strip(refs);
  const auto h = strip(hyps);
  return error_rate(r, h, ids);
}

TokenSeq characters(const std::string& text) {
  auto chars = utf8::split_chars(text);
  if (!chars) throw Error("text is not valid UTF-8");
  return std::move(*chars);
}

void write_summary_tsv(std::ostream& out, const std::string& metric, const ScoreReport& report) {
  char rate[64];
  std::snprintf(rate, sizeof(rate), "%.4f", 100.0 * report.error_rate);
  out << metric << '\t' << rate << '\t' << report.substitutions << '\t' << report.insertions << '\t'
      << report.deletions << '\t' << report.ref_len;
  if (report.degenerate) out << "\tdegenerate";
  out << '\n';
}

void write_detail_jsonl(std::ostream& out, const ScoreReport& report) {
  for (const auto& u : report.utterances) {
    nlohmann::ordered_json j;
    j["id"] = u.id;
    j["ref_len"] = u.ref_len;
    j["distance"] = u.counts.distance;
    j["sub"] = u.counts.substitutions;
    j["ins"] = u.counts.insertions;
    j["del"] = u.counts.deletions;
    out << j.dump() << '\n';
  }
}

}  // namespace pinyinasr
