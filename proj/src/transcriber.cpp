#include "pinyinasr/transcriber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "pinyinasr/errors.hpp"

namespace pinyinasr {

HomophoneLattice build_lattice(std::span<const Syllable> pinyin, const PronunciationLexicon& lex,
                               bool tonal) {
  HomophoneLattice lattice;
  lattice.positions.reserve(pinyin.size());
  for (std::size_t i = 0; i < pinyin.size(); ++i) {
    Syllable key = pinyin[i];
    if (!tonal) {
      key = key.toneless();
    } else if (!key.has_tone()) {
      throw InvalidSyllable("tonal lattice needs a tone on '" + key.str() + "'");
    }
    const auto& homophones = lex.homophones(key);
    if (homophones.empty()) throw NoCandidate(key.str(), i);
    auto& slot = lattice.positions.emplace_back();
    slot.reserve(homophones.size());
    for (const auto& h : homophones) slot.push_back({h.character, std::log10(h.probability)});
  }
  return lattice;
}

std::string TranscriptionResult::text() const {
  std::string out;
  for (const auto& c : hanzi) out += c;
  return out;
}

namespace {

/// The last order-1 LM tokens of a path (with <s> padding at the start).
struct State {
  NGramKey context;
  friend bool operator==(const State&, const State&) = default;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept { return NGramKeyHash{}(s.context); }
};

struct Node {
  double score;
  std::size_t parent;     // index into the previous position's nodes
  std::size_t candidate;  // index into the lattice position
  State state;
};

class Search {
 public:
  Search(const HomophoneLattice& lattice, const NGramModel& lm, double channel_weight)
      : lattice_(lattice), lm_(lm), weight_(channel_weight), history_(static_cast<std::size_t>(lm.order() - 1)) {
    tokens_.resize(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      if (lattice.positions[i].empty()) throw NoCandidate("?", i);
      for (const auto& c : lattice.positions[i]) tokens_[i].push_back(lm.vocab().id(c.hanzi));
    }
  }

  /// Runs the DP, keeping the best `limit` states per position (0 = all).
  /// Returns the final nodes ranked best first, with </s> folded in.
  std::vector<std::pair<double, std::size_t>> run(std::size_t limit) {
    layers_.assign(lattice_.size() + 1, {});
    State start;
    if (history_ > 0) start.context.ids[0] = Vocabulary::kBos;
    layers_[0].push_back({0.0, 0, 0, start});

    for (std::size_t i = 0; i < lattice_.size(); ++i) {
      std::unordered_map<State, std::size_t, StateHash> index;
      auto& layer = layers_[i + 1];
      for (std::size_t p = 0; p < layers_[i].size(); ++p) {
        const Node& prev = layers_[i][p];
        const auto ctx = context_of(prev.state);
        for (std::size_t c = 0; c < lattice_.positions[i].size(); ++c) {
          const TokenId tok = tokens_[i][c];
          const double step = lm_.score(ctx, tok) + weight_ * lattice_.positions[i][c].channel;
          Node node{prev.score + step, p, c, advance(prev.state, tok)};
          auto [it, inserted] = index.try_emplace(node.state, layer.size());
          if (inserted) {
            layer.push_back(node);
          } else if (better(node, layer[it->second], i + 1)) {
            layer[it->second] = node;
          }
        }
      }
      if (limit > 0 && layer.size() > limit) prune(i + 1, limit);
    }

    std::vector<std::pair<double, std::size_t>> finals;
    const auto& last = layers_.back();
    for (std::size_t n = 0; n < last.size(); ++n) {
      const auto ctx = context_of(last[n].state);
      finals.emplace_back(last[n].score + lm_.score(ctx, Vocabulary::kEos), n);
    }
    std::sort(finals.begin(), finals.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return path(lattice_.size(), a.second) < path(lattice_.size(), b.second);
    });
    return finals;
  }

  std::vector<std::string> path(std::size_t layer, std::size_t node) const {
    std::vector<std::string> out(layer);
    for (std::size_t i = layer; i > 0; --i) {
      const Node& n = layers_[i][node];
      out[i - 1] = lattice_.positions[i - 1][n.candidate].hanzi;
      node = n.parent;
    }
    return out;
  }

 private:
  std::span<const TokenId> context_of(const State& s) const {
    std::size_t n = 0;
    while (n < history_ && s.context.ids[n] != NGramKey::kNone) ++n;
    return {s.context.ids.data(), n};
  }

  State advance(const State& s, TokenId tok) const {
    if (history_ == 0) return s;
    State out;
    const auto ctx = context_of(s);
    if (ctx.size() < history_) {
      std::copy(ctx.begin(), ctx.end(), out.context.ids.begin());
      out.context.ids[ctx.size()] = tok;
    } else {
      std::copy(ctx.begin() + 1, ctx.end(), out.context.ids.begin());
      out.context.ids[history_ - 1] = tok;
    }
    return out;
  }

  bool better(const Node& a, const Node& b, std::size_t layer) const {
    if (a.score != b.score) return a.score > b.score;
    // Rare exact tie: compare the full character histories.
    auto pa = path(layer - 1, a.parent);
    auto pb = path(layer - 1, b.parent);
    pa.push_back(lattice_.positions[layer - 1][a.candidate].hanzi);
    pb.push_back(lattice_.positions[layer - 1][b.candidate].hanzi);
    return pa < pb;
  }

  void prune(std::size_t layer, std::size_t limit) {
    auto& nodes = layers_[layer];
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (nodes[x].score != nodes[y].score) return nodes[x].score > nodes[y].score;
      return path(layer, x) < path(layer, y);
    });
    std::vector<Node> kept;
    kept.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) kept.push_back(nodes[order[i]]);
    nodes = std::move(kept);
  }

  const HomophoneLattice& lattice_;
  const NGramModel& lm_;
  double weight_;
  std::size_t history_;
  std::vector<std::vector<TokenId>> tokens_;
  std::vector<std::vector<Node>> layers_;
};

}  // namespace

TranscriptionResult viterbi_transcribe(const HomophoneLattice& lattice, const NGramModel& char_lm,
                                       double channel_weight) {
  Search search(lattice, char_lm, channel_weight);
  const auto finals = search.run(0);
  return {search.path(lattice.size(), finals.front().second), finals.front().first};
}

std::vector<TranscriptionResult> beam_transcribe(const HomophoneLattice& lattice,
                                                 const NGramModel& char_lm, double channel_weight,
                                                 std::size_t beam_width) {
  if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
  Search search(lattice, char_lm, channel_weight);
  const auto finals = search.run(beam_width);
  std::vector<TranscriptionResult> out;
  for (std::size_t i = 0; i < finals.size() && i < beam_width; ++i)
    out.push_back({search.path(lattice.size(), finals[i].second), finals[i].first});
  return out;
}

}  // namespace pinyinasr
