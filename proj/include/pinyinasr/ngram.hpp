#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace pinyinasr {

using TokenId = std::uint32_t;

inline constexpr std::string_view kSentenceBegin = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";
inline constexpr int kMaxOrder = 6;
/// log10 probability stored for <s>, which is never predicted.
inline constexpr double kNeverPredicted = -99.0;

/// Token <-> id map. Ids 0, 1, 2 are <unk>, <s>, </s>; the rest follow in
/// byte order of the token text.
class Vocabulary {
 public:
  static constexpr TokenId kUnk = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens);

  /// kUnk for unknown tokens.
  TokenId id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_[id]; }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

/// Fixed-capacity n-gram key; unused slots hold kNone.
struct NGramKey {
  static constexpr TokenId kNone = std::numeric_limits<TokenId>::max();
  std::array<TokenId, kMaxOrder> ids;

  NGramKey() { ids.fill(kNone); }
  NGramKey(std::span<const TokenId> context, TokenId last);
  explicit NGramKey(std::span<const TokenId> gram);

  friend bool operator==(const NGramKey&, const NGramKey&) = default;
};

struct NGramKeyHash {
  std::size_t operator()(const NGramKey& k) const noexcept;
};

/// Backoff n-gram model in log10 space.
class NGramModel {
 public:
  struct Entry {
    double logprob = 0.0;
    double backoff = 0.0;
    bool has_backoff = false;
  };
  using Table = std::unordered_map<NGramKey, Entry, NGramKeyHash>;

  NGramModel(int order, Vocabulary vocab);

  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }

  /// log10 P(token | context). Only the last order-1 context tokens are used;
  /// unseen n-grams back off through the stored weights.
  double score(std::span<const TokenId> context, TokenId token) const;
  double score(std::span<const std::string> context, std::string_view token) const;

  /// Table of n-grams of length n (1-based).
  const Table& table(int n) const { return tables_.at(static_cast<std::size_t>(n - 1)); }
  Table& table(int n) { return tables_.at(static_cast<std::size_t>(n - 1)); }
  std::size_t count(int n) const { return table(n).size(); }

  /// Sequence of token ids for the given strings (unknown -> <unk>).
  std::vector<TokenId> ids(std::span<const std::string> tokens) const;

 private:
  int order_;
  Vocabulary vocab_;
  std::vector<Table> tables_;
};

struct TrainOptions {
  int order = 3;
  double discount = 0.7;  // same absolute discount at every order
  /// Tokens seen fewer times map to <unk> (open vocabulary).
  int min_count = 1;
  /// Extra vocabulary entries; seen or not, they keep their own id.
  std::vector<std::string> vocabulary;
  /// Map every training token outside `vocabulary` to <unk>.
  bool closed_vocabulary = false;
};

/// Interpolated Kneser-Ney. Throws EmptyCorpus, InvalidDiscount, and
/// std::invalid_argument for an order outside 1-6.
NGramModel train(std::span<const std::vector<std::string>> corpus, const TrainOptions& options);

/// 10^(-mean log10 prob) over tokens plus one </s> per sentence.
double perplexity(const NGramModel& model, std::span<const std::vector<std::string>> corpus);

/// Total log10 probability of a sentence including </s>.
double sentence_logprob(const NGramModel& model, std::span<const std::string> sentence);

void write_arpa(const NGramModel& model, std::ostream& out);
NGramModel read_arpa(std::istream& in);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace pinyinasr
