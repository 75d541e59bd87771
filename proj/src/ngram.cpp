#include "pinyinasr/ngram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pinyinasr/errors.hpp"

namespace pinyinasr {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  tokens_ = {std::string(kUnknown), std::string(kSentenceBegin), std::string(kSentenceEnd)};
  for (auto& t : tokens)
    if (t != kUnknown && t != kSentenceBegin && t != kSentenceEnd) tokens_.push_back(std::move(t));
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    ids_.emplace(tokens_[i], static_cast<TokenId>(i));
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.contains(std::string(token)); }

NGramKey::NGramKey(std::span<const TokenId> context, TokenId last) {
  ids.fill(kNone);
  std::copy(context.begin(), context.end(), ids.begin());
  ids[context.size()] = last;
}

NGramKey::NGramKey(std::span<const TokenId> gram) {
  ids.fill(kNone);
  std::copy(gram.begin(), gram.end(), ids.begin());
}

std::size_t NGramKeyHash::operator()(const NGramKey& k) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (TokenId id : k.ids) {
    h ^= id;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

NGramModel::NGramModel(int order, Vocabulary vocab)
    : order_(order), vocab_(std::move(vocab)), tables_(static_cast<std::size_t>(order)) {
  if (order < 1 || order > kMaxOrder)
    throw std::invalid_argument("n-gram order must be in 1.." + std::to_string(kMaxOrder));
}

double NGramModel::score(std::span<const TokenId> context, TokenId token) const {
  if (token >= vocab_.size()) token = Vocabulary::kUnk;
  const std::size_t n = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  context = context.last(n);
  double acc = 0.0;
  for (std::size_t len = n;; --len) {
    const auto ctx = context.last(len);
    const auto& grams = tables_[len];
    if (auto it = grams.find(NGramKey(ctx, token)); it != grams.end()) return acc + it->second.logprob;
    if (len == 0) break;
    const auto& ctxs = tables_[len - 1];
    if (auto it = ctxs.find(NGramKey(ctx)); it != ctxs.end() && it->second.has_backoff)
      acc += it->second.backoff;
  }
  // Only reachable for a model without an <unk> unigram.
  return acc + kNeverPredicted;
}

double NGramModel::score(std::span<const std::string> context, std::string_view token) const {
  const auto ctx = ids(context);
  return score(ctx, vocab_.id(token));
}

std::vector<TokenId> NGramModel::ids(std::span<const std::string> tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(vocab_.id(t));
  return out;
}

namespace {

using CountMap = std::unordered_map<NGramKey, std::uint64_t, NGramKeyHash>;

std::size_t key_length(const NGramKey& k) {
  std::size_t n = 0;
  while (n < k.ids.size() && k.ids[n] != NGramKey::kNone) ++n;
  return n;
}

NGramKey drop_first(const NGramKey& k, std::size_t len) {
  NGramKey out;
  std::copy(k.ids.begin() + 1, k.ids.begin() + static_cast<std::ptrdiff_t>(len), out.ids.begin());
  return out;
}

NGramKey drop_last(const NGramKey& k, std::size_t len) {
  NGramKey out = k;
  out.ids[len - 1] = NGramKey::kNone;
  return out;
}

}  // namespace

NGramModel train(std::span<const std::vector<std::string>> corpus, const TrainOptions& options) {
  if (corpus.empty()) throw EmptyCorpus();
  if (options.order < 1 || options.order > kMaxOrder)
    throw std::invalid_argument("n-gram order must be in 1.." + std::to_string(kMaxOrder));
  if (!(options.discount > 0.0 && options.discount < 1.0))
    throw InvalidDiscount("discount must lie in (0, 1), got " + format_double(options.discount));

  const int order = options.order;
  const double discount = options.discount;

  std::map<std::string, std::uint64_t> freq;
  for (const auto& sentence : corpus)
    for (const auto& t : sentence) ++freq[t];

  std::vector<std::string> vocab_tokens = options.vocabulary;
  const std::unordered_map<std::string, bool> listed = [&] {
    std::unordered_map<std::string, bool> m;
    for (const auto& t : options.vocabulary) m.emplace(t, true);
    return m;
  }();
  if (!options.closed_vocabulary) {
    for (const auto& [tok, n] : freq)
      if (n >= static_cast<std::uint64_t>(std::max(options.min_count, 1)) && !listed.contains(tok))
        vocab_tokens.push_back(tok);
  }
  NGramModel model(order, Vocabulary(std::move(vocab_tokens)));
  const Vocabulary& vocab = model.vocab();

  // Raw counts of every n-gram ending at a predicted position.
  std::vector<CountMap> raw(static_cast<std::size_t>(order));
  std::vector<TokenId> seq;
  for (const auto& sentence : corpus) {
    seq.assign(1, Vocabulary::kBos);
    for (const auto& t : sentence) seq.push_back(vocab.id(t));
    seq.push_back(Vocabulary::kEos);
    for (std::size_t i = 1; i < seq.size(); ++i) {
      for (std::size_t k = 1; k <= static_cast<std::size_t>(order) && k <= i + 1; ++k) {
        const std::span<const TokenId> gram(seq.data() + i + 1 - k, k);
        ++raw[k - 1][NGramKey(gram)];
      }
    }
  }

  // Kneser-Ney adjusted counts: raw at the top order and for n-grams that
  // start with <s>; otherwise the number of distinct left extensions.
  std::vector<CountMap> adjusted(static_cast<std::size_t>(order));
  adjusted[order - 1] = raw[order - 1];
  for (int k = order - 1; k >= 1; --k) {
    auto& adj = adjusted[k - 1];
    for (const auto& [key, n] : raw[k - 1])
      if (key.ids[0] == Vocabulary::kBos) adj[key] = n;
    for (const auto& [key, n] : raw[k]) {
      (void)n;
      ++adj[drop_first(key, static_cast<std::size_t>(k + 1))];
    }
  }

  // Unigrams: discounted adjusted counts interpolated with a uniform
  // distribution over every predictable token (all but <s>).
  {
    auto& table = model.table(1);
    double total = 0.0;
    std::size_t types = 0;
    for (const auto& [key, a] : adjusted[0]) {
      if (key.ids[0] == Vocabulary::kBos) continue;
      total += static_cast<double>(a);
      ++types;
    }
    const double gamma = discount * static_cast<double>(types) / total;
    const double uniform = 1.0 / static_cast<double>(vocab.size() - 1);
    for (TokenId id = 0; id < vocab.size(); ++id) {
      const TokenId gram[1] = {id};
      NGramModel::Entry e;
      if (id == Vocabulary::kBos) {
        e.logprob = kNeverPredicted;
      } else {
        auto it = adjusted[0].find(NGramKey(gram));
        const double a = it == adjusted[0].end() ? 0.0 : static_cast<double>(it->second);
        e.logprob = std::log10(std::max(a - discount, 0.0) / total + gamma * uniform);
      }
      table.emplace(NGramKey(gram), e);
    }
  }

  for (int k = 2; k <= order; ++k) {
    struct ContextStats {
      double total = 0.0;
      std::size_t types = 0;
    };
    std::unordered_map<NGramKey, ContextStats, NGramKeyHash> contexts;
    for (const auto& [key, a] : adjusted[k - 1]) {
      auto& cs = contexts[drop_last(key, static_cast<std::size_t>(k))];
      cs.total += static_cast<double>(a);
      ++cs.types;
    }

    NGramModel::Table grams;
    for (const auto& [key, a] : adjusted[k - 1]) {
      const auto ctx_key = drop_last(key, static_cast<std::size_t>(k));
      const auto& cs = contexts.at(ctx_key);
      const double gamma = discount * static_cast<double>(cs.types) / cs.total;
      const std::span<const TokenId> lower_ctx(key.ids.data() + 1, static_cast<std::size_t>(k - 2));
      const double lower = std::pow(10.0, model.score(lower_ctx, key.ids[k - 1]));
      NGramModel::Entry e;
      e.logprob = std::log10((static_cast<double>(a) - discount) / cs.total + gamma * lower);
      grams.emplace(key, e);
    }
    model.table(k) = std::move(grams);

    auto& parents = model.table(k - 1);
    for (const auto& [ctx_key, cs] : contexts) {
      auto it = parents.find(ctx_key);
      if (it == parents.end())
        throw std::logic_error("Kneser-Ney context missing from lower order");
      it->second.has_backoff = true;
      it->second.backoff = std::log10(discount * static_cast<double>(cs.types) / cs.total);
    }
  }
  return model;
}

double sentence_logprob(const NGramModel& model, std::span<const std::string> sentence) {
  std::vector<TokenId> ctx{Vocabulary::kBos};
  double total = 0.0;
  for (const auto& t : sentence) {
    const TokenId id = model.vocab().id(t);
    total += model.score(ctx, id);
    ctx.push_back(id);
  }
  return total + model.score(ctx, Vocabulary::kEos);
}

double perplexity(const NGramModel& model, std::span<const std::vector<std::string>> corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  double total = 0.0;
  std::size_t tokens = 0;
  for (const auto& sentence : corpus) {
    total += sentence_logprob(model, sentence);
    tokens += sentence.size() + 1;
  }
  return std::pow(10.0, -total / static_cast<double>(tokens));
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("cannot format number");
  return std::string(buf, ptr);
}

void write_arpa(const NGramModel& model, std::ostream& out) {
  const auto& vocab = model.vocab();
  out << "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n) out << "ngram " << n << '=' << model.count(n) << '\n';

  for (int n = 1; n <= model.order(); ++n) {
    std::vector<std::pair<std::vector<std::string>, const NGramModel::Entry*>> rows;
    rows.reserve(model.count(n));
    for (const auto& [key, entry] : model.table(n)) {
      std::vector<std::string> words;
      for (int i = 0; i < n; ++i) words.push_back(vocab.token(key.ids[i]));
      rows.emplace_back(std::move(words), &entry);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    out << "\n\\" << n << "-grams:\n";
    for (const auto& [words, entry] : rows) {
      out << format_double(entry->logprob) << '\t';
      for (std::size_t i = 0; i < words.size(); ++i) out << (i ? " " : "") << words[i];
      if (entry->has_backoff) out << '\t' << format_double(entry->backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

namespace {

bool parse_number(std::string_view text, double& value) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

NGramModel read_arpa(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }

  std::size_t i = 0;
  while (i < lines.size() && lines[i] != "\\data\\") ++i;
  if (i == lines.size()) throw MalformedArpa(0, "missing \\data\\ section");
  ++i;

  std::vector<std::size_t> declared;
  for (; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    if (!line.starts_with("ngram ")) break;
    const auto eq = line.find('=');
    std::size_t n = 0;
    std::size_t count = 0;
    const auto n_text = line.substr(6, eq == std::string_view::npos ? 0 : eq - 6);
    if (eq == std::string_view::npos ||
        std::from_chars(n_text.data(), n_text.data() + n_text.size(), n).ec != std::errc{} ||
        std::from_chars(line.data() + eq + 1, line.data() + line.size(), count).ec != std::errc{})
      throw MalformedArpa(i + 1, "bad ngram count line");
    if (n != declared.size() + 1) throw MalformedArpa(i + 1, "ngram counts out of order");
    declared.push_back(count);
  }
  if (declared.empty()) throw MalformedArpa(i + 1, "no ngram counts in \\data\\");
  if (declared.size() > static_cast<std::size_t>(kMaxOrder))
    throw MalformedArpa(i + 1, "order above " + std::to_string(kMaxOrder));
  const int order = static_cast<int>(declared.size());

  struct Row {
    std::vector<std::string> words;
    NGramModel::Entry entry;
    std::size_t line;
  };
  std::vector<std::vector<Row>> sections(declared.size());
  bool ended = false;
  int current = 0;
  for (; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (line.empty()) continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line.starts_with('\\')) {
      int n = 0;
      auto [ptr, ec] = std::from_chars(line.data() + 1, line.data() + line.size(), n);
      if (ec != std::errc{} || std::string_view(ptr, line.data() + line.size() - ptr) != "-grams:")
        throw MalformedArpa(i + 1, "unknown section header '" + std::string(line) + "'");
      if (n != current + 1 || n > order) throw MalformedArpa(i + 1, "unexpected section");
      current = n;
      continue;
    }
    if (current == 0) throw MalformedArpa(i + 1, "entry outside an n-gram section");
    const auto fields = split_ws(line);
    const std::size_t n = static_cast<std::size_t>(current);
    if (fields.size() != n + 1 && fields.size() != n + 2)
      throw MalformedArpa(i + 1, "expected " + std::to_string(n) + " tokens");
    Row row;
    row.line = i + 1;
    if (!parse_number(fields[0], row.entry.logprob))
      throw MalformedArpa(i + 1, "bad log probability");
    for (std::size_t k = 0; k < n; ++k) row.words.emplace_back(fields[k + 1]);
    if (fields.size() == n + 2) {
      if (!parse_number(fields[n + 1], row.entry.backoff))
        throw MalformedArpa(i + 1, "bad backoff weight");
      row.entry.has_backoff = true;
    }
    sections[n - 1].push_back(std::move(row));
  }
  if (!ended) throw MalformedArpa(lines.size(), "missing \\end\\");
  for (std::size_t n = 0; n < declared.size(); ++n) {
    if (sections[n].size() != declared[n])
      throw MalformedArpa(0, std::to_string(n + 1) + "-gram count " +
                                 std::to_string(sections[n].size()) + " differs from header " +
                                 std::to_string(declared[n]));
  }

  std::vector<std::string> unigrams;
  for (const auto& row : sections[0]) unigrams.push_back(row.words[0]);
  NGramModel model(order, Vocabulary(std::move(unigrams)));
  for (std::size_t n = 0; n < sections.size(); ++n) {
    auto& table = model.table(static_cast<int>(n + 1));
    for (const auto& row : sections[n]) {
      std::vector<TokenId> gram;
      for (const auto& w : row.words) {
        if (!model.vocab().contains(w))
          throw MalformedArpa(row.line, "token '" + w + "' missing from unigrams");
        gram.push_back(model.vocab().id(w));
      }
      if (!table.emplace(NGramKey(gram), row.entry).second)
        throw MalformedArpa(row.line, "duplicate n-gram");
    }
  }
  return model;
}

}  // namespace pinyinasr
