#include "pinyinasr/pipeline.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pinyinasr/assets.hpp"
#include "pinyinasr/lexicon.hpp"
#include "pinyinasr/ngram.hpp"
#include "pinyinasr/transcriber.hpp"

namespace pinyinasr {

PipelineConfig PipelineConfig::from(const KeyValueConfig& kv) {
  PipelineConfig c;
  c.inventory = kv.get_string("inventory", "");
  c.lexicon = kv.get_string("lexicon", "");
  c.train_corpus = kv.get_string("train_corpus", "");
  c.eval_corpus = kv.get_string("eval_corpus", "");
  c.pinyin_lm = kv.get_string("pinyin_lm", "");
  c.char_lm = kv.get_string("char_lm", "");
  c.emissions_dir = kv.get_string("emissions_dir", "");
  c.tonal = kv.get_bool("tonal", c.tonal);
  c.use_lm = kv.get_bool("use_lm", c.use_lm);
  c.holdout_eval = kv.get_bool("holdout_eval", c.holdout_eval);
  c.lm_order = static_cast<int>(kv.get_int("lm_order", c.lm_order));
  c.char_lm_order = static_cast<int>(kv.get_int("char_lm_order", c.char_lm_order));
  c.discount = kv.get_double("discount", c.discount);
  const auto beam = kv.get_int("beam", static_cast<long long>(c.decoder.beam_width));
  if (beam < 1) throw ConfigError("beam must be >= 1");
  c.decoder.beam_width = static_cast<std::size_t>(beam);
  c.decoder.lm_weight = kv.get_double("lm_weight", c.decoder.lm_weight);
  c.decoder.insertion_bonus = kv.get_double("insertion_bonus", c.decoder.insertion_bonus);
  c.decoder.prune_threshold = kv.get_double("prune_threshold", c.decoder.prune_threshold);
  c.channel_weight = kv.get_double("channel_weight", c.channel_weight);
  c.sim.frames_per_unit = static_cast<int>(kv.get_int("frames_per_unit", c.sim.frames_per_unit));
  c.sim.blank_fill = kv.get_double("blank_fill", c.sim.blank_fill);
  c.sim.confusion_temperature = kv.get_double("temperature", c.sim.confusion_temperature);
  c.sim.policy = parse_confusion_policy(kv.get_string("confusion", std::string(to_string(c.sim.policy))));
  c.seed = kv.get_uint("seed", c.seed);
  const auto min_len = kv.get_int("min_len", static_cast<long long>(c.bounds.min_len));
  const auto max_len = kv.get_int("max_len", static_cast<long long>(c.bounds.max_len));
  if (min_len < 1 || max_len < min_len) throw ConfigError("need 1 <= min_len <= max_len");
  c.bounds = {static_cast<std::size_t>(min_len), static_cast<std::size_t>(max_len)};
  c.max_utterances = kv.get_uint("max_utterances", c.max_utterances);
  c.jobs = std::max<std::size_t>(1, kv.get_uint("jobs", c.jobs));
  if (c.lm_order < 1 || c.lm_order > kMaxOrder || c.char_lm_order < 1 || c.char_lm_order > kMaxOrder)
    throw ConfigError("LM orders must be in 1..6");
  if (!(c.discount > 0.0 && c.discount < 1.0)) throw ConfigError("discount must lie in (0, 1)");
  if (c.decoder.lm_weight < 0.0) throw ConfigError("lm_weight must be >= 0");
  if (c.sim.frames_per_unit < 2) throw ConfigError("frames_per_unit must be >= 2");
  if (!(c.sim.confusion_temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  return c;
}

KeyValueConfig PipelineConfig::to_key_values() const {
  KeyValueConfig kv;
  kv.set("inventory", inventory.string());
  kv.set("lexicon", lexicon.string());
  kv.set("train_corpus", train_corpus.string());
  kv.set("eval_corpus", eval_corpus.string());
  kv.set("pinyin_lm", pinyin_lm.string());
  kv.set("char_lm", char_lm.string());
  kv.set("emissions_dir", emissions_dir.string());
  kv.set("tonal", tonal ? "true" : "false");
  kv.set("use_lm", use_lm ? "true" : "false");
  kv.set("holdout_eval", holdout_eval ? "true" : "false");
  kv.set("lm_order", std::to_string(lm_order));
  kv.set("char_lm_order", std::to_string(char_lm_order));
  kv.set("discount", format_double(discount));
  kv.set("beam", std::to_string(decoder.beam_width));
  kv.set("lm_weight", format_double(decoder.lm_weight));
  kv.set("insertion_bonus", format_double(decoder.insertion_bonus));
  kv.set("prune_threshold", format_double(decoder.prune_threshold));
  kv.set("channel_weight", format_double(channel_weight));
  kv.set("frames_per_unit", std::to_string(sim.frames_per_unit));
  kv.set("blank_fill", format_double(sim.blank_fill));
  kv.set("temperature", format_double(sim.confusion_temperature));
  kv.set("confusion", std::string(to_string(sim.policy)));
  kv.set("seed", std::to_string(seed));
  kv.set("min_len", std::to_string(bounds.min_len));
  kv.set("max_len", std::to_string(bounds.max_len));
  kv.set("max_utterances", std::to_string(max_utterances));
  return kv;
}

void PipelineConfig::resolve_relative_to(const std::filesystem::path& base) {
  for (auto* p : {&inventory, &lexicon, &train_corpus, &eval_corpus, &pinyin_lm, &char_lm, &emissions_dir})
    if (!p->empty() && p->is_relative()) *p = base / *p;
}

void PipelineConfig::validate() const {
  auto require = [](const std::filesystem::path& p, const char* key) {
    if (p.empty()) throw ConfigError(std::string("missing setting '") + key + "'");
    if (!std::filesystem::exists(p)) throw ConfigError(std::string(key) + ": no such file " + p.string());
  };
  require(inventory, "inventory");
  require(lexicon, "lexicon");
  require(eval_corpus, "eval_corpus");
  if (pinyin_lm.empty() || char_lm.empty()) require(train_corpus, "train_corpus");
  if (!pinyin_lm.empty()) require(pinyin_lm, "pinyin_lm");
  if (!char_lm.empty()) require(char_lm, "char_lm");
  if (!emissions_dir.empty() && !std::filesystem::is_directory(emissions_dir))
    throw ConfigError("emissions_dir: no such directory " + emissions_dir.string());
}

namespace {

std::vector<std::string> read_text_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_lines(in);
}

NGramModel load_arpa(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return read_arpa(in);
  } catch (const MalformedArpa& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

TokenSeq unit_tokens(const std::vector<Syllable>& pinyin, bool tonal) {
  TokenSeq out;
  out.reserve(pinyin.size());
  for (const auto& s : pinyin) out.push_back(tonal ? s.str() : s.toneless().str());
  return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();

  std::optional<SyllableInventory> inv;
  std::optional<PronunciationLexicon> lex;
  try {
    inv = SyllableInventory::load(cfg.inventory);
    lex = PronunciationLexicon::load(cfg.lexicon, *inv);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }

  const auto eval_sentences = filter_sentences(read_text_lines(cfg.eval_corpus), cfg.bounds);
  const auto eval = build_parallel(eval_sentences, *lex, cfg.eval_corpus.string());

  std::optional<ParallelCorpus> train;
  if (cfg.pinyin_lm.empty() || cfg.char_lm.empty()) {
    std::unordered_set<std::string> held_out;
    if (cfg.holdout_eval) held_out.insert(eval_sentences.begin(), eval_sentences.end());
    const auto sentences = filter_sentences(read_text_lines(cfg.train_corpus), cfg.bounds, held_out);
    train = build_parallel(sentences, *lex, cfg.train_corpus.string());
    if (train->pairs.empty()) throw ConfigError("training corpus is empty after filtering");
  }

  const auto& units = inv->units(cfg.tonal);
  std::optional<NGramModel> pinyin_lm;
  if (cfg.use_lm) {
    if (!cfg.pinyin_lm.empty()) {
      pinyin_lm = load_arpa(cfg.pinyin_lm);
    } else {
      std::vector<TokenSeq> seqs;
      for (const auto& p : train->pairs) seqs.push_back(unit_tokens(p.pinyin, cfg.tonal));
      TrainOptions opts;
      opts.order = cfg.lm_order;
      opts.discount = cfg.discount;
      opts.closed_vocabulary = true;
      for (const auto& s : units) opts.vocabulary.push_back(s.str());
      pinyin_lm = pinyinasr::train(seqs, opts);
    }
  }

  std::optional<NGramModel> char_lm;
  if (!cfg.char_lm.empty()) {
    char_lm = load_arpa(cfg.char_lm);
  } else {
    std::vector<TokenSeq> seqs;
    for (const auto& p : train->pairs) seqs.push_back(characters(p.hanzi));
    TrainOptions opts;
    opts.order = cfg.char_lm_order;
    opts.discount = cfg.discount;
    for (const auto& [ch, readings] : lex->entries()) opts.vocabulary.push_back(ch);
    char_lm = pinyinasr::train(seqs, opts);
  }

  const EmissionSimulator sim(units);
  std::size_t count = eval.pairs.size();
  if (cfg.max_utterances > 0) count = std::min(count, cfg.max_utterances);

  PipelineResult result;
  result.config_hash = cfg.to_key_values().hash();
  result.utterances.resize(count);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::optional<StageError> first_error;
  std::size_t first_error_index = count;

  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      auto& out = result.utterances[i];
      const auto& pair = eval.pairs[i];
      char id[32];
      std::snprintf(id, sizeof(id), "utt%04zu", i + 1);
      out.id = id;
      out.ref_hanzi = pair.hanzi;
      out.ref_units = unit_tokens(pair.pinyin, cfg.tonal);
      std::string stage = "emissions";
      try {
        std::optional<EmissionMatrix> e;
        if (cfg.emissions_dir.empty()) {
          SimConfig sc = cfg.sim;
          sc.seed = derive_seed(cfg.seed, i);
          e = sim.synth(cfg.tonal ? pair.pinyin : strip_tones(pair.pinyin), sc);
        } else {
          const auto path = cfg.emissions_dir / (out.id + ".emis");
          std::ifstream in(path);
          if (!in) throw Error("cannot open " + path.string());
          e = read_emissions(in);
        }

        stage = "decode";
        const auto hyps = prefix_beam_search(*e, pinyin_lm ? &*pinyin_lm : nullptr, cfg.decoder);
        if (hyps.empty()) throw Error("every hypothesis was pruned");
        out.hyp_units = label_strings(*e, hyps.front().labels);
        out.decode_score = hyps.front().fused;

        stage = "transcribe";
        std::vector<Syllable> syllables;
        for (const auto& u : out.hyp_units) syllables.push_back(inv->parse_unit(u, cfg.tonal));
        const auto lattice = build_lattice(syllables, *lex, cfg.tonal);
        const auto best = viterbi_transcribe(lattice, *char_lm, cfg.channel_weight);
        out.hyp_hanzi = best.text();
        out.transcribe_score = best.total_score;
      } catch (const std::exception& ex) {
        std::lock_guard lock(error_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error.emplace(stage, out.id, ex.what());
        }
      }
    }
  };

  std::vector<std::jthread> workers;
  for (std::size_t j = 1; j < std::min(cfg.jobs, count); ++j) workers.emplace_back(work);
  work();
  workers.clear();
  if (first_error) throw *first_error;

  std::vector<TokenSeq> ref_units, hyp_units, ref_chars, hyp_chars;
  std::vector<std::string> ids;
  for (const auto& u : result.utterances) {
    ids.push_back(u.id);
    ref_units.push_back(u.ref_units);
    hyp_units.push_back(u.hyp_units);
    ref_chars.push_back(characters(u.ref_hanzi));
    hyp_chars.push_back(characters(u.hyp_hanzi));
  }
  result.uer = error_rate(ref_units, hyp_units, ids);
  if (cfg.tonal) result.uer_stripped = tone_stripped_rescore(ref_units, hyp_units, *inv, ids);
  result.cer = error_rate(ref_chars, hyp_chars, ids);
  return result;
}

void write_pipeline_reports(const PipelineResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::ostringstream report;
  report << "# config_hash\t" << result.config_hash << '\n';
  report << "metric\trate_pct\tsub\tins\tdel\tref_len\n";
  write_summary_tsv(report, "uer", result.uer);
  if (result.uer_stripped) write_summary_tsv(report, "uer_tone_stripped", *result.uer_stripped);
  write_summary_tsv(report, "cer", result.cer);
  write_file_atomic(out_dir / "report.tsv", report.str());

  std::ostringstream detail;
  for (std::size_t i = 0; i < result.utterances.size(); ++i) {
    const auto& u = result.utterances[i];
    const auto& c = result.cer.utterances[i].counts;
    const auto& p = result.uer.utterances[i].counts;
    nlohmann::ordered_json j;
    j["id"] = u.id;
    j["ref_hanzi"] = u.ref_hanzi;
    j["hyp_hanzi"] = u.hyp_hanzi;
    j["ref_units"] = u.ref_units;
    j["hyp_units"] = u.hyp_units;
    j["unit_errors"] = p.distance;
    j["char_errors"] = c.distance;
    j["decode_score"] = u.decode_score;
    j["transcribe_score"] = u.transcribe_score;
    detail << j.dump() << '\n';
  }
  write_file_atomic(out_dir / "utterances.jsonl", detail.str());

  std::ostringstream hyps;
  for (const auto& u : result.utterances) {
    hyps << u.id << '\t';
    for (std::size_t k = 0; k < u.hyp_units.size(); ++k) hyps << (k ? " " : "") << u.hyp_units[k];
    hyps << '\t' << u.hyp_hanzi << '\n';
  }
  write_file_atomic(out_dir / "hyps.tsv", hyps.str());
}

}  // namespace pinyinasr
