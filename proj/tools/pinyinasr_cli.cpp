// pinyinasr: recognition (emissions -> pinyin) and transcription
// (pinyin -> Hanzi) as separate stages, plus the tools around them.
//
// Exit codes: 0 success, 1 runtime or data error, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "pinyinasr/ambiguity.hpp"
#include "pinyinasr/assets.hpp"
#include "pinyinasr/config.hpp"
#include "pinyinasr/corpus.hpp"
#include "pinyinasr/ctc.hpp"
#include "pinyinasr/emission_sim.hpp"
#include "pinyinasr/eval.hpp"
#include "pinyinasr/ngram.hpp"
#include "pinyinasr/pipeline.hpp"
#include "pinyinasr/transcriber.hpp"

namespace fs = std::filesystem;
using namespace pinyinasr;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  return in;
}

std::vector<std::string> input_lines(const std::string& path) {
  if (path.empty() || path == "-") return read_lines(std::cin);
  auto in = open_input(path);
  return read_lines(in);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::string join_ws(const std::vector<std::string>& toks) {
  std::string out;
  for (const auto& t : toks) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string utterance_id(std::size_t i) {
  char id[32];
  std::snprintf(id, sizeof(id), "utt%04zu", i + 1);
  return id;
}

struct Assets {
  std::string inventory = std::string(PINYINASR_DATA_DIR) + "/inventory.txt";
  std::string lexicon = std::string(PINYINASR_DATA_DIR) + "/lexicon.tsv";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--inventory", inventory, "Syllable inventory file")->capture_default_str();
    cmd->add_option("--lexicon", lexicon, "Pronunciation lexicon TSV")->capture_default_str();
  }
  SyllableInventory load_inventory() const {
    try {
      return SyllableInventory::load(inventory);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
  PronunciationLexicon load_lexicon(const SyllableInventory& inv) const {
    try {
      return PronunciationLexicon::load(lexicon, inv);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
};

// ---- pipeline -------------------------------------------------------------

struct PipelineCmd {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;

  int run() const {
    KeyValueConfig kv;
    fs::path base = fs::current_path();
    if (!config.empty()) {
      kv = KeyValueConfig::load(config);
      base = fs::absolute(config).parent_path();
    }
    for (const auto& o : overrides) kv.apply(o);
    auto cfg = PipelineConfig::from(kv);
    cfg.resolve_relative_to(base);
    fs::path out_dir = out.empty() ? fs::path(kv.get_string("out", "pipeline_out")) : fs::path(out);

    const auto result = run_pipeline(cfg);
    write_pipeline_reports(result, out_dir);

    std::ostringstream summary;
    summary << "metric\trate_pct\tsub\tins\tdel\tref_len\n";
    write_summary_tsv(summary, "uer", result.uer);
    if (result.uer_stripped) write_summary_tsv(summary, "uer_tone_stripped", *result.uer_stripped);
    write_summary_tsv(summary, "cer", result.cer);
    std::cout << "config_hash\t" << result.config_hash << '\n'
              << "utterances\t" << result.utterances.size() << '\n'
              << summary.str() << "reports written to " << out_dir.string() << '\n';
    return 0;
  }
};

// ---- train-lm -------------------------------------------------------------

struct TrainLmCmd {
  std::string corpus;
  std::string out;
  int order = 3;
  double discount = 0.7;
  std::string units = "char";
  std::size_t min_len = 1;
  std::size_t max_len = 1000;
  Assets assets;

  int run() const {
    if (order < 1 || order > kMaxOrder) throw ConfigError("--order must be in 1..6");
    if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("--discount must lie in (0, 1)");
    auto in = open_input(corpus);
    std::vector<TokenSeq> seqs;
    TrainOptions opts;
    opts.order = order;
    opts.discount = discount;
    if (units == "word") {
      for (const auto& line : read_lines(in))
        if (auto toks = split_ws(line); !toks.empty()) seqs.push_back(std::move(toks));
    } else {
      const auto sentences = filter_sentences(in, {min_len, max_len});
      if (units == "char") {
        for (const auto& s : sentences) seqs.push_back(characters(s));
      } else {
        const bool tonal = units == "pinyin";
        const auto inv = assets.load_inventory();
        const auto lex = assets.load_lexicon(inv);
        const auto parallel = build_parallel(sentences, lex, corpus);
        for (const auto& p : parallel.pairs) {
          TokenSeq toks;
          for (const auto& s : p.pinyin) toks.push_back(tonal ? s.str() : s.toneless().str());
          seqs.push_back(std::move(toks));
        }
        opts.closed_vocabulary = true;
        for (const auto& s : inv.units(tonal)) opts.vocabulary.push_back(s.str());
      }
    }
    const auto model = train(seqs, opts);
    std::ostringstream arpa;
    write_arpa(model, arpa);
    write_file_atomic(out, arpa.str());
    std::cout << "vocabulary\t" << model.vocab().size() << '\n';
    for (int n = 1; n <= model.order(); ++n) std::cout << "ngram " << n << '\t' << model.count(n) << '\n';
    return 0;
  }
};

NGramModel load_lm(const std::string& path) {
  auto in = open_input(path);
  return read_arpa(in);
}

// ---- decode ---------------------------------------------------------------

struct DecodeCmd {
  std::vector<std::string> inputs;
  std::string lm;
  DecoderConfig cfg{16, 0.0, 0.0, kLogZero};
  std::size_t nbest = 1;
  bool greedy = false;

  int run() const {
    std::optional<NGramModel> model;
    if (!lm.empty()) model = load_lm(lm);
    for (const auto& path : inputs) {
      auto in = open_input(path);
      const auto e = read_emissions(in);
      const auto name = fs::path(path).stem().string();
      if (greedy) {
        std::cout << name << '\t' << join_ws(label_strings(e, greedy_decode(e))) << '\n';
        continue;
      }
      const auto hyps = prefix_beam_search(e, model ? &*model : nullptr, cfg);
      for (std::size_t k = 0; k < std::min(nbest, hyps.size()); ++k) {
        const auto& h = hyps[k];
        std::cout << name << '\t' << join_ws(label_strings(e, h.labels)) << '\t'
                  << format_double(h.fused) << '\t' << format_double(h.acoustic) << '\t'
                  << format_double(h.lm) << '\n';
      }
    }
    return 0;
  }
};

// ---- transcribe -----------------------------------------------------------

struct TranscribeCmd {
  std::string input;
  std::string lm;
  double channel_weight = 1.0;
  bool toneless = false;
  std::size_t beam = 0;
  Assets assets;

  int run() const {
    const auto inv = assets.load_inventory();
    const auto lex = assets.load_lexicon(inv);
    const auto model = load_lm(lm);
    for (const auto& line : input_lines(input)) {
      const auto pinyin = inv.parse_sequence(line, !toneless);
      const auto lattice = build_lattice(pinyin, lex, !toneless);
      const auto best = beam > 0 ? beam_transcribe(lattice, model, channel_weight, beam).front()
                                 : viterbi_transcribe(lattice, model, channel_weight);
      std::cout << best.text() << '\t' << format_double(best.total_score) << '\n';
    }
    return 0;
  }
};

// ---- stats ----------------------------------------------------------------

struct StatsCmd {
  std::string corpus;
  int n_max = 6;
  bool parallel = false;
  bool table = false;
  std::string out;
  Assets assets;

  int run() const {
    if (n_max < 1) throw ConfigError("--n-max must be >= 1");
    const auto inv = assets.load_inventory();
    auto in = open_input(corpus);
    ParallelCorpus pc;
    if (parallel) {
      pc = read_parallel_tsv(in, inv, corpus);
    } else {
      const auto lex = assets.load_lexicon(inv);
      pc = build_parallel(filter_sentences(in, {1, static_cast<std::size_t>(-1)}), lex, corpus);
    }
    const auto rows = stats_report(pc, n_max);
    std::ostringstream tsv;
    write_stats_tsv(tsv, rows);
    if (!out.empty()) write_file_atomic(out, tsv.str());
    if (table)
      write_stats_table(std::cout, rows);
    else
      std::cout << tsv.str();
    return 0;
  }
};

// ---- score ----------------------------------------------------------------

struct ScoreCmd {
  std::string ref;
  std::string hyp;
  std::string unit = "char";
  bool strip_tones = false;
  std::string detail;
  Assets assets;

  int run() const {
    const auto refs_text = input_lines(ref);
    const auto hyps_text = input_lines(hyp);
    std::vector<TokenSeq> refs, hyps;
    const auto tokenize = [&](const std::string& line) {
      return unit == "char" ? characters(line) : split_ws(line);
    };
    for (const auto& l : refs_text) refs.push_back(tokenize(l));
    for (const auto& l : hyps_text) hyps.push_back(tokenize(l));
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < refs.size(); ++i) ids.push_back(utterance_id(i));

    ScoreReport report;
    std::string metric = unit == "char" ? "cer" : "uer";
    if (strip_tones) {
      if (unit == "char") throw ConfigError("--strip-tones needs --unit token");
      report = tone_stripped_rescore(refs, hyps, assets.load_inventory(), ids);
      metric += "_tone_stripped";
    } else {
      report = error_rate(refs, hyps, ids);
    }
    std::cout << "metric\trate_pct\tsub\tins\tdel\tref_len\n";
    write_summary_tsv(std::cout, metric, report);
    if (report.degenerate) std::cout << "# every reference is empty\n";
    if (!detail.empty()) {
      std::ostringstream d;
      write_detail_jsonl(d, report);
      write_file_atomic(detail, d.str());
    }
    return 0;
  }
};

// ---- synth ----------------------------------------------------------------

struct SynthCmd {
  std::string input;
  std::string out_dir;
  bool hanzi = false;
  bool toneless = false;
  std::uint64_t seed = 1;
  SimConfig sim;
  std::string policy = "tone-neighbor";
  Assets assets;

  int run() {
    sim.policy = parse_confusion_policy(policy);
    if (sim.frames_per_unit < 2) throw ConfigError("--frames-per-unit must be >= 2");
    if (!(sim.confusion_temperature >= 0.0)) throw ConfigError("--temperature must be >= 0");
    const auto inv = assets.load_inventory();
    std::optional<PronunciationLexicon> lex;
    if (hanzi) lex = assets.load_lexicon(inv);
    const EmissionSimulator simulator(inv.units(!toneless));
    fs::create_directories(out_dir);
    const auto lines = input_lines(input);
    std::size_t written = 0;
    for (const auto& line : lines) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::vector<Syllable> pinyin;
      if (hanzi) {
        const auto norm = normalize_sentence(line);
        if (!norm) throw Error("input is not valid UTF-8: " + line);
        pinyin = lex->to_pinyin(*norm);
      } else {
        pinyin = inv.parse_sequence(line, !toneless);
      }
      if (toneless) pinyin = strip_tones(pinyin);
      SimConfig sc = sim;
      sc.seed = derive_seed(seed, written);
      std::ostringstream body;
      write_emissions(body, simulator.synth(pinyin, sc));
      write_file_atomic(fs::path(out_dir) / (utterance_id(written) + ".emis"), body.str());
      ++written;
    }
    std::cout << "wrote " << written << " emission files to " << out_dir << '\n';
    return 0;
  }
};

// ---- validate-assets ------------------------------------------------------

struct ValidateCmd {
  std::string manifest = std::string(PINYINASR_DATA_DIR) + "/manifest.tsv";
  bool rewrite = false;

  int run() const {
    if (rewrite) {
      const auto m = AssetManifest::load(manifest);
      write_file_atomic(manifest, render_manifest(m));
      std::cout << "manifest refreshed: " << manifest << '\n';
    }
    const auto report = validate_assets(manifest);
    for (const auto& n : report.notes) std::cout << n << '\n';
    for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
    std::cout << (report.ok() ? "assets ok" : "asset validation failed") << '\n';
    return report.ok() ? 0 : kExitRuntime;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mandarin ASR with decoupled recognition (speech -> pinyin) and "
               "transcription (pinyin -> Hanzi)."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pinyinasr 0.1.0");

  PipelineCmd pipeline;
  auto* c_pipe = app.add_subcommand("pipeline", "Emissions -> pinyin beam search -> Hanzi Viterbi -> UER/CER reports");
  c_pipe->add_option("-c,--config", pipeline.config, "key=value config file");
  c_pipe->add_option("-s,--set", pipeline.overrides, "Override a config key (key=value); repeatable");
  c_pipe->add_option("-o,--out", pipeline.out, "Report directory (default: config key 'out')");

  TrainLmCmd train_lm;
  auto* c_train = app.add_subcommand("train-lm", "Train an interpolated Kneser-Ney n-gram LM and write ARPA");
  c_train->add_option("corpus", train_lm.corpus, "Training text, one sentence per line")->required();
  c_train->add_option("-o,--out", train_lm.out, "Output ARPA path")->required();
  c_train->add_option("-n,--order", train_lm.order, "n-gram order (1-6)")->capture_default_str();
  c_train->add_option("-d,--discount", train_lm.discount, "Absolute discount in (0, 1)")->capture_default_str();
  c_train->add_option("--units", train_lm.units,
                      "char: Hanzi characters; pinyin / pinyin-toneless: lexicon readings; "
                      "word: whitespace tokens")
      ->check(CLI::IsMember({"char", "pinyin", "pinyin-toneless", "word"}))
      ->capture_default_str();
  c_train->add_option("--min-len", train_lm.min_len, "Drop sentences shorter than this")->capture_default_str();
  c_train->add_option("--max-len", train_lm.max_len, "Drop sentences longer than this")->capture_default_str();
  train_lm.assets.add_to(c_train);

  DecodeCmd decode;
  auto* c_decode = app.add_subcommand("decode", "CTC prefix beam search over emission files");
  c_decode->add_option("emissions", decode.inputs, "Emission matrix files")->required();
  c_decode->add_option("--lm", decode.lm, "Unit-level ARPA LM for shallow fusion");
  c_decode->add_option("-b,--beam", decode.cfg.beam_width, "Beam width")->capture_default_str()->check(CLI::PositiveNumber);
  c_decode->add_option("-a,--alpha", decode.cfg.lm_weight, "LM weight")->capture_default_str();
  c_decode->add_option("--beta", decode.cfg.insertion_bonus, "Per-unit insertion bonus")->capture_default_str();
  c_decode->add_option("--prune", decode.cfg.prune_threshold, "Skip units below this log10 probability");
  c_decode->add_option("--nbest", decode.nbest, "Hypotheses to print per file")->capture_default_str();
  c_decode->add_flag("--greedy", decode.greedy, "Best-path decoding instead of beam search");

  TranscribeCmd transcribe;
  auto* c_trans = app.add_subcommand("transcribe", "Convert pinyin lines to Hanzi with a character LM");
  c_trans->add_option("input", transcribe.input, "Pinyin, one space-separated sentence per line (default stdin)");
  c_trans->add_option("--lm", transcribe.lm, "Character ARPA LM")->required();
  c_trans->add_option("-l,--lambda", transcribe.channel_weight, "Channel weight")->capture_default_str();
  c_trans->add_flag("--toneless", transcribe.toneless, "Input syllables carry no tones");
  c_trans->add_option("--beam", transcribe.beam, "Beam width (0: exact Viterbi)")->capture_default_str();
  transcribe.assets.add_to(c_trans);

  StatsCmd stats;
  auto* c_stats = app.add_subcommand("stats", "Pinyin n-gram to Hanzi n-gram mapping statistics");
  c_stats->add_option("corpus", stats.corpus, "Hanzi corpus (or parallel TSV with --parallel)")->required();
  c_stats->add_option("-n,--n-max", stats.n_max, "Largest n")->capture_default_str();
  c_stats->add_flag("--parallel", stats.parallel, "Input is hanzi<TAB>pinyin");
  c_stats->add_flag("--table", stats.table, "Print a readable table instead of TSV");
  c_stats->add_option("-o,--out", stats.out, "Also write the TSV here");
  stats.assets.add_to(c_stats);

  ScoreCmd score;
  auto* c_score = app.add_subcommand("score", "Pooled error rate of hypotheses against references");
  c_score->add_option("ref", score.ref, "Reference lines")->required();
  c_score->add_option("hyp", score.hyp, "Hypothesis lines")->required();
  c_score->add_option("--unit", score.unit, "char: per character; token: whitespace tokens")
      ->check(CLI::IsMember({"char", "token"}))
      ->capture_default_str();
  c_score->add_flag("--strip-tones", score.strip_tones, "Strip tones from pinyin tokens first");
  c_score->add_option("--detail", score.detail, "Write per-utterance JSON lines here");
  score.assets.add_to(c_score);

  SynthCmd synth;
  auto* c_synth = app.add_subcommand("synth", "Synthesize CTC emission matrices from transcripts");
  c_synth->add_option("input", synth.input, "Pinyin lines (or Hanzi with --hanzi); default stdin");
  c_synth->add_option("-o,--out-dir", synth.out_dir, "Directory for utt####.emis files")->required();
  c_synth->add_flag("--hanzi", synth.hanzi, "Input is Hanzi, read through the lexicon");
  c_synth->add_flag("--toneless", synth.toneless, "Emit toneless units");
  c_synth->add_option("--seed", synth.seed, "Base seed")->capture_default_str();
  c_synth->add_option("-t,--temperature", synth.sim.confusion_temperature, "Confusion temperature (0: clean)")
      ->capture_default_str();
  c_synth->add_option("--frames-per-unit", synth.sim.frames_per_unit, "Frames per syllable")->capture_default_str();
  c_synth->add_option("--blank-fill", synth.sim.blank_fill, "Blank mass on separator frames")->capture_default_str();
  c_synth->add_option("--confusion", synth.policy, "Confusable set")
      ->check(CLI::IsMember({"tone-neighbor", "final-neighbor", "uniform"}))
      ->capture_default_str();
  synth.assets.add_to(c_synth);

  ValidateCmd validate;
  auto* c_valid = app.add_subcommand("validate-assets", "Check bundled data files against the manifest");
  c_valid->add_option("manifest", validate.manifest, "Manifest TSV")->capture_default_str();
  c_valid->add_flag("--rewrite", validate.rewrite, "Recompute hashes and counts before checking");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*c_pipe) return pipeline.run();
    if (*c_train) return train_lm.run();
    if (*c_decode) return decode.run();
    if (*c_trans) return transcribe.run();
    if (*c_stats) return stats.run();
    if (*c_score) return score.run();
    if (*c_synth) return synth.run();
    if (*c_valid) return validate.run();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "stage error [" << e.stage() << "] " << e.utterance() << ": " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
