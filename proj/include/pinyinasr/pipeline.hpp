#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pinyinasr/config.hpp"
#include "pinyinasr/corpus.hpp"
#include "pinyinasr/ctc.hpp"
#include "pinyinasr/emission_sim.hpp"
#include "pinyinasr/errors.hpp"
#include "pinyinasr/eval.hpp"

namespace pinyinasr {

/// Everything the recognition -> transcription chain needs.
struct PipelineConfig {
  std::filesystem::path inventory;
  std::filesystem::path lexicon;
  std::filesystem::path train_corpus;  // Hanzi text; feeds both LMs
  std::filesystem::path eval_corpus;   // Hanzi text; the test utterances
  std::filesystem::path pinyin_lm;     // ARPA; trained from train_corpus when empty
  std::filesystem::path char_lm;       // ARPA; trained from train_corpus when empty
  std::filesystem::path emissions_dir; // <id>.emis files; synthesized when empty

  bool tonal = true;   // recognition units carry tones
  bool use_lm = true;  // shallow fusion during CTC decoding
  /// Drop eval sentences from the LM training text. Off only for
  /// closed-domain suites.
  bool holdout_eval = true;
  int lm_order = 3;
  int char_lm_order = 3;
  double discount = 0.7;
  DecoderConfig decoder{16, 0.5, 0.0, -6.0};
  double channel_weight = 1.0;
  SimConfig sim{3, 0.9, 0.0, ConfusionPolicy::FinalNeighbor, 0};
  LengthBounds bounds;
  std::uint64_t seed = 1;
  std::size_t max_utterances = 0;  // 0 = all
  std::size_t jobs = 1;

  /// Reads recognized keys, ignoring unknown ones. Throws ConfigError.
  static PipelineConfig from(const KeyValueConfig& kv);
  KeyValueConfig to_key_values() const;
  /// Makes relative paths relative to `base` (the config file's directory).
  void resolve_relative_to(const std::filesystem::path& base);
  /// Referenced files must exist (ConfigError naming the path).
  void validate() const;
};

/// A stage failed on one utterance.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string utterance, const std::string& what)
      : Error(stage + " failed on " + utterance + ": " + what),
        stage_(std::move(stage)),
        utterance_(std::move(utterance)) {}
  const std::string& stage() const { return stage_; }
  const std::string& utterance() const { return utterance_; }

 private:
  std::string stage_;
  std::string utterance_;
};

struct UtteranceResult {
  std::string id;
  std::string ref_hanzi;
  TokenSeq ref_units;
  TokenSeq hyp_units;
  std::string hyp_hanzi;
  double decode_score = 0.0;
  double transcribe_score = 0.0;
};

struct PipelineResult {
  std::string config_hash;
  std::vector<UtteranceResult> utterances;
  ScoreReport uer;                          // in the recognition units
  std::optional<ScoreReport> uer_stripped;  // tonal runs only
  ScoreReport cer;
};

/// Runs synth/ingest -> prefix beam search -> Viterbi transcription ->
/// scoring. Throws ConfigError for bad settings or unreadable assets and
/// StageError for per-utterance failures.
PipelineResult run_pipeline(const PipelineConfig& cfg);

/// report.tsv, utterances.jsonl and hyps.tsv, each written atomically.
void write_pipeline_reports(const PipelineResult& result, const std::filesystem::path& out_dir);

}  // namespace pinyinasr
