// Greedy-decoding error counts on the bundled eval suite across confusion
// temperatures. Used once to pin the recoverability threshold that the
// simulator tests assert.

#include <fstream>
#include <iostream>

#include "pinyinasr/corpus.hpp"
#include "pinyinasr/ctc.hpp"
#include "pinyinasr/emission_sim.hpp"
#include "pinyinasr/lexicon.hpp"

using namespace pinyinasr;

int main(int argc, char** argv) {
  const std::string data = argc > 1 ? argv[1] : PINYINASR_DATA_DIR;
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 1;
  const auto inv = SyllableInventory::load(data + "/inventory.txt");
  const auto lex = PronunciationLexicon::load(data + "/lexicon.tsv", inv);
  std::ifstream in(data + "/corpus/eval.txt");
  const auto suite = build_parallel(filter_sentences(in, {}), lex);

  std::cout << "policy\ttonal\ttemperature\twrong\tutterances\n";
  for (auto policy : {ConfusionPolicy::ToneNeighbor, ConfusionPolicy::FinalNeighbor, ConfusionPolicy::Uniform}) {
    for (bool tonal : {true, false}) {
      const EmissionSimulator sim(inv.units(tonal));
      for (double temp : {0.05, 0.1, 0.12, 0.15, 0.2, 0.25, 0.35}) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < suite.pairs.size(); ++i) {
          SimConfig cfg;
          cfg.confusion_temperature = temp;
          cfg.policy = policy;
          cfg.seed = derive_seed(seed, i);
          const auto units = tonal ? suite.pairs[i].pinyin : strip_tones(suite.pairs[i].pinyin);
          const auto e = sim.synth(units, cfg);
          std::vector<std::string> ref;
          for (const auto& s : units) ref.push_back(s.str());
          if (label_strings(e, greedy_decode(e)) != ref) ++wrong;
        }
        std::cout << to_string(policy) << '\t' << tonal << '\t' << temp << '\t' << wrong << '\t'
                  << suite.pairs.size() << '\n';
      }
    }
  }
}
