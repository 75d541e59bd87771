#pragma once

#include <span>
#include <string>
#include <vector>

#include "pinyinasr/lexicon.hpp"
#include "pinyinasr/ngram.hpp"
#include "pinyinasr/syllable.hpp"

namespace pinyinasr {

struct LatticeCandidate {
  std::string hanzi;
  double channel;  // log10 P(syllable | character)
};

/// One candidate set per input syllable.
struct HomophoneLattice {
  std::vector<std::vector<LatticeCandidate>> positions;

  std::size_t size() const { return positions.size(); }
};

/// Position i lists every lexicon character read as syllable i (tonal) or
/// as any tone of it (toneless; input tones are ignored). Throws NoCandidate.
HomophoneLattice build_lattice(std::span<const Syllable> pinyin, const PronunciationLexicon& lex,
                               bool tonal);

struct TranscriptionResult {
  std::vector<std::string> hanzi;  // one character per input syllable
  double total_score = 0.0;        // LM log10 (incl. </s>) + lambda * channel

  std::string text() const;
};

/// Exact best path under a character n-gram LM. Ties go to the
/// lexicographically smaller character sequence.
TranscriptionResult viterbi_transcribe(const HomophoneLattice& lattice, const NGramModel& char_lm,
                                       double channel_weight = 1.0);

/// Beam-limited variant: at most beam_width LM states survive each
/// position. Returns up to beam_width results, best first.
std::vector<TranscriptionResult> beam_transcribe(const HomophoneLattice& lattice,
                                                 const NGramModel& char_lm, double channel_weight,
                                                 std::size_t beam_width);

}  // namespace pinyinasr
