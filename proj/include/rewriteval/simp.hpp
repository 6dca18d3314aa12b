#pragma once

#include "rewriteval/corpus.hpp"

#include <string>
#include <vector>

namespace rewriteval {

// Per-operation, per-order component scores on a 0..100 scale. Index k
// holds the score for n-gram order k+1, already averaged over sentences.
// `sari` is the mean of all 3 * max_n components.
struct SariBreakdown {
    std::vector<double> keep_n;
    std::vector<double> delete_n;
    std::vector<double> add_n;
    double sari = 0.0;

    // Means over orders, for compact reporting.
    double keep() const;
    double del() const;
    double add() const;
};

struct LengthStats {
    double l_in = 0.0;    // mean source word count
    double l_pred = 0.0;  // mean prediction word count
    double l_ref = 0.0;   // mean word count over all references of all records
    double compression = 0.0;  // l_pred / l_in; < 1 shortened, > 1 lengthened
};

// Reference-based rewrite score. For each sentence and order n, with input
// n-gram multiset I, prediction multiset P, and fractional reference
// counts R (an n-gram kept by 2 of 3 references weighs 2/3):
//   Keep_n   = F1 of (I cap P) against (I cap R)
//   Delete_n = precision of (I - P) against (I - R)
//   Add_n    = F1 of (P - I) against (R - I)
// Delete stays precision-only so over-deletion is penalized while
// aggressive valid deletion is not. Ratios with an empty denominator are
// 1.0 (a vacuous requirement, perfectly met). Tokens are lowercased rule
// tokens; punctuation participates. Per-order scores are averaged over
// sentences and scaled to 0..100. Requires predictions and >= 1 reference
// on every record.
SariBreakdown sari(const Corpus& corpus, int max_n = 4);

SariBreakdown sari_sentence(const std::string& input,
                            const std::vector<std::string>& references,
                            const std::string& prediction,
                            int max_n = 4);

// Flesch Reading Ease, unclamped:
//   206.835 - 1.015 * words/sentences - 84.6 * syllables/words.
// Words are word/number tokens; syllables per count_syllables; sentences
// per count_sentences. Text without a single word is rejected.
double fre(const std::string& text);

// Flesch-Kincaid Grade Level:
//   0.39 * words/sentences + 11.8 * syllables/words - 15.59.
double fkgl(const std::string& text);

// Corpus means over predictions that contain at least one word token;
// wordless predictions are skipped, and a corpus with none is rejected.
double corpus_fre(const Corpus& corpus);
double corpus_fkgl(const Corpus& corpus);

// Mean word counts and the output/input length ratio. Requires
// predictions; rejects any source with zero words.
LengthStats length_stats(const Corpus& corpus);

} // namespace rewriteval
