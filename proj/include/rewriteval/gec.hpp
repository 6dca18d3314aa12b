#pragma once

#include "rewriteval/corpus.hpp"
#include "rewriteval/tokenize.hpp"

#include <string>
#include <vector>

namespace rewriteval {

// A span edit over the source tokens: replace [start, end) with the
// (space-joined) replacement tokens; empty replacement deletes, and
// start == end inserts before `start`.
struct Edit {
    int start = 0;
    int end = 0;
    std::string replacement;

    bool operator==(const Edit&) const = default;
    auto operator<=>(const Edit&) const = default;
};

struct EditSet {
    int sentence_id = 0;
    std::vector<Edit> edits;  // sorted by start, non-overlapping

    bool operator==(const EditSet& other) const { return edits == other.edits; }
};

struct PRFScore {
    double precision = 0.0;
    double recall = 0.0;
    double f_beta = 0.0;
    double beta = 0.5;
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
};

// Precision/recall with the 0/0 -> 1.0 convention (an empty hypothesis
// against an empty gold set is perfect), and F_beta = 0 when both are 0.
PRFScore prf(long long tp, long long fp, long long fn, double beta);

// Aligns two token sequences with a Levenshtein dynamic program (match 0;
// substitution 0 if the tokens differ only by ASCII case, else 1;
// insertion and deletion 1; ties broken preferring match > substitution >
// deletion > insertion) and merges maximal contiguous runs of non-match
// operations into single span edits.
EditSet extract_edits(const std::vector<std::string>& source,
                      const std::vector<std::string>& target);
EditSet extract_edits(const TokenSeq& source, const TokenSeq& target);

// Applies span edits to `source`. Inverse of extract_edits:
// apply_edits(src, extract_edits(src, tgt)) == tgt.
std::vector<std::string> apply_edits(const std::vector<std::string>& source,
                                     const EditSet& edits);

// Edit-level scoring against multi-annotator gold edits. Hypothesis edits
// come from extract_edits over the whitespace tokenizations of source and
// prediction; a true positive is an exact (start, end, replacement) triple
// match (replacement whitespace-normalized, case-sensitive). Per sentence
// the annotator maximizing the sentence-level F_beta is chosen (ties go to
// the lower annotator id); corpus tp/fp/fn are summed over sentences and
// the ratios computed once. Sentences absent from `gold` count as a single
// annotator with no edits.
PRFScore m2_score(const Corpus& corpus,
                  const std::vector<GoldEditSet>& gold,
                  double beta = 0.5);

struct GleuOptions {
    int max_n = 4;
    bool sentence_mean = false;  // mean of per-sentence scores instead of pooled counts
};

// N-gram overlap score, case-sensitive over rule-tokenizer tokens. Pools
// the n-gram multisets for n = 1..max_n, clips hypothesis counts by the
// reference, and scores min(matches/hyp_total, matches/ref_total). Each
// sentence keeps its best reference (highest score, then more matches,
// then shorter reference, then file order); the default corpus score
// recombines the pooled tallies of the selected references.
double gleu(const Corpus& corpus, const GleuOptions& options = {});

// Best-reference score for a single hypothesis; used by per-sentence
// reporting and the bindings.
double gleu_sentence(const std::string& hypothesis,
                     const std::vector<std::string>& references,
                     int max_n = 4);

} // namespace rewriteval
