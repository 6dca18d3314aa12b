#pragma once

#include "rewriteval/corpus.hpp"

#include <functional>
#include <string>
#include <vector>

namespace rewriteval {

// Entity mentions found in one text, normalized: lowercased, internal
// whitespace collapsed to single spaces, no empties, sorted and unique.
struct EntitySet {
    std::vector<std::string> entities;

    bool contains(const std::string& normalized) const;
};

struct RecognizerOptions {
    // Lowercased words that never count as single-word entities at a
    // sentence start ("the", "however", ...). Empty = built-in list.
    std::vector<std::string> stopwords;
};

// Capitalization-based entity recognizer:
//   - maximal runs of adjacent capitalized words form one mention;
//     runs of two or more words always count;
//   - a lone capitalized word mid-sentence counts;
//   - a lone capitalized word at a sentence start counts only when it is
//     not a stoplisted common word, or when the same surface form recurs
//     capitalized mid-sentence elsewhere in the text;
//   - standalone four-digit numbers in 1000..2999 count as year mentions.
EntitySet recognize(const std::string& text);
EntitySet recognize(const std::string& text, const RecognizerOptions& options);

const std::vector<std::string>& default_stopwords();

using Recognizer = std::function<EntitySet(const std::string&)>;

struct ExampleHallucination {
    int id = 0;
    bool hallucinated = false;
    std::vector<std::string> novel_entities;  // in prediction, absent from source
};

struct HallucinationReport {
    std::vector<ExampleHallucination> per_example;  // ordered by id
    double rate = 0.0;  // 100 * hallucinated examples / N
};

// Per example: novel = recognize(prediction) minus recognize(source) as
// normalized-string sets; the example is flagged iff novel is non-empty.
// The computation depends on the recognizer only through the EntitySets
// it returns, so any recognizer (the built-in heuristic, a stub, or an
// external tool adapter) plugs in; the default is `recognize`.
HallucinationReport hallucination_rate(const Corpus& corpus,
                                       const Recognizer& recognizer = {});

// Normalizes one mention the way EntitySet stores them.
std::string normalize_entity(const std::string& mention);

} // namespace rewriteval
