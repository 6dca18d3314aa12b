#include "rewriteval/hallucination.hpp"

#include "rewriteval/errors.hpp"
#include "rewriteval/tokenize.hpp"

#include <algorithm>
#include <set>

namespace rewriteval {

namespace {

bool ascii_upper_initial(const std::string& s) {
    return !s.empty() && s[0] >= 'A' && s[0] <= 'Z';
}

bool year_like(const Token& t) {
    if (t.kind != TokenKind::Number || t.text.size() != 4) return false;
    for (char c : t.text)
        if (c < '0' || c > '9') return false;
    int value = std::stoi(t.text);
    return value >= 1000 && value <= 2999;
}

bool sentence_terminator(const Token& t) {
    return t.kind == TokenKind::Punctuation &&
           t.text.find_first_of(".!?") != std::string::npos;
}

} // namespace

std::string normalize_entity(const std::string& mention) {
    std::string lowered = lower_ascii(mention);
    return join_tokens(tokenize_whitespace(lowered));
}

bool EntitySet::contains(const std::string& normalized) const {
    return std::binary_search(entities.begin(), entities.end(), normalized);
}

const std::vector<std::string>& default_stopwords() {
    // Common sentence openers that are almost never entity mentions when
    // they stand alone at a sentence start.
    static const std::vector<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "almost",
        "also", "although", "always", "am", "an", "and", "another", "any",
        "anyone", "anything", "are", "as", "at", "be", "because", "been",
        "before", "being", "below", "besides", "between", "both", "but", "by",
        "can", "cannot", "could", "despite", "did", "do", "does", "doing",
        "down", "during", "each", "either", "else", "even", "eventually",
        "every", "everyone", "everything", "few", "finally", "first", "for",
        "from", "further", "had", "has", "have", "having", "he", "her", "here",
        "hers", "herself", "him", "himself", "his", "how", "however", "i",
        "if", "in", "indeed", "instead", "into", "is", "it", "its", "itself",
        "just", "last", "later", "less", "let", "like", "likewise", "many",
        "may", "maybe", "me", "meanwhile", "might", "mine", "more", "moreover",
        "most", "much", "must", "my", "myself", "neither", "never",
        "nevertheless", "next", "no", "nobody", "none", "nor", "not",
        "nothing", "now", "of", "off", "often", "on", "once", "one", "only",
        "or", "other", "others", "otherwise", "our", "ours", "ourselves",
        "out", "over", "perhaps", "please", "rather", "recently", "second",
        "she", "should", "since", "so", "some", "somebody", "someone",
        "something", "sometimes", "soon", "still", "such", "suddenly", "that",
        "the", "their", "theirs", "them", "themselves", "then", "there",
        "therefore", "these", "they", "third", "this", "those", "though",
        "through", "thus", "to", "today", "together", "tomorrow", "too",
        "under", "unfortunately", "until", "up", "upon", "us", "usually",
        "very", "was", "we", "well", "were", "what", "whatever", "when",
        "whenever", "where", "whether", "which", "while", "who", "whoever",
        "whom", "whose", "why", "will", "with", "within", "without", "would",
        "yes", "yesterday", "yet", "you", "your", "yours", "yourself",
    };
    return words;
}

EntitySet recognize(const std::string& text) {
    return recognize(text, RecognizerOptions{});
}

EntitySet recognize(const std::string& text, const RecognizerOptions& options) {
    const std::vector<std::string>& stop_source =
        options.stopwords.empty() ? default_stopwords() : options.stopwords;
    std::set<std::string> stopwords(stop_source.begin(), stop_source.end());

    TokenSeq seq = tokenize(text);
    const auto& toks = seq.tokens;
    const std::size_t n = toks.size();

    // Sentence-initial = first word-like token of the text, or the first
    // after a terminator (.!?) punctuation token.
    std::vector<bool> sentence_initial(n, false);
    {
        bool at_start = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (toks[i].kind == TokenKind::Punctuation) {
                if (sentence_terminator(toks[i])) at_start = true;
                continue;
            }
            sentence_initial[i] = at_start;
            at_start = false;
        }
    }

    const auto capitalized = [&](std::size_t i) {
        return toks[i].kind == TokenKind::Word && ascii_upper_initial(toks[i].text);
    };

    // Does this surface form recur capitalized somewhere mid-sentence?
    const auto recurs_mid_sentence = [&](const std::string& surface) {
        for (std::size_t i = 0; i < n; ++i)
            if (!sentence_initial[i] && capitalized(i) && toks[i].text == surface)
                return true;
        return false;
    };

    std::set<std::string> found;
    for (std::size_t i = 0; i < n;) {
        if (year_like(toks[i])) {
            found.insert(toks[i].text);
            ++i;
            continue;
        }
        if (!capitalized(i)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < n && capitalized(i)) ++i;
        const std::size_t len = i - start;

        bool keep = true;
        if (len == 1 && sentence_initial[start]) {
            // A lone capitalized sentence opener is usually just a
            // capitalized common word; keep it only when it does not look
            // like one, or when the same surface shows up capitalized
            // mid-sentence.
            keep = !stopwords.count(lower_ascii(toks[start].text)) ||
                   recurs_mid_sentence(toks[start].text);
        }
        if (keep) {
            std::string mention = toks[start].text;
            for (std::size_t k = start + 1; k < i; ++k) {
                mention += ' ';
                mention += toks[k].text;
            }
            found.insert(normalize_entity(mention));
        }
    }

    EntitySet out;
    out.entities.assign(found.begin(), found.end());
    return out;
}

HallucinationReport hallucination_rate(const Corpus& corpus,
                                       const Recognizer& recognizer) {
    if (corpus.empty()) throw usage_error("cannot score an empty corpus");
    if (!corpus.has_predictions())
        throw usage_error("corpus has records without predictions");

    const Recognizer rec = recognizer
        ? recognizer
        : Recognizer([](const std::string& t) { return recognize(t); });

    // EntitySets are semantically unordered; canonicalize whatever the
    // recognizer returned so set difference is well defined.
    const auto canonical = [](EntitySet set) {
        std::sort(set.entities.begin(), set.entities.end());
        set.entities.erase(std::unique(set.entities.begin(), set.entities.end()),
                           set.entities.end());
        return set;
    };

    HallucinationReport report;
    long long flagged = 0;
    for (const auto& record : corpus.records) {
        EntitySet in_source = canonical(rec(record.source));
        EntitySet in_pred = canonical(rec(*record.prediction));

        ExampleHallucination ex;
        ex.id = record.id;
        for (const auto& entity : in_pred.entities)
            if (!in_source.contains(entity)) ex.novel_entities.push_back(entity);
        ex.hallucinated = !ex.novel_entities.empty();
        if (ex.hallucinated) ++flagged;
        report.per_example.push_back(std::move(ex));
    }
    report.rate = 100.0 * static_cast<double>(flagged) /
                  static_cast<double>(corpus.size());
    return report;
}

} // namespace rewriteval
