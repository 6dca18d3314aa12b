#include "rewriteval/simp.hpp"

#include "rewriteval/errors.hpp"
#include "rewriteval/tokenize.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace rewriteval {

namespace {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

std::vector<std::string> lowered_tokens(const std::string& text) {
    std::vector<std::string> out;
    for (auto& t : tokenize(text).tokens) out.push_back(lower_ascii(t.text));
    return out;
}

std::map<std::string, double> ngrams_of_order(const std::vector<std::string>& tokens, int n) {
    std::map<std::string, double> counts;
    const int len = static_cast<int>(tokens.size());
    for (int i = 0; i + n <= len; ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < n; ++k) {
            key += '\x1f';
            key += tokens[i + k];
        }
        counts[key] += 1.0;
    }
    return counts;
}

double get(const std::map<std::string, double>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? 0.0 : it->second;
}

// Sum of min(a(g), b(g)) over all n-grams.
double overlap(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    double sum = 0.0;
    for (const auto& [key, count] : a) sum += std::min(count, get(b, key));
    return sum;
}

double total(const std::map<std::string, double>& m) {
    double sum = 0.0;
    for (const auto& [key, count] : m) sum += count;
    return sum;
}

// a - b clamped at zero, dropping empties.
std::map<std::string, double> diff(const std::map<std::string, double>& a,
                                   const std::map<std::string, double>& b) {
    std::map<std::string, double> out;
    for (const auto& [key, count] : a) {
        double d = count - get(b, key);
        if (d > 0.0) out[key] = d;
    }
    return out;
}

std::map<std::string, double> intersect(const std::map<std::string, double>& a,
                                        const std::map<std::string, double>& b) {
    std::map<std::string, double> out;
    for (const auto& [key, count] : a) {
        double m = std::min(count, get(b, key));
        if (m > 0.0) out[key] = m;
    }
    return out;
}

// Empty requirement perfectly met: 0/0 is 1.
double ratio_or_one(double num, double den) {
    return den == 0.0 ? 1.0 : num / den;
}

double f1(double p, double r) {
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

struct SentenceComponents {
    double keep = 0.0;
    double del = 0.0;
    double add = 0.0;
};

SentenceComponents sari_components(const std::vector<std::string>& input,
                                   const std::vector<std::vector<std::string>>& refs,
                                   const std::vector<std::string>& pred,
                                   int n) {
    auto i_counts = ngrams_of_order(input, n);
    auto p_counts = ngrams_of_order(pred, n);

    // Fractional reference counts: each n-gram weighs the fraction of
    // references that contain it.
    std::map<std::string, double> r_counts;
    for (const auto& ref : refs)
        for (const auto& [key, count] : ngrams_of_order(ref, n)) r_counts[key] += 1.0;
    for (auto& [key, count] : r_counts) count /= static_cast<double>(refs.size());

    SentenceComponents out;

    auto kept_p = intersect(i_counts, p_counts);  // what the system kept
    auto kept_r = intersect(i_counts, r_counts);  // what it should have kept
    double kept_hit = overlap(kept_p, kept_r);
    out.keep = f1(ratio_or_one(kept_hit, total(kept_p)),
                  ratio_or_one(kept_hit, total(kept_r)));

    auto deleted_p = diff(i_counts, p_counts);
    auto deleted_r = diff(i_counts, r_counts);
    double deleted_hit = overlap(deleted_p, deleted_r);
    // Precision only: over-deleting relative to the references costs, but
    // deleting more of what they deleted does not.
    out.del = ratio_or_one(deleted_hit, total(deleted_p));

    auto added_p = diff(p_counts, i_counts);
    auto added_r = diff(r_counts, i_counts);
    double added_hit = overlap(added_p, added_r);
    out.add = f1(ratio_or_one(added_hit, total(added_p)),
                 ratio_or_one(added_hit, total(added_r)));
    return out;
}

struct TextCounts {
    double words = 0.0;
    double syllables = 0.0;
    double sentences = 0.0;
};

TextCounts readability_counts(const std::string& text) {
    TokenSeq seq = tokenize(text);
    TextCounts c;
    for (const auto& t : seq.tokens) {
        if (t.kind == TokenKind::Punctuation) continue;
        c.words += 1.0;
        c.syllables += static_cast<double>(count_syllables(t.text));
    }
    c.sentences = static_cast<double>(count_sentences(text));
    return c;
}

void require_scorable(const Corpus& corpus) {
    if (corpus.empty()) throw usage_error("cannot score an empty corpus");
    if (!corpus.has_predictions())
        throw usage_error("corpus has records without predictions");
}

} // namespace

double SariBreakdown::keep() const { return mean(keep_n); }
double SariBreakdown::del() const { return mean(delete_n); }
double SariBreakdown::add() const { return mean(add_n); }

SariBreakdown sari(const Corpus& corpus, int max_n) {
    require_scorable(corpus);
    if (max_n < 1) throw usage_error("max_n must be at least 1");
    for (const auto& rec : corpus.records)
        if (rec.references.empty())
            throw usage_error("record " + std::to_string(rec.id) + " has no references");

    std::vector<double> keep_sum(max_n, 0.0), del_sum(max_n, 0.0), add_sum(max_n, 0.0);
    for (const auto& rec : corpus.records) {
        auto input = lowered_tokens(rec.source);
        auto pred = lowered_tokens(*rec.prediction);
        std::vector<std::vector<std::string>> refs;
        refs.reserve(rec.references.size());
        for (const auto& r : rec.references) refs.push_back(lowered_tokens(r));
        for (int n = 1; n <= max_n; ++n) {
            auto c = sari_components(input, refs, pred, n);
            keep_sum[n - 1] += c.keep;
            del_sum[n - 1] += c.del;
            add_sum[n - 1] += c.add;
        }
    }

    const double n_records = static_cast<double>(corpus.size());
    SariBreakdown out;
    double component_sum = 0.0;
    for (int n = 0; n < max_n; ++n) {
        out.keep_n.push_back(100.0 * keep_sum[n] / n_records);
        out.delete_n.push_back(100.0 * del_sum[n] / n_records);
        out.add_n.push_back(100.0 * add_sum[n] / n_records);
        component_sum += out.keep_n.back() + out.delete_n.back() + out.add_n.back();
    }
    out.sari = component_sum / (3.0 * max_n);
    return out;
}

SariBreakdown sari_sentence(const std::string& input,
                            const std::vector<std::string>& references,
                            const std::string& prediction,
                            int max_n) {
    Corpus one;
    one.task = Task::simplification;
    one.reference_count = references.size();
    one.records.push_back({0, input, references, prediction});
    return sari(one, max_n);
}

double fre(const std::string& text) {
    TextCounts c = readability_counts(text);
    if (c.words == 0.0) throw usage_error("readability needs at least one word");
    return 206.835 - 1.015 * (c.words / c.sentences) - 84.6 * (c.syllables / c.words);
}

double fkgl(const std::string& text) {
    TextCounts c = readability_counts(text);
    if (c.words == 0.0) throw usage_error("readability needs at least one word");
    return 0.39 * (c.words / c.sentences) + 11.8 * (c.syllables / c.words) - 15.59;
}

namespace {

double corpus_readability(const Corpus& corpus, double (*score)(const std::string&)) {
    require_scorable(corpus);
    double sum = 0.0;
    long long counted = 0;
    for (const auto& rec : corpus.records) {
        if (tokenize(*rec.prediction).word_count() == 0) continue;  // nothing to read
        sum += score(*rec.prediction);
        ++counted;
    }
    if (counted == 0) throw usage_error("no prediction contains a word");
    return sum / static_cast<double>(counted);
}

} // namespace

double corpus_fre(const Corpus& corpus) { return corpus_readability(corpus, &fre); }
double corpus_fkgl(const Corpus& corpus) { return corpus_readability(corpus, &fkgl); }

LengthStats length_stats(const Corpus& corpus) {
    require_scorable(corpus);
    double in_sum = 0.0, pred_sum = 0.0, ref_sum = 0.0;
    long long ref_count = 0;
    for (const auto& rec : corpus.records) {
        auto in_words = tokenize(rec.source).word_count();
        if (in_words == 0)
            throw usage_error("record " + std::to_string(rec.id) + " has a wordless source");
        in_sum += static_cast<double>(in_words);
        pred_sum += static_cast<double>(tokenize(*rec.prediction).word_count());
        for (const auto& r : rec.references) {
            ref_sum += static_cast<double>(tokenize(r).word_count());
            ++ref_count;
        }
    }
    LengthStats out;
    const double n = static_cast<double>(corpus.size());
    out.l_in = in_sum / n;
    out.l_pred = pred_sum / n;
    out.l_ref = ref_count == 0 ? 0.0 : ref_sum / static_cast<double>(ref_count);
    out.compression = out.l_pred / out.l_in;
    return out;
}

} // namespace rewriteval
