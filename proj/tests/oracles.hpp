#pragma once

// Deliberately naive reference implementations of the scoring rules, kept
// independent of the library on purpose: vector-keyed n-gram maps instead
// of joined string keys, exhaustive search over every minimal alignment
// instead of a dynamic-programming backtrace, and separate counting code
// for syllables and sentences. Tests compare the fast implementations
// against these on small inputs; agreement between the two routes is the
// evidence of correctness.

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace orc {

using Tokens = std::vector<std::string>;

inline Tokens split_ws(const std::string& text) {
    Tokens out;
    std::string cur;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline std::string to_lower(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline Tokens lower_all(const Tokens& tokens) {
    Tokens out;
    for (const auto& t : tokens) out.push_back(to_lower(t));
    return out;
}

// ------------------------------------------------------------------ GLEU

// Multiset of n-grams for all orders 1..max_n, keyed by token vectors.
inline std::map<Tokens, long long> ngrams_upto(const Tokens& tokens, int max_n) {
    std::map<Tokens, long long> counts;
    for (int n = 1; n <= max_n; ++n)
        for (std::size_t i = 0; i + n <= tokens.size(); ++i)
            ++counts[Tokens(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

inline long long ngram_total(std::size_t len, int max_n) {
    long long total = 0;
    for (int n = 1; n <= max_n; ++n)
        if (len >= static_cast<std::size_t>(n))
            total += static_cast<long long>(len) - n + 1;
    return total;
}

struct GleuTally {
    long long matches = 0;
    long long hyp_total = 0;
    long long ref_total = 0;
    double score = 0.0;
};

inline double zero_safe(long long num, long long den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

inline GleuTally gleu_pick_reference(const Tokens& hyp,
                                     const std::vector<Tokens>& refs,
                                     int max_n) {
    auto hyp_counts = ngrams_upto(hyp, max_n);
    GleuTally best;
    bool have = false;
    for (const auto& ref : refs) {
        GleuTally cur;
        cur.hyp_total = ngram_total(hyp.size(), max_n);
        cur.ref_total = ngram_total(ref.size(), max_n);
        auto ref_counts = ngrams_upto(ref, max_n);
        for (const auto& [gram, count] : hyp_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) cur.matches += std::min(count, it->second);
        }
        cur.score = std::min(zero_safe(cur.matches, cur.hyp_total),
                             zero_safe(cur.matches, cur.ref_total));
        bool better =
            !have || cur.score > best.score ||
            (cur.score == best.score && cur.matches > best.matches) ||
            (cur.score == best.score && cur.matches == best.matches &&
             cur.ref_total < best.ref_total);
        if (better) {
            best = cur;
            have = true;
        }
    }
    return best;
}

inline double gleu_corpus(const std::vector<Tokens>& hyps,
                          const std::vector<std::vector<Tokens>>& refs,
                          int max_n,
                          bool sentence_mean = false) {
    long long m = 0, h = 0, r = 0;
    double score_sum = 0.0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        GleuTally t = gleu_pick_reference(hyps[i], refs[i], max_n);
        m += t.matches;
        h += t.hyp_total;
        r += t.ref_total;
        score_sum += t.score;
    }
    if (sentence_mean) return score_sum / static_cast<double>(hyps.size());
    return std::min(zero_safe(m, h), zero_safe(m, r));
}

// ------------------------------------------------------------------ SARI

using Grams = std::map<Tokens, double>;

inline Grams grams_exact(const Tokens& tokens, int n) {
    Grams out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        out[Tokens(tokens.begin() + i, tokens.begin() + i + n)] += 1.0;
    return out;
}

inline double gram_at(const Grams& g, const Tokens& key) {
    auto it = g.find(key);
    return it == g.end() ? 0.0 : it->second;
}

inline Grams gram_minus(const Grams& a, const Grams& b) {
    Grams out;
    for (const auto& [key, count] : a) {
        double d = count - gram_at(b, key);
        if (d > 0.0) out[key] = d;
    }
    return out;
}

inline Grams gram_min(const Grams& a, const Grams& b) {
    Grams out;
    for (const auto& [key, count] : a) {
        double m = std::min(count, gram_at(b, key));
        if (m > 0.0) out[key] = m;
    }
    return out;
}

inline double gram_sum(const Grams& g) {
    double sum = 0.0;
    for (const auto& [key, count] : g) sum += count;
    return sum;
}

inline double gram_overlap(const Grams& a, const Grams& b) {
    double sum = 0.0;
    for (const auto& [key, count] : a) sum += std::min(count, gram_at(b, key));
    return sum;
}

inline double one_safe(double num, double den) { return den == 0.0 ? 1.0 : num / den; }

inline double f1_of(double p, double r) {
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

struct SariParts {
    std::vector<double> keep, del, add;  // per order, 0..100
    double sari = 0.0;
};

// inputs/preds/refs must already be lowercased token vectors.
inline SariParts sari_corpus(const std::vector<Tokens>& inputs,
                             const std::vector<std::vector<Tokens>>& refs,
                             const std::vector<Tokens>& preds,
                             int max_n) {
    SariParts out;
    out.keep.assign(max_n, 0.0);
    out.del.assign(max_n, 0.0);
    out.add.assign(max_n, 0.0);
    const std::size_t sentences = inputs.size();
    for (std::size_t s = 0; s < sentences; ++s) {
        for (int n = 1; n <= max_n; ++n) {
            Grams ig = grams_exact(inputs[s], n);
            Grams pg = grams_exact(preds[s], n);
            Grams rg;
            for (const auto& ref : refs[s])
                for (const auto& [key, cnt] : grams_exact(ref, n)) rg[key] += 1.0;
            for (auto& [key, cnt] : rg) cnt /= static_cast<double>(refs[s].size());

            Grams kept_p = gram_min(ig, pg);
            Grams kept_r = gram_min(ig, rg);
            double kept_hit = gram_overlap(kept_p, kept_r);
            out.keep[n - 1] += f1_of(one_safe(kept_hit, gram_sum(kept_p)),
                                     one_safe(kept_hit, gram_sum(kept_r)));

            Grams del_p = gram_minus(ig, pg);
            Grams del_r = gram_minus(ig, rg);
            out.del[n - 1] += one_safe(gram_overlap(del_p, del_r), gram_sum(del_p));

            Grams add_p = gram_minus(pg, ig);
            Grams add_r = gram_minus(rg, ig);
            double add_hit = gram_overlap(add_p, add_r);
            out.add[n - 1] += f1_of(one_safe(add_hit, gram_sum(add_p)),
                                    one_safe(add_hit, gram_sum(add_r)));
        }
    }
    double component_sum = 0.0;
    for (int n = 0; n < max_n; ++n) {
        out.keep[n] = 100.0 * out.keep[n] / static_cast<double>(sentences);
        out.del[n] = 100.0 * out.del[n] / static_cast<double>(sentences);
        out.add[n] = 100.0 * out.add[n] / static_cast<double>(sentences);
        component_sum += out.keep[n] + out.del[n] + out.add[n];
    }
    out.sari = component_sum / (3.0 * max_n);
    return out;
}

// ------------------------------------------------------------- alignment

struct OracleEdit {
    int start = 0;
    int end = 0;
    Tokens replacement;
    bool operator==(const OracleEdit& o) const {
        return start == o.start && end == o.end && replacement == o.replacement;
    }
};

namespace detail {

// Op ranks: match < substitute < delete < insert. The canonical alignment
// is the minimal-cost one whose operation sequence, read from the END of
// the sentence backwards, is lexicographically smallest under this order.
enum : int { kMatch = 0, kSubstitute = 1, kDelete = 2, kInsert = 3 };

struct AlignSearch {
    const Tokens& src;
    const Tokens& dst;
    std::vector<std::vector<int>> cost;  // exact min cost table

    int sub_cost(int i, int j) const {
        return to_lower(src[i]) == to_lower(dst[j]) ? 0 : 1;
    }

    void fill_costs() {
        const int n = static_cast<int>(src.size());
        const int m = static_cast<int>(dst.size());
        cost.assign(n + 1, std::vector<int>(m + 1, 0));
        for (int i = 1; i <= n; ++i) cost[i][0] = i;
        for (int j = 1; j <= m; ++j) cost[0][j] = j;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= m; ++j) {
                int diag = cost[i - 1][j - 1] +
                           (src[i - 1] == dst[j - 1] ? 0 : sub_cost(i - 1, j - 1));
                cost[i][j] = std::min({diag, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
            }
    }

    // Every minimal alignment, each as the op sequence read backwards.
    void collect(int i, int j, std::vector<int>& reversed,
                 std::vector<std::vector<int>>& all) const {
        if (i == 0 && j == 0) {
            all.push_back(reversed);
            return;
        }
        if (i > 0 && j > 0) {
            bool equal = src[i - 1] == dst[j - 1];
            int diag = cost[i - 1][j - 1] + (equal ? 0 : sub_cost(i - 1, j - 1));
            if (diag == cost[i][j]) {
                reversed.push_back(equal ? kMatch : kSubstitute);
                collect(i - 1, j - 1, reversed, all);
                reversed.pop_back();
            }
        }
        if (i > 0 && cost[i - 1][j] + 1 == cost[i][j]) {
            reversed.push_back(kDelete);
            collect(i - 1, j, reversed, all);
            reversed.pop_back();
        }
        if (j > 0 && cost[i][j - 1] + 1 == cost[i][j]) {
            reversed.push_back(kInsert);
            collect(i, j - 1, reversed, all);
            reversed.pop_back();
        }
    }
};

} // namespace detail

// Exhaustive search: enumerate every minimal-cost alignment, pick the
// canonical one, then merge maximal non-match runs into span edits.
inline std::vector<OracleEdit> align_edits(const Tokens& source, const Tokens& target) {
    detail::AlignSearch search{source, target, {}};
    search.fill_costs();
    std::vector<std::vector<int>> all;
    std::vector<int> scratch;
    search.collect(static_cast<int>(source.size()), static_cast<int>(target.size()),
                   scratch, all);
    const std::vector<int>& winner = *std::min_element(all.begin(), all.end());

    // winner is reversed; walk it from the back to get sentence order.
    std::vector<OracleEdit> edits;
    int si = 0, ti = 0;
    std::size_t k = winner.size();
    while (k > 0) {
        int op = winner[k - 1];
        if (op == detail::kMatch) {
            ++si, ++ti, --k;
            continue;
        }
        OracleEdit e;
        e.start = si;
        int tstart = ti;
        while (k > 0 && winner[k - 1] != detail::kMatch) {
            switch (winner[k - 1]) {
            case detail::kSubstitute: ++si, ++ti; break;
            case detail::kDelete: ++si; break;
            default: ++ti; break;
            }
            --k;
        }
        e.end = si;
        e.replacement.assign(target.begin() + tstart, target.begin() + ti);
        edits.push_back(std::move(e));
    }
    return edits;
}

// --------------------------------------------------------------------- M2

struct OracleAnnotation {
    int sentence = 0;
    int annotator = 0;
    std::vector<OracleEdit> edits;
};

struct M2Counts {
    long long tp = 0, fp = 0, fn = 0;
    double precision = 1.0, recall = 1.0, f = 0.0;
};

inline double f_beta_of(double p, double r, double beta) {
    if (p == 0.0 && r == 0.0) return 0.0;
    double b2 = beta * beta;
    return (1.0 + b2) * p * r / (b2 * p + r);
}

// Sentence-indexed corpora as whitespace token vectors; chooses per
// sentence the annotator whose edits give the best F (ties to the lowest
// annotator id), then pools the chosen counts.
inline M2Counts m2_counts(const std::vector<Tokens>& sources,
                          const std::vector<Tokens>& preds,
                          const std::vector<OracleAnnotation>& gold,
                          double beta) {
    M2Counts total;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        std::vector<OracleEdit> hyp = align_edits(sources[s], preds[s]);

        std::vector<const OracleAnnotation*> candidates;
        for (const auto& ann : gold)
            if (ann.sentence == static_cast<int>(s)) candidates.push_back(&ann);
        std::sort(candidates.begin(), candidates.end(),
                  [](const OracleAnnotation* a, const OracleAnnotation* b) {
                      return a->annotator < b->annotator;
                  });
        OracleAnnotation none{static_cast<int>(s), 0, {}};
        if (candidates.empty()) candidates.push_back(&none);

        long long best_tp = 0, best_fp = 0, best_fn = 0;
        double best_f = -1.0;
        for (const OracleAnnotation* cand : candidates) {
            // Multiset intersection of (start, end, replacement) triples.
            auto key = [](const OracleEdit& e) {
                std::string k = std::to_string(e.start) + ":" + std::to_string(e.end);
                for (const auto& t : e.replacement) k += "\x1f" + t;
                return k;
            };
            std::vector<std::string> a, b;
            for (const auto& e : hyp) a.push_back(key(e));
            for (const auto& e : cand->edits) b.push_back(key(e));
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            std::vector<std::string> common;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::back_inserter(common));
            long long tp = static_cast<long long>(common.size());
            long long fp = static_cast<long long>(a.size()) - tp;
            long long fn = static_cast<long long>(b.size()) - tp;
            double p = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
            double r = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
            double f = f_beta_of(p, r, beta);
            if (f > best_f) {
                best_f = f;
                best_tp = tp;
                best_fp = fp;
                best_fn = fn;
            }
        }
        total.tp += best_tp;
        total.fp += best_fp;
        total.fn += best_fn;
    }
    total.precision = total.tp + total.fp == 0
                          ? 1.0
                          : static_cast<double>(total.tp) / (total.tp + total.fp);
    total.recall = total.tp + total.fn == 0
                       ? 1.0
                       : static_cast<double>(total.tp) / (total.tp + total.fn);
    total.f = f_beta_of(total.precision, total.recall, beta);
    return total;
}

// ------------------------------------------------------------ readability

// Same syllable rule as the library, independently coded: count runs of
// vowels on a consonant/vowel mask, then apply the silent-e adjustment.
inline long long syllables(const std::string& word) {
    std::string mask;
    for (char c : word) {
        char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        bool letter = lc >= 'a' && lc <= 'z';
        bool vowel = letter && (lc == 'a' || lc == 'e' || lc == 'i' || lc == 'o' ||
                                lc == 'u' || lc == 'y');
        mask += vowel ? 'v' : 'c';
    }
    long long runs = 0;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i] == 'v' && (i == 0 || mask[i - 1] != 'v')) ++runs;
    std::string low = to_lower(word);
    if (runs >= 2 && low.size() >= 2 && low.back() == 'e' &&
        low[low.size() - 2] != 'l')
        --runs;
    return runs < 1 ? 1 : runs;
}

// Segments separated by runs of . ! ? ; every segment with visible
// content counts, as does trailing content; never less than one.
inline long long sentences(const std::string& text) {
    std::vector<std::string> segments{""};
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' || c == '!' || c == '?') {
            if (!segments.back().empty()) segments.push_back("");
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            segments.back() += c;
        }
    }
    long long n = 0;
    for (const auto& seg : segments)
        if (!seg.empty()) ++n;
    return n < 1 ? 1 : n;
}

inline bool looks_like_word(const std::string& token) {
    for (char c : token)
        if (std::isalnum(static_cast<unsigned char>(c))) return true;
    return false;
}

// Readability for texts whose whitespace tokens equal their rule tokens
// (plain words plus free-standing punctuation).
inline double fre_text(const std::string& text) {
    double words = 0.0, syl = 0.0;
    for (const auto& tok : split_ws(text)) {
        if (!looks_like_word(tok)) continue;
        words += 1.0;
        syl += static_cast<double>(syllables(tok));
    }
    double sent = static_cast<double>(sentences(text));
    return 206.835 - 1.015 * (words / sent) - 84.6 * (syl / words);
}

inline double fkgl_text(const std::string& text) {
    double words = 0.0, syl = 0.0;
    for (const auto& tok : split_ws(text)) {
        if (!looks_like_word(tok)) continue;
        words += 1.0;
        syl += static_cast<double>(syllables(tok));
    }
    double sent = static_cast<double>(sentences(text));
    return 0.39 * (words / sent) + 11.8 * (syl / words) - 15.59;
}

inline double mean_fre(const std::vector<std::string>& texts) {
    double sum = 0.0;
    for (const auto& t : texts) sum += fre_text(t);
    return sum / static_cast<double>(texts.size());
}

inline double mean_fkgl(const std::vector<std::string>& texts) {
    double sum = 0.0;
    for (const auto& t : texts) sum += fkgl_text(t);
    return sum / static_cast<double>(texts.size());
}

inline double compression(const std::vector<std::string>& sources,
                          const std::vector<std::string>& preds) {
    double in_words = 0.0, out_words = 0.0;
    for (const auto& s : sources)
        for (const auto& tok : split_ws(s))
            if (looks_like_word(tok)) in_words += 1.0;
    for (const auto& p : preds)
        for (const auto& tok : split_ws(p))
            if (looks_like_word(tok)) out_words += 1.0;
    // Means over the same record count cancel, so the ratio of totals is
    // the compression ratio.
    return out_words / in_words;
}

} // namespace orc
