#include "rewriteval/gec.hpp"

#include "rewriteval/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <string>

namespace rewriteval {

namespace {

// N-gram multiset over token indices. Tokens never contain control
// characters (the tokenizer treats them as whitespace), so joining with
// 0x1F yields collision-free keys across orders.
std::map<std::string, long long> ngram_counts(const std::vector<std::string>& tokens,
                                              int max_n) {
    std::map<std::string, long long> counts;
    const int len = static_cast<int>(tokens.size());
    for (int n = 1; n <= max_n; ++n) {
        for (int i = 0; i + n <= len; ++i) {
            std::string key = tokens[i];
            for (int k = 1; k < n; ++k) {
                key += '\x1f';
                key += tokens[i + k];
            }
            ++counts[key];
        }
    }
    return counts;
}

long long total_ngrams(std::size_t len, int max_n) {
    long long total = 0;
    for (int n = 1; n <= max_n; ++n)
        if (len >= static_cast<std::size_t>(n))
            total += static_cast<long long>(len) - n + 1;
    return total;
}

long long clipped_matches(const std::map<std::string, long long>& hyp,
                          const std::map<std::string, long long>& ref) {
    long long matches = 0;
    for (const auto& [key, count] : hyp) {
        auto it = ref.find(key);
        if (it != ref.end()) matches += std::min(count, it->second);
    }
    return matches;
}

double safe_ratio(long long num, long long den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

struct RefScore {
    double score = 0.0;
    long long matches = 0;
    long long hyp_total = 0;
    long long ref_total = 0;
};

// Scores one hypothesis against each reference and keeps the best one:
// highest score, then more matches, then the shorter reference, then
// first in file order. Equal keys have identical pooled tallies, so the
// corpus aggregate does not depend on reference order.
RefScore best_reference(const std::vector<std::string>& hyp_tokens,
                        const std::vector<std::vector<std::string>>& ref_tokens,
                        int max_n) {
    auto hyp_counts = ngram_counts(hyp_tokens, max_n);
    long long hyp_total = total_ngrams(hyp_tokens.size(), max_n);

    RefScore best;
    bool have = false;
    for (const auto& ref : ref_tokens) {
        RefScore cur;
        cur.hyp_total = hyp_total;
        cur.ref_total = total_ngrams(ref.size(), max_n);
        cur.matches = clipped_matches(hyp_counts, ngram_counts(ref, max_n));
        cur.score = std::min(safe_ratio(cur.matches, cur.hyp_total),
                             safe_ratio(cur.matches, cur.ref_total));
        bool better = !have || cur.score > best.score ||
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

enum class Op : unsigned char { Match, Substitute, Delete, Insert };

} // namespace

PRFScore prf(long long tp, long long fp, long long fn, double beta) {
    PRFScore s;
    s.tp = tp;
    s.fp = fp;
    s.fn = fn;
    s.beta = beta;
    s.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    s.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double b2 = beta * beta;
    s.f_beta = s.precision == 0.0 && s.recall == 0.0
                   ? 0.0
                   : (1.0 + b2) * s.precision * s.recall / (b2 * s.precision + s.recall);
    return s;
}

EditSet extract_edits(const std::vector<std::string>& source,
                      const std::vector<std::string>& target) {
    const int n = static_cast<int>(source.size());
    const int m = static_cast<int>(target.size());

    const auto sub_cost = [&](int i, int j) {
        return lower_ascii(source[i]) == lower_ascii(target[j]) ? 0 : 1;
    };

    // D[i][j] = cheapest alignment of source[0..i) to target[0..j).
    std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
    for (int i = 1; i <= n; ++i) d[i][0] = i;
    for (int j = 1; j <= m; ++j) d[0][j] = j;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= m; ++j) {
            int best = std::numeric_limits<int>::max();
            if (source[i - 1] == target[j - 1])
                best = d[i - 1][j - 1];  // match, identical tokens only
            else
                best = d[i - 1][j - 1] + sub_cost(i - 1, j - 1);
            best = std::min(best, d[i - 1][j] + 1);  // delete source token
            best = std::min(best, d[i][j - 1] + 1);  // insert target token
            d[i][j] = best;
        }
    }

    // Backtrace from the end, preferring match > substitution > deletion >
    // insertion at every step. This fixes one canonical alignment among
    // the cost ties, so extraction is deterministic.
    std::vector<Op> ops;
    ops.reserve(n + m);
    int i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && source[i - 1] == target[j - 1] &&
            d[i - 1][j - 1] == d[i][j]) {
            ops.push_back(Op::Match);
            --i;
            --j;
        } else if (i > 0 && j > 0 && source[i - 1] != target[j - 1] &&
                   d[i - 1][j - 1] + sub_cost(i - 1, j - 1) == d[i][j]) {
            ops.push_back(Op::Substitute);
            --i;
            --j;
        } else if (i > 0 && d[i - 1][j] + 1 == d[i][j]) {
            ops.push_back(Op::Delete);
            --i;
        } else {
            ops.push_back(Op::Insert);
            --j;
        }
    }
    std::reverse(ops.begin(), ops.end());

    // Merge maximal runs of non-match operations into single span edits.
    EditSet set;
    int si = 0, ti = 0;
    std::size_t k = 0;
    while (k < ops.size()) {
        if (ops[k] == Op::Match) {
            ++si;
            ++ti;
            ++k;
            continue;
        }
        int start = si, tstart = ti;
        while (k < ops.size() && ops[k] != Op::Match) {
            switch (ops[k]) {
            case Op::Substitute: ++si; ++ti; break;
            case Op::Delete: ++si; break;
            case Op::Insert: ++ti; break;
            case Op::Match: break;
            }
            ++k;
        }
        std::vector<std::string> repl(target.begin() + tstart, target.begin() + ti);
        set.edits.push_back({start, si, join_tokens(repl)});
    }
    return set;
}

EditSet extract_edits(const TokenSeq& source, const TokenSeq& target) {
    return extract_edits(source.texts(), target.texts());
}

std::vector<std::string> apply_edits(const std::vector<std::string>& source,
                                     const EditSet& edits) {
    std::vector<std::string> out;
    int cursor = 0;
    for (const auto& e : edits.edits) {
        if (e.start < cursor || e.end < e.start ||
            e.end > static_cast<int>(source.size()))
            throw usage_error("edits must be sorted, non-overlapping and in range");
        out.insert(out.end(), source.begin() + cursor, source.begin() + e.start);
        for (auto& tok : tokenize_whitespace(e.replacement)) out.push_back(std::move(tok));
        cursor = e.end;
    }
    out.insert(out.end(), source.begin() + cursor, source.end());
    return out;
}

PRFScore m2_score(const Corpus& corpus,
                  const std::vector<GoldEditSet>& gold,
                  double beta) {
    if (corpus.empty()) throw usage_error("cannot score an empty corpus");
    if (!corpus.has_predictions())
        throw usage_error("corpus has records without predictions");

    // Gold sets grouped per sentence, annotators in ascending id order.
    std::map<int, std::vector<const GoldEditSet*>> by_sentence;
    for (const auto& set : gold) {
        if (set.sentence_id < 0 || set.sentence_id >= static_cast<int>(corpus.size()))
            throw data_error("gold edits reference unknown sentence id " +
                             std::to_string(set.sentence_id));
        by_sentence[set.sentence_id].push_back(&set);
    }
    for (auto& [sid, sets] : by_sentence)
        std::sort(sets.begin(), sets.end(),
                  [](const GoldEditSet* a, const GoldEditSet* b) {
                      return a->annotator_id < b->annotator_id;
                  });

    const auto normalize = [](const std::string& s) {
        return join_tokens(tokenize_whitespace(s));
    };

    long long tp = 0, fp = 0, fn = 0;
    for (const auto& rec : corpus.records) {
        EditSet hyp = extract_edits(tokenize_whitespace(rec.source),
                                    tokenize_whitespace(*rec.prediction));
        std::vector<Edit> hyp_edits = hyp.edits;  // replacements already normalized

        // Compare against each annotator; keep the one with the best
        // sentence-level F (ties -> lower annotator id). No annotation at
        // all means one annotator with no edits.
        const auto it = by_sentence.find(rec.id);
        std::vector<const GoldEditSet*> candidates;
        if (it != by_sentence.end()) candidates = it->second;
        GoldEditSet empty_set{rec.id, 0, {}};
        if (candidates.empty()) candidates.push_back(&empty_set);

        long long best_tp = 0, best_fp = 0, best_fn = 0;
        double best_f = -1.0;
        for (const GoldEditSet* cand : candidates) {
            std::vector<bool> used(cand->edits.size(), false);
            long long sent_tp = 0;
            for (const auto& he : hyp_edits) {
                for (std::size_t g = 0; g < cand->edits.size(); ++g) {
                    const auto& ge = cand->edits[g];
                    if (!used[g] && ge.start == he.start && ge.end == he.end &&
                        normalize(ge.replacement) == he.replacement) {
                        used[g] = true;
                        ++sent_tp;
                        break;
                    }
                }
            }
            long long sent_fp = static_cast<long long>(hyp_edits.size()) - sent_tp;
            long long sent_fn = static_cast<long long>(cand->edits.size()) - sent_tp;
            double f = prf(sent_tp, sent_fp, sent_fn, beta).f_beta;
            if (f > best_f) {
                best_f = f;
                best_tp = sent_tp;
                best_fp = sent_fp;
                best_fn = sent_fn;
            }
        }
        tp += best_tp;
        fp += best_fp;
        fn += best_fn;
    }
    return prf(tp, fp, fn, beta);
}

double gleu(const Corpus& corpus, const GleuOptions& options) {
    if (corpus.empty()) throw usage_error("cannot score an empty corpus");
    if (!corpus.has_predictions())
        throw usage_error("corpus has records without predictions");
    if (options.max_n < 1) throw usage_error("max_n must be at least 1");

    long long sum_matches = 0, sum_hyp = 0, sum_ref = 0;
    double score_sum = 0.0;
    for (const auto& rec : corpus.records) {
        if (rec.references.empty())
            throw usage_error("record " + std::to_string(rec.id) + " has no references");
        std::vector<std::vector<std::string>> refs;
        refs.reserve(rec.references.size());
        for (const auto& r : rec.references) refs.push_back(tokenize(r).texts());
        RefScore best = best_reference(tokenize(*rec.prediction).texts(), refs,
                                       options.max_n);
        sum_matches += best.matches;
        sum_hyp += best.hyp_total;
        sum_ref += best.ref_total;
        score_sum += best.score;
    }
    if (options.sentence_mean)
        return score_sum / static_cast<double>(corpus.size());
    return std::min(safe_ratio(sum_matches, sum_hyp), safe_ratio(sum_matches, sum_ref));
}

double gleu_sentence(const std::string& hypothesis,
                     const std::vector<std::string>& references,
                     int max_n) {
    if (references.empty()) throw usage_error("at least one reference is required");
    if (max_n < 1) throw usage_error("max_n must be at least 1");
    std::vector<std::vector<std::string>> refs;
    refs.reserve(references.size());
    for (const auto& r : references) refs.push_back(tokenize(r).texts());
    return best_reference(tokenize(hypothesis).texts(), refs, max_n).score;
}

} // namespace rewriteval
