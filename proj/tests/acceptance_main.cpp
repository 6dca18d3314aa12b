// Acceptance gate: end-to-end checks of the evaluation toolkit against
// independent oracles, closed-form hand values, identity properties, and
// the cascade determinism contract. Each criterion prints one PASS/FAIL
// line; the process exits non-zero if any criterion fails.

#include "rewriteval/cli.hpp"
#include "rewriteval/corpus.hpp"
#include "rewriteval/errors.hpp"
#include "rewriteval/gec.hpp"
#include "rewriteval/hallucination.hpp"
#include "rewriteval/simp.hpp"
#include "rewriteval/tokenize.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rewriteval;
using testsupport::TempDir;
using testsupport::make_corpus;

namespace {

struct Criterion {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            detail = msg;
        }
    }
    void close(double got, double want, double tol, const std::string& what) {
        if (!(std::fabs(got - want) <= tol)) {
            std::ostringstream os;
            os << what << ": got " << got << ", want " << want << " +/- " << tol;
            require(false, os.str());
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

// ---------------------------------------------------------------------
// 1. Metric oracle equivalence on 200 randomized tiny corpora.
// ---------------------------------------------------------------------
// The generator sticks to lowercase ASCII words plus a free-standing
// period so the rule tokenizer and a whitespace split agree, which lets
// the deliberately independent oracle work on plain token vectors.
Criterion criterion_oracle_equivalence() {
    Criterion c;
    const auto start = std::chrono::steady_clock::now();

    const std::vector<std::string> vocab = {"the", "cat", "sat",  "on",
                                            "mat", "dog", "ran",  "big",
                                            "red", "he",  "goes", "home"};
    std::mt19937 rng(20240819);
    auto make_sentence = [&]() {
        std::uniform_int_distribution<int> n_words(1, 5);
        std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
        std::uniform_int_distribution<int> coin(0, 1);
        std::vector<std::string> tokens;
        const int n = n_words(rng);
        for (int i = 0; i < n; ++i) tokens.push_back(vocab[pick(rng)]);
        if (coin(rng) && tokens.size() < 6) tokens.push_back(".");
        return join(tokens);
    };

    for (int trial = 0; trial < 200 && c.ok; ++trial) {
        std::uniform_int_distribution<int> n_sentences_dist(1, 3);
        std::uniform_int_distribution<int> n_refs_dist(1, 2);
        const int n_sentences = n_sentences_dist(rng);
        const int n_refs = n_refs_dist(rng);

        std::vector<std::string> sources, preds;
        std::vector<std::vector<std::string>> refs_per_record(n_sentences);
        for (int s = 0; s < n_sentences; ++s) {
            sources.push_back(make_sentence());
            preds.push_back(make_sentence());
            for (int j = 0; j < n_refs; ++j)
                refs_per_record[s].push_back(make_sentence());
        }
        Corpus corpus = make_corpus(sources, preds, refs_per_record);

        // Token views shared by the oracles.
        std::vector<orc::Tokens> src_toks, pred_toks;
        std::vector<std::vector<orc::Tokens>> ref_toks(n_sentences);
        for (int s = 0; s < n_sentences; ++s) {
            src_toks.push_back(orc::split_ws(sources[s]));
            pred_toks.push_back(orc::split_ws(preds[s]));
            for (const auto& ref : refs_per_record[s])
                ref_toks[s].push_back(orc::split_ws(ref));
        }

        // GLEU, pooled and sentence-mean.
        c.close(gleu(corpus, {4, false}),
                orc::gleu_corpus(pred_toks, ref_toks, 4, false), 1e-9,
                "pooled n-gram score, trial " + std::to_string(trial));
        c.close(gleu(corpus, {4, true}),
                orc::gleu_corpus(pred_toks, ref_toks, 4, true), 1e-9,
                "sentence-mean n-gram score, trial " + std::to_string(trial));

        // SARI (tokens lowercased; inputs here are already lowercase).
        SariBreakdown lib_sari = sari(corpus, 4);
        std::vector<orc::Tokens> in_low, pred_low;
        std::vector<std::vector<orc::Tokens>> ref_low(n_sentences);
        for (int s = 0; s < n_sentences; ++s) {
            in_low.push_back(orc::lower_all(src_toks[s]));
            pred_low.push_back(orc::lower_all(pred_toks[s]));
            for (const auto& r : ref_toks[s])
                ref_low[s].push_back(orc::lower_all(r));
        }
        orc::SariParts orc_sari = orc::sari_corpus(in_low, ref_low, pred_low, 4);
        c.close(lib_sari.sari, orc_sari.sari, 1e-9,
                "rewrite score total, trial " + std::to_string(trial));
        for (int n = 0; n < 4 && c.ok; ++n) {
            c.close(lib_sari.keep_n[n], orc_sari.keep[n], 1e-9, "keep component");
            c.close(lib_sari.delete_n[n], orc_sari.del[n], 1e-9, "delete component");
            c.close(lib_sari.add_n[n], orc_sari.add[n], 1e-9, "add component");
        }

        // Edit overlap scores with gold edits derived from the references,
        // each route using its own alignment.
        std::vector<GoldEditSet> gold;
        std::vector<orc::OracleAnnotation> orc_gold;
        for (int s = 0; s < n_sentences; ++s) {
            for (int j = 0; j < n_refs; ++j) {
                EditSet derived = extract_edits(src_toks[s], ref_toks[s][j]);
                GoldEditSet gs;
                gs.sentence_id = s;
                gs.annotator_id = j;
                for (const Edit& e : derived.edits)
                    gs.edits.push_back({e.start, e.end, e.replacement});
                gold.push_back(gs);

                orc::OracleAnnotation oa;
                oa.sentence = s;
                oa.annotator = j;
                oa.edits = orc::align_edits(src_toks[s], ref_toks[s][j]);
                orc_gold.push_back(oa);
            }
        }
        PRFScore lib_m2 = m2_score(corpus, gold, 0.5);
        orc::M2Counts orc_m2 = orc::m2_counts(src_toks, pred_toks, orc_gold, 0.5);
        c.require(lib_m2.tp == orc_m2.tp && lib_m2.fp == orc_m2.fp &&
                      lib_m2.fn == orc_m2.fn,
                  "edit overlap counts diverged on trial " +
                      std::to_string(trial));
        c.close(lib_m2.precision, orc_m2.precision, 1e-9, "edit precision");
        c.close(lib_m2.recall, orc_m2.recall, 1e-9, "edit recall");
        c.close(lib_m2.f_beta, orc_m2.f, 1e-9, "edit F score");

        // Readability and length.
        c.close(corpus_fre(corpus), orc::mean_fre(preds), 1e-9,
                "reading ease, trial " + std::to_string(trial));
        c.close(corpus_fkgl(corpus), orc::mean_fkgl(preds), 1e-9,
                "grade level, trial " + std::to_string(trial));
        c.close(length_stats(corpus).compression,
                orc::compression(sources, preds), 1e-9,
                "compression, trial " + std::to_string(trial));
    }

    const double elapsed = seconds_since(start);
    c.require(elapsed < 60.0,
              "took " + std::to_string(elapsed) + "s, budget is 60s");
    return c;
}

// ---------------------------------------------------------------------
// 2. Edit round trip: extract then apply reproduces the target.
// ---------------------------------------------------------------------
Criterion criterion_edit_round_trip() {
    Criterion c;
    const auto start = std::chrono::steady_clock::now();

    const std::vector<std::string> vocab = {"a",   "b",   "c",   "the", "The",
                                            "cat", "Cat", "dog", "go",  "goes"};
    std::mt19937 rng(77007);
    std::uniform_int_distribution<int> len(0, 8);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);

    for (int trial = 0; trial < 1000 && c.ok; ++trial) {
        std::vector<std::string> source, target;
        for (int i = len(rng); i > 0; --i) source.push_back(vocab[pick(rng)]);
        for (int i = len(rng); i > 0; --i) target.push_back(vocab[pick(rng)]);
        std::vector<std::string> rebuilt =
            apply_edits(source, extract_edits(source, target));
        c.require(rebuilt == target, "round trip diverged on trial " +
                                         std::to_string(trial) + " (source \"" +
                                         join(source) + "\", target \"" +
                                         join(target) + "\")");
    }

    const double elapsed = seconds_since(start);
    c.require(elapsed < 10.0,
              "took " + std::to_string(elapsed) + "s, budget is 10s");
    return c;
}

// ---------------------------------------------------------------------
// 3. Pinned closed-form values.
// ---------------------------------------------------------------------
Criterion criterion_pinned_values() {
    Criterion c;

    PRFScore score = prf(3, 2, 7, 0.5);
    c.require(score.precision == 0.6, "precision(3,2) is not exactly 0.6");
    c.require(score.recall == 0.3, "recall(3,7) is not exactly 0.3");
    c.require(score.f_beta == 0.5, "F0.5(0.6, 0.3) is not exactly 0.5");

    c.close(fre("The cat sat on the mat."), 116.145, 1e-9,
            "reading ease of the six-word sentence");

    Corpus corpus = make_corpus({"one two three four .", "a b c d ."},
                                {"one two .", "a b ."},
                                {{"one two ."}, {"a b ."}},
                                Task::simplification);
    c.require(length_stats(corpus).compression == 0.5,
              "half-length predictions do not compress to exactly 0.5");
    return c;
}

// ---------------------------------------------------------------------
// 4. Perfect-system identities on a 50-sentence corpus.
// ---------------------------------------------------------------------
Criterion criterion_perfect_system() {
    Criterion c;

    const std::vector<std::string> names = {"Alice", "Bob",   "Carol",
                                            "Dmitri", "Elena", "Farid"};
    const std::vector<std::string> places = {"Paris", "Rome", "Berlin",
                                             "Tokyo", "Lagos"};
    std::vector<std::string> sources, preds;
    std::vector<std::vector<std::string>> refs;
    for (int i = 0; i < 50; ++i) {
        const std::string& who = names[i % names.size()];
        const std::string& where = places[i % places.size()];
        // The entity surfaces are identical in source and prediction; the
        // correction only touches the verb.
        sources.push_back(who + " go to " + where + " every day .");
        std::string corrected = who + " goes to " + where + " every day .";
        preds.push_back(corrected);
        refs.push_back({corrected});
    }
    Corpus corpus = make_corpus(sources, preds, refs);

    c.require(gleu(corpus) == 1.0, "n-gram score of a perfect system is not 1.0");
    c.require(sari(corpus).sari == 100.0,
              "rewrite score of a perfect system is not 100");

    std::vector<GoldEditSet> gold;
    for (int s = 0; s < 50; ++s) {
        EditSet derived = extract_edits(tokenize_whitespace(sources[s]),
                                        tokenize_whitespace(refs[s][0]));
        GoldEditSet gs;
        gs.sentence_id = s;
        gs.annotator_id = 0;
        for (const Edit& e : derived.edits)
            gs.edits.push_back({e.start, e.end, e.replacement});
        c.require(!gs.edits.empty(), "test corpus lost its gold edits");
        gold.push_back(gs);
    }
    PRFScore m2 = m2_score(corpus, gold, 0.5);
    c.require(m2.f_beta == 1.0, "edit F0.5 of a perfect system is not 1.0");

    c.require(hallucination_rate(corpus).rate == 0.0,
              "entity rate of a faithful system is not 0.0");
    return c;
}

// ---------------------------------------------------------------------
// 5. Degenerate-system identities.
// ---------------------------------------------------------------------
Criterion criterion_degenerate_system() {
    Criterion c;

    // Predictions identical to sources, with real gold edits.
    std::vector<std::string> sources, preds;
    std::vector<std::vector<std::string>> refs;
    for (int i = 0; i < 10; ++i) {
        sources.push_back("he go home now .");
        preds.push_back(sources.back());
        refs.push_back({"he goes home now ."});
    }
    Corpus unchanged = make_corpus(sources, preds, refs);

    std::vector<GoldEditSet> gold;
    for (int s = 0; s < 10; ++s) {
        EditSet derived = extract_edits(tokenize_whitespace(sources[s]),
                                        tokenize_whitespace(refs[s][0]));
        GoldEditSet gs;
        gs.sentence_id = s;
        gs.annotator_id = 0;
        for (const Edit& e : derived.edits)
            gs.edits.push_back({e.start, e.end, e.replacement});
        gold.push_back(gs);
        c.require(!gs.edits.empty(), "gold edits are unexpectedly empty");
    }
    c.require(m2_score(unchanged, gold, 0.5).recall == 0.0,
              "recall of an unchanged system is not 0");
    c.require(length_stats(unchanged).compression == 1.0,
              "compression of an unchanged system is not 1.0");

    // Predictions sharing no tokens with any reference.
    Corpus disjoint = make_corpus({"p q", "r s"}, {"xx yy", "zz ww"},
                                  {{"p q"}, {"r s"}});
    c.require(gleu(disjoint) == 0.0,
              "n-gram score without any overlap is not 0");
    return c;
}

// ---------------------------------------------------------------------
// 6. Cascade contract: three stages, exact call counts, byte-identical
//    reports across repeat runs and concurrency caps 1 and 8.
// ---------------------------------------------------------------------

std::string cascade_config_text(int concurrency, const std::string& answers) {
    std::ostringstream os;
    os << R"({
        "task": "grammar",
        "concurrency": )"
       << concurrency << R"(,
        "backends": {
            "e": {"type": "echo"},
            "f": {"type": "file", "path": ")"
       << answers << R"("}
        },
        "stages": [{"backend": "e"}, {"backend": "f"}, {"backend": "e"}]
    })";
    return os.str();
}

Criterion criterion_cascade_contract() {
    Criterion c;
    const int n = 20;

    TempDir dir;
    std::vector<std::string> sources, answers;
    for (int i = 0; i < n; ++i) {
        sources.push_back("input " + std::to_string(i) + " text");
        answers.push_back("output " + std::to_string(i) + " text");
    }
    const std::string src = dir.lines("src.txt", sources);
    const std::string ans = dir.lines("answers.txt", answers);
    const std::string out_dir = (dir.path() / "stages").string();
    const std::string config_path = (dir.path() / "job.json").string();

    auto run_once = [&](int concurrency, const std::string& report_name) {
        dir.file("job.json", cascade_config_text(concurrency, ans));
        std::vector<std::string> args{
            "cascade", "--source", src,
            "--config", config_path, "--out-dir", out_dir,
            "--report", (dir.path() / report_name).string()};
        return run_cli(args);
    };

    c.require(run_once(1, "serial_a.json") == kExitOk, "serial run failed");
    c.require(run_once(1, "serial_b.json") == kExitOk, "repeat run failed");
    c.require(run_once(8, "parallel.json") == kExitOk, "concurrent run failed");
    if (!c.ok) return c;

    const std::string serial_a = dir.read("serial_a.json");
    c.require(serial_a == dir.read("serial_b.json"),
              "reports differ between two identical runs");
    c.require(serial_a == dir.read("parallel.json"),
              "reports differ between concurrency caps 1 and 8");

    // Exactly three intermediate files.
    int csv_count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(out_dir))
        if (entry.path().extension() == ".csv") ++csv_count;
    c.require(csv_count == 3, "expected exactly 3 intermediate files, found " +
                                  std::to_string(csv_count));

    // Ids and order preserved in every stage file; the file-backed second
    // stage rewrote every record and the echo stages passed texts through.
    nlohmann::json report = nlohmann::json::parse(serial_a);
    c.require(report["stages"].size() == 3, "report does not list 3 stages");
    for (const auto& stage : report["stages"]) {
        c.require(stage["calls"].get<long long>() == n,
                  "a stage backend was not called exactly once per record");
        Corpus stage_corpus =
            load_intermediate(stage["csv"].get<std::string>());
        c.require(static_cast<int>(stage_corpus.size()) == n,
                  "a stage file lost records");
        for (int i = 0; i < n; ++i) {
            c.require(stage_corpus.records[i].id == i,
                      "stage file ids are out of order");
            c.require(stage_corpus.records[i].source == sources[i],
                      "stage files must keep the original sources");
        }
    }
    nlohmann::json last = report["stages"][2];
    Corpus final_corpus = load_intermediate(last["csv"].get<std::string>());
    for (int i = 0; i < n; ++i)
        c.require(*final_corpus.records[i].prediction == answers[i],
                  "final predictions do not match the file backend");
    return c;
}

// ---------------------------------------------------------------------
// 7. Hallucination formula: 2 novel-entity predictions out of 4.
// ---------------------------------------------------------------------
Criterion criterion_hallucination_rate() {
    Criterion c;

    Corpus corpus = make_corpus(
        {"the trip went well .", "we enjoyed the food .",
         "the weather was mild .", "the museum was closed ."},
        {"the trip to London went well .", "we enjoyed the food in Tokyo .",
         "the weather was mild .", "the museum was closed ."});

    HallucinationReport builtin = hallucination_rate(corpus);
    c.require(builtin.rate == 50.0,
              "built-in recognizer rate is not exactly 50.0");

    // A stub recognizer that agrees on these inputs: it scans for the two
    // place names and nothing else.
    Recognizer stub = [](const std::string& text) {
        EntitySet set;
        for (const char* name : {"London", "Tokyo"})
            if (text.find(name) != std::string::npos)
                set.entities.push_back(normalize_entity(name));
        std::sort(set.entities.begin(), set.entities.end());
        return set;
    };
    HallucinationReport stubbed = hallucination_rate(corpus, stub);
    c.require(stubbed.rate == 50.0, "stub recognizer rate is not exactly 50.0");

    for (int i = 0; i < 4; ++i) {
        c.require(builtin.per_example[i].hallucinated ==
                      stubbed.per_example[i].hallucinated,
                  "recognizers disagree on example " + std::to_string(i));
        c.require(builtin.per_example[i].hallucinated == (i < 2),
                  "wrong example flagged");
    }
    return c;
}

// ---------------------------------------------------------------------
// 8. Directional sanity: appending entity-bearing words must cost rewrite
//    quality and raise the entity and length signals.
// ---------------------------------------------------------------------
Criterion criterion_directional_sanity() {
    Criterion c;

    std::vector<std::string> sources, refs_flat, preds_a, preds_b;
    for (int i = 0; i < 12; ++i) {
        sources.push_back("the very large cat sat on the old mat .");
        refs_flat.push_back("the cat sat on the mat .");
        preds_a.push_back(refs_flat.back());
        preds_b.push_back(refs_flat.back() +
                          " Alice visited London Tokyo Berlin");
    }
    std::vector<std::vector<std::string>> refs;
    for (const auto& r : refs_flat) refs.push_back({r});

    Corpus system_a =
        make_corpus(sources, preds_a, refs, Task::simplification);
    Corpus system_b =
        make_corpus(sources, preds_b, refs, Task::simplification);

    const double sari_a = sari(system_a).sari;
    const double sari_b = sari(system_b).sari;
    c.require(sari_a > sari_b, "reference-equal outputs must outscore padded ones");

    const double rate_a = hallucination_rate(system_a).rate;
    const double rate_b = hallucination_rate(system_b).rate;
    c.require(rate_a < rate_b, "padded outputs must raise the entity rate");

    const double comp_a = length_stats(system_a).compression;
    const double comp_b = length_stats(system_b).compression;
    c.require(comp_a < comp_b, "padded outputs must raise compression");
    return c;
}

struct Entry {
    int number;
    const char* label;
    Criterion (*run)();
};

} // namespace

int main() {
    const Entry entries[] = {
        {1, "metric oracle equivalence on 200 randomized corpora",
         criterion_oracle_equivalence},
        {2, "edit extraction round-trips 1000 randomized pairs",
         criterion_edit_round_trip},
        {3, "pinned closed-form metric values", criterion_pinned_values},
        {4, "perfect-system identities on a 50-sentence corpus",
         criterion_perfect_system},
        {5, "degenerate-system identities", criterion_degenerate_system},
        {6, "cascade determinism and call-count contract",
         criterion_cascade_contract},
        {7, "hallucination rate of a half-novel corpus",
         criterion_hallucination_rate},
        {8, "directional ranking of faithful vs padded systems",
         criterion_directional_sanity},
    };

    bool all_ok = true;
    for (const Entry& entry : entries) {
        Criterion result;
        try {
            result = entry.run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("unexpected exception: ") + e.what();
        }
        if (result.ok) {
            std::printf("PASS criterion %d: %s\n", entry.number, entry.label);
        } else {
            std::printf("FAIL criterion %d: %s (%s)\n", entry.number,
                        entry.label, result.detail.c_str());
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}
