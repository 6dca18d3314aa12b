#include "rewriteval/cli.hpp"

#include "rewriteval/corpus.hpp"
#include "rewriteval/errors.hpp"
#include "rewriteval/gec.hpp"
#include "rewriteval/hallucination.hpp"
#include "rewriteval/inference.hpp"
#include "rewriteval/report.hpp"
#include "rewriteval/simp.hpp"
#include "rewriteval/tokenize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <unistd.h>

namespace rewriteval {

namespace {

// ---------------------------------------------------------------- reports

const char* task_name(Task task) {
    return task == Task::grammar ? "grammar" : "simplification";
}

void write_metric_map(JsonWriter& w,
                      const std::vector<std::pair<std::string, double>>& metrics) {
    w.begin_object();
    for (const auto& [name, value] : metrics) w.key(name).value(value);
    w.end_object();
}

std::string provenance_digest(const MetricReport& report) {
    std::string canonical = "task=" + report.task + "\n";
    for (const auto& [key, value] : report.provenance)
        canonical += key + "=" + value + "\n";
    return to_hex(fnv1a64(canonical));
}

} // namespace

std::string to_json(const MetricReport& report) {
    JsonWriter w;
    w.begin_object();
    w.key("task").value(report.task);
    w.key("n_sentences").value(report.n_sentences);
    w.key("metrics");
    write_metric_map(w, report.metrics);
    if (!report.flags.empty()) {
        w.key("flags").begin_object();
        for (const auto& [name, value] : report.flags) w.key(name).value(value);
        w.end_object();
    }
    if (!report.stages.empty()) {
        w.key("stages").begin_array();
        for (const auto& stage : report.stages) {
            w.begin_object();
            w.key("name").value(stage.name);
            w.key("backend").value(stage.backend);
            w.key("csv").value(stage.csv);
            w.key("calls").value(stage.calls);
            w.key("failures").value(stage.failures);
            if (!stage.metrics.empty()) {
                w.key("metrics");
                write_metric_map(w, stage.metrics);
            }
            w.end_object();
        }
        w.end_array();
    }
    if (!report.per_sentence.empty()) {
        w.key("per_sentence").begin_array();
        for (const auto& [id, values] : report.per_sentence) {
            w.begin_object();
            w.key("id").value(static_cast<long long>(id));
            for (const auto& [name, value] : values) w.key(name).value(value);
            w.end_object();
        }
        w.end_array();
    }
    w.key("provenance").begin_object();
    for (const auto& [key, value] : report.provenance) w.key(key).value(value);
    w.end_object();
    w.key("config_hash").value(provenance_digest(report));
    w.end_object();
    return w.str();
}

std::string to_csv(const MetricReport& report) {
    std::string out = "scope,metric,value\n";
    for (const auto& [name, value] : report.metrics)
        out += "overall," + name + "," + format_double(value) + "\n";
    for (const auto& stage : report.stages)
        for (const auto& [name, value] : stage.metrics)
            out += stage.name + "," + name + "," + format_double(value) + "\n";
    return out;
}

namespace {

// ------------------------------------------------------------- plumbing

void emit_report(const MetricReport& report,
                 const std::string& report_path,
                 const std::string& report_csv_path) {
    std::string body = to_json(report);
    if (report_path.empty()) {
        std::cout << body << "\n";
    } else {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw data_error("cannot write file: " + report_path);
        out << body << "\n";
        if (!out) throw data_error("write failed: " + report_path);
    }
    if (!report_csv_path.empty()) {
        std::ofstream out(report_csv_path, std::ios::binary);
        if (!out) throw data_error("cannot write file: " + report_csv_path);
        out << to_csv(report);
        if (!out) throw data_error("write failed: " + report_csv_path);
    }
}

void add_if_set(MetricReport& report, const std::string& key, const std::string& value) {
    if (!value.empty()) report.provenance.emplace_back(key, value);
}

std::string join_paths(const std::vector<std::string>& paths) {
    std::string out;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (i) out += ';';
        out += paths[i];
    }
    return out;
}

int report_error(const std::exception& err, int code) {
    std::cerr << "error: " << err.what() << "\n";
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const data_error& e) {
        return report_error(e, kExitDataError);
    } catch (const usage_error& e) {
        return report_error(e, kExitUsageError);
    } catch (const backend_error& e) {
        return report_error(e, kExitBackendError);
    } catch (const std::exception& e) {
        return report_error(e, kExitDataError);
    }
}

void attach_references(Corpus& corpus, const std::vector<std::string>& ref_paths) {
    for (const auto& path : ref_paths) {
        auto lines = read_lines(path);
        if (lines.size() != corpus.size())
            throw data_error("line count mismatch: " + path + " has " +
                             std::to_string(lines.size()) + " lines, corpus has " +
                             std::to_string(corpus.size()));
        for (std::size_t i = 0; i < corpus.size(); ++i)
            corpus.records[i].references.push_back(lines[i]);
    }
    corpus.reference_count = ref_paths.size();
}

void attach_predictions(Corpus& corpus, const std::string& pred_path) {
    auto lines = read_lines(pred_path);
    if (lines.size() != corpus.size())
        throw data_error("line count mismatch: " + pred_path + " has " +
                         std::to_string(lines.size()) + " lines, corpus has " +
                         std::to_string(corpus.size()));
    for (std::size_t i = 0; i < corpus.size(); ++i)
        corpus.records[i].prediction = lines[i];
}

// --------------------------------------------------------- entity hooks

std::vector<std::string> load_stopwords(const std::string& path) {
    std::vector<std::string> words;
    for (auto& line : read_lines(path)) {
        std::string word = lower_ascii(join_tokens(tokenize_whitespace(line)));
        if (word.empty() || word[0] == '#') continue;
        words.push_back(word);
    }
    if (words.empty()) throw data_error("stoplist is empty: " + path);
    return words;
}

std::string single_line(const std::string& text) {
    std::string out = text;
    for (char& c : out)
        if (c == '\n' || c == '\r') c = ' ';
    return out;
}

// Runs the external recognizer once over every text in the corpus
// (line-per-text on stdin, tab-separated mentions per line on stdout) and
// answers later recognize() calls from the collected table.
Recognizer make_command_recognizer(const std::string& command, const Corpus& corpus) {
    std::vector<std::string> texts;
    for (const auto& rec : corpus.records) {
        texts.push_back(single_line(rec.source));
        if (rec.prediction) texts.push_back(single_line(*rec.prediction));
    }

    static std::atomic<unsigned> serial{0};
    const std::string stem =
        (std::filesystem::temp_directory_path() /
         ("rewriteval_ner_" + std::to_string(::getpid()) + "_" +
          std::to_string(serial.fetch_add(1))))
            .string();
    const std::string in_path = stem + ".in";
    const std::string out_path = stem + ".out";
    write_lines(in_path, texts);

    const std::string shell_line = command + " < '" + in_path + "' > '" + out_path + "'";
    int status = std::system(shell_line.c_str());
    if (status != 0) {
        std::filesystem::remove(in_path);
        throw data_error("entity command failed (status " + std::to_string(status) +
                         "): " + command);
    }
    std::vector<std::string> replies = read_lines(out_path);
    std::filesystem::remove(in_path);
    std::filesystem::remove(out_path);
    if (replies.size() < texts.size())
        throw data_error("entity command answered " + std::to_string(replies.size()) +
                         " of " + std::to_string(texts.size()) + " lines: " + command);

    auto table = std::make_shared<std::map<std::string, EntitySet>>();
    for (std::size_t i = 0; i < texts.size(); ++i) {
        EntitySet set;
        std::stringstream fields(replies[i]);
        std::string mention;
        while (std::getline(fields, mention, '\t')) {
            std::string normalized = normalize_entity(mention);
            if (!normalized.empty()) set.entities.push_back(normalized);
        }
        std::sort(set.entities.begin(), set.entities.end());
        set.entities.erase(std::unique(set.entities.begin(), set.entities.end()),
                           set.entities.end());
        (*table)[texts[i]] = std::move(set);
    }

    return [table, command](const std::string& text) {
        auto it = table->find(single_line(text));
        if (it == table->end())
            throw data_error("entity command output does not cover a text: " + command);
        return it->second;
    };
}

Recognizer make_recognizer(const std::string& stoplist_path,
                           const std::string& ner_command,
                           const Corpus& corpus) {
    if (!ner_command.empty()) return make_command_recognizer(ner_command, corpus);
    if (!stoplist_path.empty()) {
        RecognizerOptions options;
        options.stopwords = load_stopwords(stoplist_path);
        return [options](const std::string& text) { return recognize(text, options); };
    }
    return [](const std::string& text) { return recognize(text); };
}

// ------------------------------------------------------- metric bundles

// References and gold edits can each stand in for the other: without gold
// edits every reference acts as one annotator (edits derived by
// alignment), and without references each annotator's edits are applied
// to the source to synthesize one reference per annotator.
void resolve_gec_inputs(Corpus& corpus,
                        std::vector<GoldEditSet>& gold,
                        const std::string& gold_m2_path) {
    if (!gold_m2_path.empty()) {
        auto [gold_corpus, loaded] = load_m2(gold_m2_path);
        if (gold_corpus.size() != corpus.size())
            throw data_error(gold_m2_path + " has " + std::to_string(gold_corpus.size()) +
                             " sentences, corpus has " + std::to_string(corpus.size()));
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            const auto norm = [](const std::string& s) {
                return join_tokens(tokenize_whitespace(s));
            };
            if (norm(gold_corpus.records[i].source) != norm(corpus.records[i].source))
                throw data_error(gold_m2_path + ": source of sentence " +
                                 std::to_string(i) + " does not match the corpus");
        }
        gold = std::move(loaded);
    }

    const bool has_refs = std::any_of(
        corpus.records.begin(), corpus.records.end(),
        [](const SentenceRecord& r) { return !r.references.empty(); });

    if (!has_refs && gold_m2_path.empty())
        throw usage_error("need --refs or --gold-m2 to score grammar correction");

    if (!has_refs) {
        // Synthesize one reference per annotator by applying their edits.
        std::map<int, std::vector<const GoldEditSet*>> by_sentence;
        for (const auto& set : gold) by_sentence[set.sentence_id].push_back(&set);
        for (auto& rec : corpus.records) {
            auto tokens = tokenize_whitespace(rec.source);
            auto it = by_sentence.find(rec.id);
            if (it == by_sentence.end()) {
                rec.references.push_back(rec.source);
                continue;
            }
            std::sort(it->second.begin(), it->second.end(),
                      [](const GoldEditSet* a, const GoldEditSet* b) {
                          return a->annotator_id < b->annotator_id;
                      });
            for (const GoldEditSet* set : it->second) {
                EditSet edits;
                edits.sentence_id = rec.id;
                for (const auto& e : set->edits)
                    edits.edits.push_back({e.start, e.end, e.replacement});
                rec.references.push_back(join_tokens(apply_edits(tokens, edits)));
            }
        }
        corpus.ragged_references = true;
    }

    if (gold_m2_path.empty()) {
        // Each reference becomes one annotator's gold edits.
        for (const auto& rec : corpus.records) {
            auto source_tokens = tokenize_whitespace(rec.source);
            for (std::size_t r = 0; r < rec.references.size(); ++r) {
                GoldEditSet set;
                set.sentence_id = rec.id;
                set.annotator_id = static_cast<int>(r);
                EditSet derived =
                    extract_edits(source_tokens, tokenize_whitespace(rec.references[r]));
                for (const auto& e : derived.edits)
                    set.edits.push_back({e.start, e.end, e.replacement});
                gold.push_back(std::move(set));
            }
        }
    }
}

struct EvalBundle {
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, bool>> flags;
    HallucinationReport hallucination;
};

EvalBundle gec_bundle(const Corpus& corpus,
                      const std::vector<GoldEditSet>& gold,
                      double beta,
                      int max_n,
                      bool sentence_mean,
                      const Recognizer& recognizer) {
    EvalBundle out;
    GleuOptions gleu_options{max_n, sentence_mean};
    double g = gleu(corpus, gleu_options);
    PRFScore m2 = m2_score(corpus, gold, beta);
    out.hallucination = hallucination_rate(corpus, recognizer);
    out.metrics = {
        {"gleu", g},
        {"m2_precision", m2.precision},
        {"m2_recall", m2.recall},
        {"m2_f05", m2.f_beta},
        {"ner_rate", out.hallucination.rate},
    };
    return out;
}

EvalBundle simp_bundle(const Corpus& corpus, int max_n, const Recognizer& recognizer) {
    EvalBundle out;
    SariBreakdown s = sari(corpus, max_n);
    LengthStats len = length_stats(corpus);
    out.hallucination = hallucination_rate(corpus, recognizer);
    out.metrics = {
        {"sari", s.sari},
        {"sari_keep", s.keep()},
        {"sari_delete", s.del()},
        {"sari_add", s.add()},
        {"fre", corpus_fre(corpus)},
        {"fkgl", corpus_fkgl(corpus)},
        {"l_in", len.l_in},
        {"l_pred", len.l_pred},
        {"l_ref", len.l_ref},
        {"compression", len.compression},
        {"ner_rate", out.hallucination.rate},
    };
    out.flags = {{"lengthening", len.compression > 1.0}};
    return out;
}

// Per-sentence edit-level score: the chosen annotator's F for that
// sentence alone.
double sentence_m2_f(const SentenceRecord& rec,
                     const std::map<int, std::vector<const GoldEditSet*>>& by_sentence,
                     double beta) {
    Corpus one;
    one.records.push_back(rec);
    one.records[0].id = 0;
    std::vector<GoldEditSet> gold;
    auto it = by_sentence.find(rec.id);
    if (it != by_sentence.end()) {
        for (const GoldEditSet* set : it->second) {
            GoldEditSet copy = *set;
            copy.sentence_id = 0;
            gold.push_back(std::move(copy));
        }
    }
    return m2_score(one, gold, beta).f_beta;
}

} // namespace

// ---------------------------------------------------------------- eval-gec

int cmd_eval_gec(const EvalGecOptions& options) {
    return guarded([&]() -> int {
        if (options.csv_path.empty() == options.source_path.empty())
            throw data_error("need exactly one of --source or --csv");
        if (!options.csv_path.empty() && !options.pred_path.empty())
            throw data_error("--csv already carries predictions; drop --pred");
        if (options.beta <= 0.0) throw data_error("--beta must be positive");
        if (options.max_n < 1) throw data_error("--max-n must be at least 1");

        Corpus corpus;
        if (!options.csv_path.empty()) {
            corpus = load_intermediate(options.csv_path);
        } else {
            if (options.pred_path.empty()) throw data_error("need --pred with --source");
            corpus = load_parallel(options.source_path, {}, options.pred_path);
        }
        corpus.task = Task::grammar;
        attach_references(corpus, options.ref_paths);

        std::vector<GoldEditSet> gold;
        resolve_gec_inputs(corpus, gold, options.gold_m2_path);

        Recognizer recognizer =
            make_recognizer(options.stoplist_path, options.ner_command, corpus);
        EvalBundle bundle = gec_bundle(corpus, gold, options.beta, options.max_n,
                                       options.sentence_mean, recognizer);

        MetricReport report;
        report.task = task_name(Task::grammar);
        report.n_sentences = corpus.size();
        report.metrics = std::move(bundle.metrics);
        add_if_set(report, "source", options.source_path);
        add_if_set(report, "pred", options.pred_path);
        add_if_set(report, "csv", options.csv_path);
        add_if_set(report, "refs", join_paths(options.ref_paths));
        add_if_set(report, "gold_m2", options.gold_m2_path);
        report.provenance.emplace_back("beta", format_double(options.beta));
        report.provenance.emplace_back("max_n", std::to_string(options.max_n));
        report.provenance.emplace_back(
            "gleu_aggregation", options.sentence_mean ? "sentence_mean" : "corpus");
        add_if_set(report, "stoplist", options.stoplist_path);
        add_if_set(report, "ner_command", options.ner_command);

        if (options.per_sentence) {
            std::map<int, std::vector<const GoldEditSet*>> by_sentence;
            for (const auto& set : gold) by_sentence[set.sentence_id].push_back(&set);
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                const auto& rec = corpus.records[i];
                std::vector<std::pair<std::string, double>> row;
                row.emplace_back("gleu", gleu_sentence(*rec.prediction, rec.references,
                                                       options.max_n));
                row.emplace_back("m2_f", sentence_m2_f(rec, by_sentence, options.beta));
                row.emplace_back("hallucinated",
                                 bundle.hallucination.per_example[i].hallucinated ? 1.0
                                                                                  : 0.0);
                report.per_sentence.emplace_back(rec.id, std::move(row));
            }
        }

        emit_report(report, options.report_path, options.report_csv_path);
        return kExitOk;
    });
}

// --------------------------------------------------------------- eval-simp

int cmd_eval_simp(const EvalSimpOptions& options) {
    return guarded([&]() -> int {
        if (options.csv_path.empty() == options.source_path.empty())
            throw data_error("need exactly one of --source or --csv");
        if (!options.csv_path.empty() && !options.pred_path.empty())
            throw data_error("--csv already carries predictions; drop --pred");
        if (options.max_n < 1) throw data_error("--max-n must be at least 1");
        if (options.ref_paths.empty())
            throw usage_error("simplification scoring needs at least one --refs file");

        Corpus corpus;
        if (!options.csv_path.empty()) {
            corpus = load_intermediate(options.csv_path);
        } else {
            if (options.pred_path.empty()) throw data_error("need --pred with --source");
            corpus = load_parallel(options.source_path, {}, options.pred_path);
        }
        corpus.task = Task::simplification;
        attach_references(corpus, options.ref_paths);

        Recognizer recognizer =
            make_recognizer(options.stoplist_path, options.ner_command, corpus);
        EvalBundle bundle = simp_bundle(corpus, options.max_n, recognizer);

        MetricReport report;
        report.task = task_name(Task::simplification);
        report.n_sentences = corpus.size();
        report.metrics = std::move(bundle.metrics);
        report.flags = std::move(bundle.flags);
        add_if_set(report, "source", options.source_path);
        add_if_set(report, "pred", options.pred_path);
        add_if_set(report, "csv", options.csv_path);
        add_if_set(report, "refs", join_paths(options.ref_paths));
        report.provenance.emplace_back("max_n", std::to_string(options.max_n));
        add_if_set(report, "stoplist", options.stoplist_path);
        add_if_set(report, "ner_command", options.ner_command);

        if (options.per_sentence) {
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                const auto& rec = corpus.records[i];
                std::vector<std::pair<std::string, double>> row;
                row.emplace_back("sari",
                                 sari_sentence(rec.source, rec.references,
                                               *rec.prediction, options.max_n)
                                     .sari);
                const auto pred_words = tokenize(*rec.prediction).word_count();
                if (pred_words > 0) {
                    row.emplace_back("fre", fre(*rec.prediction));
                    row.emplace_back("fkgl", fkgl(*rec.prediction));
                }
                const auto source_words = tokenize(rec.source).word_count();
                if (source_words > 0)
                    row.emplace_back("compression",
                                     static_cast<double>(pred_words) /
                                         static_cast<double>(source_words));
                row.emplace_back("hallucinated",
                                 bundle.hallucination.per_example[i].hallucinated ? 1.0
                                                                                  : 0.0);
                report.per_sentence.emplace_back(rec.id, std::move(row));
            }
        }

        emit_report(report, options.report_path, options.report_csv_path);
        return kExitOk;
    });
}

// ----------------------------------------------------------------- cascade

namespace {

struct CascadeEvaluation {
    bool enabled = false;
    Task task = Task::grammar;
    std::vector<std::string> ref_paths;
    std::string gold_m2_path;
    double beta = 0.5;
    int max_n = 4;
    std::string stoplist_path;
    std::string ner_command;
};

CascadeEvaluation parse_cascade_evaluation(const std::string& config_text) {
    CascadeEvaluation eval;
    nlohmann::json root = nlohmann::json::parse(config_text, nullptr, false);
    if (root.is_discarded() || !root.is_object() || !root.contains("evaluation"))
        return eval;
    const nlohmann::json& e = root["evaluation"];
    if (!e.is_object()) throw data_error("evaluation must be an object");
    std::string task = e.value("task", std::string());
    if (task == "grammar") eval.task = Task::grammar;
    else if (task == "simplification") eval.task = Task::simplification;
    else throw data_error("evaluation.task must be grammar or simplification");
    if (e.contains("refs")) {
        if (!e["refs"].is_array()) throw data_error("evaluation.refs must be an array");
        for (const auto& r : e["refs"]) eval.ref_paths.push_back(r.get<std::string>());
    }
    eval.gold_m2_path = e.value("gold_m2", std::string());
    eval.beta = e.value("beta", 0.5);
    eval.max_n = e.value("max_n", 4);
    eval.stoplist_path = e.value("stoplist", std::string());
    eval.ner_command = e.value("ner_command", std::string());
    if (eval.beta <= 0.0) throw data_error("evaluation.beta must be positive");
    if (eval.max_n < 1) throw data_error("evaluation.max_n must be at least 1");
    eval.enabled = true;
    return eval;
}

} // namespace

int cmd_cascade(const CascadeOptions& options) {
    return guarded([&]() -> int {
        if (options.config_path.empty()) throw data_error("cascade needs --config");
        if (options.csv_path.empty() == options.source_path.empty())
            throw data_error("need exactly one of --source or --csv");

        std::ifstream in(options.config_path, std::ios::binary);
        if (!in) throw data_error("cannot open cascade config: " + options.config_path);
        std::string config_text((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());

        CascadeJob job = parse_cascade_config(config_text);
        if (!options.backend_path.empty()) {
            std::ifstream bin(options.backend_path, std::ios::binary);
            if (!bin)
                throw data_error("cannot open backend overlay: " + options.backend_path);
            std::string overlay_text((std::istreambuf_iterator<char>(bin)),
                                     std::istreambuf_iterator<char>());
            for (auto& [id, spec] : parse_backend_specs(overlay_text))
                job.backends[id] = std::move(spec);
        }
        if (!options.out_dir.empty()) job.intermediate_dir = options.out_dir;

        CascadeEvaluation evaluation = parse_cascade_evaluation(config_text);

        Corpus input;
        if (!options.csv_path.empty()) input = load_intermediate(options.csv_path);
        else input = load_parallel(options.source_path, {}, "");
        input.task = evaluation.enabled ? evaluation.task
                                        : job.stages.front().prompt.task;

        CascadeResult result = run_cascade(input, job);

        MetricReport report;
        report.task = task_name(input.task);
        report.n_sentences = input.size();

        // Score each stage's intermediate when evaluation inputs exist.
        std::vector<GoldEditSet> gold;
        Corpus scoring_template;
        if (evaluation.enabled) {
            scoring_template = input;
            scoring_template.task = evaluation.task;
            attach_references(scoring_template, evaluation.ref_paths);
            if (evaluation.task == Task::grammar) {
                // References (given or synthesized) and gold edits are
                // shared by all stages; predictions change per stage.
                for (auto& rec : scoring_template.records) rec.prediction = rec.source;
                resolve_gec_inputs(scoring_template, gold, evaluation.gold_m2_path);
            } else if (evaluation.ref_paths.empty()) {
                throw usage_error("evaluation.refs is required for simplification");
            }
        }

        for (const auto& stage : result.stages) {
            MetricReport::StageRow row;
            row.name = stage.name;
            row.backend = stage.backend_id;
            row.csv = stage.csv_path;
            row.calls = stage.calls;
            row.failures = stage.failures;
            if (evaluation.enabled) {
                Corpus staged = load_intermediate(stage.csv_path);
                staged.task = evaluation.task;
                if (staged.size() != scoring_template.size())
                    throw data_error(stage.csv_path + " does not match the input corpus");
                for (std::size_t i = 0; i < staged.size(); ++i)
                    staged.records[i].references =
                        scoring_template.records[i].references;
                staged.reference_count = scoring_template.reference_count;
                staged.ragged_references = scoring_template.ragged_references;
                // Built fresh per stage: an external recognizer's answer
                // table must cover this stage's predictions.
                Recognizer recognizer = make_recognizer(evaluation.stoplist_path,
                                                        evaluation.ner_command, staged);
                EvalBundle bundle =
                    evaluation.task == Task::grammar
                        ? gec_bundle(staged, gold, evaluation.beta, evaluation.max_n,
                                     false, recognizer)
                        : simp_bundle(staged, evaluation.max_n, recognizer);
                row.metrics = std::move(bundle.metrics);
            }
            report.stages.push_back(std::move(row));
        }

        if (!report.stages.empty() && !report.stages.back().metrics.empty())
            report.metrics = report.stages.back().metrics;
        report.metrics.emplace_back("failures",
                                    static_cast<double>(result.failed_ids.size()));

        add_if_set(report, "config", options.config_path);
        add_if_set(report, "backend_config", options.backend_path);
        add_if_set(report, "source", options.source_path);
        add_if_set(report, "csv", options.csv_path);
        report.provenance.emplace_back("intermediate_dir", job.intermediate_dir);
        if (evaluation.enabled) {
            report.provenance.emplace_back(
                "evaluation_task",
                evaluation.task == Task::grammar ? "grammar" : "simplification");
            add_if_set(report, "evaluation_refs", join_paths(evaluation.ref_paths));
            add_if_set(report, "evaluation_gold_m2", evaluation.gold_m2_path);
        }

        emit_report(report, options.report_path, options.report_csv_path);

        if (!result.failed_ids.empty()) {
            std::cerr << "error: " << result.failed_ids.size()
                      << " record(s) failed permanently; their last successful text"
                         " was carried forward\n";
            return kExitBackendError;
        }
        return kExitOk;
    });
}

// ---------------------------------------------------------- tokenize-debug

int cmd_tokenize_debug(const TokenizeDebugOptions& options) {
    return guarded([&]() -> int {
        if (options.text.empty() == options.source_path.empty())
            throw data_error("need exactly one of --text or --source");
        std::vector<std::string> inputs;
        if (!options.text.empty()) inputs.push_back(options.text);
        else inputs = read_lines(options.source_path);

        std::string out;
        for (const auto& line : inputs) {
            TokenSeq seq = tokenize(line);
            JsonWriter w;
            w.begin_object();
            w.key("text").value(line);
            w.key("tokens").begin_array();
            for (const auto& tok : seq.tokens) {
                w.begin_object();
                w.key("text").value(tok.text);
                const char* kind = tok.kind == TokenKind::Word        ? "word"
                                   : tok.kind == TokenKind::Number    ? "number"
                                                                      : "punctuation";
                w.key("kind").value(kind);
                w.key("syllables")
                    .value(static_cast<long long>(
                        tok.kind == TokenKind::Punctuation ? 0
                                                           : count_syllables(tok.text)));
                w.end_object();
            }
            w.end_array();
            w.key("words").value(static_cast<long long>(seq.word_count()));
            w.key("sentences").value(static_cast<long long>(count_sentences(line)));
            w.end_object();
            out += w.str();
            out += '\n';
        }

        if (options.out_path.empty()) {
            std::cout << out;
        } else {
            std::ofstream file(options.out_path, std::ios::binary);
            if (!file) throw data_error("cannot write file: " + options.out_path);
            file << out;
        }
        return kExitOk;
    });
}

// -------------------------------------------------------------- dispatcher

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> with_program = args;
    with_program.insert(with_program.begin(), "rewriteval");
    std::vector<const char*> argv;
    argv.reserve(with_program.size());
    for (const auto& a : with_program) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Rewrite-quality evaluation and cascaded inference"};
    app.require_subcommand(1);

    EvalGecOptions gec_options;
    auto* gec = app.add_subcommand("eval-gec", "Score grammar-correction outputs");
    gec->add_option("--source", gec_options.source_path, "Source sentences, one per line");
    gec->add_option("--pred", gec_options.pred_path, "System outputs, one per line");
    gec->add_option("--csv", gec_options.csv_path, "id,source,prediction CSV instead of --source/--pred");
    gec->add_option("--refs", gec_options.ref_paths, "Reference file (repeatable)");
    gec->add_option("--gold-m2", gec_options.gold_m2_path, "Gold edit file (S/A format)");
    gec->add_option("--beta", gec_options.beta, "F-score beta (default 0.5)");
    gec->add_option("--max-n", gec_options.max_n, "Largest n-gram order (default 4)");
    gec->add_flag("--gleu-sentence-mean", gec_options.sentence_mean,
                  "Average per-sentence scores instead of pooling counts");
    gec->add_flag("--per-sentence", gec_options.per_sentence, "Include per-sentence rows");
    gec->add_option("--stoplist", gec_options.stoplist_path, "Entity stoplist, one word per line");
    gec->add_option("--ner-command", gec_options.ner_command,
                    "External recognizer: text lines on stdin, tab-separated mentions out");
    gec->add_option("--report", gec_options.report_path, "Report path (default stdout)");
    gec->add_option("--report-csv", gec_options.report_csv_path, "Flat CSV of the metrics");

    EvalSimpOptions simp_options;
    auto* simp = app.add_subcommand("eval-simp", "Score simplification outputs");
    simp->add_option("--source", simp_options.source_path, "Source sentences, one per line");
    simp->add_option("--pred", simp_options.pred_path, "System outputs, one per line");
    simp->add_option("--csv", simp_options.csv_path, "id,source,prediction CSV instead of --source/--pred");
    simp->add_option("--refs", simp_options.ref_paths, "Reference file (repeatable)");
    simp->add_option("--max-n", simp_options.max_n, "Largest n-gram order (default 4)");
    simp->add_flag("--per-sentence", simp_options.per_sentence, "Include per-sentence rows");
    simp->add_option("--stoplist", simp_options.stoplist_path, "Entity stoplist, one word per line");
    simp->add_option("--ner-command", simp_options.ner_command,
                     "External recognizer: text lines on stdin, tab-separated mentions out");
    simp->add_option("--report", simp_options.report_path, "Report path (default stdout)");
    simp->add_option("--report-csv", simp_options.report_csv_path, "Flat CSV of the metrics");

    CascadeOptions cascade_options;
    auto* cascade = app.add_subcommand("cascade", "Run staged rewriting through backends");
    cascade->add_option("--source", cascade_options.source_path, "Input sentences, one per line");
    cascade->add_option("--csv", cascade_options.csv_path, "id,source,prediction CSV input");
    cascade->add_option("--config", cascade_options.config_path, "Cascade config JSON");
    cascade->add_option("--backend-config", cascade_options.backend_path,
                        "JSON file of backend specs overlaying the config's");
    cascade->add_option("--out-dir", cascade_options.out_dir,
                        "Directory for stage CSVs (overrides the config)");
    cascade->add_option("--report", cascade_options.report_path, "Report path (default stdout)");
    cascade->add_option("--report-csv", cascade_options.report_csv_path, "Flat CSV of the metrics");

    TokenizeDebugOptions tok_options;
    auto* tok = app.add_subcommand("tokenize-debug", "Show tokens, kinds and counts");
    tok->add_option("--text", tok_options.text, "One text to tokenize");
    tok->add_option("--source", tok_options.source_path, "File of texts, one per line");
    tok->add_option("--out", tok_options.out_path, "Output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }

    if (gec->parsed()) return cmd_eval_gec(gec_options);
    if (simp->parsed()) return cmd_eval_simp(simp_options);
    if (cascade->parsed()) return cmd_cascade(cascade_options);
    if (tok->parsed()) return cmd_tokenize_debug(tok_options);
    std::cerr << "error: no subcommand\n";
    return kExitDataError;
}

} // namespace rewriteval
