// Python bindings for the rewrite-evaluation core. The module exposes the
// main operations — tokenization, edit extraction, the metric suite, the
// entity heuristic, and prompt handling — over plain Python lists and
// dicts so callers never touch the C++ corpus types directly.

#include "rewriteval/corpus.hpp"
#include "rewriteval/errors.hpp"
#include "rewriteval/gec.hpp"
#include "rewriteval/hallucination.hpp"
#include "rewriteval/inference.hpp"
#include "rewriteval/simp.hpp"
#include "rewriteval/tokenize.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace rewriteval;

namespace {

using StringList = std::vector<std::string>;
using RefLists = std::vector<std::vector<std::string>>;
using EditTuple = std::tuple<int, int, std::string>;
using GoldTuple = std::tuple<int, int, std::vector<EditTuple>>;

Corpus corpus_from(const StringList& sources,
                   const StringList& predictions,
                   const RefLists& references,
                   Task task) {
    if (!predictions.empty() && predictions.size() != sources.size())
        throw usage_error("predictions and sources must have the same length");
    if (!references.empty() && references.size() != sources.size())
        throw usage_error("references and sources must have the same length");
    Corpus corpus;
    corpus.task = task;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        SentenceRecord rec;
        rec.id = static_cast<int>(i);
        rec.source = sources[i];
        if (!predictions.empty()) rec.prediction = predictions[i];
        if (!references.empty()) rec.references = references[i];
        corpus.records.push_back(std::move(rec));
    }
    if (!references.empty()) corpus.reference_count = references[0].size();
    return corpus;
}

Task parse_task(const std::string& name) {
    if (name == "grammar") return Task::grammar;
    if (name == "simplification") return Task::simplification;
    throw usage_error("task must be 'grammar' or 'simplification'");
}

EditSet edit_set_from(const std::vector<EditTuple>& edits) {
    EditSet set;
    for (const auto& [start, end, replacement] : edits)
        set.edits.push_back({start, end, replacement});
    return set;
}

std::vector<EditTuple> edit_tuples(const EditSet& set) {
    std::vector<EditTuple> out;
    for (const Edit& e : set.edits) out.emplace_back(e.start, e.end, e.replacement);
    return out;
}

py::dict prf_dict(const PRFScore& score) {
    py::dict d;
    d["precision"] = score.precision;
    d["recall"] = score.recall;
    d["f_beta"] = score.f_beta;
    d["beta"] = score.beta;
    d["tp"] = score.tp;
    d["fp"] = score.fp;
    d["fn"] = score.fn;
    return d;
}

py::dict sari_dict(const SariBreakdown& b) {
    py::dict d;
    d["sari"] = b.sari;
    d["keep"] = b.keep();
    d["delete"] = b.del();
    d["add"] = b.add();
    d["keep_n"] = b.keep_n;
    d["delete_n"] = b.delete_n;
    d["add_n"] = b.add_n;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Rewrite-quality metrics, edit alignment, and prompt tools";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const usage_error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const data_error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    // ------------------------------------------------------------ tokens
    m.def(
        "tokenize",
        [](const std::string& text) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const Token& tok : tokenize(text).tokens) {
                const char* kind = tok.kind == TokenKind::Word ? "word"
                                   : tok.kind == TokenKind::Number
                                       ? "number"
                                       : "punctuation";
                out.emplace_back(tok.text, kind);
            }
            return out;
        },
        py::arg("text"),
        "Split text into (token, kind) pairs; kind is 'word', 'number', or "
        "'punctuation'.");

    m.def(
        "word_count",
        [](const std::string& text) { return tokenize(text).word_count(); },
        py::arg("text"), "Number of non-punctuation tokens.");

    m.def("count_syllables", &count_syllables, py::arg("word"),
          "Vowel-group syllable estimate, minimum 1.");

    m.def("count_sentences", &count_sentences, py::arg("text"),
          "Terminator-based sentence count, minimum 1.");

    m.def("lower_ascii", &lower_ascii, py::arg("text"),
          "Lowercase ASCII letters only; other bytes pass through.");

    // ------------------------------------------------------------- edits
    m.def(
        "extract_edits",
        [](const StringList& source, const StringList& target) {
            return edit_tuples(extract_edits(source, target));
        },
        py::arg("source"), py::arg("target"),
        "Minimal span edits (start, end, replacement) turning source tokens "
        "into target tokens.");

    m.def(
        "apply_edits",
        [](const StringList& source, const std::vector<EditTuple>& edits) {
            return apply_edits(source, edit_set_from(edits));
        },
        py::arg("source"), py::arg("edits"),
        "Apply (start, end, replacement) span edits to source tokens.");

    m.def(
        "prf",
        [](long long tp, long long fp, long long fn, double beta) {
            return prf_dict(prf(tp, fp, fn, beta));
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("beta") = 0.5,
        "Precision/recall/F_beta from edit counts (0/0 counts as 1.0).");

    m.def(
        "m2_score",
        [](const StringList& sources, const StringList& predictions,
           const std::vector<GoldTuple>& gold, double beta) {
            Corpus corpus = corpus_from(sources, predictions, {}, Task::grammar);
            std::vector<GoldEditSet> gold_sets;
            for (const auto& [sentence_id, annotator_id, edits] : gold) {
                GoldEditSet set;
                set.sentence_id = sentence_id;
                set.annotator_id = annotator_id;
                for (const auto& [start, end, replacement] : edits)
                    set.edits.push_back({start, end, replacement});
                gold_sets.push_back(std::move(set));
            }
            return prf_dict(m2_score(corpus, gold_sets, beta));
        },
        py::arg("sources"), py::arg("predictions"), py::arg("gold"),
        py::arg("beta") = 0.5,
        "Edit-overlap P/R/F against gold edits given as (sentence_id, "
        "annotator_id, [(start, end, replacement), ...]) tuples.");

    // ----------------------------------------------------------- n-grams
    m.def(
        "gleu",
        [](const StringList& predictions, const RefLists& references,
           int max_n, bool sentence_mean) {
            Corpus corpus =
                corpus_from(predictions, predictions, references, Task::grammar);
            GleuOptions options;
            options.max_n = max_n;
            options.sentence_mean = sentence_mean;
            return gleu(corpus, options);
        },
        py::arg("predictions"), py::arg("references"), py::arg("max_n") = 4,
        py::arg("sentence_mean") = false,
        "Corpus n-gram overlap score of predictions against per-sentence "
        "reference lists.");

    m.def("gleu_sentence", &gleu_sentence, py::arg("hypothesis"),
          py::arg("references"), py::arg("max_n") = 4,
          "Best-reference n-gram score for one sentence.");

    // -------------------------------------------------------------- SARI
    m.def(
        "sari",
        [](const StringList& sources, const StringList& predictions,
           const RefLists& references, int max_n) {
            Corpus corpus = corpus_from(sources, predictions, references,
                                        Task::simplification);
            return sari_dict(sari(corpus, max_n));
        },
        py::arg("sources"), py::arg("predictions"), py::arg("references"),
        py::arg("max_n") = 4,
        "Keep/delete/add rewrite score against inputs and references.");

    m.def(
        "sari_sentence",
        [](const std::string& source, const std::string& prediction,
           const StringList& references, int max_n) {
            return sari_dict(sari_sentence(source, references, prediction, max_n));
        },
        py::arg("source"), py::arg("prediction"), py::arg("references"),
        py::arg("max_n") = 4, "Single-sentence rewrite score.");

    // ------------------------------------------------------- readability
    m.def("fre", &fre, py::arg("text"), "Flesch reading ease (unclamped).");
    m.def("fkgl", &fkgl, py::arg("text"), "Flesch-Kincaid grade level.");

    m.def(
        "length_stats",
        [](const StringList& sources, const StringList& predictions,
           const RefLists& references) {
            Corpus corpus = corpus_from(sources, predictions, references,
                                        Task::simplification);
            LengthStats stats = length_stats(corpus);
            py::dict d;
            d["l_in"] = stats.l_in;
            d["l_pred"] = stats.l_pred;
            d["l_ref"] = stats.l_ref;
            d["compression"] = stats.compression;
            return d;
        },
        py::arg("sources"), py::arg("predictions"),
        py::arg("references") = RefLists{},
        "Mean word counts and the prediction/source compression ratio.");

    // ---------------------------------------------------------- entities
    m.def(
        "recognize",
        [](const std::string& text, const std::optional<StringList>& stoplist) {
            if (!stoplist) return recognize(text).entities;
            RecognizerOptions options;
            options.stopwords = *stoplist;
            return recognize(text, options).entities;
        },
        py::arg("text"), py::arg("stoplist") = std::nullopt,
        "Normalized entity mentions found by the capitalization-and-year "
        "heuristic; pass a stoplist to replace the built-in one.");

    m.def(
        "hallucination_rate",
        [](const StringList& sources, const StringList& predictions) {
            Corpus corpus = corpus_from(sources, predictions, {}, Task::grammar);
            HallucinationReport report = hallucination_rate(corpus);
            py::list per_example;
            for (const auto& ex : report.per_example) {
                py::dict row;
                row["id"] = ex.id;
                row["hallucinated"] = ex.hallucinated;
                row["novel_entities"] = ex.novel_entities;
                per_example.append(row);
            }
            py::dict d;
            d["rate"] = report.rate;
            d["per_example"] = per_example;
            return d;
        },
        py::arg("sources"), py::arg("predictions"),
        "Share of predictions (0..100) introducing entities absent from "
        "their sources.");

    // ------------------------------------------------------------ prompts
    m.def(
        "render_prompt",
        [](const std::string& task, const std::string& input) {
            Task t = parse_task(task);
            return render_prompt(
                t == Task::grammar ? grammar_prompt() : simplification_prompt(),
                input);
        },
        py::arg("task"), py::arg("input"),
        "Render the task's completion prompt for one input text.");

    m.def("clean_completion", &clean_completion, py::arg("raw"),
          py::arg("prompt"), py::arg("completion_cue"), py::arg("stop_marker"),
          "Strip prompt echo, cue text, stop marker, and surrounding "
          "whitespace from a raw completion.");

    m.attr("__version__") = "0.1.0";
}
