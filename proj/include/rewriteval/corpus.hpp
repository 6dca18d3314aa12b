#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rewriteval {

enum class Task { grammar, simplification };

// One evaluation unit: a source sentence, zero or more reference rewrites,
// and optionally a system prediction. Ids are 0-based and contiguous
// within a corpus.
struct SentenceRecord {
    int id = 0;
    std::string source;
    std::vector<std::string> references;
    std::optional<std::string> prediction;
};

struct Corpus {
    Task task = Task::grammar;
    std::vector<SentenceRecord> records;
    std::size_t reference_count = 0;  // references per record (rectangular corpora)
    bool ragged_references = false;   // per-record counts may differ (gold-edit corpora)

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    // True when every record has a prediction. Scoring requires
    // all-or-none prediction presence; mixed corpora are rejected.
    bool has_predictions() const;
};

struct GoldEdit {
    int start = 0;  // token span [start, end) over the whitespace tokens of source
    int end = 0;
    std::string replacement;  // possibly empty (deletion); start == end inserts

    bool operator==(const GoldEdit&) const = default;
    auto operator<=>(const GoldEdit&) const = default;
};

// One annotator's gold edits for one sentence. An empty edit list means
// this annotator considered the source already correct.
struct GoldEditSet {
    int sentence_id = 0;
    int annotator_id = 0;
    std::vector<GoldEdit> edits;  // sorted by start, non-overlapping
};

// Reads one sentence per line from `source_path` and from each file in
// `reference_paths` (line-parallel references). If `prediction_path` is
// non-empty its lines become predictions. All files must have the same
// line count; mismatches name the offending file. Lines are stripped of
// trailing carriage returns only. Empty or whitespace-only source lines
// are rejected with their line number; empty reference lines are kept as
// intentionally empty references.
Corpus load_parallel(const std::string& source_path,
                     const std::vector<std::string>& reference_paths,
                     const std::string& prediction_path = {},
                     Task task = Task::grammar);

// Parses the conventional gold edit format:
//   S <tokenized source sentence>
//   A <start> <end>|||<type>|||<replacement>|||<required>|||<comment>|||<annotator>
// Sentences are separated by blank lines. A span of -1 -1 with type "noop"
// yields an annotator with an empty edit list; "-NONE-" replacements
// become empty strings. Returns the corpus (no predictions, no
// references) and the edit sets grouped by (sentence, annotator), in
// first-appearance order.
std::pair<Corpus, std::vector<GoldEditSet>> load_m2(const std::string& path);

// CSV with header id,source,prediction (RFC-4180 quoting, UTF-8, rows
// ordered by id). This is the per-stage intermediate a cascade writes;
// load_intermediate reads it back for scoring.
void save_intermediate(const Corpus& corpus, const std::string& path);
Corpus load_intermediate(const std::string& path);

// Line-file helpers shared by the loaders and the CLI.
std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

} // namespace rewriteval
