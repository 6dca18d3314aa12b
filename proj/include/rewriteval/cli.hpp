#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rewriteval {

// The scored output of one evaluation run. Metric and provenance entries
// keep insertion order; serialization is deterministic (stable key order,
// fixed 6-decimal floats), so identical inputs and config produce
// byte-identical reports. `config_hash` fingerprints the provenance so two
// reports can be confirmed to come from the same settings.
struct MetricReport {
    std::string task;  // "gec", "simp", "cascade"
    std::size_t n_sentences = 0;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::pair<std::string, bool>> flags;  // e.g. "lengthening"
    std::vector<std::pair<std::string, std::string>> provenance;
    // Optional per-sentence rows: (id, named values).
    std::vector<std::pair<int, std::vector<std::pair<std::string, double>>>> per_sentence;
    // Cascade runs: per-stage summary and (when evaluation is configured)
    // per-stage metrics.
    struct StageRow {
        std::string name;
        std::string backend;
        std::string csv;
        long long calls = 0;
        long long failures = 0;
        std::vector<std::pair<std::string, double>> metrics;
    };
    std::vector<StageRow> stages;
};

std::string to_json(const MetricReport& report);
std::string to_csv(const MetricReport& report);  // flat stage,metric,value rows

struct EvalGecOptions {
    std::string source_path;
    std::string pred_path;
    std::string csv_path;  // id,source,prediction CSV instead of --source/--pred
    std::vector<std::string> ref_paths;
    std::string gold_m2_path;
    double beta = 0.5;
    int max_n = 4;
    bool sentence_mean = false;
    bool per_sentence = false;
    std::string stoplist_path;
    std::string ner_command;
    std::string report_path;      // empty = stdout
    std::string report_csv_path;  // optional flat CSV
};

struct EvalSimpOptions {
    std::string source_path;
    std::string pred_path;
    std::string csv_path;
    std::vector<std::string> ref_paths;
    int max_n = 4;
    bool per_sentence = false;
    std::string stoplist_path;
    std::string ner_command;
    std::string report_path;
    std::string report_csv_path;
};

struct CascadeOptions {
    std::string source_path;
    std::string csv_path;
    std::string config_path;
    std::string backend_path;  // overlay replacing the config's backends
    std::string out_dir;       // overrides the config's intermediate_dir
    std::string report_path;
    std::string report_csv_path;
};

struct TokenizeDebugOptions {
    std::string text;
    std::string source_path;
    std::string out_path;  // empty = stdout
};

// Each returns a process exit code (0 ok, 2 input/config, 3 metric
// precondition, 4 backend) and reports problems on stderr; never throws.
int cmd_eval_gec(const EvalGecOptions& options);
int cmd_eval_simp(const EvalSimpOptions& options);
int cmd_cascade(const CascadeOptions& options);
int cmd_tokenize_debug(const TokenizeDebugOptions& options);

// Argument parsing + dispatch, same contract as main().
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

} // namespace rewriteval
