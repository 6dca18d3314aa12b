#pragma once

#include "rewriteval/corpus.hpp"
#include "rewriteval/errors.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rewriteval {

// Raised by backends for failures worth retrying (connection refused,
// timeouts, 408/429/5xx). Anything else raised as backend_error is
// permanent and fails the record immediately.
struct backend_transient_error : backend_error {
    explicit backend_transient_error(const std::string& what) : backend_error(what) {}
};

enum class DecodingStrategy { greedy, sampled };

struct DecodingConfig {
    DecodingStrategy strategy = DecodingStrategy::greedy;
    double temperature = 0.7;  // ignored when greedy; requests then carry 0
    int max_new_tokens = 60;
    std::string stop_marker = "\n";  // completion truncated here; empty = keep all
};

// Prompts render as prefix + input + separator + completion_cue, byte
// exact, no trimming:
//   "Correct this text: <input> | Corrected:"
struct PromptTemplate {
    Task task = Task::grammar;
    std::string prefix;
    std::string separator;
    std::string completion_cue;
};

// Built-in templates with their usual decoding defaults (60 new tokens
// for grammar correction, 80 for simplification).
PromptTemplate grammar_prompt();
PromptTemplate simplification_prompt();
DecodingConfig default_decoding(Task task);

// Rejects empty input (usage error); otherwise plain concatenation.
std::string render_prompt(const PromptTemplate& tmpl, const std::string& input);

struct CompletionRequest {
    int record_id = 0;
    std::string input;   // stage input text (pre-templating)
    std::string prompt;  // fully rendered prompt
    DecodingConfig decoding;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    // Returns the raw model output, which may echo the prompt and run past
    // the stop marker; clean_completion handles both.
    virtual std::string complete(const CompletionRequest& request) = 0;
};

// Strips the prompt from a raw completion (the exact prompt prefix when
// present, otherwise everything through the first occurrence of the cue),
// truncates at the stop marker, and trims surrounding whitespace.
std::string clean_completion(const std::string& raw,
                             const std::string& prompt,
                             const std::string& cue,
                             const std::string& stop_marker);

// Returns the input segment of the request unchanged; stands in for a
// model that makes no edits.
class EchoBackend : public Backend {
public:
    std::string name() const override { return "echo"; }
    std::string complete(const CompletionRequest& request) override;
};

// Replays canned completions from a line-parallel file: line i answers the
// record with id i. Out-of-range ids are permanent failures.
class FileBackend : public Backend {
public:
    explicit FileBackend(const std::string& path);
    std::string name() const override { return "file"; }
    std::string complete(const CompletionRequest& request) override;

private:
    std::string path_;
    std::vector<std::string> lines_;
};

struct HttpBackendSpec {
    std::string url;      // endpoint, e.g. http://127.0.0.1:8080/v1/completions
    std::string model;
    std::string dialect = "completion";  // "completion" or "chat"
    std::string auth_env;  // env var holding a bearer token; empty = no auth
    int timeout_s = 30;
};

// POSTs an OpenAI-style JSON body {model, prompt, temperature, max_tokens}
// (or the chat-messages equivalent under the "chat" dialect) and returns
// the first completion text. Greedy decoding sends temperature 0.
// Connection errors, 408, 429 and 5xx are transient; other non-2xx
// statuses and unparseable responses are permanent.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendSpec spec);
    std::string name() const override { return "http"; }
    std::string complete(const CompletionRequest& request) override;

private:
    HttpBackendSpec spec_;
    std::string auth_token_;
};

struct BackendSpec {
    std::string type;  // "echo", "file", "http"
    std::string path;  // file backend: completions file
    HttpBackendSpec http;
};

// Instantiates a backend; configuration problems (missing file, missing
// auth variable, unknown type) are data errors raised before any call.
std::shared_ptr<Backend> make_backend(const BackendSpec& spec);

struct RetryPolicy {
    int max_attempts = 3;
    int backoff_ms = 100;  // doubles after every failed attempt
};

// Calls backend.complete, retrying transient failures with exponential
// backoff; exhausted retries rethrow as a permanent error carrying the
// backend name and attempt count.
std::string complete_with_retries(Backend& backend,
                                  const CompletionRequest& request,
                                  const RetryPolicy& policy);

// One full model call: render the prompt, call with retries, clean the
// completion. The building blocks above stay public for reuse.
std::string complete(Backend& backend,
                     int record_id,
                     const std::string& input,
                     const PromptTemplate& tmpl,
                     const DecodingConfig& config,
                     const RetryPolicy& retry = {});

struct StageSpec {
    std::string name;        // defaults to "stage_<k>"
    std::string backend_id;  // key into CascadeJob::backends
    PromptTemplate prompt;
    DecodingConfig decoding;
};

struct CascadeJob {
    std::vector<StageSpec> stages;                // 1 to 3 stages
    std::map<std::string, BackendSpec> backends;  // id -> spec
    int concurrency = 4;   // in-flight cap; results are order-stable regardless
    RetryPolicy retry;
    std::string intermediate_dir = ".";
};

// Parses and validates the cascade config JSON (see README for the
// schema). Validation problems are data errors raised before any call.
CascadeJob parse_cascade_config(const std::string& json_text);
CascadeJob load_cascade_config(const std::string& path);

// Parses a bare {id: backend spec} object — the --backend-config overlay
// that swaps a config's backends without touching stages.
std::map<std::string, BackendSpec> parse_backend_specs(const std::string& json_text);

struct StageResult {
    std::string name;
    std::string backend_id;
    std::string csv_path;
    long long calls = 0;     // backend invocations including retries
    long long failures = 0;  // records that failed permanently in this stage
};

struct CascadeResult {
    Corpus final_corpus;  // input records carrying last-stage predictions
    std::vector<StageResult> stages;
    std::vector<int> failed_ids;  // deduplicated, ascending
};

// Feeds every record through the stages in order: stage 1 reads the
// sources, each later stage reads the previous stage's output. Calls run
// concurrently up to the cap; a record whose call fails permanently keeps
// its previous text and is reported. After each stage the current corpus
// is written to intermediate_dir/stage_<k>.csv. If every record fails in
// one stage the run aborts. Record order and ids are preserved, and with
// deterministic backends the outputs are identical for any concurrency.
CascadeResult run_cascade(const Corpus& input,
                          const CascadeJob& job,
                          const std::map<std::string, std::shared_ptr<Backend>>& backends);
CascadeResult run_cascade(const Corpus& input, const CascadeJob& job);

} // namespace rewriteval
