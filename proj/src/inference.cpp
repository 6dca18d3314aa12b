#include "rewriteval/inference.hpp"

#include "rewriteval/tokenize.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace rewriteval {

namespace {

using nlohmann::json;

std::string trim_ascii(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

std::string render_prompt(const PromptTemplate& tmpl, const std::string& input) {
    if (input.empty()) throw usage_error("cannot render a prompt for empty input");
    return tmpl.prefix + input + tmpl.separator + tmpl.completion_cue;
}

PromptTemplate grammar_prompt() {
    return {Task::grammar, "Correct this text: ", " | ", "Corrected:"};
}

PromptTemplate simplification_prompt() {
    return {Task::simplification, "Simplify this text: ", " | ", "Simplified:"};
}

DecodingConfig default_decoding(Task task) {
    DecodingConfig config;
    config.max_new_tokens = task == Task::grammar ? 60 : 80;
    return config;
}

std::string clean_completion(const std::string& raw,
                             const std::string& prompt,
                             const std::string& cue,
                             const std::string& stop_marker) {
    std::string out = raw;
    if (!prompt.empty() && out.rfind(prompt, 0) == 0) {
        out = out.substr(prompt.size());
    } else if (!cue.empty()) {
        std::size_t pos = out.find(cue);
        if (pos != std::string::npos) out = out.substr(pos + cue.size());
    }
    if (!stop_marker.empty()) {
        std::size_t pos = out.find(stop_marker);
        if (pos != std::string::npos) out = out.substr(0, pos);
    }
    return trim_ascii(out);
}

std::string EchoBackend::complete(const CompletionRequest& request) {
    return request.input;
}

FileBackend::FileBackend(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open completions file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines_.push_back(line);
    }
}

std::string FileBackend::complete(const CompletionRequest& request) {
    if (request.record_id < 0 ||
        request.record_id >= static_cast<int>(lines_.size()))
        throw backend_error(path_ + " has no line for record " +
                            std::to_string(request.record_id));
    return lines_[request.record_id];
}

HttpBackend::HttpBackend(HttpBackendSpec spec) : spec_(std::move(spec)) {
    if (spec_.url.empty()) throw data_error("http backend needs a url");
    if (spec_.dialect != "completion" && spec_.dialect != "chat")
        throw data_error("unknown http dialect: " + spec_.dialect);
    if (!spec_.auth_env.empty()) {
        const char* token = std::getenv(spec_.auth_env.c_str());
        if (token == nullptr || *token == '\0')
            throw data_error("auth environment variable is not set: " + spec_.auth_env);
        auth_token_ = token;
    }
}

std::string HttpBackend::complete(const CompletionRequest& request) {
    // Split the endpoint into origin + path for the client.
    std::size_t scheme = spec_.url.find("://");
    if (scheme == std::string::npos)
        throw backend_error("malformed backend url: " + spec_.url);
    std::size_t path_pos = spec_.url.find('/', scheme + 3);
    std::string origin = path_pos == std::string::npos ? spec_.url
                                                       : spec_.url.substr(0, path_pos);
    std::string path = path_pos == std::string::npos ? "/"
                                                     : spec_.url.substr(path_pos);

    httplib::Client client(origin);
    client.set_connection_timeout(spec_.timeout_s, 0);
    client.set_read_timeout(spec_.timeout_s, 0);
    client.set_write_timeout(spec_.timeout_s, 0);

    double temperature = request.decoding.strategy == DecodingStrategy::greedy
                             ? 0.0
                             : request.decoding.temperature;
    json body;
    body["model"] = spec_.model;
    if (spec_.dialect == "chat")
        body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});
    else
        body["prompt"] = request.prompt;
    body["temperature"] = temperature;
    body["max_tokens"] = request.decoding.max_new_tokens;

    httplib::Headers headers;
    if (!auth_token_.empty())
        headers.emplace("Authorization", "Bearer " + auth_token_);

    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        throw backend_transient_error("connection to " + origin + " failed: " +
                                      httplib::to_string(res.error()));
    if (res->status == 408 || res->status == 429 || res->status >= 500)
        throw backend_transient_error(spec_.url + " returned status " +
                                      std::to_string(res->status));
    if (res->status < 200 || res->status >= 300)
        throw backend_error(spec_.url + " returned status " +
                            std::to_string(res->status));

    json reply = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    const char* complaint = "malformed backend response from ";
    if (reply.is_discarded() || !reply.contains("choices") ||
        !reply["choices"].is_array() || reply["choices"].empty())
        throw backend_error(complaint + spec_.url);
    const json& choice = reply["choices"][0];
    if (spec_.dialect == "chat") {
        if (!choice.contains("message") || !choice["message"].contains("content") ||
            !choice["message"]["content"].is_string())
            throw backend_error(complaint + spec_.url);
        return choice["message"]["content"].get<std::string>();
    }
    if (!choice.contains("text") || !choice["text"].is_string())
        throw backend_error(complaint + spec_.url);
    return choice["text"].get<std::string>();
}

std::shared_ptr<Backend> make_backend(const BackendSpec& spec) {
    if (spec.type == "echo") return std::make_shared<EchoBackend>();
    if (spec.type == "file") return std::make_shared<FileBackend>(spec.path);
    if (spec.type == "http") return std::make_shared<HttpBackend>(spec.http);
    throw data_error("unknown backend type: " + spec.type);
}

std::string complete_with_retries(Backend& backend,
                                  const CompletionRequest& request,
                                  const RetryPolicy& policy) {
    const int attempts = std::max(1, policy.max_attempts);
    long backoff = std::max(0, policy.backoff_ms);
    for (int attempt = 1;; ++attempt) {
        try {
            return backend.complete(request);
        } catch (const backend_transient_error& err) {
            if (attempt >= attempts)
                throw backend_error(backend.name() + " failed after " +
                                    std::to_string(attempt) + " attempts: " + err.what());
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
    }
}

std::string complete(Backend& backend,
                     int record_id,
                     const std::string& input,
                     const PromptTemplate& tmpl,
                     const DecodingConfig& config,
                     const RetryPolicy& retry) {
    CompletionRequest request{record_id, input, render_prompt(tmpl, input), config};
    std::string raw = complete_with_retries(backend, request, retry);
    return clean_completion(raw, request.prompt, tmpl.completion_cue,
                            config.stop_marker);
}

namespace {

Task parse_task(const json& j, const std::string& where) {
    std::string name = j.get<std::string>();
    if (name == "grammar") return Task::grammar;
    if (name == "simplification") return Task::simplification;
    throw data_error(where + ": unknown task '" + name + "'");
}

BackendSpec parse_backend_spec(const json& j, const std::string& id) {
    const std::string where = "backend '" + id + "'";
    if (!j.is_object()) throw data_error(where + ": expected an object");
    BackendSpec spec;
    spec.type = j.value("type", std::string());
    if (spec.type == "file") {
        spec.path = j.value("path", std::string());
        if (spec.path.empty()) throw data_error(where + ": file backend needs a path");
    } else if (spec.type == "http") {
        spec.http.url = j.value("url", std::string());
        if (spec.http.url.empty()) throw data_error(where + ": http backend needs a url");
        spec.http.model = j.value("model", std::string());
        spec.http.dialect = j.value("dialect", std::string("completion"));
        spec.http.auth_env = j.value("auth_env", std::string());
        spec.http.timeout_s = j.value("timeout_s", 30);
        if (spec.http.timeout_s < 1) throw data_error(where + ": timeout_s must be >= 1");
    } else if (spec.type != "echo") {
        throw data_error(where + ": unknown backend type '" + spec.type + "'");
    }
    return spec;
}

} // namespace

CascadeJob parse_cascade_config(const std::string& json_text) {
    json root = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded() || !root.is_object())
        throw data_error("cascade config is not a JSON object");

    CascadeJob job;
    job.concurrency = root.value("concurrency", 4);
    if (job.concurrency < 1) throw data_error("concurrency must be >= 1");
    job.intermediate_dir = root.value("intermediate_dir", std::string("."));

    if (root.contains("retry")) {
        const json& r = root["retry"];
        if (!r.is_object()) throw data_error("retry must be an object");
        job.retry.max_attempts = r.value("max_attempts", 3);
        job.retry.backoff_ms = r.value("backoff_ms", 100);
        if (job.retry.max_attempts < 1) throw data_error("retry.max_attempts must be >= 1");
        if (job.retry.backoff_ms < 0) throw data_error("retry.backoff_ms must be >= 0");
    }

    if (!root.contains("backends") || !root["backends"].is_object())
        throw data_error("cascade config needs a 'backends' object");
    for (const auto& [id, spec] : root["backends"].items())
        job.backends[id] = parse_backend_spec(spec, id);

    if (!root.contains("stages") || !root["stages"].is_array())
        throw data_error("cascade config needs a 'stages' array");
    const json& stages = root["stages"];
    if (stages.empty() || stages.size() > 3)
        throw data_error("a cascade runs 1 to 3 stages, config has " +
                         std::to_string(stages.size()));

    bool top_has_task = root.contains("task");
    Task top_task = top_has_task ? parse_task(root["task"], "config") : Task::grammar;

    int index = 0;
    for (const json& sj : stages) {
        ++index;
        const std::string where = "stage " + std::to_string(index);
        if (!sj.is_object()) throw data_error(where + ": expected an object");

        StageSpec stage;
        stage.name = sj.value("name", "stage_" + std::to_string(index));
        stage.backend_id = sj.value("backend", std::string());
        if (stage.backend_id.empty())
            throw data_error(where + ": missing 'backend'");
        if (!job.backends.count(stage.backend_id))
            throw data_error(where + ": unknown backend '" + stage.backend_id + "'");

        bool has_task = sj.contains("task") || top_has_task;
        Task task = sj.contains("task") ? parse_task(sj["task"], where) : top_task;
        if (has_task) {
            stage.prompt = task == Task::grammar ? grammar_prompt()
                                                 : simplification_prompt();
            stage.decoding = default_decoding(task);
        } else if (!sj.contains("prompt")) {
            throw data_error(where + ": needs a 'task' or an explicit 'prompt'");
        }

        if (sj.contains("prompt")) {
            const json& p = sj["prompt"];
            if (!p.is_object()) throw data_error(where + ": prompt must be an object");
            stage.prompt.prefix = p.value("prefix", stage.prompt.prefix);
            stage.prompt.separator = p.value("separator", stage.prompt.separator);
            stage.prompt.completion_cue = p.value("cue", stage.prompt.completion_cue);
            if (has_task) stage.prompt.task = task;
        }
        if (sj.contains("decoding")) {
            const json& d = sj["decoding"];
            if (!d.is_object()) throw data_error(where + ": decoding must be an object");
            if (d.contains("strategy")) {
                std::string s = d["strategy"].get<std::string>();
                if (s == "greedy") stage.decoding.strategy = DecodingStrategy::greedy;
                else if (s == "sampled") stage.decoding.strategy = DecodingStrategy::sampled;
                else throw data_error(where + ": unknown decoding strategy '" + s + "'");
            }
            stage.decoding.temperature = d.value("temperature", stage.decoding.temperature);
            stage.decoding.max_new_tokens =
                d.value("max_new_tokens", stage.decoding.max_new_tokens);
            stage.decoding.stop_marker = d.value("stop", stage.decoding.stop_marker);
            if (stage.decoding.temperature < 0.0)
                throw data_error(where + ": temperature must be >= 0");
            if (stage.decoding.max_new_tokens < 1)
                throw data_error(where + ": max_new_tokens must be >= 1");
        }
        job.stages.push_back(std::move(stage));
    }
    return job;
}

CascadeJob load_cascade_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open cascade config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_cascade_config(text);
}

std::map<std::string, BackendSpec> parse_backend_specs(const std::string& json_text) {
    json root = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (root.is_discarded() || !root.is_object())
        throw data_error("backend overlay is not a JSON object");
    std::map<std::string, BackendSpec> out;
    for (const auto& [id, spec] : root.items())
        out[id] = parse_backend_spec(spec, id);
    return out;
}

namespace {

// Counts every call that reaches the wrapped backend, retries included.
class CountingBackend : public Backend {
public:
    CountingBackend(Backend& inner, std::atomic<long long>& calls)
        : inner_(inner), calls_(calls) {}
    std::string name() const override { return inner_.name(); }
    std::string complete(const CompletionRequest& request) override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.complete(request);
    }

private:
    Backend& inner_;
    std::atomic<long long>& calls_;
};

} // namespace

CascadeResult run_cascade(const Corpus& input,
                          const CascadeJob& job,
                          const std::map<std::string, std::shared_ptr<Backend>>& backends) {
    if (job.stages.empty() || job.stages.size() > 3)
        throw data_error("a cascade runs 1 to 3 stages");
    if (job.concurrency < 1) throw data_error("concurrency must be >= 1");
    if (input.records.empty()) throw usage_error("cascade input corpus is empty");
    for (const auto& stage : job.stages) {
        auto it = backends.find(stage.backend_id);
        if (it == backends.end() || !it->second)
            throw data_error("no backend registered as '" + stage.backend_id + "'");
    }

    // Fail on an unusable output directory before any backend call.
    std::error_code ec;
    std::filesystem::create_directories(job.intermediate_dir, ec);
    if (ec)
        throw data_error("cannot create intermediate directory " +
                         job.intermediate_dir + ": " + ec.message());
    {
        std::string probe = job.intermediate_dir + "/stage_1.csv";
        std::ofstream out(probe, std::ios::binary);
        if (!out) throw data_error("cannot write file: " + probe);
    }

    const std::size_t n = input.size();
    std::vector<std::string> current;
    current.reserve(n);
    for (const auto& rec : input.records) current.push_back(rec.source);

    CascadeResult result;
    std::set<int> failed;

    for (std::size_t k = 0; k < job.stages.size(); ++k) {
        const StageSpec& stage = job.stages[k];
        StageResult sr;
        sr.name = stage.name;
        sr.backend_id = stage.backend_id;
        sr.csv_path = job.intermediate_dir + "/stage_" + std::to_string(k + 1) + ".csv";

        std::atomic<long long> calls{0};
        CountingBackend backend(*backends.at(stage.backend_id), calls);

        std::vector<std::string> next = current;  // failures carry forward
        std::vector<char> stage_failed(n, 0);
        std::atomic<std::size_t> cursor{0};
        std::mutex fatal_mutex;
        std::exception_ptr fatal;

        const auto worker = [&] {
            while (true) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= n) return;
                {
                    std::lock_guard<std::mutex> lock(fatal_mutex);
                    if (fatal) return;
                }
                try {
                    next[i] = complete(backend, input.records[i].id, current[i],
                                       stage.prompt, stage.decoding, job.retry);
                } catch (const backend_error&) {
                    stage_failed[i] = 1;
                } catch (const usage_error&) {
                    // e.g. the previous stage reduced this record to an
                    // empty string; treat like a failed call and move on.
                    stage_failed[i] = 1;
                } catch (...) {
                    std::lock_guard<std::mutex> lock(fatal_mutex);
                    if (!fatal) fatal = std::current_exception();
                    return;
                }
            }
        };

        const std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(job.concurrency),
                                  n == 0 ? 1 : n);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (fatal) std::rethrow_exception(fatal);

        sr.calls = calls.load();
        for (std::size_t i = 0; i < n; ++i) {
            if (stage_failed[i]) {
                ++sr.failures;
                failed.insert(input.records[i].id);
            }
        }
        current = std::move(next);

        // The intermediate keeps the original sources next to this stage's
        // outputs so each stage can be scored on its own.
        Corpus snapshot = input;
        for (std::size_t i = 0; i < n; ++i) snapshot.records[i].prediction = current[i];
        save_intermediate(snapshot, sr.csv_path);

        long long stage_failures = sr.failures;
        result.stages.push_back(std::move(sr));
        if (n > 0 && stage_failures == static_cast<long long>(n))
            throw backend_error("every record failed in stage " +
                                std::to_string(k + 1));
    }

    result.final_corpus = input;
    for (std::size_t i = 0; i < n; ++i)
        result.final_corpus.records[i].prediction = current[i];
    result.failed_ids.assign(failed.begin(), failed.end());
    return result;
}

CascadeResult run_cascade(const Corpus& input, const CascadeJob& job) {
    std::map<std::string, std::shared_ptr<Backend>> backends;
    for (const auto& [id, spec] : job.backends) backends[id] = make_backend(spec);
    return run_cascade(input, job, backends);
}

} // namespace rewriteval
