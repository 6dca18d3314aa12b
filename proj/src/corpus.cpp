#include "rewriteval/corpus.hpp"

#include "rewriteval/errors.hpp"
#include "rewriteval/tokenize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace rewriteval {

namespace {

bool whitespace_only(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// One CSV field, RFC-4180: quote when the field contains a comma, quote,
// or line break; embedded quotes double.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_started = false;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty())
                throw data_error(path + ": stray quote inside unquoted field");
            quoted = true;
            row_started = true;
            ++i;
            break;
        case ',':
            row.push_back(field);
            field.clear();
            row_started = true;
            ++i;
            break;
        case '\r':
            ++i;
            break;
        case '\n':
            if (row_started || !field.empty() || !row.empty()) {
                row.push_back(field);
                rows.push_back(row);
            }
            field.clear();
            row.clear();
            row_started = false;
            ++i;
            break;
        default:
            field += c;
            row_started = true;
            ++i;
            break;
        }
    }
    if (quoted) throw data_error(path + ": unterminated quoted field");
    if (row_started || !field.empty() || !row.empty()) {
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

} // namespace

bool Corpus::has_predictions() const {
    return std::all_of(records.begin(), records.end(),
                       [](const SentenceRecord& r) { return r.prediction.has_value(); });
}

std::vector<std::string> read_lines(const std::string& path) {
    std::string content = read_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= content.size()) {
        std::size_t nl = content.find('\n', start);
        if (nl == std::string::npos) {
            if (start < content.size()) lines.push_back(content.substr(start));
            break;
        }
        std::string line = content.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        start = nl + 1;
    }
    return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    for (const auto& line : lines) out << line << '\n';
    if (!out) throw data_error("write failed: " + path);
}

Corpus load_parallel(const std::string& source_path,
                     const std::vector<std::string>& reference_paths,
                     const std::string& prediction_path,
                     Task task) {
    std::vector<std::string> sources = read_lines(source_path);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (whitespace_only(sources[i]))
            throw data_error(source_path + ":" + std::to_string(i + 1) +
                             ": empty source line");
    }

    std::vector<std::vector<std::string>> refs;
    for (const auto& rp : reference_paths) {
        auto lines = read_lines(rp);
        if (lines.size() != sources.size())
            throw data_error("line count mismatch: " + rp + " has " +
                             std::to_string(lines.size()) + " lines, " + source_path +
                             " has " + std::to_string(sources.size()));
        refs.push_back(std::move(lines));
    }

    std::vector<std::string> preds;
    if (!prediction_path.empty()) {
        preds = read_lines(prediction_path);
        if (preds.size() != sources.size())
            throw data_error("line count mismatch: " + prediction_path + " has " +
                             std::to_string(preds.size()) + " lines, " + source_path +
                             " has " + std::to_string(sources.size()));
    }

    Corpus corpus;
    corpus.task = task;
    corpus.reference_count = refs.size();
    corpus.records.reserve(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        SentenceRecord rec;
        rec.id = static_cast<int>(i);
        rec.source = sources[i];
        for (const auto& r : refs) rec.references.push_back(r[i]);
        if (!preds.empty()) rec.prediction = preds[i];
        corpus.records.push_back(std::move(rec));
    }
    return corpus;
}

std::pair<Corpus, std::vector<GoldEditSet>> load_m2(const std::string& path) {
    std::vector<std::string> lines = read_lines(path);

    Corpus corpus;
    corpus.task = Task::grammar;
    corpus.ragged_references = true;

    std::vector<GoldEditSet> sets;
    std::map<std::pair<int, int>, std::size_t> set_index;  // (sentence, annotator) -> sets slot
    int current = -1;  // sentence id of the open block, -1 = none
    std::size_t current_tokens = 0;

    const auto set_for = [&](int annotator) -> GoldEditSet& {
        auto key = std::make_pair(current, annotator);
        auto it = set_index.find(key);
        if (it == set_index.end()) {
            it = set_index.emplace(key, sets.size()).first;
            sets.push_back({current, annotator, {}});
        }
        return sets[it->second];
    };

    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string& line = lines[ln];
        const std::string at = path + ":" + std::to_string(ln + 1);
        if (whitespace_only(line)) {
            current = -1;
            continue;
        }
        if (line.rfind("S ", 0) == 0) {
            std::string source = line.substr(2);
            if (whitespace_only(source)) throw data_error(at + ": empty source line");
            current = static_cast<int>(corpus.records.size());
            current_tokens = tokenize_whitespace(source).size();
            corpus.records.push_back({current, std::move(source), {}, std::nullopt});
            continue;
        }
        if (line.rfind("A ", 0) == 0) {
            if (current < 0) throw data_error(at + ": edit line before any source line");
            std::string rest = line.substr(2);
            std::vector<std::string> fields;
            std::size_t pos = 0;
            while (true) {
                std::size_t sep = rest.find("|||", pos);
                if (sep == std::string::npos) {
                    fields.push_back(rest.substr(pos));
                    break;
                }
                fields.push_back(rest.substr(pos, sep - pos));
                pos = sep + 3;
            }
            if (fields.size() != 6)
                throw data_error(at + ": expected 6 |||-separated fields, got " +
                                 std::to_string(fields.size()));

            int start = 0, end = 0, annotator = 0;
            {
                std::istringstream span(fields[0]);
                if (!(span >> start >> end))
                    throw data_error(at + ": malformed edit span '" + fields[0] + "'");
                std::string extra;
                if (span >> extra)
                    throw data_error(at + ": malformed edit span '" + fields[0] + "'");
            }
            try {
                std::size_t used = 0;
                annotator = std::stoi(fields[5], &used);
                if (used != fields[5].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw data_error(at + ": malformed annotator id '" + fields[5] + "'");
            }

            if (start == -1 && end == -1) {
                set_for(annotator);  // no-edit annotator, empty set
                continue;
            }
            if (start < 0 || end < start || static_cast<std::size_t>(end) > current_tokens)
                throw data_error(at + ": edit span " + std::to_string(start) + " " +
                                 std::to_string(end) + " outside source of " +
                                 std::to_string(current_tokens) + " tokens");

            std::string replacement = fields[2] == "-NONE-" ? std::string() : fields[2];
            set_for(annotator).edits.push_back({start, end, std::move(replacement)});
            continue;
        }
        throw data_error(at + ": unrecognized line (expected S, A, or blank)");
    }

    for (auto& set : sets) {
        std::stable_sort(set.edits.begin(), set.edits.end(),
                         [](const GoldEdit& a, const GoldEdit& b) {
                             return a.start != b.start ? a.start < b.start : a.end < b.end;
                         });
        for (std::size_t i = 1; i < set.edits.size(); ++i) {
            if (set.edits[i].start < set.edits[i - 1].end)
                throw data_error(path + ": overlapping edits for sentence " +
                                 std::to_string(set.sentence_id) + ", annotator " +
                                 std::to_string(set.annotator_id));
        }
    }
    return {std::move(corpus), std::move(sets)};
}

void save_intermediate(const Corpus& corpus, const std::string& path) {
    if (!corpus.has_predictions())
        throw usage_error("cannot save a corpus without predictions: " + path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write file: " + path);
    out << "id,source,prediction\n";
    for (const auto& rec : corpus.records) {
        out << rec.id << ',' << csv_field(rec.source) << ','
            << csv_field(*rec.prediction) << '\n';
    }
    if (!out) throw data_error("write failed: " + path);
}

Corpus load_intermediate(const std::string& path) {
    auto rows = parse_csv(read_file(path), path);
    if (rows.empty() || rows[0] != std::vector<std::string>{"id", "source", "prediction"})
        throw data_error(path + ": expected header id,source,prediction");

    Corpus corpus;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        const std::string at = path + ": row " + std::to_string(r);
        if (row.size() != 3) throw data_error(at + ": expected 3 fields");
        int id = 0;
        try {
            std::size_t used = 0;
            id = std::stoi(row[0], &used);
            if (used != row[0].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw data_error(at + ": malformed id '" + row[0] + "'");
        }
        if (id != static_cast<int>(corpus.records.size()))
            throw data_error(at + ": ids must be contiguous from 0, got " + row[0]);
        if (whitespace_only(row[1])) throw data_error(at + ": empty source");
        corpus.records.push_back({id, row[1], {}, row[2]});
    }
    return corpus;
}

} // namespace rewriteval
