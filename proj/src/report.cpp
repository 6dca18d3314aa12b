#include "rewriteval/report.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>

namespace rewriteval {

void JsonWriter::prefix() {
    if (stack_.empty()) return;
    Frame& f = stack_.back();
    if (f.object) {
        // Values inside an object only follow a key; key() wrote the comma.
        assert(f.want_value && "object values must follow a key");
        f.want_value = false;
    } else {
        if (f.items) out_ += ',';
        ++f.items;
    }
}

JsonWriter& JsonWriter::begin_object() {
    prefix();
    out_ += '{';
    stack_.push_back({true});
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    assert(!stack_.empty() && stack_.back().object && !stack_.back().want_value);
    stack_.pop_back();
    out_ += '}';
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    prefix();
    out_ += '[';
    stack_.push_back({false});
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    assert(!stack_.empty() && !stack_.back().object);
    stack_.pop_back();
    out_ += ']';
    return *this;
}

JsonWriter& JsonWriter::key(const std::string& name) {
    assert(!stack_.empty() && stack_.back().object && !stack_.back().want_value);
    Frame& f = stack_.back();
    if (f.items) out_ += ',';
    ++f.items;
    f.want_value = true;
    out_ += '"';
    out_ += json_escape(name);
    out_ += "\":";
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
    prefix();
    out_ += '"';
    out_ += json_escape(s);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::value(double v) {
    prefix();
    out_ += format_double(v);
    return *this;
}

JsonWriter& JsonWriter::value(long long v) {
    prefix();
    out_ += std::to_string(v);
    return *this;
}

JsonWriter& JsonWriter::value(bool b) {
    prefix();
    out_ += b ? "true" : "false";
    return *this;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default:
            if (c < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    return out;
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string to_hex(std::uint64_t v) {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

} // namespace rewriteval
