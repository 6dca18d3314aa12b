#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rewriteval {

// Streaming JSON writer with deterministic output: keys appear in the
// order they are written, floats are fixed six-decimal, and there is no
// locale or pointer-order dependence. Reports must be byte-identical
// across runs, so no timestamps or machine info belong in them.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& name);
    JsonWriter& value(const std::string& s);
    JsonWriter& value(const char* s);
    JsonWriter& value(double v);
    JsonWriter& value(long long v);
    JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(std::size_t v) { return value(static_cast<long long>(v)); }
    JsonWriter& value(bool b);

    const std::string& str() const { return out_; }

private:
    void prefix();
    std::string out_;
    // One frame per open container: count of emitted items, expecting-key flag.
    struct Frame { bool object; int items = 0; bool want_value = false; };
    std::vector<Frame> stack_;
};

std::string json_escape(const std::string& s);

// Fixed "%.6f" with negative zero normalized to "0.000000".
std::string format_double(double v);

// FNV-1a, used to fingerprint the effective configuration in reports.
std::uint64_t fnv1a64(const std::string& data);
std::string to_hex(std::uint64_t v);

} // namespace rewriteval
