#include "rewriteval/tokenize.hpp"

#include <cctype>
#include <cstdint>

namespace rewriteval {

namespace {

struct Codepoint {
    std::uint32_t value = 0;
    int length = 1;    // bytes consumed
    bool valid = true; // false = stray byte, treated as punctuation
};

Codepoint decode_utf8(const std::string& s, std::size_t i) {
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
    const auto cont = [&](std::size_t k) {
        return k < s.size() && (byte(k) & 0xC0) == 0x80;
    };
    unsigned char c = byte(i);
    if (c < 0x80) return {c, 1, true};
    if ((c & 0xE0) == 0xC0 && cont(i + 1)) {
        std::uint32_t v = (std::uint32_t(c & 0x1F) << 6) | (byte(i + 1) & 0x3F);
        if (v >= 0x80) return {v, 2, true};
    } else if ((c & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
        std::uint32_t v = (std::uint32_t(c & 0x0F) << 12) |
                          (std::uint32_t(byte(i + 1) & 0x3F) << 6) |
                          (byte(i + 2) & 0x3F);
        if (v >= 0x800 && (v < 0xD800 || v > 0xDFFF)) return {v, 3, true};
    } else if ((c & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
        std::uint32_t v = (std::uint32_t(c & 0x07) << 18) |
                          (std::uint32_t(byte(i + 1) & 0x3F) << 12) |
                          (std::uint32_t(byte(i + 2) & 0x3F) << 6) |
                          (byte(i + 3) & 0x3F);
        if (v >= 0x10000 && v <= 0x10FFFF) return {v, 4, true};
    }
    return {c, 1, false};
}

bool is_space_cp(std::uint32_t cp) {
    if (cp <= 0x20 || cp == 0x7F || cp == 0x85 || cp == 0xA0) return true;
    if (cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A)) return true;
    return cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_digit_cp(std::uint32_t cp) { return cp >= '0' && cp <= '9'; }

// ASCII letters plus any non-ASCII codepoint outside the common
// punctuation and symbol blocks. Deliberately permissive: unknown scripts
// read as letters, which keeps accented words whole.
bool is_letter_cp(std::uint32_t cp) {
    if (is_space_cp(cp)) return false;
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp >= 0xA1 && cp <= 0xBF) return false;      // inverted marks, guillemets
    if (cp == 0xD7 || cp == 0xF7) return false;      // multiplication/division signs
    if (cp >= 0x2010 && cp <= 0x205E) return false;  // dashes, curly quotes, ellipsis
    if (cp >= 0x2190 && cp <= 0x2BFF) return false;  // arrows, math, misc symbols
    if (cp >= 0x3001 && cp <= 0x303F) return false;  // CJK punctuation
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;  // compatibility forms
    if (cp >= 0xFF01 && cp <= 0xFF0F) return false;  // fullwidth punctuation
    if (cp >= 0xFF1A && cp <= 0xFF20) return false;
    if (cp >= 0xFF3B && cp <= 0xFF40) return false;
    if (cp >= 0xFF5B && cp <= 0xFF65) return false;
    return true;
}

bool is_alnum_cp(const Codepoint& cp) {
    return cp.valid && (is_letter_cp(cp.value) || is_digit_cp(cp.value));
}

// Word-internal joiners: apostrophes and hyphens between letters/digits
// ("don't", "state-of-the-art"), period and comma between digits
// ("3.5", "10,000").
bool joins(const Codepoint& joiner, const Codepoint& prev, const Codepoint& next) {
    if (!joiner.valid || !is_alnum_cp(prev) || !is_alnum_cp(next)) return false;
    std::uint32_t j = joiner.value;
    if (j == '\'' || j == 0x2019 || j == '-') return true;
    if ((j == '.' || j == ',') && prev.valid && next.valid &&
        is_digit_cp(prev.value) && is_digit_cp(next.value))
        return true;
    return false;
}

} // namespace

std::vector<std::string> TokenSeq::texts() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.text);
    return out;
}

std::size_t TokenSeq::word_count() const {
    std::size_t n = 0;
    for (const auto& t : tokens)
        if (t.kind != TokenKind::Punctuation) ++n;
    return n;
}

TokenSeq tokenize(const std::string& text) {
    TokenSeq seq;
    seq.source_text = text;

    // Decode once; scanning works over codepoints with their byte spans.
    struct Unit { Codepoint cp; std::size_t offset; };
    std::vector<Unit> units;
    units.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        Codepoint cp = decode_utf8(text, i);
        units.push_back({cp, i});
        i += cp.length;
    }

    const auto slice = [&](std::size_t from, std::size_t to) {
        std::size_t lo = units[from].offset;
        std::size_t hi = units[to - 1].offset + units[to - 1].cp.length;
        return text.substr(lo, hi - lo);
    };

    std::size_t i = 0;
    const std::size_t n = units.size();
    while (i < n) {
        const Codepoint& cp = units[i].cp;
        if (cp.valid && is_space_cp(cp.value)) {
            ++i;
            continue;
        }
        if (is_alnum_cp(cp)) {
            std::size_t start = i;
            bool has_letter = false;
            while (i < n) {
                if (is_alnum_cp(units[i].cp)) {
                    has_letter = has_letter || is_letter_cp(units[i].cp.value);
                    ++i;
                    continue;
                }
                if (i + 1 < n && joins(units[i].cp, units[i - 1].cp, units[i + 1].cp)) {
                    i += 1; // joiner; next iteration consumes the alnum after it
                    continue;
                }
                break;
            }
            seq.tokens.push_back({slice(start, i),
                                  has_letter ? TokenKind::Word : TokenKind::Number});
            continue;
        }
        // Punctuation (or invalid bytes): maximal run of everything that is
        // neither whitespace nor a letter/digit.
        std::size_t start = i;
        while (i < n && !is_alnum_cp(units[i].cp) &&
               !(units[i].cp.valid && is_space_cp(units[i].cp.value)))
            ++i;
        seq.tokens.push_back({slice(start, i), TokenKind::Punctuation});
    }
    return seq;
}

std::vector<std::string> tokenize_whitespace(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

std::string detokenize(const TokenSeq& seq) {
    return join_tokens(seq.texts());
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string lower_ascii(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

int count_syllables(const std::string& word) {
    const auto is_vowel = [](char c) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
    };
    const auto is_ascii_letter = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
    };

    int groups = 0;
    bool in_group = false;
    for (char c : word) {
        bool v = is_ascii_letter(c) && is_vowel(c);
        if (v && !in_group) ++groups;
        in_group = v;
    }

    // Terminal silent 'e' ("home", "cake") drops one group, except after
    // 'l' ("table") and never below one syllable.
    if (groups >= 2 && word.size() >= 2) {
        char last = word.back();
        char prev = word[word.size() - 2];
        if ((last == 'e' || last == 'E') && prev != 'l' && prev != 'L') --groups;
    }
    return groups < 1 ? 1 : groups;
}

int count_sentences(const std::string& text) {
    const auto is_terminator = [](char c) { return c == '.' || c == '!' || c == '?'; };
    int sentences = 0;
    bool has_content = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (is_terminator(c)) {
            if (has_content) ++sentences;
            has_content = false;
            while (i + 1 < text.size() && is_terminator(text[i + 1])) ++i;
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            has_content = true;
        }
    }
    if (has_content) ++sentences;
    return sentences < 1 ? 1 : sentences;
}

} // namespace rewriteval
