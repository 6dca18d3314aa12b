#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rewriteval {

enum class TokenKind { Word, Number, Punctuation };

struct Token {
    std::string text;
    TokenKind kind = TokenKind::Word;

    bool operator==(const Token&) const = default;
};

// A tokenized sentence. Tokens never contain whitespace and are never
// empty; `source_text` keeps the original string. Equality compares the
// token sequence only, so tokenize(detokenize(t)) == t holds even though
// the reconstructed source differs in whitespace.
struct TokenSeq {
    std::vector<Token> tokens;
    std::string source_text;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
    const Token& operator[](std::size_t i) const { return tokens[i]; }

    std::vector<std::string> texts() const;

    // Tokens with kind word or number; punctuation is not a "word" for
    // readability or length purposes.
    std::size_t word_count() const;

    bool operator==(const TokenSeq& other) const { return tokens == other.tokens; }
};

// Rule-based tokenizer over UTF-8 input. Splits on Unicode whitespace and
// separates punctuation from word cores; keeps internal apostrophes and
// hyphens attached ("don't", "state-of-the-art") and decimal or grouped
// numbers ("3.5", "10,000") whole. Punctuation tokens are maximal runs of
// punctuation characters. Invalid UTF-8 bytes become one-byte punctuation
// tokens. Empty input yields an empty TokenSeq.
TokenSeq tokenize(const std::string& text);

// Splits on ASCII whitespace only; tokens keep their exact surface form.
// Gold edit spans index into this segmentation.
std::vector<std::string> tokenize_whitespace(const std::string& text);

// Joins tokens with single spaces.
std::string detokenize(const TokenSeq& seq);
std::string join_tokens(const std::vector<std::string>& tokens);

// Lowercases ASCII letters only; multibyte sequences pass through.
std::string lower_ascii(const std::string& s);

// Heuristic syllable count for a word token: number of vowel groups
// (maximal runs of a/e/i/o/u/y, case-insensitive), minus one for a
// terminal silent 'e' not preceded by 'l' when the count stays >= 1.
// Always at least 1.
int count_syllables(const std::string& word);

// Number of sentence segments: maximal chunks terminated by runs of
// . ! ? (a run counts once), plus one for unterminated trailing text.
// Always at least 1.
int count_sentences(const std::string& text);

} // namespace rewriteval
