#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sstubmine {

// Lexical kinds for normalized line comparison. Comments and whitespace are
// never emitted. "=" and the augmented assignment operators count as
// OPERATOR; purely structural punctuation ((), [], {}, ",", ":", ";", ".",
// "->", "...") counts as DELIMITER.
enum class TokenKind { Name, Keyword, Number, String, Operator, Delimiter };

const char* to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text;
    int line = 1;    // 1-based
    int column = 0;  // 0-based byte offset within the line

    bool same_lexeme(const Token& other) const {
        return kind == other.kind && text == other.text;
    }
};

using TokenSeq = std::vector<Token>;

// Lexes a Python source fragment. Total: unterminated strings are emitted
// as-is up to the fragment boundary and unlexable byte runs become single
// OPERATOR tokens carrying the raw text.
TokenSeq tokenize(std::string_view source);

// True iff the sequences are pairwise equal on (kind, text).
bool token_eq(const TokenSeq& a, const TokenSeq& b);

// Joins token texts with single spaces.
std::string render(const TokenSeq& tokens);

bool is_python_keyword(std::string_view word);

}  // namespace sstubmine
