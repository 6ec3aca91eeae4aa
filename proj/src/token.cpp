#include "sstubmine/token.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace sstubmine {

namespace {

const std::unordered_set<std::string_view> kKeywords = {
    "False",  "None",   "True",    "and",    "as",     "assert", "async",
    "await",  "break",  "class",   "continue", "def",  "del",    "elif",
    "else",   "except", "finally", "for",    "from",   "global", "if",
    "import", "in",     "is",      "lambda", "nonlocal", "not",  "or",
    "pass",   "raise",  "return",  "try",    "while",  "with",   "yield",
};

// Longest first so maximal munch falls out of a linear scan.
constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=",
                                                   "..."};
constexpr std::array<std::string_view, 19> kOps2 = {
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>=()[]{},:.;";

bool is_delimiter_text(std::string_view text) {
    if (text.size() == 1) {
        return std::string_view("()[]{},:.;").find(text[0]) !=
               std::string_view::npos;
    }
    return text == "->" || text == "...";
}

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_cont(unsigned char c) { return is_ident_start(c) || std::isdigit(c); }

bool is_string_prefix(std::string_view s) {
    if (s.empty() || s.size() > 2) return false;
    for (char c : s) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l != 'r' && l != 'b' && l != 'u' && l != 'f') return false;
    }
    return true;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    TokenSeq run() {
        TokenSeq out;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\n') {
                advance_newline();
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\f' || c == '\r' || c == '\v') {
                ++pos_;
                ++col_;
                continue;
            }
            if (c == '\\' && is_line_break(pos_ + 1)) {
                ++pos_;
                ++col_;
                if (src_[pos_] == '\r') {
                    ++pos_;
                    ++col_;
                }
                if (pos_ < src_.size() && src_[pos_] == '\n') advance_newline();
                continue;
            }
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            size_t start = pos_;
            int line = line_, col = col_;
            if (maybe_string(out, line, col)) continue;
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number();
                emit(out, TokenKind::Number, start, line, col);
                continue;
            }
            if (is_ident_start(static_cast<unsigned char>(c))) {
                while (pos_ < src_.size() &&
                       is_ident_cont(static_cast<unsigned char>(src_[pos_])))
                    step();
                std::string_view word = src_.substr(start, pos_ - start);
                emit(out,
                     is_python_keyword(word) ? TokenKind::Keyword : TokenKind::Name,
                     start, line, col);
                continue;
            }
            if (size_t n = match_operator(); n > 0) {
                for (size_t i = 0; i < n; ++i) step();
                std::string_view text = src_.substr(start, n);
                emit(out,
                     is_delimiter_text(text) ? TokenKind::Delimiter
                                             : TokenKind::Operator,
                     start, line, col);
                continue;
            }
            // Unlexable byte run: emit raw as one OPERATOR token.
            while (pos_ < src_.size() && !lexable_at(pos_)) step();
            emit(out, TokenKind::Operator, start, line, col);
        }
        return out;
    }

private:
    void step() {
        ++pos_;
        ++col_;
    }

    void advance_newline() {
        ++pos_;
        ++line_;
        col_ = 0;
    }

    bool is_line_break(size_t p) const {
        if (p >= src_.size()) return false;
        return src_[p] == '\n' ||
               (src_[p] == '\r' && p + 1 < src_.size() && src_[p + 1] == '\n');
    }

    void emit(TokenSeq& out, TokenKind kind, size_t start, int line, int col) {
        out.push_back(Token{kind, std::string(src_.substr(start, pos_ - start)),
                            line, col});
    }

    // Tries to lex a (possibly prefixed) string literal at the current
    // position. Unterminated literals run to the end of the line (single
    // quotes) or fragment (triple quotes).
    bool maybe_string(TokenSeq& out, int line, int col) {
        size_t start = pos_;
        size_t p = pos_;
        while (p < src_.size() && p - pos_ < 2 &&
               std::isalpha(static_cast<unsigned char>(src_[p])))
            ++p;
        if (p > pos_ && !is_string_prefix(src_.substr(pos_, p - pos_))) return false;
        if (p >= src_.size() || (src_[p] != '\'' && src_[p] != '"')) return false;

        char quote = src_[p];
        bool triple = p + 2 < src_.size() && src_[p + 1] == quote && src_[p + 2] == quote;
        while (pos_ < p) step();
        for (int i = 0; i < (triple ? 3 : 1); ++i) step();
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '\\' && pos_ + 1 < src_.size()) {
                if (src_[pos_ + 1] == '\n') {
                    step();
                    advance_newline();
                } else {
                    step();
                    step();
                }
                continue;
            }
            if (!triple && c == '\n') break;  // unterminated single-quoted
            if (c == '\n') {
                advance_newline();
                continue;
            }
            if (c == quote) {
                if (!triple) {
                    step();
                    break;
                }
                if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote &&
                    src_[pos_ + 2] == quote) {
                    step();
                    step();
                    step();
                    break;
                }
                step();
                continue;
            }
            step();
        }
        emit(out, TokenKind::String, start, line, col);
        return true;
    }

    void lex_number() {
        if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
            (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X' ||
             src_[pos_ + 1] == 'o' || src_[pos_ + 1] == 'O' ||
             src_[pos_ + 1] == 'b' || src_[pos_ + 1] == 'B')) {
            step();
            step();
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_'))
                step();
            return;
        }
        auto digits = [&] {
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_'))
                step();
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            step();
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            size_t save = pos_;
            int save_col = col_;
            step();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) step();
            if (pos_ < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits();
            } else {
                pos_ = save;
                col_ = save_col;
            }
        }
        if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) step();
    }

    size_t match_operator() const {
        std::string_view rest = src_.substr(pos_);
        for (auto op : kOps3)
            if (rest.starts_with(op)) return 3;
        for (auto op : kOps2)
            if (rest.starts_with(op)) return 2;
        if (!rest.empty() && kOps1.find(rest[0]) != std::string_view::npos) return 1;
        return 0;
    }

    bool lexable_at(size_t p) const {
        char c = src_[p];
        if (c == '\n' || c == ' ' || c == '\t' || c == '\f' || c == '\r' ||
            c == '\v' || c == '#' || c == '\'' || c == '"')
            return true;
        if (std::isdigit(static_cast<unsigned char>(c))) return true;
        if (is_ident_start(static_cast<unsigned char>(c))) return true;
        if (kOps1.find(c) != std::string_view::npos) return true;
        if (c == '!' && p + 1 < src_.size() && src_[p + 1] == '=') return true;
        if (c == '\\' && is_line_break(p + 1)) return true;
        return false;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 0;
};

}  // namespace

const char* to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Name: return "NAME";
        case TokenKind::Keyword: return "KEYWORD";
        case TokenKind::Number: return "NUMBER";
        case TokenKind::String: return "STRING";
        case TokenKind::Operator: return "OPERATOR";
        case TokenKind::Delimiter: return "DELIMITER";
    }
    return "?";
}

bool is_python_keyword(std::string_view word) { return kKeywords.count(word) > 0; }

TokenSeq tokenize(std::string_view source) { return Lexer(source).run(); }

bool token_eq(const TokenSeq& a, const TokenSeq& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!a[i].same_lexeme(b[i])) return false;
    return true;
}

std::string render(const TokenSeq& tokens) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i].text;
    }
    return out;
}

}  // namespace sstubmine
