#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sstubmine/syntax.hpp"
#include "sstubmine/token.hpp"

namespace sstubmine {

namespace {

struct Bail {};  // thrown on unexpected input, caught at statement level

struct LogicalLine {
    std::size_t begin, end;  // token index range
    int indent;              // column of first token
};

constexpr int kMaxExprDepth = 200;

bool is_kw(const Token& t, const char* s) {
    return t.kind == TokenKind::Keyword && t.text == s;
}

bool number_is_float(const std::string& s) {
    if (s.size() > 1 && s[0] == '0' &&
        (s[1] == 'x' || s[1] == 'X' || s[1] == 'o' || s[1] == 'O' ||
         s[1] == 'b' || s[1] == 'B'))
        return false;
    for (char ch : s)
        if (ch == '.' || ch == 'e' || ch == 'E' || ch == 'j' || ch == 'J')
            return true;
    return false;
}

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src), t_(tokenize(src)) {
        line_starts_.push_back(0);
        for (std::size_t i = 0; i < src_.size(); ++i)
            if (src_[i] == '\n') line_starts_.push_back(i + 1);
        tok_ends_.reserve(t_.size());
        for (const Token& tok : t_) tok_ends_.push_back(token_end(tok));
        group_lines();
    }

    SyntaxTree parse() {
        SyntaxTree tree;
        tree.source = src_;
        tree.root.label = "module";
        li_ = 0;
        while (li_ < lines_.size()) parse_line_into(tree.root.children);
        if (!t_.empty()) {
            tree.root.span = Span{t_.front().line, t_.front().column,
                                  tok_ends_.back().first,
                                  tok_ends_.back().second};
        }
        return tree;
    }

private:
    const std::string& src_;
    TokenSeq t_;
    std::vector<std::size_t> line_starts_;       // byte offset per 1-based line
    std::vector<std::pair<int, int>> tok_ends_;  // (end_line, end_col)
    std::vector<LogicalLine> lines_;
    std::size_t li_ = 0;    // current logical line
    std::size_t p_ = 0;     // token cursor
    std::size_t lend_ = 0;  // end of current logical line
    int depth_ = 0;

    static std::pair<int, int> token_end(const Token& tok) {
        int line = tok.line;
        std::size_t last_nl = std::string::npos;
        for (std::size_t i = 0; i < tok.text.size(); ++i) {
            if (tok.text[i] == '\n') {
                ++line;
                last_nl = i;
            }
        }
        int col = last_nl == std::string::npos
                      ? tok.column + int(tok.text.size())
                      : int(tok.text.size() - last_nl - 1);
        return {line, col};
    }

    std::size_t token_offset(std::size_t i) const {
        std::size_t line = std::size_t(t_[i].line) - 1;
        if (line >= line_starts_.size()) return src_.size();
        return line_starts_[line] + std::size_t(t_[i].column);
    }

    // True when the gap between two tokens contains a line continuation.
    // Backslashes inside comments do not count.
    bool gap_has_continuation(std::size_t a_end, std::size_t b_begin) const {
        for (std::size_t i = a_end; i < b_begin && i < src_.size(); ++i) {
            if (src_[i] == '#') {
                while (i < b_begin && i < src_.size() && src_[i] != '\n') ++i;
            } else if (src_[i] == '\\') {
                return true;
            }
        }
        return false;
    }

    void group_lines() {
        int depth = 0;
        int last_end_line = -1;
        std::size_t last_end_off = 0;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            bool fresh = lines_.empty() ||
                         (depth <= 0 && t_[i].line > last_end_line &&
                          !gap_has_continuation(last_end_off, token_offset(i)));
            if (fresh) {
                if (!lines_.empty()) lines_.back().end = i;
                lines_.push_back(LogicalLine{i, t_.size(), t_[i].column});
            }
            const std::string& x = t_[i].text;
            if (x == "(" || x == "[" || x == "{") ++depth;
            else if (x == ")" || x == "]" || x == "}") --depth;
            last_end_line = std::max(last_end_line, tok_ends_[i].first);
            last_end_off =
                std::max(last_end_off, token_offset(i) + t_[i].text.size());
        }
    }

    // --- token helpers ------------------------------------------------

    bool done() const { return p_ >= lend_; }
    const Token& cur() const {
        if (done()) throw Bail{};
        return t_[p_];
    }
    bool at_text(const char* s) const { return !done() && t_[p_].text == s; }
    bool at_kw(const char* s) const { return !done() && is_kw(t_[p_], s); }
    bool at_kind(TokenKind k) const { return !done() && t_[p_].kind == k; }
    const Token& take() {
        if (done()) throw Bail{};
        return t_[p_++];
    }
    void expect_text(const char* s) {
        if (!at_text(s)) throw Bail{};
        ++p_;
    }

    Span span_of(std::size_t first, std::size_t last) const {
        if (first >= t_.size() || last >= t_.size() || last < first) {
            return Span{};
        }
        return Span{t_[first].line, t_[first].column, tok_ends_[last].first,
                    tok_ends_[last].second};
    }

    SyntaxNode leaf(std::string label, std::size_t tok_idx, std::string value) {
        SyntaxNode n;
        n.label = std::move(label);
        n.value = std::move(value);
        n.span = span_of(tok_idx, tok_idx);
        return n;
    }

    SyntaxNode finish(SyntaxNode n, std::size_t first, std::size_t last) {
        n.span = span_of(first, last);
        return n;
    }

    SyntaxNode interior(std::string label, std::vector<SyntaxNode> children,
                        std::size_t first, std::size_t last) {
        SyntaxNode n;
        n.label = std::move(label);
        n.children = std::move(children);
        n.span = span_of(first, last);
        // Compound statements own blocks parsed from later logical lines, so
        // the token range alone can stop short of the last child.
        for (const SyntaxNode& c : n.children) {
            if (c.span.end_line > n.span.end_line ||
                (c.span.end_line == n.span.end_line &&
                 c.span.end_col > n.span.end_col)) {
                n.span.end_line = c.span.end_line;
                n.span.end_col = c.span.end_col;
            }
        }
        return n;
    }

    SyntaxNode error_node(std::size_t begin, std::size_t end) {
        SyntaxNode n;
        n.label = "ERROR";
        for (std::size_t i = begin; i < end && i < t_.size(); ++i) {
            const Token& tok = t_[i];
            switch (tok.kind) {
                case TokenKind::Name:
                case TokenKind::Keyword:
                    n.children.push_back(leaf("identifier", i, tok.text));
                    break;
                case TokenKind::Number:
                    n.children.push_back(leaf(
                        number_is_float(tok.text) ? "float" : "integer", i,
                        tok.text));
                    break;
                case TokenKind::String:
                    n.children.push_back(leaf("string", i, tok.text));
                    break;
                default:
                    n.children.push_back(leaf("operator", i, tok.text));
            }
        }
        if (end > begin) n.span = span_of(begin, end - 1);
        return n;
    }

    // --- statement level ----------------------------------------------

    void parse_line_into(std::vector<SyntaxNode>& out) {
        const LogicalLine line = lines_[li_];
        if (t_[line.begin].text == "@") {
            out.push_back(parse_decorated());
            return;
        }
        ++li_;
        p_ = line.begin;
        lend_ = line.end;
        parse_statements_in_line(out, line);
    }

    // Simple statements separated by ';', or one compound statement.
    void parse_statements_in_line(std::vector<SyntaxNode>& out,
                                  const LogicalLine& line) {
        while (p_ < lend_) {
            std::size_t start = p_;
            std::size_t before = out.size();
            try {
                out.push_back(parse_statement(line));
            } catch (const Bail&) {
                out.resize(before);
                out.push_back(error_node(start, lend_));
                p_ = lend_;
                return;
            }
            if (at_text(";")) {
                ++p_;
                continue;
            }
            if (p_ < lend_) {
                // Leftover tokens mean the whole segment failed to parse.
                out.resize(before);
                out.push_back(error_node(start, lend_));
                p_ = lend_;
            }
            return;
        }
    }

    SyntaxNode parse_statement(const LogicalLine& line) {
        const Token& first = cur();
        if (first.kind == TokenKind::Keyword) {
            const std::string& k = first.text;
            if (k == "if") return parse_if(line);
            if (k == "while") return parse_while(line);
            if (k == "for") return parse_for(line);
            if (k == "try") return parse_try(line);
            if (k == "with") return parse_with(line);
            if (k == "def") return parse_def(line);
            if (k == "class") return parse_class(line);
            if (k == "async") {
                std::size_t start = p_;
                ++p_;
                if (at_kw("def")) return restart_span(parse_def(line), start);
                if (at_kw("for")) return restart_span(parse_for(line), start);
                if (at_kw("with")) return restart_span(parse_with(line), start);
                throw Bail{};
            }
            if (k == "return") return parse_return();
            if (k == "raise") return parse_raise();
            if (k == "assert") return parse_assert();
            if (k == "del") return parse_del();
            if (k == "pass") return simple_keyword("pass_statement");
            if (k == "break") return simple_keyword("break_statement");
            if (k == "continue") return simple_keyword("continue_statement");
            if (k == "global") return parse_scope_decl("global_statement");
            if (k == "nonlocal") return parse_scope_decl("nonlocal_statement");
            if (k == "import") return parse_import();
            if (k == "from") return parse_import_from();
        }
        return parse_expression_statement();
    }

    SyntaxNode restart_span(SyntaxNode n, std::size_t start) {
        Span s = span_of(start, start);
        n.span.start_line = s.start_line;
        n.span.start_col = s.start_col;
        return n;
    }

    SyntaxNode simple_keyword(const char* label) {
        std::size_t start = p_;
        ++p_;
        SyntaxNode n;
        n.label = label;
        n.span = span_of(start, start);
        return n;
    }

    bool at_statement_end() const { return done() || t_[p_].text == ";"; }

    SyntaxNode parse_return() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        if (!at_statement_end()) kids.push_back(parse_expression_list());
        return interior("return_statement", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_raise() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        if (!at_statement_end()) {
            kids.push_back(parse_expr_full());
            if (at_kw("from")) {
                ++p_;
                kids.push_back(parse_expr_full());
            }
        }
        return interior("raise_statement", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_assert() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_expr_full());
        if (at_text(",")) {
            ++p_;
            kids.push_back(parse_expr_full());
        }
        return interior("assert_statement", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_del() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_expression_list());
        return interior("delete_statement", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_scope_decl(const char* label) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_identifier());
        while (at_text(",")) {
            ++p_;
            kids.push_back(parse_identifier());
        }
        return interior(label, std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_identifier() {
        if (!at_kind(TokenKind::Name)) throw Bail{};
        std::size_t i = p_++;
        return leaf("identifier", i, t_[i].text);
    }

    SyntaxNode parse_dotted_name() {
        std::size_t start = p_;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_identifier());
        while (at_text(".") && p_ + 1 < lend_ &&
               t_[p_ + 1].kind == TokenKind::Name) {
            ++p_;
            kids.push_back(parse_identifier());
        }
        if (kids.size() == 1) return std::move(kids[0]);
        return interior("dotted_name", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_import_target() {
        std::size_t start = p_;
        SyntaxNode name = parse_dotted_name();
        if (at_kw("as")) {
            ++p_;
            SyntaxNode alias = parse_identifier();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(name));
            kids.push_back(std::move(alias));
            return interior("aliased_import", std::move(kids), start, p_ - 1);
        }
        return name;
    }

    SyntaxNode parse_import() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_import_target());
        while (at_text(",")) {
            ++p_;
            kids.push_back(parse_import_target());
        }
        return interior("import_statement", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_import_from() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        std::size_t dots_start = p_;
        std::string dots;
        while (at_text(".") || at_text("...")) dots += take().text;
        if (!dots.empty()) {
            SyntaxNode prefix = leaf("import_prefix", dots_start, dots);
            prefix.span = span_of(dots_start, p_ - 1);
            kids.push_back(std::move(prefix));
        }
        if (at_kind(TokenKind::Name)) kids.push_back(parse_dotted_name());
        if (!at_kw("import")) throw Bail{};
        ++p_;
        if (at_text("*")) {
            std::size_t i = p_++;
            kids.push_back(leaf("wildcard_import", i, "*"));
        } else {
            bool parens = at_text("(");
            if (parens) ++p_;
            kids.push_back(parse_import_target());
            while (at_text(",")) {
                ++p_;
                if (parens && at_text(")")) break;
                kids.push_back(parse_import_target());
            }
            if (parens) expect_text(")");
        }
        return interior("import_from_statement", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_expression_statement() {
        std::size_t start = p_;
        SyntaxNode inner = parse_assignment_or_expr();
        std::vector<SyntaxNode> kids;
        kids.push_back(std::move(inner));
        return interior("expression_statement", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_assignment_or_expr() {
        std::size_t start = p_;
        SyntaxNode left = parse_expression_list();
        if (at_text(":") && !at_statement_end()) {
            // annotated assignment: x: T  or  x: T = v
            ++p_;
            std::size_t tstart = p_;
            SyntaxNode ann = parse_expr_full();
            std::vector<SyntaxNode> tkids;
            tkids.push_back(std::move(ann));
            SyntaxNode type = interior("type", std::move(tkids), tstart, p_ - 1);
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(left));
            kids.push_back(std::move(type));
            if (at_text("=")) {
                ++p_;
                kids.push_back(parse_expression_list());
            }
            return interior("assignment", std::move(kids), start, p_ - 1);
        }
        if (at_text("=")) {
            ++p_;
            SyntaxNode rhs = parse_assignment_rhs();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(left));
            kids.push_back(std::move(rhs));
            return interior("assignment", std::move(kids), start, p_ - 1);
        }
        if (!done() && t_[p_].kind == TokenKind::Operator &&
            is_augmented_op(t_[p_].text)) {
            std::size_t op_idx = p_++;
            SyntaxNode rhs = parse_expression_list();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(left));
            kids.push_back(leaf("operator", op_idx, t_[op_idx].text));
            kids.push_back(std::move(rhs));
            return interior("augmented_assignment", std::move(kids), start,
                            p_ - 1);
        }
        return left;
    }

    SyntaxNode parse_assignment_rhs() {
        std::size_t start = p_;
        SyntaxNode e = parse_expression_list();
        if (at_text("=")) {
            ++p_;
            SyntaxNode rest = parse_assignment_rhs();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(std::move(rest));
            return interior("assignment", std::move(kids), start, p_ - 1);
        }
        return e;
    }

    static bool is_augmented_op(const std::string& s) {
        static const char* ops[] = {"+=",  "-=",  "*=",  "/=",  "//=", "%=",
                                    "**=", ">>=", "<<=", "&=",  "|=",  "^=",
                                    "@="};
        for (const char* o : ops)
            if (s == o) return true;
        return false;
    }

    bool at_expression_end() const {
        return done() || t_[p_].text == ";" || t_[p_].text == "=" ||
               t_[p_].text == ")" || t_[p_].text == "]" || t_[p_].text == "}" ||
               t_[p_].text == ":" || t_[p_].text == ",";
    }

    SyntaxNode parse_expression_list() {
        std::size_t start = p_;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_star_or_expr());
        bool list = false;
        while (at_text(",")) {
            ++p_;
            list = true;
            if (at_expression_end()) break;  // trailing comma
            kids.push_back(parse_star_or_expr());
        }
        if (!list) return std::move(kids[0]);
        return interior("expression_list", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_star_or_expr() {
        if (at_text("*")) {
            std::size_t start = p_++;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_expr_full());
            return interior("list_splat", std::move(kids), start, p_ - 1);
        }
        return parse_expr_full();
    }

    // Full expression: ternary plus walrus.
    SyntaxNode parse_expr_full() {
        std::size_t start = p_;
        SyntaxNode e = parse_ternary();
        if (at_text(":=")) {
            ++p_;
            SyntaxNode v = parse_ternary();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(std::move(v));
            return interior("named_expression", std::move(kids), start, p_ - 1);
        }
        return e;
    }

    struct DepthGuard {
        int& d;
        explicit DepthGuard(int& depth) : d(depth) {
            if (++d > kMaxExprDepth) {
                --d;
                throw Bail{};
            }
        }
        ~DepthGuard() { --d; }
    };

    SyntaxNode parse_ternary() {
        DepthGuard guard(depth_);
        if (at_kw("lambda")) return parse_lambda();
        std::size_t start = p_;
        SyntaxNode e = parse_or();
        if (at_kw("if")) {
            ++p_;
            SyntaxNode cond = parse_or();
            if (!at_kw("else")) throw Bail{};
            ++p_;
            SyntaxNode alt = parse_ternary();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(std::move(cond));
            kids.push_back(std::move(alt));
            return interior("conditional_expression", std::move(kids), start,
                            p_ - 1);
        }
        return e;
    }

    SyntaxNode parse_lambda() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        if (!at_text(":")) kids.push_back(parse_parameter_list(start + 1, false));
        expect_text(":");
        kids.push_back(parse_ternary());
        return interior("lambda", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_or() {
        std::size_t start = p_;
        SyntaxNode e = parse_and();
        while (at_kw("or")) {
            std::size_t op = p_++;
            SyntaxNode rhs = parse_and();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(leaf("operator", op, "or"));
            kids.push_back(std::move(rhs));
            e = interior("boolean_operator", std::move(kids), start, p_ - 1);
        }
        return e;
    }

    SyntaxNode parse_and() {
        std::size_t start = p_;
        SyntaxNode e = parse_not();
        while (at_kw("and")) {
            std::size_t op = p_++;
            SyntaxNode rhs = parse_not();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(leaf("operator", op, "and"));
            kids.push_back(std::move(rhs));
            e = interior("boolean_operator", std::move(kids), start, p_ - 1);
        }
        return e;
    }

    SyntaxNode parse_not() {
        DepthGuard guard(depth_);
        if (at_kw("not")) {
            std::size_t start = p_++;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_not());
            return interior("not_operator", std::move(kids), start, p_ - 1);
        }
        return parse_comparison();
    }

    // Returns the comparison operator spelling at the cursor, or empty.
    std::string comparison_op_here() const {
        if (done()) return "";
        const Token& tok = t_[p_];
        if (tok.kind == TokenKind::Operator &&
            (tok.text == "<" || tok.text == ">" || tok.text == "==" ||
             tok.text == "!=" || tok.text == "<=" || tok.text == ">="))
            return tok.text;
        if (is_kw(tok, "in")) return "in";
        if (is_kw(tok, "is")) {
            if (p_ + 1 < lend_ && is_kw(t_[p_ + 1], "not")) return "is not";
            return "is";
        }
        if (is_kw(tok, "not") && p_ + 1 < lend_ && is_kw(t_[p_ + 1], "in"))
            return "not in";
        return "";
    }

    SyntaxNode parse_comparison() {
        std::size_t start = p_;
        SyntaxNode e = parse_binary(0);
        std::string op = comparison_op_here();
        if (op.empty()) return e;
        std::vector<SyntaxNode> kids;
        kids.push_back(std::move(e));
        while (!(op = comparison_op_here()).empty()) {
            std::size_t op_start = p_;
            p_ += (op == "is not" || op == "not in") ? 2 : 1;
            SyntaxNode opleaf = leaf("operator", op_start, op);
            opleaf.span = span_of(op_start, p_ - 1);
            kids.push_back(std::move(opleaf));
            kids.push_back(parse_binary(0));
        }
        return interior("comparison_operator", std::move(kids), start, p_ - 1);
    }

    // Binary operator precedence, lowest first.
    int binary_level() const {
        if (done() || t_[p_].kind != TokenKind::Operator) return -1;
        const std::string& s = t_[p_].text;
        if (s == "|") return 0;
        if (s == "^") return 1;
        if (s == "&") return 2;
        if (s == "<<" || s == ">>") return 3;
        if (s == "+" || s == "-") return 4;
        if (s == "*" || s == "/" || s == "//" || s == "%" || s == "@") return 5;
        return -1;
    }

    SyntaxNode parse_binary(int min_level) {
        std::size_t start = p_;
        SyntaxNode e = parse_unary();
        int level;
        while ((level = binary_level()) >= min_level) {
            std::size_t op = p_++;
            SyntaxNode rhs = parse_binary(level + 1);
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(leaf("operator", op, t_[op].text));
            kids.push_back(std::move(rhs));
            e = interior("binary_operator", std::move(kids), start, p_ - 1);
        }
        return e;
    }

    SyntaxNode parse_unary() {
        DepthGuard guard(depth_);
        if (!done() && t_[p_].kind == TokenKind::Operator &&
            (t_[p_].text == "-" || t_[p_].text == "+" || t_[p_].text == "~")) {
            std::size_t start = p_;
            std::size_t op = p_++;
            std::vector<SyntaxNode> kids;
            kids.push_back(leaf("operator", op, t_[op].text));
            kids.push_back(parse_unary());
            return interior("unary_operator", std::move(kids), start, p_ - 1);
        }
        return parse_power();
    }

    SyntaxNode parse_power() {
        std::size_t start = p_;
        SyntaxNode e = parse_await();
        if (at_text("**")) {
            std::size_t op = p_++;
            SyntaxNode rhs = parse_unary();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            kids.push_back(leaf("operator", op, "**"));
            kids.push_back(std::move(rhs));
            return interior("binary_operator", std::move(kids), start, p_ - 1);
        }
        return e;
    }

    SyntaxNode parse_await() {
        if (at_kw("await")) {
            std::size_t start = p_++;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_await());
            return interior("await", std::move(kids), start, p_ - 1);
        }
        return parse_postfix();
    }

    SyntaxNode parse_postfix() {
        std::size_t start = p_;
        SyntaxNode e = parse_atom();
        while (!done()) {
            if (at_text("(")) {
                SyntaxNode args = parse_argument_list();
                std::vector<SyntaxNode> kids;
                kids.push_back(std::move(e));
                kids.push_back(std::move(args));
                e = interior("call", std::move(kids), start, p_ - 1);
            } else if (at_text("[")) {
                ++p_;
                std::vector<SyntaxNode> kids;
                kids.push_back(std::move(e));
                kids.push_back(parse_subscript_item());
                while (at_text(",")) {
                    ++p_;
                    if (at_text("]")) break;
                    kids.push_back(parse_subscript_item());
                }
                expect_text("]");
                e = interior("subscript", std::move(kids), start, p_ - 1);
            } else if (at_text(".")) {
                ++p_;
                SyntaxNode attr = parse_identifier();
                std::vector<SyntaxNode> kids;
                kids.push_back(std::move(e));
                kids.push_back(std::move(attr));
                e = interior("attribute", std::move(kids), start, p_ - 1);
            } else {
                break;
            }
        }
        return e;
    }

    SyntaxNode parse_subscript_item() {
        std::size_t start = p_;
        std::vector<SyntaxNode> parts;
        bool is_slice = false;
        if (!at_text(":")) parts.push_back(parse_expr_full());
        while (at_text(":")) {
            is_slice = true;
            ++p_;
            if (!done() && !at_text(":") && !at_text("]") && !at_text(","))
                parts.push_back(parse_expr_full());
        }
        if (!is_slice) return std::move(parts[0]);
        return interior("slice", std::move(parts), start, p_ - 1);
    }

    SyntaxNode parse_argument_list() {
        std::size_t start = p_;
        expect_text("(");
        std::vector<SyntaxNode> kids;
        while (!at_text(")")) {
            kids.push_back(parse_argument());
            if (at_text(",")) {
                ++p_;
                continue;
            }
            break;
        }
        expect_text(")");
        return interior("argument_list", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_argument() {
        std::size_t start = p_;
        if (at_text("*")) {
            ++p_;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_expr_full());
            return interior("list_splat", std::move(kids), start, p_ - 1);
        }
        if (at_text("**")) {
            ++p_;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_expr_full());
            return interior("dictionary_splat", std::move(kids), start, p_ - 1);
        }
        if (at_kind(TokenKind::Name) && p_ + 1 < lend_ &&
            t_[p_ + 1].text == "=") {
            SyntaxNode name = parse_identifier();
            ++p_;  // '='
            SyntaxNode value = parse_expr_full();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(name));
            kids.push_back(std::move(value));
            return interior("keyword_argument", std::move(kids), start, p_ - 1);
        }
        SyntaxNode e = parse_expr_full();
        if (at_comprehension_start()) {
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(e));
            parse_comprehension_clauses(kids);
            return interior("generator_expression", std::move(kids), start,
                            p_ - 1);
        }
        return e;
    }

    bool at_comprehension_start() const {
        if (at_kw("for")) return true;
        return !done() && is_kw(t_[p_], "async") && p_ + 1 < lend_ &&
               is_kw(t_[p_ + 1], "for");
    }

    void parse_comprehension_clauses(std::vector<SyntaxNode>& kids) {
        while (true) {
            if (at_kw("async") && p_ + 1 < lend_ && is_kw(t_[p_ + 1], "for"))
                ++p_;
            if (at_kw("for")) {
                std::size_t start = p_++;
                SyntaxNode left = parse_target_list();
                if (!at_kw("in")) throw Bail{};
                ++p_;
                SyntaxNode right = parse_or();
                std::vector<SyntaxNode> fkids;
                fkids.push_back(std::move(left));
                fkids.push_back(std::move(right));
                kids.push_back(interior("for_in_clause", std::move(fkids),
                                        start, p_ - 1));
            } else if (at_kw("if")) {
                std::size_t start = p_++;
                std::vector<SyntaxNode> ikids;
                ikids.push_back(parse_or());
                kids.push_back(
                    interior("if_clause", std::move(ikids), start, p_ - 1));
            } else {
                return;
            }
        }
    }

    SyntaxNode parse_target_list() {
        std::size_t start = p_;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_target());
        bool list = false;
        while (at_text(",")) {
            ++p_;
            if (done() || at_kw("in") || at_text("=") || at_text(":"))
                break;  // trailing comma
            list = true;
            kids.push_back(parse_target());
        }
        if (!list) return std::move(kids[0]);
        return interior("expression_list", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_target() {
        if (at_text("*")) {
            std::size_t start = p_++;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_postfix());
            return interior("list_splat", std::move(kids), start, p_ - 1);
        }
        return parse_postfix();
    }

    SyntaxNode parse_atom() {
        if (done()) throw Bail{};
        const Token& tok = cur();
        switch (tok.kind) {
            case TokenKind::Name: {
                std::size_t i = p_++;
                return leaf("identifier", i, t_[i].text);
            }
            case TokenKind::Number: {
                std::size_t i = p_++;
                return leaf(number_is_float(t_[i].text) ? "float" : "integer",
                            i, t_[i].text);
            }
            case TokenKind::String:
                return parse_strings();
            case TokenKind::Keyword: {
                if (tok.text == "True") return keyword_leaf("true");
                if (tok.text == "False") return keyword_leaf("false");
                if (tok.text == "None") return keyword_leaf("none");
                if (tok.text == "yield") return parse_yield();
                if (tok.text == "lambda") return parse_lambda();
                throw Bail{};
            }
            default:
                break;
        }
        if (tok.text == "...") {
            std::size_t i = p_++;
            return leaf("ellipsis", i, "...");
        }
        if (tok.text == "(") return parse_paren();
        if (tok.text == "[") return parse_list();
        if (tok.text == "{") return parse_braces();
        throw Bail{};
    }

    SyntaxNode keyword_leaf(const char* label) {
        std::size_t i = p_++;
        return leaf(label, i, t_[i].text);
    }

    SyntaxNode parse_yield() {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        if (at_kw("from")) ++p_;
        if (!at_expression_end() && !at_kw("for"))
            kids.push_back(parse_expression_list_no_targets());
        return interior("yield", std::move(kids), start, p_ - 1);
    }

    // Comma list in value position (no assignment lookahead needed).
    SyntaxNode parse_expression_list_no_targets() {
        std::size_t start = p_;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_star_or_expr());
        bool list = false;
        while (at_text(",")) {
            ++p_;
            if (at_expression_end()) {
                list = true;
                break;
            }
            list = true;
            kids.push_back(parse_star_or_expr());
        }
        if (!list) return std::move(kids[0]);
        return interior("expression_list", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_strings() {
        std::size_t start = p_;
        std::vector<SyntaxNode> kids;
        while (at_kind(TokenKind::String)) {
            std::size_t i = p_++;
            kids.push_back(leaf("string", i, t_[i].text));
        }
        if (kids.size() == 1) return std::move(kids[0]);
        return interior("concatenated_string", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_paren() {
        std::size_t start = p_;
        expect_text("(");
        if (at_text(")")) {
            ++p_;
            return interior("tuple", {}, start, p_ - 1);
        }
        if (at_kw("yield")) {
            SyntaxNode y = parse_yield();
            expect_text(")");
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(y));
            return interior("parenthesized_expression", std::move(kids), start,
                            p_ - 1);
        }
        SyntaxNode first = parse_star_or_expr();
        if (at_comprehension_start()) {
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(first));
            parse_comprehension_clauses(kids);
            expect_text(")");
            return interior("generator_expression", std::move(kids), start,
                            p_ - 1);
        }
        if (at_text(",")) {
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(first));
            while (at_text(",")) {
                ++p_;
                if (at_text(")")) break;
                kids.push_back(parse_star_or_expr());
            }
            expect_text(")");
            return interior("tuple", std::move(kids), start, p_ - 1);
        }
        expect_text(")");
        std::vector<SyntaxNode> kids;
        kids.push_back(std::move(first));
        return interior("parenthesized_expression", std::move(kids), start,
                        p_ - 1);
    }

    SyntaxNode parse_list() {
        std::size_t start = p_;
        expect_text("[");
        if (at_text("]")) {
            ++p_;
            return interior("list", {}, start, p_ - 1);
        }
        SyntaxNode first = parse_star_or_expr();
        if (at_comprehension_start()) {
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(first));
            parse_comprehension_clauses(kids);
            expect_text("]");
            return interior("list_comprehension", std::move(kids), start,
                            p_ - 1);
        }
        std::vector<SyntaxNode> kids;
        kids.push_back(std::move(first));
        while (at_text(",")) {
            ++p_;
            if (at_text("]")) break;
            kids.push_back(parse_star_or_expr());
        }
        expect_text("]");
        return interior("list", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_braces() {
        std::size_t start = p_;
        expect_text("{");
        if (at_text("}")) {
            ++p_;
            return interior("dictionary", {}, start, p_ - 1);
        }
        if (at_text("**")) {
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_dict_entry());
            while (at_text(",")) {
                ++p_;
                if (at_text("}")) break;
                kids.push_back(parse_dict_entry());
            }
            expect_text("}");
            return interior("dictionary", std::move(kids), start, p_ - 1);
        }
        SyntaxNode first = parse_star_or_expr();
        if (at_text(":")) {
            SyntaxNode pair = finish_pair(std::move(first));
            if (at_comprehension_start()) {
                std::vector<SyntaxNode> kids;
                kids.push_back(std::move(pair));
                parse_comprehension_clauses(kids);
                expect_text("}");
                return interior("dictionary_comprehension", std::move(kids),
                                start, p_ - 1);
            }
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(pair));
            while (at_text(",")) {
                ++p_;
                if (at_text("}")) break;
                kids.push_back(parse_dict_entry());
            }
            expect_text("}");
            return interior("dictionary", std::move(kids), start, p_ - 1);
        }
        if (at_comprehension_start()) {
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(first));
            parse_comprehension_clauses(kids);
            expect_text("}");
            return interior("set_comprehension", std::move(kids), start,
                            p_ - 1);
        }
        std::vector<SyntaxNode> kids;
        kids.push_back(std::move(first));
        while (at_text(",")) {
            ++p_;
            if (at_text("}")) break;
            kids.push_back(parse_star_or_expr());
        }
        expect_text("}");
        return interior("set", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_dict_entry() {
        std::size_t start = p_;
        if (at_text("**")) {
            ++p_;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_expr_full());
            return interior("dictionary_splat", std::move(kids), start, p_ - 1);
        }
        SyntaxNode key = parse_expr_full();
        return finish_pair(std::move(key));
    }

    SyntaxNode finish_pair(SyntaxNode key) {
        std::size_t start = p_;  // for span fallback
        Span key_span = key.span;
        expect_text(":");
        SyntaxNode value = parse_expr_full();
        std::vector<SyntaxNode> kids;
        kids.push_back(std::move(key));
        kids.push_back(std::move(value));
        SyntaxNode n = interior("pair", std::move(kids), start, p_ - 1);
        n.span.start_line = key_span.start_line;
        n.span.start_col = key_span.start_col;
        return n;
    }

    // --- compound statements --------------------------------------------

    SyntaxNode parse_block(int header_indent, Span fallback) {
        SyntaxNode block;
        block.label = "block";
        block.span = fallback;
        bool first = true;
        while (li_ < lines_.size() && lines_[li_].indent > header_indent) {
            std::size_t line_first_tok = lines_[li_].begin;
            std::size_t save_p = p_, save_end = lend_;
            parse_line_into(block.children);
            p_ = save_p;
            lend_ = save_end;
            if (first && !block.children.empty()) {
                block.span.start_line = t_[line_first_tok].line;
                block.span.start_col = t_[line_first_tok].column;
                first = false;
            }
            if (!block.children.empty()) {
                block.span.end_line = block.children.back().span.end_line;
                block.span.end_col = block.children.back().span.end_col;
            }
        }
        return block;
    }

    // Suite after ':' — inline statements or an indented block.
    SyntaxNode parse_suite(const LogicalLine& line) {
        expect_text(":");
        if (p_ < lend_) {
            SyntaxNode block;
            block.label = "block";
            std::size_t first_tok = p_;
            parse_statements_in_line(block.children, line);
            block.span = span_of(first_tok, lend_ - 1);
            return block;
        }
        Span endspan = span_of(lend_ - 1, lend_ - 1);
        endspan.start_line = endspan.end_line;
        endspan.start_col = endspan.end_col;
        return parse_block(line.indent, endspan);
    }

    bool next_line_starts_with(int indent, const char* kw) const {
        if (li_ >= lines_.size()) return false;
        const LogicalLine& l = lines_[li_];
        return l.indent == indent && is_kw(t_[l.begin], kw);
    }

    void enter_line() {
        p_ = lines_[li_].begin;
        lend_ = lines_[li_].end;
        ++li_;
    }

    SyntaxNode parse_if(const LogicalLine& line) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_expr_full());
        kids.push_back(parse_suite(line));
        std::size_t last_tok = lend_ - 1;
        while (next_line_starts_with(line.indent, "elif")) {
            const LogicalLine clause_line = lines_[li_];
            enter_line();
            std::size_t cstart = p_++;
            std::vector<SyntaxNode> ckids;
            try {
                ckids.push_back(parse_expr_full());
                ckids.push_back(parse_suite(clause_line));
            } catch (const Bail&) {
                ckids.push_back(error_node(p_, lend_));
                p_ = lend_;
            }
            kids.push_back(
                interior("elif_clause", std::move(ckids), cstart, lend_ - 1));
            last_tok = lend_ - 1;
        }
        if (next_line_starts_with(line.indent, "else")) {
            kids.push_back(parse_else_clause());
            last_tok = lend_ - 1;
        }
        return interior("if_statement", std::move(kids), start, last_tok);
    }

    SyntaxNode parse_else_clause() {
        const LogicalLine clause_line = lines_[li_];
        enter_line();
        std::size_t cstart = p_++;
        std::vector<SyntaxNode> ckids;
        try {
            ckids.push_back(parse_suite(clause_line));
        } catch (const Bail&) {
            ckids.push_back(error_node(p_, lend_));
            p_ = lend_;
        }
        return interior("else_clause", std::move(ckids), cstart, lend_ - 1);
    }

    SyntaxNode parse_while(const LogicalLine& line) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_expr_full());
        kids.push_back(parse_suite(line));
        std::size_t last_tok = lend_ - 1;
        if (next_line_starts_with(line.indent, "else")) {
            kids.push_back(parse_else_clause());
            last_tok = lend_ - 1;
        }
        return interior("while_statement", std::move(kids), start, last_tok);
    }

    SyntaxNode parse_for(const LogicalLine& line) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_target_list());
        if (!at_kw("in")) throw Bail{};
        ++p_;
        kids.push_back(parse_expression_list_no_targets());
        kids.push_back(parse_suite(line));
        std::size_t last_tok = lend_ - 1;
        if (next_line_starts_with(line.indent, "else")) {
            kids.push_back(parse_else_clause());
            last_tok = lend_ - 1;
        }
        return interior("for_statement", std::move(kids), start, last_tok);
    }

    SyntaxNode parse_try(const LogicalLine& line) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_suite(line));
        std::size_t last_tok = lend_ - 1;
        while (next_line_starts_with(line.indent, "except")) {
            const LogicalLine clause_line = lines_[li_];
            enter_line();
            std::size_t cstart = p_++;
            std::vector<SyntaxNode> ckids;
            try {
                if (!at_text(":")) {
                    SyntaxNode e = parse_expr_full();
                    if (at_kw("as") || at_text(",")) {
                        std::size_t as_start = cstart + 1;
                        ++p_;
                        SyntaxNode target = parse_identifier();
                        std::vector<SyntaxNode> akids;
                        akids.push_back(std::move(e));
                        akids.push_back(std::move(target));
                        e = interior("as_pattern", std::move(akids), as_start,
                                     p_ - 1);
                    }
                    ckids.push_back(std::move(e));
                }
                ckids.push_back(parse_suite(clause_line));
            } catch (const Bail&) {
                ckids.push_back(error_node(p_, lend_));
                p_ = lend_;
            }
            kids.push_back(
                interior("except_clause", std::move(ckids), cstart, lend_ - 1));
            last_tok = lend_ - 1;
        }
        if (next_line_starts_with(line.indent, "else")) {
            kids.push_back(parse_else_clause());
            last_tok = lend_ - 1;
        }
        if (next_line_starts_with(line.indent, "finally")) {
            const LogicalLine clause_line = lines_[li_];
            enter_line();
            std::size_t cstart = p_++;
            std::vector<SyntaxNode> ckids;
            try {
                ckids.push_back(parse_suite(clause_line));
            } catch (const Bail&) {
                ckids.push_back(error_node(p_, lend_));
                p_ = lend_;
            }
            kids.push_back(interior("finally_clause", std::move(ckids), cstart,
                                    lend_ - 1));
            last_tok = lend_ - 1;
        }
        return interior("try_statement", std::move(kids), start, last_tok);
    }

    SyntaxNode parse_with(const LogicalLine& line) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_with_item());
        while (at_text(",")) {
            ++p_;
            kids.push_back(parse_with_item());
        }
        kids.push_back(parse_suite(line));
        return interior("with_statement", std::move(kids), start, lend_ - 1);
    }

    SyntaxNode parse_with_item() {
        std::size_t start = p_;
        SyntaxNode e = parse_expr_full();
        if (at_kw("as")) {
            ++p_;
            SyntaxNode target = parse_target();
            std::vector<SyntaxNode> akids;
            akids.push_back(std::move(e));
            akids.push_back(std::move(target));
            e = interior("as_pattern", std::move(akids), start, p_ - 1);
        }
        std::vector<SyntaxNode> kids;
        kids.push_back(std::move(e));
        return interior("with_item", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_def(const LogicalLine& line) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_identifier());
        if (!at_text("(")) throw Bail{};
        std::size_t pstart = p_++;
        kids.push_back(parse_parameter_list(pstart, true));
        if (at_text("->")) {
            ++p_;
            std::size_t tstart = p_;
            std::vector<SyntaxNode> tkids;
            tkids.push_back(parse_expr_full());
            kids.push_back(interior("type", std::move(tkids), tstart, p_ - 1));
        }
        kids.push_back(parse_suite(line));
        return interior("function_definition", std::move(kids), start,
                        lend_ - 1);
    }

    // parse params until ')' (parens=true) or ':' (lambda).
    SyntaxNode parse_parameter_list(std::size_t start, bool parens) {
        std::vector<SyntaxNode> kids;
        auto at_end = [&]() { return parens ? at_text(")") : at_text(":"); };
        while (!at_end()) {
            kids.push_back(parse_parameter(parens));
            if (at_text(",")) {
                ++p_;
                continue;
            }
            break;
        }
        if (parens) expect_text(")");
        return interior("parameters", std::move(kids), start, p_ - 1);
    }

    SyntaxNode parse_parameter(bool parens) {
        std::size_t start = p_;
        if (at_text("*")) {
            ++p_;
            if (at_text(",") || (parens ? at_text(")") : at_text(":")))
                return leaf("operator", start, "*");
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_identifier());
            return interior("list_splat", std::move(kids), start, p_ - 1);
        }
        if (at_text("**")) {
            ++p_;
            std::vector<SyntaxNode> kids;
            kids.push_back(parse_identifier());
            return interior("dictionary_splat", std::move(kids), start, p_ - 1);
        }
        if (at_text("/")) {
            ++p_;
            return leaf("operator", start, "/");
        }
        SyntaxNode name = parse_identifier();
        bool typed = false;
        SyntaxNode type;
        if (parens && at_text(":")) {
            ++p_;
            std::size_t tstart = p_;
            std::vector<SyntaxNode> tkids;
            tkids.push_back(parse_expr_full());
            type = interior("type", std::move(tkids), tstart, p_ - 1);
            typed = true;
        }
        if (at_text("=")) {
            ++p_;
            SyntaxNode dflt = parse_expr_full();
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(name));
            if (typed) kids.push_back(std::move(type));
            kids.push_back(std::move(dflt));
            return interior(typed ? "typed_default_parameter"
                                  : "default_parameter",
                            std::move(kids), start, p_ - 1);
        }
        if (typed) {
            std::vector<SyntaxNode> kids;
            kids.push_back(std::move(name));
            kids.push_back(std::move(type));
            return interior("typed_parameter", std::move(kids), start, p_ - 1);
        }
        return name;
    }

    SyntaxNode parse_class(const LogicalLine& line) {
        std::size_t start = p_++;
        std::vector<SyntaxNode> kids;
        kids.push_back(parse_identifier());
        if (at_text("(")) kids.push_back(parse_argument_list());
        kids.push_back(parse_suite(line));
        return interior("class_definition", std::move(kids), start, lend_ - 1);
    }

    SyntaxNode parse_decorated() {
        std::vector<SyntaxNode> kids;
        int indent = lines_[li_].indent;
        std::size_t first_tok = lines_[li_].begin;
        std::size_t last_tok = first_tok;
        while (li_ < lines_.size() && t_[lines_[li_].begin].text == "@" &&
               lines_[li_].indent == indent) {
            enter_line();
            std::size_t dstart = p_++;
            try {
                std::vector<SyntaxNode> dkids;
                dkids.push_back(parse_expr_full());
                kids.push_back(
                    interior("decorator", std::move(dkids), dstart, lend_ - 1));
            } catch (const Bail&) {
                kids.push_back(error_node(dstart, lend_));
                p_ = lend_;
            }
            last_tok = lend_ - 1;
        }
        if (li_ < lines_.size() && lines_[li_].indent == indent) {
            const Token& head = t_[lines_[li_].begin];
            bool is_def = is_kw(head, "def") || is_kw(head, "class") ||
                          is_kw(head, "async");
            if (is_def) {
                const LogicalLine def_line = lines_[li_];
                enter_line();
                std::size_t save = kids.size();
                try {
                    kids.push_back(parse_statement(def_line));
                } catch (const Bail&) {
                    kids.resize(save);
                    kids.push_back(error_node(def_line.begin, lend_));
                    p_ = lend_;
                }
                last_tok = lend_ - 1;
            }
        }
        return interior("decorated_definition", std::move(kids), first_tok,
                        last_tok);
    }
};

}  // namespace

SyntaxTree parse_fragment(const std::string& code) {
    Parser parser(code);
    return parser.parse();
}

}  // namespace sstubmine
