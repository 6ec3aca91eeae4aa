#include "sstubmine/syntax.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace sstubmine {

bool isomorphic(const SyntaxNode& a, const SyntaxNode& b) {
    if (a.label != b.label || a.value != b.value) return false;
    if (a.children.size() != b.children.size()) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!isomorphic(a.children[i], b.children[i])) return false;
    return true;
}

std::size_t iso_hash(const SyntaxNode& n) {
    std::size_t h = std::hash<std::string>{}(n.label);
    h = h * 1000003u ^ std::hash<std::string>{}(n.value);
    for (const SyntaxNode& c : n.children) h = h * 1000003u ^ iso_hash(c);
    return h;
}

int node_count(const SyntaxNode& n) {
    int total = 1;
    for (const SyntaxNode& c : n.children) total += node_count(c);
    return total;
}

int tree_height(const SyntaxNode& n) {
    int best = 0;
    for (const SyntaxNode& c : n.children) best = std::max(best, tree_height(c));
    return best + 1;
}

bool contains_error(const SyntaxNode& n) {
    if (n.label == "ERROR") return true;
    for (const SyntaxNode& c : n.children)
        if (contains_error(c)) return true;
    return false;
}

std::string sexp(const SyntaxNode& n) {
    if (n.is_leaf() && !n.value.empty() && n.label != n.value) {
        std::string out = "(" + n.label + " \"";
        for (char ch : n.value) {
            if (ch == '"' || ch == '\\') out += '\\';
            out += ch;
        }
        return out + "\")";
    }
    if (n.is_leaf()) return "(" + n.label + ")";
    std::string out = "(" + n.label;
    for (const SyntaxNode& c : n.children) {
        out += ' ';
        out += sexp(c);
    }
    return out + ")";
}

const SyntaxNode* node_at_path(const SyntaxNode& root, const std::vector<int>& path) {
    const SyntaxNode* cur = &root;
    for (int idx : path) {
        if (idx < 0 || std::size_t(idx) >= cur->children.size()) return nullptr;
        cur = &cur->children[idx];
    }
    return cur;
}

namespace {

const std::array<std::string_view, 20> kStatementLabels = {
    "assert_statement",   "break_statement",     "class_definition",
    "continue_statement", "decorated_definition", "delete_statement",
    "expression_statement", "for_statement",     "function_definition",
    "global_statement",   "if_statement",        "import_from_statement",
    "import_statement",   "nonlocal_statement",  "pass_statement",
    "raise_statement",    "return_statement",    "try_statement",
    "while_statement",    "with_statement",
};

}  // namespace

bool is_statement_label(std::string_view label) {
    return std::find(kStatementLabels.begin(), kStatementLabels.end(), label) !=
           kStatementLabels.end();
}

const std::vector<std::string>& grammar_vocabulary() {
    static const std::vector<std::string> v = {
        "ERROR",
        "aliased_import",
        "argument_list",
        "as_pattern",
        "assert_statement",
        "assignment",
        "attribute",
        "augmented_assignment",
        "await",
        "binary_operator",
        "block",
        "boolean_operator",
        "break_statement",
        "call",
        "class_definition",
        "comparison_operator",
        "concatenated_string",
        "conditional_expression",
        "continue_statement",
        "decorated_definition",
        "decorator",
        "default_parameter",
        "delete_statement",
        "dictionary",
        "dictionary_comprehension",
        "dictionary_splat",
        "dotted_name",
        "elif_clause",
        "ellipsis",
        "else_clause",
        "except_clause",
        "expression_list",
        "expression_statement",
        "false",
        "finally_clause",
        "float",
        "for_in_clause",
        "for_statement",
        "function_definition",
        "generator_expression",
        "global_statement",
        "identifier",
        "if_clause",
        "if_statement",
        "import_from_statement",
        "import_prefix",
        "import_statement",
        "integer",
        "keyword_argument",
        "lambda",
        "list",
        "list_comprehension",
        "list_splat",
        "module",
        "named_expression",
        "none",
        "nonlocal_statement",
        "not_operator",
        "operator",
        "pair",
        "parameters",
        "parenthesized_expression",
        "pass_statement",
        "raise_statement",
        "return_statement",
        "set",
        "set_comprehension",
        "slice",
        "string",
        "subscript",
        "true",
        "try_statement",
        "tuple",
        "type",
        "typed_default_parameter",
        "typed_parameter",
        "unary_operator",
        "while_statement",
        "wildcard_import",
        "with_item",
        "with_statement",
        "yield",
    };
    return v;
}

std::string_view grammar_vocabulary_version() { return "1"; }

namespace {

// Number of statement-labeled nodes strictly below n, capped at 2.
int statement_descendants(const SyntaxNode& n) {
    int total = 0;
    for (const SyntaxNode& c : n.children) {
        if (is_statement_label(c.label)) ++total;
        total += statement_descendants(c);
        if (total >= 2) return total;
    }
    return total;
}

}  // namespace

std::optional<DivergencePoint> locate_divergence(const SyntaxTree& before,
                                                 const SyntaxTree& after) {
    const SyntaxNode* a = &before.root;
    const SyntaxNode* b = &after.root;
    std::vector<int> path;
    while (true) {
        if (a->label != b->label || a->value != b->value ||
            a->children.size() != b->children.size()) {
            return DivergencePoint{path, path, a, b};
        }
        int differing = -1;
        int count = 0;
        for (std::size_t i = 0; i < a->children.size(); ++i) {
            if (!isomorphic(a->children[i], b->children[i])) {
                differing = int(i);
                if (++count > 1) break;
            }
        }
        if (count == 0) return std::nullopt;
        if (count > 1) return DivergencePoint{path, path, a, b};
        path.push_back(differing);
        a = &a->children[differing];
        b = &b->children[differing];
    }
}

std::optional<StatementScope> statement_scope(const DivergencePoint& d,
                                              const SyntaxTree& before,
                                              const SyntaxTree& after) {
    // A divergence that roots two or more statements spans more than one
    // statement and is rejected outright.
    if (statement_descendants(*d.node_before) >= 2) return std::nullopt;
    if (statement_descendants(*d.node_after) >= 2) return std::nullopt;

    bool before_is_stmt = is_statement_label(d.node_before->label);
    bool after_is_stmt = is_statement_label(d.node_after->label);
    if (before_is_stmt != after_is_stmt) return std::nullopt;
    if (before_is_stmt) {
        return StatementScope{d.node_before, d.node_after, d.path_before,
                              d.path_after};
    }

    // The paths are equal and all ancestors are label-equal, so the nearest
    // statement ancestor sits at the same depth in both trees.
    for (int depth = int(d.path_before.size()) - 1; depth >= 0; --depth) {
        std::vector<int> prefix(d.path_before.begin(),
                                d.path_before.begin() + depth);
        const SyntaxNode* anc = node_at_path(before.root, prefix);
        if (anc && is_statement_label(anc->label)) {
            const SyntaxNode* anc_after = node_at_path(after.root, prefix);
            if (!anc_after || !is_statement_label(anc_after->label))
                return std::nullopt;
            return StatementScope{anc, anc_after, prefix, prefix};
        }
    }
    return std::nullopt;
}

}  // namespace sstubmine
