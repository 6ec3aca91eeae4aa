#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sstubmine {

struct Span {
    int start_line = 0;  // 1-based
    int start_col = 0;   // 0-based
    int end_line = 0;
    int end_col = 0;  // exclusive
};

struct SyntaxNode {
    std::string label;
    std::string value;  // leaves only; empty for interior nodes
    Span span;
    std::vector<SyntaxNode> children;

    bool is_leaf() const { return children.empty(); }
};

struct SyntaxTree {
    SyntaxNode root;  // label "module"
    std::string source;
};

// Error-tolerant parse of a Python fragment (changed line plus context).
// Unparsable regions become ERROR nodes; never throws.
SyntaxTree parse_fragment(const std::string& code);

bool isomorphic(const SyntaxNode& a, const SyntaxNode& b);  // label + value
std::size_t iso_hash(const SyntaxNode& n);  // equal for isomorphic subtrees
int node_count(const SyntaxNode& n);
int tree_height(const SyntaxNode& n);  // leaves have height 1
bool contains_error(const SyntaxNode& n);

// S-expression rendering used by tests and debugging output:
// (assignment (identifier "x") (integer "1"))
std::string sexp(const SyntaxNode& n);

const SyntaxNode* node_at_path(const SyntaxNode& root, const std::vector<int>& path);

bool is_statement_label(std::string_view label);

// Frozen grammar vocabulary; every label a parse can produce, sorted.
const std::vector<std::string>& grammar_vocabulary();
std::string_view grammar_vocabulary_version();

struct DivergencePoint {
    std::vector<int> path_before;
    std::vector<int> path_after;
    const SyntaxNode* node_before = nullptr;
    const SyntaxNode* node_after = nullptr;
};

// Simultaneous descent from the roots: while exactly one child pair differs,
// descend into it; stops where labels, leaf values, or child counts differ,
// or where two or more children differ. Empty when the trees are isomorphic.
std::optional<DivergencePoint> locate_divergence(const SyntaxTree& before,
                                                 const SyntaxTree& after);

struct StatementScope {
    const SyntaxNode* stmt_before = nullptr;
    const SyntaxNode* stmt_after = nullptr;
    std::vector<int> path_before;
    std::vector<int> path_after;
};

// Nearest enclosing statement pair for a divergence, or empty when the change
// is not confined to a single statement.
std::optional<StatementScope> statement_scope(const DivergencePoint& d,
                                              const SyntaxTree& before,
                                              const SyntaxTree& after);

}  // namespace sstubmine
