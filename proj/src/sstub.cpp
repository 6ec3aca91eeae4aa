#include <algorithm>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sstubmine/sstub.hpp"
#include "sstubmine/token.hpp"

namespace sstubmine {

namespace {

struct LabelRow {
    SstubPattern pattern;
    std::string_view name;
    std::string_view key;
};

constexpr std::array<LabelRow, 22> kRows = {{
    {SstubPattern::ChangeIdentifierUsed, "Change Identifier Used",
     "change_identifier_used"},
    {SstubPattern::ChangeBinaryOperand, "Change Binary Operand",
     "change_binary_operand"},
    {SstubPattern::SameFunctionMoreArgs, "Same Function More Args",
     "same_function_more_args"},
    {SstubPattern::WrongFunctionName, "Wrong Function Name",
     "wrong_function_name"},
    {SstubPattern::AddFunctionAroundExpression,
     "Add Function Around Expression", "add_function_around_expression"},
    {SstubPattern::ChangeAttributeUsed, "Change Attribute Used",
     "change_attribute_used"},
    {SstubPattern::ChangeNumericLiteral, "Change Numeric Literal",
     "change_numeric_literal"},
    {SstubPattern::MoreSpecificIf, "More Specific If", "more_specific_if"},
    {SstubPattern::AddMethodCall, "Add Method Call", "add_method_call"},
    {SstubPattern::AddElementsToIterable, "Add Elements To Iterable",
     "add_elements_to_iterable"},
    {SstubPattern::SameFunctionLessArgs, "Same Function Less Args",
     "same_function_less_args"},
    {SstubPattern::ChangeBooleanLiteral, "Change Boolean Literal",
     "change_boolean_literal"},
    {SstubPattern::AddAttributeAccess, "Add Attribute Access",
     "add_attribute_access"},
    {SstubPattern::ChangeBinaryOperator, "Change Binary Operator",
     "change_binary_operator"},
    {SstubPattern::SameFunctionWrongCaller, "Same Function Wrong Caller",
     "same_function_wrong_caller"},
    {SstubPattern::LessSpecificIf, "Less Specific If", "less_specific_if"},
    {SstubPattern::ChangeKeywordArgumentUsed, "Change Keyword Argument Used",
     "change_keyword_argument_used"},
    {SstubPattern::ChangeUnaryOperator, "Change Unary Operator",
     "change_unary_operator"},
    {SstubPattern::SameFunctionSwapArgs, "Same Function Swap Args",
     "same_function_swap_args"},
    {SstubPattern::ChangeConstantType, "Change Constant Type",
     "change_constant_type"},
    {SstubPattern::NoSstubSingleToken, "NoSStuB Single Token",
     "NO_SSTUB_SINGLE_TOKEN"},
    {SstubPattern::NoSstubSingleStatement, "NoSStuB Single Statement",
     "NO_SSTUB_SINGLE_STATEMENT"},
}};

// Most specific first; call-shape patterns outrank the identifier, operand
// and literal changes they would otherwise shadow.
constexpr std::array<SstubPattern, 20> kPrecedence = {
    SstubPattern::SameFunctionSwapArgs,
    SstubPattern::SameFunctionWrongCaller,
    SstubPattern::WrongFunctionName,
    SstubPattern::SameFunctionMoreArgs,
    SstubPattern::SameFunctionLessArgs,
    SstubPattern::ChangeKeywordArgumentUsed,
    SstubPattern::AddFunctionAroundExpression,
    SstubPattern::AddMethodCall,
    SstubPattern::AddAttributeAccess,
    SstubPattern::ChangeAttributeUsed,
    SstubPattern::MoreSpecificIf,
    SstubPattern::LessSpecificIf,
    SstubPattern::ChangeUnaryOperator,
    SstubPattern::ChangeBinaryOperator,
    SstubPattern::ChangeBinaryOperand,
    SstubPattern::ChangeBooleanLiteral,
    SstubPattern::ChangeNumericLiteral,
    SstubPattern::ChangeConstantType,
    SstubPattern::AddElementsToIterable,
    SstubPattern::ChangeIdentifierUsed,
};

bool is_literal_label(std::string_view l) {
    return l == "integer" || l == "float" || l == "string" || l == "true" ||
           l == "false" || l == "none";
}

bool is_iterable_label(std::string_view l) {
    return l == "list" || l == "tuple" || l == "set" || l == "dictionary";
}

// Divergence context: the ancestor chains on both sides (root .. divergence
// node inclusive) plus the child indices along the path.
struct Ctx {
    std::vector<const SyntaxNode*> before;  // chain, size path.size()+1
    std::vector<const SyntaxNode*> after;
    std::vector<int> path;

    const SyntaxNode& nb() const { return *before.back(); }
    const SyntaxNode& na() const { return *after.back(); }

    // k levels above the divergence node; nullptr when out of range.
    const SyntaxNode* up_before(std::size_t k) const {
        return k < before.size() ? before[before.size() - 1 - k] : nullptr;
    }
    const SyntaxNode* up_after(std::size_t k) const {
        return k < after.size() ? after[after.size() - 1 - k] : nullptr;
    }
    // Child index the divergence path takes k levels above; -1 out of range.
    int index_at(std::size_t k) const {
        return k >= 1 && k <= path.size() ? path[path.size() - k] : -1;
    }
};

Ctx build_ctx(const SyntaxTree& before, const SyntaxTree& after,
              const DivergencePoint& d) {
    Ctx c;
    c.path = d.path_before;
    const SyntaxNode* nb = &before.root;
    const SyntaxNode* na = &after.root;
    c.before.push_back(nb);
    c.after.push_back(na);
    for (int idx : c.path) {
        nb = &nb->children[std::size_t(idx)];
        na = &na->children[std::size_t(idx)];
        c.before.push_back(nb);
        c.after.push_back(na);
    }
    return c;
}

bool iso(const SyntaxNode& a, const SyntaxNode& b) { return isomorphic(a, b); }

bool identifier_leaf(const SyntaxNode& n) {
    return n.label == "identifier" && n.is_leaf();
}

// Do the elements of `small` appear, isomorphically and in order, within
// `large`?
bool iso_subsequence(const std::vector<SyntaxNode>& small,
                     const std::vector<SyntaxNode>& large) {
    std::size_t j = 0;
    for (const SyntaxNode& want : small) {
        while (j < large.size() && !iso(want, large[j])) ++j;
        if (j == large.size()) return false;
        ++j;
    }
    return true;
}

// ---------------------------------------------------------------------
// The 20 predicates. Each one checks the defining AST condition at the
// divergence point; precedence untangles the deliberate overlaps.

// f(a, b) -> f(b, a): same call, two argument positions exchanged.
bool same_function_swap_args(const Ctx& c) {
    const SyntaxNode& nb = c.nb();
    const SyntaxNode& na = c.na();
    if (nb.label != "argument_list" || na.label != "argument_list")
        return false;
    const SyntaxNode* call = c.up_before(1);
    if (!call || call->label != "call") return false;
    if (nb.children.size() != na.children.size()) return false;
    std::vector<std::size_t> diff;
    for (std::size_t i = 0; i < nb.children.size(); ++i)
        if (!iso(nb.children[i], na.children[i])) diff.push_back(i);
    if (diff.size() != 2) return false;
    return iso(nb.children[diff[0]], na.children[diff[1]]) &&
           iso(nb.children[diff[1]], na.children[diff[0]]);
}

// a.f(x) -> b.f(x): the change lives inside the object of the method call.
bool same_function_wrong_caller(const Ctx& c) {
    for (std::size_t j = 0; j + 2 < c.before.size(); ++j) {
        if (c.before[j]->label != "call") continue;
        if (c.path[j] != 0) continue;
        if (c.before[j + 1]->label != "attribute") continue;
        if (c.path[j + 1] != 0) continue;
        return true;
    }
    return false;
}

// f(a) -> g(a) or a.f(x) -> a.g(x): only the called name differs.
bool wrong_function_name(const Ctx& c) {
    if (!identifier_leaf(c.nb()) || !identifier_leaf(c.na())) return false;
    const SyntaxNode* p = c.up_before(1);
    if (!p) return false;
    if (p->label == "call" && c.index_at(1) == 0) return true;
    if (p->label == "attribute" && c.index_at(1) == 1) {
        const SyntaxNode* g = c.up_before(2);
        return g && g->label == "call" && c.index_at(2) == 0;
    }
    return false;
}

bool same_function_more_args(const Ctx& c) {
    const SyntaxNode& nb = c.nb();
    const SyntaxNode& na = c.na();
    if (nb.label != "argument_list" || na.label != "argument_list")
        return false;
    const SyntaxNode* call = c.up_before(1);
    if (!call || call->label != "call") return false;
    return na.children.size() > nb.children.size() &&
           iso_subsequence(nb.children, na.children);
}

bool same_function_less_args(const Ctx& c) {
    const SyntaxNode& nb = c.nb();
    const SyntaxNode& na = c.na();
    if (nb.label != "argument_list" || na.label != "argument_list")
        return false;
    const SyntaxNode* call = c.up_before(1);
    if (!call || call->label != "call") return false;
    return na.children.size() < nb.children.size() &&
           iso_subsequence(na.children, nb.children);
}

// f(x=1) -> f(y=1): the keyword name differs.
bool change_keyword_argument_used(const Ctx& c) {
    if (!identifier_leaf(c.nb()) || !identifier_leaf(c.na())) return false;
    const SyntaxNode* p = c.up_before(1);
    return p && p->label == "keyword_argument" && c.index_at(1) == 0;
}

// x -> f(x): the old expression reappears as an argument of a new call.
bool add_function_around_expression(const Ctx& c) {
    const SyntaxNode& na = c.na();
    if (na.label != "call" || na.children.size() != 2) return false;
    const SyntaxNode& args = na.children[1];
    if (args.label != "argument_list") return false;
    for (const SyntaxNode& a : args.children)
        if (iso(a, c.nb())) return true;
    return false;
}

// x -> x.m(...): the old expression becomes the receiver of a method call.
bool add_method_call(const Ctx& c) {
    const SyntaxNode& na = c.na();
    if (na.label != "call" || na.children.empty()) return false;
    const SyntaxNode& fn = na.children[0];
    return fn.label == "attribute" && !fn.children.empty() &&
           iso(fn.children[0], c.nb());
}

// x -> x.attr: plain attribute access added on top of the old expression.
bool add_attribute_access(const Ctx& c) {
    const SyntaxNode& na = c.na();
    return na.label == "attribute" && !na.children.empty() &&
           iso(na.children[0], c.nb());
}

// obj.a -> obj.b: the attribute name differs.
bool change_attribute_used(const Ctx& c) {
    if (!identifier_leaf(c.nb()) || !identifier_leaf(c.na())) return false;
    const SyntaxNode* p = c.up_before(1);
    return p && p->label == "attribute" && c.index_at(1) == 1;
}

bool if_condition_position(const Ctx& c) {
    const SyntaxNode* p = c.up_before(1);
    if (!p || c.index_at(1) != 0) return false;
    return p->label == "if_statement" || p->label == "elif_clause";
}

// if a: -> if a and b:
bool more_specific_if(const Ctx& c) {
    if (!if_condition_position(c)) return false;
    const SyntaxNode& na = c.na();
    if (na.label != "boolean_operator" || na.children.size() != 3)
        return false;
    if (na.children[1].value != "and") return false;
    return iso(na.children[0], c.nb()) || iso(na.children[2], c.nb());
}

// if a: -> if a or b:
bool less_specific_if(const Ctx& c) {
    if (!if_condition_position(c)) return false;
    const SyntaxNode& na = c.na();
    if (na.label != "boolean_operator" || na.children.size() != 3)
        return false;
    if (na.children[1].value != "or") return false;
    return iso(na.children[0], c.nb()) || iso(na.children[2], c.nb());
}

// -x -> +x, x -> not x, x -> -x and their removals.
bool change_unary_operator(const Ctx& c) {
    const SyntaxNode& nb = c.nb();
    const SyntaxNode& na = c.na();
    const SyntaxNode* p = c.up_before(1);
    if (p && p->label == "unary_operator" && nb.label == "operator" &&
        na.label == "operator" && nb.value != na.value)
        return true;
    if (na.label == "not_operator" && na.children.size() == 1 &&
        iso(na.children[0], nb))
        return true;
    if (nb.label == "not_operator" && nb.children.size() == 1 &&
        iso(nb.children[0], na))
        return true;
    if (na.label == "unary_operator" && na.children.size() == 2 &&
        iso(na.children[1], nb))
        return true;
    if (nb.label == "unary_operator" && nb.children.size() == 2 &&
        iso(nb.children[1], na))
        return true;
    return false;
}

// a + b -> a - b, a < b -> a <= b, x and y -> x or y, x += 1 -> x -= 1.
bool change_binary_operator(const Ctx& c) {
    if (c.nb().label != "operator" || c.na().label != "operator")
        return false;
    if (c.nb().value == c.na().value) return false;
    const SyntaxNode* p = c.up_before(1);
    if (!p) return false;
    return p->label == "binary_operator" || p->label == "comparison_operator" ||
           p->label == "boolean_operator" ||
           p->label == "augmented_assignment";
}

// a + b -> a + c: one operand of a binary operation changed.
bool change_binary_operand(const Ctx& c) {
    if (c.nb().label == "operator" || c.na().label == "operator") return false;
    const SyntaxNode* p = c.up_before(1);
    if (!p) return false;
    return p->label == "binary_operator" || p->label == "comparison_operator";
}

bool change_boolean_literal(const Ctx& c) {
    const std::string& a = c.nb().label;
    const std::string& b = c.na().label;
    return (a == "true" || a == "false") && (b == "true" || b == "false") &&
           a != b;
}

bool change_numeric_literal(const Ctx& c) {
    const SyntaxNode& nb = c.nb();
    const SyntaxNode& na = c.na();
    if (nb.label != na.label) return false;
    if (nb.label != "integer" && nb.label != "float") return false;
    return nb.value != na.value;
}

// 1 -> 1.0, 2 -> "2": a literal swapped for a literal of another kind.
// True <-> False stays with the boolean pattern.
bool change_constant_type(const Ctx& c) {
    const std::string& a = c.nb().label;
    const std::string& b = c.na().label;
    if (!is_literal_label(a) || !is_literal_label(b) || a == b) return false;
    bool both_bool =
        (a == "true" || a == "false") && (b == "true" || b == "false");
    return !both_bool;
}

// [a] -> [a, b]: a display literal gained elements.
bool add_elements_to_iterable(const Ctx& c) {
    const SyntaxNode& nb = c.nb();
    const SyntaxNode& na = c.na();
    if (nb.label != na.label || !is_iterable_label(nb.label)) return false;
    return na.children.size() > nb.children.size() &&
           iso_subsequence(nb.children, na.children);
}

bool change_identifier_used(const Ctx& c) {
    return identifier_leaf(c.nb()) && identifier_leaf(c.na()) &&
           c.nb().value != c.na().value;
}

bool matches(SstubPattern p, const Ctx& c) {
    switch (p) {
        case SstubPattern::SameFunctionSwapArgs:
            return same_function_swap_args(c);
        case SstubPattern::SameFunctionWrongCaller:
            return same_function_wrong_caller(c);
        case SstubPattern::WrongFunctionName:
            return wrong_function_name(c);
        case SstubPattern::SameFunctionMoreArgs:
            return same_function_more_args(c);
        case SstubPattern::SameFunctionLessArgs:
            return same_function_less_args(c);
        case SstubPattern::ChangeKeywordArgumentUsed:
            return change_keyword_argument_used(c);
        case SstubPattern::AddFunctionAroundExpression:
            return add_function_around_expression(c);
        case SstubPattern::AddMethodCall:
            return add_method_call(c);
        case SstubPattern::AddAttributeAccess:
            return add_attribute_access(c);
        case SstubPattern::ChangeAttributeUsed:
            return change_attribute_used(c);
        case SstubPattern::MoreSpecificIf:
            return more_specific_if(c);
        case SstubPattern::LessSpecificIf:
            return less_specific_if(c);
        case SstubPattern::ChangeUnaryOperator:
            return change_unary_operator(c);
        case SstubPattern::ChangeBinaryOperator:
            return change_binary_operator(c);
        case SstubPattern::ChangeBinaryOperand:
            return change_binary_operand(c);
        case SstubPattern::ChangeBooleanLiteral:
            return change_boolean_literal(c);
        case SstubPattern::ChangeNumericLiteral:
            return change_numeric_literal(c);
        case SstubPattern::ChangeConstantType:
            return change_constant_type(c);
        case SstubPattern::AddElementsToIterable:
            return add_elements_to_iterable(c);
        case SstubPattern::ChangeIdentifierUsed:
            return change_identifier_used(c);
        default:
            return false;
    }
}

// Unit-cost Levenshtein over (kind, text) tokens.
int token_edit_distance(const TokenSeq& a, const TokenSeq& b) {
    std::size_t n = a.size(), m = b.size();
    std::vector<int> row(m + 1);
    for (std::size_t j = 0; j <= m; ++j) row[j] = int(j);
    for (std::size_t i = 1; i <= n; ++i) {
        int diag = row[0];
        row[0] = int(i);
        for (std::size_t j = 1; j <= m; ++j) {
            int sub = diag + (a[i - 1].same_lexeme(b[j - 1]) ? 0 : 1);
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
        }
    }
    return row[m];
}

}  // namespace

std::string_view sstub_name(SstubPattern p) {
    for (const LabelRow& r : kRows)
        if (r.pattern == p) return r.name;
    return "";
}

std::string_view sstub_key(SstubPattern p) {
    for (const LabelRow& r : kRows)
        if (r.pattern == p) return r.key;
    return "";
}

std::optional<SstubPattern> sstub_from_key(std::string_view key) {
    for (const LabelRow& r : kRows)
        if (r.key == key) return r.pattern;
    return std::nullopt;
}

bool is_sstub(SstubPattern p) {
    return p != SstubPattern::NoSstubSingleToken &&
           p != SstubPattern::NoSstubSingleStatement;
}

int specificity_rank(SstubPattern p) {
    for (std::size_t i = 0; i < kPrecedence.size(); ++i)
        if (kPrecedence[i] == p) return int(i);
    return int(kPrecedence.size());
}

SstubPattern classify(const SyntaxTree& stmt_before,
                      const SyntaxTree& stmt_after, const EditScript& script) {
    (void)script;
    std::optional<DivergencePoint> d =
        locate_divergence(stmt_before, stmt_after);
    if (!d) return SstubPattern::NoSstubSingleStatement;
    Ctx c = build_ctx(stmt_before, stmt_after, *d);
    for (SstubPattern p : kPrecedence)
        if (matches(p, c)) return p;
    if (token_edit_distance(tokenize(stmt_before.source),
                            tokenize(stmt_after.source)) == 1)
        return SstubPattern::NoSstubSingleToken;
    return SstubPattern::NoSstubSingleStatement;
}

}  // namespace sstubmine
