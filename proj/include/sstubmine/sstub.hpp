#pragma once

#include <optional>
#include <string_view>

#include "sstubmine/editscript.hpp"
#include "sstubmine/syntax.hpp"

namespace sstubmine {

enum class SstubPattern {
    ChangeIdentifierUsed,
    ChangeBinaryOperand,
    SameFunctionMoreArgs,
    WrongFunctionName,
    AddFunctionAroundExpression,
    ChangeAttributeUsed,
    ChangeNumericLiteral,
    MoreSpecificIf,
    AddMethodCall,
    AddElementsToIterable,
    SameFunctionLessArgs,
    ChangeBooleanLiteral,
    AddAttributeAccess,
    ChangeBinaryOperator,
    SameFunctionWrongCaller,
    LessSpecificIf,
    ChangeKeywordArgumentUsed,
    ChangeUnaryOperator,
    SameFunctionSwapArgs,
    ChangeConstantType,
    NoSstubSingleToken,
    NoSstubSingleStatement,
};

// Display name: "Change Identifier Used".
std::string_view sstub_name(SstubPattern p);

// Dataset key: "change_identifier_used"; the fallbacks keep their
// canonical NO_SSTUB_* spelling.
std::string_view sstub_key(SstubPattern p);
std::optional<SstubPattern> sstub_from_key(std::string_view key);

// True for the 20 patterns, false for the fallbacks.
bool is_sstub(SstubPattern p);

// Specificity order over the 20 patterns; lower wins when several
// predicates match a statement pair. Fallbacks rank below all patterns.
int specificity_rank(SstubPattern p);

// Classifies a statement-scoped before/after pair. Both trees must carry
// the statement text in their source field; the single-token fallback is
// decided on the token sequences of those texts.
SstubPattern classify(const SyntaxTree& stmt_before,
                      const SyntaxTree& stmt_after, const EditScript& script);

}  // namespace sstubmine
