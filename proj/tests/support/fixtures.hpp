#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

struct Golden {
    const char* before;
    const char* after;
    const char* key;
};

// Curated statement pairs with their expected pattern keys; covers all 20
// patterns at least twice plus both fallbacks.
const std::vector<Golden>& sstub_goldens();

// Pairs satisfying two or more predicates; the key is the documented winner.
const std::vector<Golden>& precedence_goldens();

// Classifies through the mining path (parse, divergence, statement scope,
// edit script). Throws std::runtime_error when the pair does not reduce to
// a single diverging statement.
std::string classified_key(const std::string& before,
                           const std::string& after);

// Synthetic history: a root import plus 12 scripted commits — a clean fix,
// a two-file fix, a refactor, a file-add, two fixes later duplicated via a
// clone, a formatting-only change, a merge, a two-statement line, a syntax
// break, and two typo fixes. Throws std::runtime_error on git failure.
void build_fixture_repo(const std::filesystem::path& repo);

struct ExpectedRecord {
    std::string message;
    std::string file;
    std::string before;
    std::string after;
    std::string pattern;
    bool likely_bug;
    bool in_tssb;
    bool is_typo;
};

// The exact ssc contents mining the fixture repo must produce; ssb is the
// likely_bug subset, tssb additionally requires in_tssb.
const std::vector<ExpectedRecord>& fixture_expected_ssc();

// Published per-pattern record counts (thousands) for the strict
// one-statement corpus and the wider bug-filtered corpus, both in the
// strict corpus's frequency order; the rank-correlation fixture.
const std::vector<double>& tssb_pattern_counts();
const std::vector<double>& ssb_pattern_counts();

// Random single statement from a small documented grammar:
//   stmt     := assign | augassign | return | if | del
//   assign   := target '=' expr        target := name ('.' name | '[' atom ']')?
//   augassign:= name ('+=' | '-=' | '*=') expr
//   return   := 'return' expr          if := 'if' expr ':' newline indent 'pass'
//   del      := 'del' name '[' atom ']'
//   expr     := clause (('and' | 'or') clause)?
//   clause   := 'not'? test
//   test     := sum (('<' | '==' | '>=' | '!=') sum)?
//   sum      := prefix (('+' | '-' | '*' | '%') prefix)?
//   prefix   := '-'? postfix
//   postfix  := atom | call | name '.' name | collection
//   call     := name ('.' name)? '(' expr{0..3} (name '=' atom)? ')'
//   collection := '[' atom* ']' | '(' atom* ')' | '{' atom+ '}'
//   atom     := name | integer | float | string | 'True' | 'False' | 'None'
// Depth-bounded so parses stay small (~25 nodes or fewer).
std::string random_statement(std::mt19937& rng);

// Re-spaces the source without touching its token stream: extra spaces
// between same-line tokens, trailing spaces, injected blank lines, and
// occasional trailing comments. Indentation is preserved.
std::string inject_format_noise(const std::string& source, std::mt19937& rng);

}  // namespace testsupport
