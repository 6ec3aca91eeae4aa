#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sstubmine/editscript.hpp"
#include "sstubmine/syntax.hpp"

namespace sstubmine {

// error, bug, fix, issue, mistake, incorrect, fault, defect, flaw, type
const std::vector<std::string>& default_keywords();

struct MinerConfig {
    std::vector<std::string> keywords = default_keywords();
    int workers = 1;
    std::size_t max_file_bytes = 2u << 20;
    std::string output_dir;
    std::string repo_list_path;
    std::string cache_dir;  // empty: SSTUB_CACHE_DIR or the user cache
    bool gzip = false;
};

struct ChangedFile {
    std::string path;
    std::string before_text;
    std::string after_text;
};

struct CommitCandidate {
    std::string project;
    std::string sha;
    std::string message;
    std::vector<ChangedFile> files;
    // Modified .py files in the commit before the size cap; a commit only
    // counts as single-statement when this is 1.
    int py_modified_total = 0;
};

// One per-file statement change that survived every gate.
struct MinedChange {
    std::string file_path;
    std::string diff;
    std::string before_line;
    std::string after_line;
    SyntaxTree stmt_before;  // statement subtree; source carries its text
    SyntaxTree stmt_after;
};

struct BugRecord {
    std::string project;
    std::string commit_sha;
    std::string commit_message;
    std::string file_path;
    std::string diff;
    std::string before_line;
    std::string after_line;
    std::string sstub_pattern;
    EditScript script;
    int edit_ops_count = 0;
    bool likely_bug = false;
    bool in_tssb = false;
    bool is_typo = false;
};

// Case-insensitive whole-word match; words are maximal alphanumeric runs.
bool is_bugfix_message(std::string_view message,
                       const std::vector<std::string>& keywords);

// Walks first-parent history of the repo at `location` (path or URL; URLs
// go through the clone cache). Merge and root commits are skipped, commits
// adding or deleting .py files are dropped, and only modified .py files
// within the size cap are loaded. Throws RepoUnavailable.
void scan_repository(const std::string& location, const MinerConfig& cfg,
                     const std::function<void(CommitCandidate&&)>& sink);

std::vector<CommitCandidate> scan_repository(const std::string& location,
                                             const MinerConfig& cfg);

// Applies the per-file gate chain: token-aware diff, single-line edit,
// clean parses, a located divergence, and statement scope. A file failing
// the single-line gate discards the whole commit; later gates discard only
// the file.
std::vector<MinedChange> select_single_statement(const CommitCandidate& c);

// Statement pair recovered from record lines alone (indentation stripped),
// for re-classifying datasets without their repositories. Empty when the
// lines do not parse cleanly into a single diverging statement.
struct StatementPair {
    SyntaxTree before;
    SyntaxTree after;
};
std::optional<StatementPair> statement_pair_from_lines(
    const std::string& before_line, const std::string& after_line);

// select_single_statement + classification, edit script, keyword and typo
// flags. in_tssb is set iff the commit modified exactly one .py file and
// yielded exactly one change.
std::vector<BugRecord> mine_commit(const CommitCandidate& c,
                                   const MinerConfig& cfg);

// Dataset row in the frozen field order; edit_script is embedded as a JSON
// array, not a string.
std::string record_to_json(const BugRecord& r);

// Stable order for output files: (project, commit_sha, file_path).
void canonical_sort(std::vector<BugRecord>& records);

// Drops records whose key (commit_sha, file_path, normalized before line,
// normalized after line) was already seen; order-preserving.
std::vector<BugRecord> dedup(std::vector<BugRecord> records);

struct MineStats {
    long long repos_ok = 0;
    std::vector<std::string> failed_repos;
    long long commits_scanned = 0;
    long long candidates = 0;
    long long ssc = 0;
    long long ssb = 0;
    long long tssb = 0;
};

// Full run: repo list -> workers over disjoint repos -> deterministic
// reduce -> ssc/ssb/tssb jsonlines (+ manifest.json) under output_dir.
MineStats build_datasets(const MinerConfig& cfg);

}  // namespace sstubmine
