#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sstubmine {

struct RepoUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CorruptObject : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Runs the command with empty stdin and both output streams captured.
// Never uses a shell.
CommandResult run_command(const std::vector<std::string>& argv,
                          const std::string& cwd = {});

struct CommitInfo {
    std::string sha;
    std::vector<std::string> parents;
    std::string message;
};

struct FileStatus {
    char status = 'M';  // A/M/D/T as reported by git
    std::string path;
};

bool looks_like_url(const std::string& location);

// SSTUB_CACHE_DIR when set, otherwise a per-user cache directory.
std::string default_cache_dir();

// Local paths are validated and returned unchanged; URLs are cloned into
// (or reused from) the cache directory.
std::string ensure_repo(const std::string& location,
                        const std::string& cache_dir);

// First-parent history, newest first. Merge commits appear with all their
// parents listed; side branches do not appear.
std::vector<CommitInfo> list_commits(const std::string& repo_dir);

// Status entries of the commit against its first parent, renames disabled.
std::vector<FileStatus> list_changed_files(const std::string& repo_dir,
                                           const std::string& sha);

std::string read_blob(const std::string& repo_dir, const std::string& rev,
                      const std::string& path);

}  // namespace sstubmine
