#include "sstubmine/gitio.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>

namespace sstubmine {

namespace {

std::string sanitize_name(const std::string& location) {
    std::string out;
    for (char c : location) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '.' || c == '-' ||
                          c == '_';
        out += keep ? c : '_';
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

CommandResult git(const std::string& repo_dir,
                  std::vector<std::string> args) {
    args.insert(args.begin(), "git");
    return run_command(args, repo_dir);
}

}  // namespace

CommandResult run_command(const std::vector<std::string>& argv,
                          const std::string& cwd) {
    int out_pipe[2];
    int err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw std::runtime_error("pipe failed");

    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        if (!cwd.empty() && chdir(cwd.c_str()) != 0) _exit(127);
        const int devnull = open("/dev/null", O_RDONLY);
        if (devnull >= 0) dup2(devnull, STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        if (devnull >= 0) close(devnull);
        setenv("GIT_TERMINAL_PROMPT", "0", 1);
        std::vector<char*> cargs;
        for (const auto& a : argv) cargs.push_back(const_cast<char*>(a.c_str()));
        cargs.push_back(nullptr);
        execvp(cargs[0], cargs.data());
        _exit(127);
    }

    close(out_pipe[1]);
    close(err_pipe[1]);

    CommandResult res;
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    std::string* sinks[2] = {&res.out, &res.err};
    int live = 2;
    char buf[65536];
    while (live > 0) {
        if (poll(fds, 2, -1) < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || !(fds[i].revents & (POLLIN | POLLHUP)))
                continue;
            const ssize_t n = read(fds[i].fd, buf, sizeof(buf));
            if (n > 0) {
                sinks[i]->append(buf, std::size_t(n));
            } else {
                close(fds[i].fd);
                fds[i].fd = -1;
                --live;
            }
        }
    }

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    if (WIFEXITED(status))
        res.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        res.exit_code = 128 + WTERMSIG(status);
    return res;
}

bool looks_like_url(const std::string& location) {
    return location.find("://") != std::string::npos ||
           location.rfind("git@", 0) == 0;
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("SSTUB_CACHE_DIR"); env && *env)
        return env;
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::string(home) + "/.cache/sstubminer";
    return "/tmp/sstubminer-cache";
}

std::string ensure_repo(const std::string& location,
                        const std::string& cache_dir) {
    namespace fs = std::filesystem;
    if (!looks_like_url(location)) {
        std::error_code ec;
        if (!fs::is_directory(location, ec))
            throw RepoUnavailable("no such directory: " + location);
        const auto probe = git(location, {"rev-parse", "--git-dir"});
        if (probe.exit_code != 0)
            throw RepoUnavailable("not a git repository: " + location);
        return location;
    }

    const fs::path target = fs::path(cache_dir) / sanitize_name(location);
    std::error_code ec;
    if (fs::is_directory(target, ec)) {
        const auto probe = git(target.string(), {"rev-parse", "--git-dir"});
        if (probe.exit_code == 0) return target.string();
        fs::remove_all(target, ec);
    }
    fs::create_directories(cache_dir, ec);
    const auto res = run_command(
        {"git", "clone", "--quiet", location, target.string()});
    if (res.exit_code != 0) {
        fs::remove_all(target, ec);
        throw RepoUnavailable("clone failed for " + location + ": " + res.err);
    }
    return target.string();
}

std::vector<CommitInfo> list_commits(const std::string& repo_dir) {
    const auto res = git(repo_dir, {"log", "--first-parent", "-z",
                                    "--format=%H%x1f%P%x1f%B"});
    if (res.exit_code != 0)
        throw RepoUnavailable("git log failed in " + repo_dir + ": " + res.err);
    std::vector<CommitInfo> commits;
    for (const auto& entry : split(res.out, '\0')) {
        if (entry.empty()) continue;
        const auto fields = split(entry, '\x1f');
        if (fields.size() != 3) continue;
        CommitInfo ci;
        ci.sha = fields[0];
        for (const auto& p : split(fields[1], ' '))
            if (!p.empty()) ci.parents.push_back(p);
        ci.message = fields[2];
        while (!ci.message.empty() &&
               (ci.message.back() == '\n' || ci.message.back() == '\r'))
            ci.message.pop_back();
        commits.push_back(std::move(ci));
    }
    return commits;
}

std::vector<FileStatus> list_changed_files(const std::string& repo_dir,
                                           const std::string& sha) {
    const auto res =
        git(repo_dir, {"diff-tree", "-r", "--no-renames", "--no-commit-id",
                       "--name-status", "-z", sha});
    if (res.exit_code != 0)
        throw CorruptObject("diff-tree failed for " + sha + ": " + res.err);
    std::vector<FileStatus> files;
    const auto parts = split(res.out, '\0');
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
        if (parts[i].empty()) continue;
        files.push_back({parts[i][0], parts[i + 1]});
    }
    return files;
}

std::string read_blob(const std::string& repo_dir, const std::string& rev,
                      const std::string& path) {
    auto res = git(repo_dir, {"show", rev + ":" + path});
    if (res.exit_code != 0)
        throw CorruptObject("cannot read " + rev + ":" + path + ": " + res.err);
    return std::move(res.out);
}

}  // namespace sstubmine
