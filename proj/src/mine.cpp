#include "sstubmine/mine.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "sstubmine/analysis.hpp"
#include "sstubmine/gitio.hpp"
#include "sstubmine/jsonl.hpp"
#include "sstubmine/linediff.hpp"
#include "sstubmine/sstub.hpp"
#include "sstubmine/token.hpp"
#include "sstubmine/version.hpp"

namespace sstubmine {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() &&
           s.substr(s.size() - suffix.size()) == suffix;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = char(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Statement text cut out of the file by its span.
std::string slice_span(const std::string& text, const Span& span) {
    const auto lines = split_lines(text);
    if (span.start_line < 1 || span.end_line > int(lines.size()) ||
        span.start_line > span.end_line)
        return {};
    auto clamp = [](const std::string& line, int col) {
        return std::size_t(std::clamp(col, 0, int(line.size())));
    };
    const std::string& first = lines[std::size_t(span.start_line - 1)];
    if (span.start_line == span.end_line)
        return first.substr(clamp(first, span.start_col),
                            clamp(first, span.end_col) -
                                clamp(first, span.start_col));
    std::string out = first.substr(clamp(first, span.start_col));
    for (int l = span.start_line + 1; l < span.end_line; ++l) {
        out += '\n';
        out += lines[std::size_t(l - 1)];
    }
    const std::string& last = lines[std::size_t(span.end_line - 1)];
    out += '\n';
    out += last.substr(0, clamp(last, span.end_col));
    return out;
}

std::string normalized_tokens(const std::string& line) {
    try {
        return render(tokenize(line));
    } catch (const std::exception&) {
        return line;
    }
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)v);
    return buf;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> read_repo_list(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw RepoUnavailable("cannot read repo list: " + path);
    std::vector<std::string> repos;
    std::string line;
    while (std::getline(f, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        std::size_t start = line.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        line = line.substr(start);
        if (line.empty() || line[0] == '#') continue;
        repos.push_back(line);
    }
    return repos;
}

}  // namespace

const std::vector<std::string>& default_keywords() {
    static const std::vector<std::string> kWords = {
        "error", "bug",       "fix",   "issue",  "mistake",
        "incorrect", "fault", "defect", "flaw",  "type"};
    return kWords;
}

bool is_bugfix_message(std::string_view message,
                       const std::vector<std::string>& keywords) {
    std::set<std::string> wanted;
    for (const auto& k : keywords) wanted.insert(lower(k));
    std::string word;
    auto flush = [&] {
        const bool hit = !word.empty() && wanted.count(word) > 0;
        word.clear();
        return hit;
    };
    for (char raw : message) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c))
            word += char(std::tolower(c));
        else if (flush())
            return true;
    }
    return flush();
}

void scan_repository(const std::string& location, const MinerConfig& cfg,
                     const std::function<void(CommitCandidate&&)>& sink) {
    const auto cache =
        cfg.cache_dir.empty() ? default_cache_dir() : cfg.cache_dir;
    const auto dir = ensure_repo(location, cache);
    for (const auto& ci : list_commits(dir)) {
        if (ci.parents.size() != 1) continue;  // merges and roots

        std::vector<FileStatus> files;
        try {
            files = list_changed_files(dir, ci.sha);
        } catch (const CorruptObject&) {
            continue;
        }

        bool adds_or_removes = false;
        std::vector<std::string> modified;
        for (const auto& fs : files) {
            if (!ends_with(fs.path, ".py")) continue;
            if (fs.status == 'A' || fs.status == 'D') {
                adds_or_removes = true;
                break;
            }
            if (fs.status == 'M') modified.push_back(fs.path);
        }
        if (adds_or_removes || modified.empty()) continue;

        CommitCandidate cand;
        cand.project = location;
        cand.sha = ci.sha;
        cand.message = ci.message;
        cand.py_modified_total = int(modified.size());
        bool corrupt = false;
        for (const auto& path : modified) {
            std::string before, after;
            try {
                before = read_blob(dir, ci.parents[0], path);
                after = read_blob(dir, ci.sha, path);
            } catch (const CorruptObject&) {
                corrupt = true;
                break;
            }
            if (before.size() > cfg.max_file_bytes ||
                after.size() > cfg.max_file_bytes)
                continue;
            cand.files.push_back({path, std::move(before), std::move(after)});
        }
        if (corrupt || cand.files.empty()) continue;
        sink(std::move(cand));
    }
}

std::vector<CommitCandidate> scan_repository(const std::string& location,
                                             const MinerConfig& cfg) {
    std::vector<CommitCandidate> out;
    scan_repository(location, cfg,
                    [&](CommitCandidate&& c) { out.push_back(std::move(c)); });
    return out;
}

std::vector<MinedChange> select_single_statement(const CommitCandidate& c) {
    std::vector<MinedChange> out;
    for (const auto& f : c.files) {
        FileDiff d;
        try {
            d = diff_file(f.path, f.before_text, f.after_text);
        } catch (const BinaryContentError&) {
            return {};
        }
        const auto pair = single_line_edit(d);
        if (!pair) return {};  // not a 1-line commit: drop it entirely

        const auto before_tree = parse_fragment(f.before_text);
        const auto after_tree = parse_fragment(f.after_text);
        if (contains_error(before_tree.root) ||
            contains_error(after_tree.root))
            continue;
        const auto div = locate_divergence(before_tree, after_tree);
        if (!div) continue;
        const auto scope = statement_scope(*div, before_tree, after_tree);
        if (!scope) continue;

        MinedChange mc;
        mc.file_path = f.path;
        mc.diff = d.unified;
        mc.before_line = pair->before_line.text;
        mc.after_line = pair->after_line.text;
        mc.stmt_before.root = *scope->stmt_before;
        mc.stmt_before.source =
            slice_span(f.before_text, scope->stmt_before->span);
        mc.stmt_after.root = *scope->stmt_after;
        mc.stmt_after.source =
            slice_span(f.after_text, scope->stmt_after->span);
        out.push_back(std::move(mc));
    }
    return out;
}

std::optional<StatementPair> statement_pair_from_lines(
    const std::string& before_line, const std::string& after_line) {
    auto dedent = [](const std::string& s) {
        const auto pos = s.find_first_not_of(" \t");
        return pos == std::string::npos ? std::string() : s.substr(pos);
    };
    const auto before_src = dedent(before_line);
    const auto after_src = dedent(after_line);
    const auto before_tree = parse_fragment(before_src);
    const auto after_tree = parse_fragment(after_src);
    if (contains_error(before_tree.root) || contains_error(after_tree.root))
        return std::nullopt;
    const auto div = locate_divergence(before_tree, after_tree);
    if (!div) return std::nullopt;
    const auto scope = statement_scope(*div, before_tree, after_tree);
    if (!scope) return std::nullopt;
    StatementPair pair;
    pair.before.root = *scope->stmt_before;
    pair.before.source = slice_span(before_src, scope->stmt_before->span);
    pair.after.root = *scope->stmt_after;
    pair.after.source = slice_span(after_src, scope->stmt_after->span);
    return pair;
}

std::vector<BugRecord> mine_commit(const CommitCandidate& c,
                                   const MinerConfig& cfg) {
    auto changes = select_single_statement(c);
    const bool likely = is_bugfix_message(c.message, cfg.keywords);
    const bool single =
        c.py_modified_total == 1 && changes.size() == 1;

    std::vector<BugRecord> out;
    for (auto& mc : changes) {
        BugRecord r;
        r.project = c.project;
        r.commit_sha = c.sha;
        r.commit_message = c.message;
        r.file_path = std::move(mc.file_path);
        r.diff = std::move(mc.diff);
        r.before_line = std::move(mc.before_line);
        r.after_line = std::move(mc.after_line);
        r.script = diff_trees(mc.stmt_before, mc.stmt_after);
        r.edit_ops_count = int(r.script.ops.size());
        r.sstub_pattern = std::string(
            sstub_key(classify(mc.stmt_before, mc.stmt_after, r.script)));
        r.likely_bug = likely;
        r.in_tssb = single;
        AnalysisRecord view;
        view.before_line = r.before_line;
        view.after_line = r.after_line;
        r.is_typo = is_typo_fix(view);
        out.push_back(std::move(r));
    }
    return out;
}

std::string record_to_json(const BugRecord& r) {
    nlohmann::ordered_json j;
    j["project"] = r.project;
    j["commit_sha"] = r.commit_sha;
    j["commit_message"] = r.commit_message;
    j["file_path"] = r.file_path;
    j["diff"] = r.diff;
    j["before_line"] = r.before_line;
    j["after_line"] = r.after_line;
    j["sstub_pattern"] = r.sstub_pattern;
    j["edit_script"] = nlohmann::ordered_json::parse(to_json(r.script));
    j["edit_ops_count"] = r.edit_ops_count;
    j["likely_bug"] = r.likely_bug;
    j["in_tssb"] = r.in_tssb;
    j["is_typo"] = r.is_typo;
    return j.dump();
}

void canonical_sort(std::vector<BugRecord>& records) {
    std::sort(records.begin(), records.end(),
              [](const BugRecord& a, const BugRecord& b) {
                  return std::tie(a.project, a.commit_sha, a.file_path) <
                         std::tie(b.project, b.commit_sha, b.file_path);
              });
}

std::vector<BugRecord> dedup(std::vector<BugRecord> records) {
    std::set<std::tuple<std::string, std::string, std::string, std::string>>
        seen;
    std::vector<BugRecord> out;
    for (auto& r : records) {
        auto key = std::make_tuple(r.commit_sha, r.file_path,
                                   normalized_tokens(r.before_line),
                                   normalized_tokens(r.after_line));
        if (!seen.insert(std::move(key)).second) continue;
        out.push_back(std::move(r));
    }
    return out;
}

MineStats build_datasets(const MinerConfig& cfg) {
    namespace fs = std::filesystem;
    const auto started = utc_now();
    const auto repos = read_repo_list(cfg.repo_list_path);

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);

    const int workers =
        std::max(1, std::min<int>(cfg.workers, int(repos.size())));
    const auto nw = static_cast<std::size_t>(workers);
    std::vector<std::vector<BugRecord>> shards(nw);
    std::vector<std::vector<std::string>> failures(nw);
    std::vector<long long> scanned(nw, 0);
    std::vector<long long> found(nw, 0);

    auto work = [&](int w) {
        for (std::size_t i = std::size_t(w); i < repos.size();
             i += std::size_t(workers)) {
            try {
                scan_repository(repos[i], cfg, [&](CommitCandidate&& c) {
                    ++scanned[std::size_t(w)];
                    auto recs = mine_commit(c, cfg);
                    found[std::size_t(w)] += static_cast<long long>(recs.size());
                    for (auto& r : recs)
                        shards[std::size_t(w)].push_back(std::move(r));
                });
            } catch (const RepoUnavailable&) {
                failures[std::size_t(w)].push_back(repos[i]);
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }

    MineStats stats;
    std::vector<BugRecord> all;
    for (int w = 0; w < workers; ++w) {
        stats.commits_scanned += scanned[std::size_t(w)];
        stats.candidates += found[std::size_t(w)];
        for (auto& r : shards[std::size_t(w)]) all.push_back(std::move(r));
        for (auto& f : failures[std::size_t(w)])
            stats.failed_repos.push_back(std::move(f));
    }
    std::sort(stats.failed_repos.begin(), stats.failed_repos.end());
    stats.repos_ok = static_cast<long long>(repos.size()) -
                     static_cast<long long>(stats.failed_repos.size());

    canonical_sort(all);
    all = dedup(all);

    std::vector<std::string> ssc, ssb, tssb;
    for (const auto& r : all) {
        auto line = record_to_json(r);
        if (r.likely_bug) {
            if (r.in_tssb) tssb.push_back(line);
            ssb.push_back(line);
        }
        ssc.push_back(std::move(line));
    }
    stats.ssc = static_cast<long long>(ssc.size());
    stats.ssb = static_cast<long long>(ssb.size());
    stats.tssb = static_cast<long long>(tssb.size());

    const std::string ext = cfg.gzip ? ".jsonl.gz" : ".jsonl";
    const auto out = fs::path(cfg.output_dir);
    write_lines((out / ("ssc" + ext)).string(), ssc, cfg.gzip);
    write_lines((out / ("ssb" + ext)).string(), ssb, cfg.gzip);
    write_lines((out / ("tssb" + ext)).string(), tssb, cfg.gzip);

    std::string repo_list_bytes;
    {
        std::ifstream f(cfg.repo_list_path, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        repo_list_bytes = ss.str();
    }
    nlohmann::ordered_json manifest;
    manifest["tool"] = std::string(kToolName);
    manifest["version"] = std::string(kToolVersion);
    manifest["grammar_version"] = std::string(grammar_vocabulary_version());
    manifest["config"] = {{"repo_list", cfg.repo_list_path},
                          {"output_dir", cfg.output_dir},
                          {"keywords", cfg.keywords},
                          {"max_file_bytes", cfg.max_file_bytes}};
    manifest["repo_list_hash"] = hex64(fnv1a64(repo_list_bytes));
    manifest["repos"] = repos.size();
    manifest["repos_failed"] = stats.failed_repos;
    manifest["workers"] = workers;
    manifest["gzip"] = cfg.gzip;
    manifest["commits_scanned"] = stats.commits_scanned;
    manifest["candidates"] = stats.candidates;
    manifest["records"] = {{"ssc", stats.ssc},
                           {"ssb", stats.ssb},
                           {"tssb", stats.tssb}};
    manifest["started"] = started;
    manifest["finished"] = utc_now();
    write_text((out / "manifest.json").string(), manifest.dump(2) + "\n");

    return stats;
}

}  // namespace sstubmine
