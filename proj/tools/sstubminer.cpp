#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "sstubmine/analysis.hpp"
#include "sstubmine/editscript.hpp"
#include "sstubmine/gitio.hpp"
#include "sstubmine/jsonl.hpp"
#include "sstubmine/mine.hpp"
#include "sstubmine/sstub.hpp"
#include "sstubmine/syntax.hpp"
#include "sstubmine/version.hpp"

namespace fs = std::filesystem;
using namespace sstubmine;

namespace {

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kPartial = 2;
constexpr int kUsage = 64;

void log_line(const char* level, const char* stage, const std::string& msg,
              const std::string& repo = {}) {
    if (repo.empty())
        std::fprintf(stderr, "level=%s stage=%s msg=\"%s\"\n", level, stage,
                     msg.c_str());
    else
        std::fprintf(stderr, "level=%s stage=%s repo=\"%s\" msg=\"%s\"\n",
                     level, stage, repo.c_str(), msg.c_str());
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_run_manifest(const fs::path& dir, const std::string& command,
                        const std::string& started,
                        nlohmann::ordered_json extra) {
    nlohmann::ordered_json m;
    m["tool"] = std::string(kToolName);
    m["version"] = std::string(kToolVersion);
    m["grammar_version"] = std::string(grammar_vocabulary_version());
    m["command"] = command;
    m["started"] = started;
    m["finished"] = utc_now();
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_text((dir / "manifest.json").string(), m.dump(2) + "\n");
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto pos = s.find(',', start);
        if (pos == std::string::npos) pos = s.size();
        if (pos > start) out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

struct MineArgs {
    std::string repos;
    std::string out;
    std::string keywords;
    std::string cache_dir;
    int workers = 1;
    std::size_t max_file_bytes = 2u << 20;
    bool gzip = false;
};

int cmd_mine(const MineArgs& a) {
    MinerConfig cfg;
    cfg.repo_list_path = a.repos;
    cfg.output_dir = a.out;
    cfg.workers = a.workers;
    cfg.max_file_bytes = a.max_file_bytes;
    cfg.gzip = a.gzip;
    cfg.cache_dir = a.cache_dir;
    if (!a.keywords.empty()) cfg.keywords = split_csv(a.keywords);

    MineStats stats;
    try {
        stats = build_datasets(cfg);
    } catch (const std::exception& e) {
        log_line("error", "mine", e.what());
        return kFatal;
    }
    for (const auto& repo : stats.failed_repos)
        log_line("warn", "mine", "repository unavailable, skipped", repo);
    log_line("info", "mine",
             "commits=" + std::to_string(stats.commits_scanned) +
                 " ssc=" + std::to_string(stats.ssc) +
                 " ssb=" + std::to_string(stats.ssb) +
                 " tssb=" + std::to_string(stats.tssb));
    return stats.failed_repos.empty() ? kOk : kPartial;
}

struct ClassifyArgs {
    std::string in;
    std::string out;
};

// Rebuilds sstub_pattern / edit_script / edit_ops_count / is_typo from the
// stored line pair; rows whose lines no longer classify keep their fields.
int cmd_classify(const ClassifyArgs& a) {
    const auto started = utc_now();
    std::vector<std::string> lines;
    try {
        lines = read_lines(a.in);
    } catch (const std::exception& e) {
        log_line("error", "classify", e.what());
        return kFatal;
    }

    std::vector<std::string> out_lines;
    long long reclassified = 0, kept = 0, bad = 0;
    for (const auto& line : lines) {
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(line);
            const auto before = j.at("before_line").get<std::string>();
            const auto after = j.at("after_line").get<std::string>();
            AnalysisRecord view;
            view.before_line = before;
            view.after_line = after;
            j["is_typo"] = is_typo_fix(view);
            if (const auto pair = statement_pair_from_lines(before, after)) {
                const auto script = diff_trees(pair->before, pair->after);
                j["sstub_pattern"] = std::string(
                    sstub_key(classify(pair->before, pair->after, script)));
                j["edit_script"] = nlohmann::json::parse(to_json(script));
                j["edit_ops_count"] = script.ops.size();
                ++reclassified;
            } else {
                ++kept;
            }
            out_lines.push_back(j.dump());
        } catch (const std::exception&) {
            ++bad;
        }
    }

    const bool gzip = a.out.size() > 3 &&
                      a.out.compare(a.out.size() - 3, 3, ".gz") == 0;
    try {
        write_lines(a.out, out_lines, gzip);
        write_run_manifest(fs::path(a.out).parent_path(), "classify", started,
                           {{"input", a.in},
                            {"output", a.out},
                            {"rows", lines.size()},
                            {"reclassified", reclassified},
                            {"kept", kept},
                            {"skipped", bad}});
    } catch (const std::exception& e) {
        log_line("error", "classify", e.what());
        return kFatal;
    }
    if (bad > 0) {
        log_line("warn", "classify",
                 "skipped " + std::to_string(bad) + " malformed row(s)");
        return kPartial;
    }
    return kOk;
}

struct EditScriptArgs {
    std::string before;
    std::string after;
    bool as_json = false;
};

int cmd_editscript(const EditScriptArgs& a) {
    auto slurp = [](const std::string& path, std::string& out) {
        std::ifstream f(path, std::ios::binary);
        if (!f) return false;
        out.assign((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
        return true;
    };
    std::string before, after;
    if (!slurp(a.before, before) || !slurp(a.after, after)) {
        log_line("error", "editscript", "cannot read input files");
        return kFatal;
    }
    const auto script =
        diff_trees(parse_fragment(before), parse_fragment(after));
    if (a.as_json) {
        std::printf("%s\n", to_json(script).c_str());
        return kOk;
    }
    for (const auto& op : script.ops) {
        std::printf("%s %s", std::string(edit_kind_name(op.kind)).c_str(),
                    op.node_label.c_str());
        if (!op.parent_label.empty())
            std::printf(" parent=%s pos=%d", op.parent_label.c_str(),
                        op.position);
        if (op.has_value) std::printf(" value=%s", op.value.c_str());
        std::printf("\n");
    }
    std::printf("ops=%zu\n", script.ops.size());
    return kOk;
}

struct AnalyzeArgs {
    std::string in;
    std::string report;
    std::string compare;
    int top = 5;
};

std::vector<AnalysisRecord> load_records(const std::string& path,
                                         long long* bad) {
    std::vector<AnalysisRecord> records;
    for (const auto& line : read_lines(path)) {
        try {
            records.push_back(record_from_json(line));
        } catch (const std::exception&) {
            ++*bad;
        }
    }
    return records;
}

int cmd_analyze(const AnalyzeArgs& a) {
    const auto started = utc_now();
    long long bad = 0;
    std::vector<AnalysisRecord> records;
    try {
        records = load_records(a.in, &bad);
    } catch (const std::exception& e) {
        log_line("error", "analyze", e.what());
        return kFatal;
    }

    std::error_code ec;
    fs::create_directories(a.report, ec);
    const fs::path dir(a.report);
    nlohmann::ordered_json extra{{"input", a.in},
                                 {"rows", records.size()},
                                 {"skipped", bad}};
    try {
        write_text((dir / "frequencies.csv").string(),
                   frequencies_csv(pattern_frequencies(records)));
        write_text((dir / "length_histogram.csv").string(),
                   length_histogram_csv(script_length_histogram(records)));
        write_text((dir / "op_types.csv").string(),
                   op_types_csv(operation_type_table(records, a.top)));
        write_text((dir / "typo_stats.json").string(),
                   typo_stats_json(records) + "\n");
        try {
            write_text((dir / "distance_report.json").string(),
                       distance_report_json(sstub_distance_report(records)) +
                           "\n");
        } catch (const EmptyReference&) {
            log_line("warn", "analyze",
                     "no SStuB records; distance report skipped");
        }
        if (!a.compare.empty()) {
            long long bad2 = 0;
            const auto other = load_records(a.compare, &bad2);
            bad += bad2;
            std::map<std::string, double> mine_counts, other_counts;
            for (const auto& r : records) ++mine_counts[r.sstub_pattern];
            for (const auto& r : other) ++other_counts[r.sstub_pattern];
            std::vector<double> x, y;
            for (int i = 0; i <= int(SstubPattern::ChangeConstantType); ++i) {
                const std::string key(sstub_key(SstubPattern(i)));
                x.push_back(mine_counts[key]);
                y.push_back(other_counts[key]);
            }
            try {
                write_text((dir / "spearman.json").string(),
                           spearman_json(spearman(x, y)) + "\n");
            } catch (const DegenerateInput& e) {
                log_line("warn", "analyze", e.what());
            }
            extra["compare"] = a.compare;
        }
        write_run_manifest(dir, "analyze", started, extra);
    } catch (const std::exception& e) {
        log_line("error", "analyze", e.what());
        return kFatal;
    }
    if (bad > 0) {
        log_line("warn", "analyze",
                 "skipped " + std::to_string(bad) + " malformed row(s)");
        return kPartial;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mines git histories for single-statement Python bug fixes"};
    app.require_subcommand(0, 1);
    bool show_version = false;
    app.add_flag("--version", show_version,
                 "print tool and grammar versions");

    MineArgs mine_args;
    auto* mine = app.add_subcommand(
        "mine", "walk repositories and emit ssc/ssb/tssb jsonlines");
    mine->add_option("--repos", mine_args.repos,
                     "newline-delimited repository list")
        ->required();
    mine->add_option("--out", mine_args.out, "output directory")->required();
    mine->add_option("--workers", mine_args.workers, "parallel repo workers")
        ->check(CLI::PositiveNumber);
    mine->add_option("--keywords", mine_args.keywords,
                     "comma-separated bug keywords (defaults built in)");
    mine->add_option("--max-file-bytes", mine_args.max_file_bytes,
                     "per-file size cap");
    mine->add_option("--cache-dir", mine_args.cache_dir,
                     "clone cache (default: SSTUB_CACHE_DIR)");
    mine->add_flag("--gzip", mine_args.gzip, "gzip the jsonlines outputs");

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand(
        "classify", "re-derive patterns and edit scripts for a dataset");
    classify->add_option("--in", classify_args.in, "input jsonl[.gz]")
        ->required();
    classify->add_option("--out", classify_args.out, "output jsonl[.gz]")
        ->required();

    EditScriptArgs edit_args;
    auto* edit = app.add_subcommand(
        "editscript", "print the AST edit script between two Python files");
    edit->add_option("--before", edit_args.before, "file before the change")
        ->required();
    edit->add_option("--after", edit_args.after, "file after the change")
        ->required();
    edit->add_flag("--json", edit_args.as_json, "emit the script as JSON");

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand(
        "analyze", "compute dataset statistics into a report directory");
    analyze->add_option("--in", analyze_args.in, "input jsonl[.gz]")
        ->required();
    analyze->add_option("--report", analyze_args.report, "report directory")
        ->required();
    analyze->add_option("--compare", analyze_args.compare,
                        "second dataset for rank correlation");
    analyze->add_option("--top", analyze_args.top,
                        "entries per kind in op_types.csv")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (show_version) {
        std::printf("%s %s (grammar %s)\n", std::string(kToolName).c_str(),
                    std::string(kToolVersion).c_str(),
                    std::string(grammar_vocabulary_version()).c_str());
        return kOk;
    }
    if (mine->parsed()) return cmd_mine(mine_args);
    if (classify->parsed()) return cmd_classify(classify_args);
    if (edit->parsed()) return cmd_editscript(edit_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args);

    std::fprintf(stderr, "%s\n", app.help().c_str());
    return kUsage;
}
