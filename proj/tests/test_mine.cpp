#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "sstubmine/gitio.hpp"
#include "sstubmine/jsonl.hpp"
#include "sstubmine/mine.hpp"
#include "support/fixtures.hpp"

using namespace sstubmine;
using testsupport::build_fixture_repo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("sstubmine_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

void run_git(const fs::path& repo, std::vector<std::string> args) {
    args.insert(args.begin(), "git");
    const auto res = run_command(args, repo.string());
    if (res.exit_code != 0)
        FAIL("git failed: ", res.err);
}

void write_file(const fs::path& repo, const std::string& rel,
                const std::string& content) {
    std::ofstream f(repo / rel, std::ios::binary);
    f << content;
}

// message, file, before, after, pattern, likely_bug, in_tssb, is_typo
using Expected = std::tuple<std::string, std::string, std::string, std::string,
                            std::string, bool, bool, bool>;

std::vector<Expected> expected_ssc() {
    std::vector<Expected> out;
    for (const auto& e : testsupport::fixture_expected_ssc())
        out.emplace_back(e.message, e.file, e.before, e.after, e.pattern,
                         e.likely_bug, e.in_tssb, e.is_typo);
    return out;
}

Expected key_of(const nlohmann::json& j) {
    return {j.at("commit_message").get<std::string>(),
            j.at("file_path").get<std::string>(),
            j.at("before_line").get<std::string>(),
            j.at("after_line").get<std::string>(),
            j.at("sstub_pattern").get<std::string>(),
            j.at("likely_bug").get<bool>(),
            j.at("in_tssb").get<bool>(),
            j.at("is_typo").get<bool>()};
}

std::multiset<Expected> load_keys(const std::string& path) {
    std::multiset<Expected> keys;
    for (const auto& line : read_lines(path))
        keys.insert(key_of(nlohmann::json::parse(line)));
    return keys;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

MinerConfig config_for(const TempDir& out, const fs::path& list_path,
                       int workers, bool gzip = false) {
    MinerConfig cfg;
    cfg.repo_list_path = list_path.string();
    cfg.output_dir = out.path.string();
    cfg.workers = workers;
    cfg.gzip = gzip;
    cfg.cache_dir = (out.path / "cache").string();
    return cfg;
}

}  // namespace

TEST_CASE("bugfix keyword matching is case-insensitive whole-word") {
    const auto& kw = default_keywords();
    REQUIRE(kw.size() == 10);
    CHECK(is_bugfix_message("Fix typo in parser", kw));
    CHECK(is_bugfix_message("Resolve issue #42", kw));
    CHECK(is_bugfix_message("BUG: wrong order", kw));
    CHECK(is_bugfix_message("the type annotation was wrong", kw));
    CHECK(is_bugfix_message("fix", kw));
    CHECK_FALSE(is_bugfix_message("Refactor module layout", kw));
    CHECK_FALSE(is_bugfix_message("Prototype of new feature", kw));
    CHECK_FALSE(is_bugfix_message("Prefix all names", kw));
    CHECK_FALSE(is_bugfix_message("Debugging helpers", kw));
    CHECK_FALSE(is_bugfix_message("", kw));
    CHECK(is_bugfix_message("Unrelated", {"unrelated"}));
    CHECK_FALSE(is_bugfix_message("Fix it", {"crash"}));
}

TEST_CASE("scan walks first-parent history and drops adds, merges, roots") {
    TempDir tmp("scan");
    const auto repo = tmp.path / "repo_a";
    build_fixture_repo(repo);

    MinerConfig cfg;
    cfg.cache_dir = (tmp.path / "cache").string();
    const auto candidates = scan_repository(repo.string(), cfg);

    // Ten candidates; the root, the merge, the side commit, and the commit
    // adding new.py never show.
    CHECK(candidates.size() == 10);
    std::multiset<std::string> messages;
    for (const auto& c : candidates) {
        messages.insert(c.message);
        CHECK(!c.files.empty());
        CHECK(c.py_modified_total >= int(c.files.size()));
        for (const auto& f : c.files) {
            CHECK(!f.before_text.empty());
            CHECK(!f.after_text.empty());
        }
    }
    CHECK(messages.count("Fix wrong accumulator") == 1);
    CHECK(messages.count("Fix spacing only") == 1);
    CHECK(messages.count("Initial import") == 0);
    CHECK(messages.count("Fix result clamping error") == 0);
    CHECK(messages.count("Clamp result on side branch") == 0);
    CHECK(messages.count("Fix data copy and add module") == 0);

    for (const auto& c : candidates) {
        if (c.message == "Fix off by one in helpers") {
            CHECK(c.files.size() == 2);
            CHECK(c.py_modified_total == 2);
            const auto recs = mine_commit(c, cfg);
            REQUIRE(recs.size() == 2);
            CHECK_FALSE(recs[0].in_tssb);
            CHECK_FALSE(recs[1].in_tssb);
        }
        if (c.message == "Fix spacing only")
            CHECK(select_single_statement(c).empty());
        if (c.message == "Fix bounds error")
            CHECK(select_single_statement(c).empty());
        if (c.message == "Fix broken comparison")
            CHECK(select_single_statement(c).empty());
    }
}

TEST_CASE("single-line gate failure in one file discards the whole commit") {
    CommitCandidate c;
    c.project = "demo";
    c.sha = "0d";
    c.message = "Fix both";
    c.py_modified_total = 2;
    c.files.push_back({"good.py", "x = 1\n", "x = 2\n"});
    c.files.push_back({"bad.py", "a = 1\n", "a = 1\nb = 2\nc = 3\n"});
    CHECK(select_single_statement(c).empty());

    // The same good file alone passes.
    c.files.pop_back();
    c.py_modified_total = 1;
    CHECK(select_single_statement(c).size() == 1);
}

TEST_CASE("end-to-end mining produces the expected datasets") {
    TempDir tmp("e2e");
    const auto repo = tmp.path / "repo_a";
    build_fixture_repo(repo);
    const auto list_path = tmp.path / "repos.txt";
    write_file(tmp.path, "repos.txt",
               "# fixture\n" + repo.string() + "\n\n");

    TempDir out("e2e_out");
    const auto cfg = config_for(out, list_path, 1);
    const auto stats = build_datasets(cfg);

    CHECK(stats.failed_repos.empty());
    CHECK(stats.repos_ok == 1);
    CHECK(stats.ssc == 8);
    CHECK(stats.ssb == 7);
    CHECK(stats.tssb == 5);

    const auto ssc = load_keys((out.path / "ssc.jsonl").string());
    const auto ssb = load_keys((out.path / "ssb.jsonl").string());
    const auto tssb = load_keys((out.path / "tssb.jsonl").string());

    std::multiset<Expected> want_ssc;
    std::multiset<Expected> want_ssb;
    std::multiset<Expected> want_tssb;
    for (const auto& e : expected_ssc()) {
        want_ssc.insert(e);
        if (std::get<5>(e)) want_ssb.insert(e);
        if (std::get<5>(e) && std::get<6>(e)) want_tssb.insert(e);
    }
    CHECK(ssc == want_ssc);
    CHECK(ssb == want_ssb);
    CHECK(tssb == want_tssb);

    // Subset chain by full record text.
    auto lines_of = [&](const char* name) {
        auto v = read_lines((out.path / name).string());
        return std::set<std::string>(v.begin(), v.end());
    };
    const auto ssc_lines = lines_of("ssc.jsonl");
    const auto ssb_lines = lines_of("ssb.jsonl");
    const auto tssb_lines = lines_of("tssb.jsonl");
    CHECK(std::includes(ssc_lines.begin(), ssc_lines.end(), ssb_lines.begin(),
                        ssb_lines.end()));
    CHECK(std::includes(ssb_lines.begin(), ssb_lines.end(), tssb_lines.begin(),
                        tssb_lines.end()));

    // Each tssb commit owns exactly one record in the whole corpus.
    std::map<std::string, int> per_sha;
    for (const auto& line : ssc_lines) {
        const auto j = nlohmann::json::parse(line);
        ++per_sha[j.at("commit_sha").get<std::string>()];
    }
    for (const auto& line : tssb_lines) {
        const auto j = nlohmann::json::parse(line);
        CHECK(per_sha.at(j.at("commit_sha").get<std::string>()) == 1);
    }

    const auto manifest =
        nlohmann::json::parse(slurp(out.path / "manifest.json"));
    CHECK(manifest.at("records").at("ssc").get<int>() == 8);
    CHECK(manifest.at("records").at("tssb").get<int>() == 5);
    CHECK(manifest.at("repos").get<int>() == 1);
    CHECK(manifest.at("repos_failed").empty());
    CHECK(manifest.at("repo_list_hash").get<std::string>().size() == 16);
}

TEST_CASE("records carry the frozen schema") {
    TempDir tmp("schema");
    const auto repo = tmp.path / "repo_a";
    build_fixture_repo(repo);
    const auto list_path = tmp.path / "repos.txt";
    write_file(tmp.path, "repos.txt", repo.string() + "\n");

    TempDir out("schema_out");
    build_datasets(config_for(out, list_path, 1));

    const std::vector<std::string> want_keys = {
        "project",     "commit_sha", "commit_message", "file_path",
        "diff",        "before_line", "after_line",    "sstub_pattern",
        "edit_script", "edit_ops_count", "likely_bug", "in_tssb",
        "is_typo"};
    for (const auto& line : read_lines((out.path / "ssc.jsonl").string())) {
        const auto j = nlohmann::ordered_json::parse(line);
        std::vector<std::string> keys;
        for (const auto& [k, v] : j.items()) keys.push_back(k);
        CHECK(keys == want_keys);
        CHECK(j.at("edit_script").is_array());
        CHECK(int(j.at("edit_script").size()) ==
              j.at("edit_ops_count").get<int>());
        for (const auto& op : j.at("edit_script")) {
            CHECK(op.contains("kind"));
            CHECK(op.contains("node"));
            CHECK(op.contains("pos"));
        }
        CHECK(j.at("diff").get<std::string>().find("@@") !=
              std::string::npos);
        CHECK(j.at("project").get<std::string>() == repo.string());
        CHECK(j.at("commit_sha").get<std::string>().size() == 40);
    }
}

TEST_CASE("fork clones deduplicate and workers do not change the bytes") {
    TempDir tmp("forks");
    const auto repo_a = tmp.path / "repo_a";
    build_fixture_repo(repo_a);
    const auto repo_b = tmp.path / "repo_b";
    run_git(tmp.path, {"clone", "-q", repo_a.string(), repo_b.string()});

    const auto list_path = tmp.path / "repos.txt";
    write_file(tmp.path, "repos.txt",
               repo_a.string() + "\n" + repo_b.string() + "\n");

    TempDir out1("forks_w1");
    TempDir out4("forks_w4");
    const auto s1 = build_datasets(config_for(out1, list_path, 1));
    const auto s4 = build_datasets(config_for(out4, list_path, 4));

    // Same shas from the clone collapse onto the first project.
    CHECK(s1.ssc == 8);
    CHECK(s1.ssb == 7);
    CHECK(s1.tssb == 5);
    for (const auto& line : read_lines((out1.path / "ssc.jsonl").string())) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.at("project").get<std::string>() == repo_a.string());
    }

    for (const char* name : {"ssc.jsonl", "ssb.jsonl", "tssb.jsonl"}) {
        CAPTURE(name);
        CHECK(slurp(out1.path / name) == slurp(out4.path / name));
        CHECK(!slurp(out1.path / name).empty());
    }
    CHECK(s4.ssc == s1.ssc);
    CHECK(s4.tssb == s1.tssb);
}

TEST_CASE("gzip outputs round-trip to the plain bytes") {
    TempDir tmp("gzip");
    const auto repo = tmp.path / "repo_a";
    build_fixture_repo(repo);
    const auto list_path = tmp.path / "repos.txt";
    write_file(tmp.path, "repos.txt", repo.string() + "\n");

    TempDir plain("gzip_plain");
    TempDir packed("gzip_packed");
    build_datasets(config_for(plain, list_path, 1));
    build_datasets(config_for(packed, list_path, 1, true));

    CHECK(fs::exists(packed.path / "ssc.jsonl.gz"));
    CHECK_FALSE(fs::exists(packed.path / "ssc.jsonl"));
    // The gzip magic must actually be there.
    const auto raw = slurp(packed.path / "ssc.jsonl.gz");
    REQUIRE(raw.size() > 2);
    CHECK((unsigned char)raw[0] == 0x1f);
    CHECK((unsigned char)raw[1] == 0x8b);

    const auto from_gz = read_lines((packed.path / "ssc.jsonl.gz").string());
    const auto from_plain = read_lines((plain.path / "ssc.jsonl").string());
    CHECK(from_gz == from_plain);
    CHECK(from_gz.size() == 8);
}

TEST_CASE("unavailable repos are reported, good ones still mine") {
    TempDir tmp("partial");
    const auto repo = tmp.path / "repo_a";
    build_fixture_repo(repo);
    const auto missing = (tmp.path / "no_such_repo").string();
    const auto list_path = tmp.path / "repos.txt";
    write_file(tmp.path, "repos.txt", missing + "\n" + repo.string() + "\n");

    TempDir out("partial_out");
    const auto stats = build_datasets(config_for(out, list_path, 2));
    CHECK(stats.repos_ok == 1);
    REQUIRE(stats.failed_repos.size() == 1);
    CHECK(stats.failed_repos[0] == missing);
    CHECK(stats.ssc == 8);

    CHECK_THROWS_AS(scan_repository(missing, MinerConfig{}), RepoUnavailable);
}

TEST_CASE("dedup keys on sha, path and normalized token lines") {
    auto make = [](std::string project, std::string sha, std::string path,
                   std::string before, std::string after) {
        BugRecord r;
        r.project = std::move(project);
        r.commit_sha = std::move(sha);
        r.file_path = std::move(path);
        r.before_line = std::move(before);
        r.after_line = std::move(after);
        return r;
    };
    std::vector<BugRecord> records;
    records.push_back(make("a", "111", "f.py", "x = 1", "x = 2"));
    // Fork twin: same sha, reformatted but token-identical lines.
    records.push_back(make("b", "111", "f.py", "x =  1", "x  = 2"));
    // Cherry-pick: same change, different sha survives.
    records.push_back(make("a", "222", "f.py", "x = 1", "x = 2"));
    // Same commit, second file survives.
    records.push_back(make("a", "111", "g.py", "x = 1", "x = 2"));

    const auto kept = dedup(std::move(records));
    REQUIRE(kept.size() == 3);
    CHECK(kept[0].project == "a");
    CHECK(kept[0].commit_sha == "111");
    CHECK(kept[1].commit_sha == "222");
    CHECK(kept[2].file_path == "g.py");
}

TEST_CASE("jsonl read and write round-trip in both forms") {
    TempDir tmp("jsonl");
    const std::vector<std::string> lines = {"{\"a\":1}", "{\"b\":\"x,y\"}",
                                            "{}"};
    const auto plain = (tmp.path / "x.jsonl").string();
    const auto packed = (tmp.path / "x.jsonl.gz").string();
    write_lines(plain, lines, false);
    write_lines(packed, lines, true);
    CHECK(read_lines(plain) == lines);
    CHECK(read_lines(packed) == lines);
    CHECK(slurp(plain) != slurp(packed));
    CHECK_THROWS_AS(read_lines((tmp.path / "absent.jsonl").string()),
                    OutputIOError);
    CHECK_THROWS_AS(
        write_lines((tmp.path / "nodir" / "x.jsonl").string(), lines, false),
        OutputIOError);
}
