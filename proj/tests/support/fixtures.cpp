#include "fixtures.hpp"

#include <fstream>
#include <stdexcept>

#include "sstubmine/editscript.hpp"
#include "sstubmine/gitio.hpp"
#include "sstubmine/sstub.hpp"
#include "sstubmine/syntax.hpp"
#include "sstubmine/token.hpp"

namespace fs = std::filesystem;

namespace testsupport {

const std::vector<Golden>& sstub_goldens() {
    static const std::vector<Golden> k = {
        {"x = a", "x = b", "change_identifier_used"},
        {"f(a, b)", "f(a, c)", "change_identifier_used"},
        {"return foo", "return bar", "change_identifier_used"},
        {"y = a + b", "y = a + c", "change_binary_operand"},
        {"if x < limit:\n    pass", "if x < bound:\n    pass",
         "change_binary_operand"},
        {"z = n % m", "z = n % k", "change_binary_operand"},
        {"f(x)", "f(x, y)", "same_function_more_args"},
        {"f()", "f(x)", "same_function_more_args"},
        {"obj.m(a)", "obj.m(a, b=1)", "same_function_more_args"},
        {"f(a)", "g(a)", "wrong_function_name"},
        {"self.foo(x)", "self.bar(x)", "wrong_function_name"},
        {"x = val", "x = int(val)", "add_function_around_expression"},
        {"return size", "return len(size)",
         "add_function_around_expression"},
        {"y = a + b", "y = abs(a + b)", "add_function_around_expression"},
        {"x = self._x", "x = self.a", "change_attribute_used"},
        {"v = obj.first", "v = obj.second", "change_attribute_used"},
        {"x = 1", "x = 2", "change_numeric_literal"},
        {"f(0)", "f(1)", "change_numeric_literal"},
        {"x = 0.5", "x = 0.25", "change_numeric_literal"},
        {"if a:\n    pass", "if a and b:\n    pass", "more_specific_if"},
        {"if ok():\n    pass", "if ok() and ready:\n    pass",
         "more_specific_if"},
        {"return s", "return s.strip()", "add_method_call"},
        {"x = data", "x = data.copy()", "add_method_call"},
        {"xs = [a]", "xs = [a, b]", "add_elements_to_iterable"},
        {"t = (1,)", "t = (1, 2)", "add_elements_to_iterable"},
        {"s = {1}", "s = {1, 2}", "add_elements_to_iterable"},
        {"d = {'a': 1}", "d = {'a': 1, 'b': 2}", "add_elements_to_iterable"},
        {"f(x, y)", "f(x)", "same_function_less_args"},
        {"g(a, b, c)", "g(a, c)", "same_function_less_args"},
        {"x = True", "x = False", "change_boolean_literal"},
        {"f(flag=False)", "f(flag=True)", "change_boolean_literal"},
        {"return x", "return x.value", "add_attribute_access"},
        {"y = obj", "y = obj.data", "add_attribute_access"},
        {"y = a + b", "y = a - b", "change_binary_operator"},
        {"if a < b:\n    pass", "if a <= b:\n    pass",
         "change_binary_operator"},
        {"x = c and d", "x = c or d", "change_binary_operator"},
        {"x += 1", "x -= 1", "change_binary_operator"},
        {"a.f(x)", "b.f(x)", "same_function_wrong_caller"},
        {"self.db.get(k)", "self.cache.get(k)", "same_function_wrong_caller"},
        {"if a:\n    pass", "if a or b:\n    pass", "less_specific_if"},
        {"if valid:\n    pass", "if valid or override:\n    pass",
         "less_specific_if"},
        {"f(key=1)", "f(kex=1)", "change_keyword_argument_used"},
        {"plot(color='r')", "plot(colour='r')",
         "change_keyword_argument_used"},
        {"x = -y", "x = +y", "change_unary_operator"},
        {"x = y", "x = not y", "change_unary_operator"},
        {"if not ok:\n    pass", "if ok:\n    pass", "change_unary_operator"},
        {"return compute(a, b)", "return compute(b, a)",
         "same_function_swap_args"},
        {"min(hi, lo)", "min(lo, hi)", "same_function_swap_args"},
        {"x = 1", "x = 1.0", "change_constant_type"},
        {"v = \"2\"", "v = 2", "change_constant_type"},
        {"x = None", "x = 0", "change_constant_type"},
        {"print('confg')", "print('config')", "NO_SSTUB_SINGLE_TOKEN"},
        {"x = a[1]", "x = a[1:]", "NO_SSTUB_SINGLE_TOKEN"},
        {"x = a(1) * b(2) + c", "x = b(2) * a(1) - d",
         "NO_SSTUB_SINGLE_STATEMENT"},
        {"x = [i for i in xs]", "y = prep([j for j in ys])",
         "NO_SSTUB_SINGLE_STATEMENT"},
    };
    return k;
}

const std::vector<Golden>& precedence_goldens() {
    static const std::vector<Golden> k = {
        // wrong function name also reads as an attribute change
        {"obj.f(x)", "obj.g(x)", "wrong_function_name"},
        // caller change also reads as an attribute change
        {"self.db.get(k)", "self.cache.get(k)", "same_function_wrong_caller"},
        // caller change also reads as an identifier change
        {"a.f(x)", "b.f(x)", "same_function_wrong_caller"},
        // operand change also reads as an identifier change
        {"y = a + b", "y = a + c", "change_binary_operand"},
        // keyword-name change also reads as an identifier change
        {"f(key=1)", "f(kex=1)", "change_keyword_argument_used"},
        // wrapping x in x.clean(x) reads as function-around and method-add
        {"y = x", "y = x.clean(x)", "add_function_around_expression"},
    };
    return k;
}

std::string classified_key(const std::string& before,
                           const std::string& after) {
    sstubmine::SyntaxTree ta = sstubmine::parse_fragment(before);
    sstubmine::SyntaxTree tb = sstubmine::parse_fragment(after);
    auto d = sstubmine::locate_divergence(ta, tb);
    if (!d)
        throw std::runtime_error("no divergence: " + before + " vs " + after);
    auto sc = sstubmine::statement_scope(*d, ta, tb);
    if (!sc)
        throw std::runtime_error("not statement-scoped: " + before + " vs " +
                                 after);
    sstubmine::SyntaxTree sa, sb;
    sa.root = *sc->stmt_before;
    sa.source = before;
    sb.root = *sc->stmt_after;
    sb.source = after;
    const auto script = sstubmine::diff_trees(sa, sb);
    return std::string(
        sstubmine::sstub_key(sstubmine::classify(sa, sb, script)));
}

namespace {

void run_git(const fs::path& repo, std::vector<std::string> args) {
    args.insert(args.begin(), "git");
    const auto res = sstubmine::run_command(args, repo.string());
    if (res.exit_code != 0)
        throw std::runtime_error("git failed in fixture: " + res.err);
}

void write_file(const fs::path& repo, const std::string& rel,
                const std::string& content) {
    std::ofstream f(repo / rel, std::ios::binary);
    f << content;
    if (!f) throw std::runtime_error("cannot write fixture file " + rel);
}

void edit_file(const fs::path& repo, const std::string& rel,
               const std::string& from, const std::string& to) {
    std::ifstream in(repo / rel, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    const auto pos = text.find(from);
    if (pos == std::string::npos)
        throw std::runtime_error("fixture edit target missing in " + rel +
                                 ": " + from);
    text.replace(pos, from.size(), to);
    write_file(repo, rel, text);
}

void commit_all(const fs::path& repo, const std::string& message) {
    run_git(repo, {"add", "-A"});
    run_git(repo, {"commit", "-q", "-m", message});
}

}  // namespace

void build_fixture_repo(const fs::path& repo) {
    fs::create_directories(repo);
    run_git(repo, {"init", "-q", "-b", "master"});
    run_git(repo, {"config", "user.email", "dev@example.com"});
    run_git(repo, {"config", "user.name", "Dev"});
    run_git(repo, {"config", "commit.gpgsign", "false"});

    write_file(repo, "f.py",
               "def main(rows):\n"
               "    total = compute(rows)\n"
               "    print('confg')\n"
               "    return total\n");
    write_file(repo, "h.py",
               "def helper(x):\n"
               "    return x + 1\n");
    write_file(repo, "util.py",
               "class Store:\n"
               "    def __init__(self):\n"
               "        self.vaule = 0\n"
               "\n"
               "def load(path):\n"
               "    data = read(path)\n"
               "    return data\n"
               "\n"
               "lo = 0; hi = 1\n");
    commit_all(repo, "Initial import");  // root, never scanned

    edit_file(repo, "f.py", "total = compute(rows)", "total = summarize(rows)");
    commit_all(repo, "Fix wrong accumulator");  // tssb

    edit_file(repo, "h.py", "return x + 1", "return x - 1");
    edit_file(repo, "util.py", "data = read(path)", "data = parse(path)");
    commit_all(repo, "Fix off by one in helpers");  // 2x ssb, not tssb

    edit_file(repo, "f.py", "return total", "return result");
    commit_all(repo, "Rename accumulator variable");  // ssc only

    edit_file(repo, "f.py", "total = summarize(rows)",
              "total = summarize(rows, True)");
    commit_all(repo, "Fix missing strict flag bug");  // tssb

    edit_file(repo, "util.py", "data = parse(path)",
              "data = parse(path.strip())");
    commit_all(repo, "Fix path handling error");  // tssb

    // File addition: the new .py drops the whole commit, including the
    // accompanying edit.
    write_file(repo, "new.py", "VERSION = 1\n");
    edit_file(repo, "util.py", "return data", "return data.copy()");
    commit_all(repo, "Fix data copy and add module");

    edit_file(repo, "h.py", "return x - 1", "return x  -  1");
    commit_all(repo, "Fix spacing only");  // token-identical, drops

    // Merge commit; the side change must stay invisible to the miner.
    run_git(repo, {"checkout", "-q", "-b", "side"});
    edit_file(repo, "f.py", "return result", "return max(result, 0)");
    commit_all(repo, "Clamp result on side branch");
    run_git(repo, {"checkout", "-q", "master"});
    run_git(repo, {"merge", "--no-ff", "-q", "side", "-m",
                   "Fix result clamping error"});

    edit_file(repo, "util.py", "lo = 0; hi = 1", "lo = 1; hi = 2");
    commit_all(repo, "Fix bounds error");  // two statements, drops

    edit_file(repo, "h.py", "return x  -  1", "return x  -  )");
    commit_all(repo, "Fix broken comparison");  // parse error, drops

    edit_file(repo, "f.py", "print('confg')", "print('config')");
    commit_all(repo, "Fix typo in config name");  // tssb, typo

    edit_file(repo, "util.py", "self.vaule = 0", "self.value = 0");
    commit_all(repo, "Fix attribute typo bug");  // tssb, typo
}

const std::vector<ExpectedRecord>& fixture_expected_ssc() {
    static const std::vector<ExpectedRecord> k = {
        {"Fix wrong accumulator", "f.py", "    total = compute(rows)",
         "    total = summarize(rows)", "wrong_function_name", true, true,
         false},
        {"Fix off by one in helpers", "h.py", "    return x + 1",
         "    return x - 1", "change_binary_operator", true, false, true},
        {"Fix off by one in helpers", "util.py", "    data = read(path)",
         "    data = parse(path)", "wrong_function_name", true, false, false},
        {"Rename accumulator variable", "f.py", "    return total",
         "    return result", "change_identifier_used", false, true, false},
        {"Fix missing strict flag bug", "f.py", "    total = summarize(rows)",
         "    total = summarize(rows, True)", "same_function_more_args", true,
         true, false},
        {"Fix path handling error", "util.py", "    data = parse(path)",
         "    data = parse(path.strip())", "add_method_call", true, true,
         false},
        {"Fix typo in config name", "f.py", "    print('confg')",
         "    print('config')", "NO_SSTUB_SINGLE_TOKEN", true, true, true},
        {"Fix attribute typo bug", "util.py", "        self.vaule = 0",
         "        self.value = 0", "change_attribute_used", true, true, true},
    };
    return k;
}

const std::vector<double>& tssb_pattern_counts() {
    static const std::vector<double> k = {237, 174, 150, 134, 117, 104, 97,
                                          68,  60,  57,  50,  37,  32,  29,
                                          25,  22,  20,  15,  8,   6};
    return k;
}

const std::vector<double>& ssb_pattern_counts() {
    static const std::vector<double> k = {659, 349, 457, 397, 244, 285, 275,
                                          121, 118, 175, 169, 82,  74,  71,
                                          46,  45,  59,  23,  77,  12};
    return k;
}

namespace {

int pick(std::mt19937& rng, int n) {
    return int(rng() % unsigned(n));
}

const char* name_of(std::mt19937& rng) {
    static const char* kNames[] = {"x",   "y",    "a",    "b",   "obj",
                                   "data", "val", "item", "cfg", "node"};
    return kNames[pick(rng, 10)];
}

std::string atom(std::mt19937& rng) {
    switch (pick(rng, 8)) {
        case 0:
        case 1:
        case 2:
            return name_of(rng);
        case 3: {
            static const char* kInts[] = {"0", "1", "2", "7", "42"};
            return kInts[pick(rng, 5)];
        }
        case 4:
            return "2.5";
        case 5: {
            static const char* kWords[] = {"'k'", "'msg'", "'id'"};
            return kWords[pick(rng, 3)];
        }
        case 6:
            return pick(rng, 2) ? "True" : "False";
        default:
            return "None";
    }
}

std::string expr(std::mt19937& rng, int depth);

std::string postfix(std::mt19937& rng, int depth) {
    if (depth <= 0) return atom(rng);
    switch (pick(rng, 10)) {
        case 0: {  // call, optionally through an attribute
            std::string out = name_of(rng);
            if (pick(rng, 2)) out += std::string(".") + name_of(rng);
            out += "(";
            const int args = pick(rng, 3);
            for (int i = 0; i < args; ++i) {
                if (i) out += ", ";
                out += expr(rng, depth - 1);
            }
            if (pick(rng, 3) == 0) {
                if (args) out += ", ";
                out += std::string(name_of(rng)) + "=" + atom(rng);
            }
            out += ")";
            return out;
        }
        case 1:
            return std::string(name_of(rng)) + "." + name_of(rng);
        case 2: {  // list
            std::string out = "[";
            const int n = pick(rng, 3);
            for (int i = 0; i < n; ++i) {
                if (i) out += ", ";
                out += atom(rng);
            }
            return out + "]";
        }
        case 3:  // tuple
            return "(" + atom(rng) + ", " + atom(rng) + ")";
        case 4:  // set or dict
            return pick(rng, 2) ? "{" + atom(rng) + ", " + atom(rng) + "}"
                                : "{'k': " + atom(rng) + "}";
        case 5:  // subscript
            return std::string(name_of(rng)) + "[" + atom(rng) + "]";
        default:
            return atom(rng);
    }
}

std::string prefix(std::mt19937& rng, int depth) {
    if (pick(rng, 8) == 0) return "-" + postfix(rng, depth);
    return postfix(rng, depth);
}

std::string sum(std::mt19937& rng, int depth) {
    std::string out = prefix(rng, depth);
    if (pick(rng, 3) == 0) {
        static const char* kOps[] = {" + ", " - ", " * ", " % "};
        out += kOps[pick(rng, 4)];
        out += prefix(rng, depth);
    }
    return out;
}

std::string test(std::mt19937& rng, int depth) {
    std::string out = sum(rng, depth);
    if (pick(rng, 4) == 0) {
        static const char* kOps[] = {" < ", " == ", " >= ", " != "};
        out += kOps[pick(rng, 4)];
        out += sum(rng, depth);
    }
    return out;
}

// "not" sits above comparisons; lower placements are not valid Python.
std::string clause(std::mt19937& rng, int depth) {
    std::string out = pick(rng, 8) == 0 ? "not " : "";
    return out + test(rng, depth);
}

std::string expr(std::mt19937& rng, int depth) {
    std::string out = clause(rng, depth);
    if (depth > 1 && pick(rng, 4) == 0) {
        out += pick(rng, 2) ? " and " : " or ";
        out += clause(rng, depth - 1);
    }
    return out;
}

std::string target(std::mt19937& rng) {
    std::string out = name_of(rng);
    const int r = pick(rng, 4);
    if (r == 0) out += std::string(".") + name_of(rng);
    if (r == 1) out += "[" + atom(rng) + "]";
    return out;
}

}  // namespace

std::string random_statement(std::mt19937& rng) {
    switch (pick(rng, 8)) {
        case 0:
        case 1:
        case 2:
            return target(rng) + " = " + expr(rng, 2);
        case 3: {
            static const char* kOps[] = {" += ", " -= ", " *= "};
            return std::string(name_of(rng)) + kOps[pick(rng, 3)] +
                   expr(rng, 1);
        }
        case 4:
            return "return " + expr(rng, 2);
        case 5:
            return "if " + expr(rng, 1) + ":\n    pass";
        case 6:
            return std::string("del ") + name_of(rng) + "[" + atom(rng) + "]";
        default:
            return target(rng) + " = " + expr(rng, 1);
    }
}

std::string inject_format_noise(const std::string& source, std::mt19937& rng) {
    const auto toks = sstubmine::tokenize(source);
    for (const auto& t : toks)
        if (t.text.find('\n') != std::string::npos) return source;

    std::vector<std::string> lines;
    std::string cur;
    for (char c : source) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    lines.push_back(cur);

    auto spaces = [&](int upto) { return std::string(pick(rng, upto + 1), ' '); };

    std::string out;
    std::size_t ti = 0;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (li && pick(rng, 4) == 0) out += spaces(2) + "\n";  // blank line
        const std::string& line = lines[li];
        std::size_t first = ti;
        while (ti < toks.size() && toks[ti].line == int(li) + 1) ++ti;
        if (first == ti) {
            out += line;
        } else {
            // Keep the indentation, widen the gaps between tokens.
            out += line.substr(0, std::size_t(toks[first].column));
            for (std::size_t k = first; k < ti; ++k) {
                out += toks[k].text;
                if (k + 1 < ti) {
                    const auto end =
                        std::size_t(toks[k].column) + toks[k].text.size();
                    out += line.substr(end, std::size_t(toks[k + 1].column) -
                                                end);
                    out += spaces(2);
                }
            }
            out += spaces(2);
            if (pick(rng, 4) == 0) out += " # noise";
        }
        if (li + 1 < lines.size()) out += "\n";
    }
    return out;
}

}  // namespace testsupport
