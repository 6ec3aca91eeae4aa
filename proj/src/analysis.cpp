#include "sstubmine/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "sstubmine/sstub.hpp"
#include "sstubmine/token.hpp"

namespace sstubmine {

namespace {

const char* const kKindNames[] = {"INSERT", "MOVE", "UPDATE", "DELETE"};

std::string format_op(const std::string& kind, const std::string& node,
                      const std::string& parent) {
    if (kind == "INSERT") return "Insert(" + node + ", " + parent + ")";
    if (kind == "MOVE") return "Move(" + node + ", " + parent + ")";
    if (kind == "UPDATE") return "Update(" + node + ")";
    return "Delete(" + node + ")";
}

bool is_sstub_key(const std::string& key) {
    auto p = sstub_from_key(key);
    return p && is_sstub(*p);
}

// Fractional ranks: ties share the average of the positions they occupy.
std::vector<double> ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double shared = (double(i) + double(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = shared;
        i = j + 1;
    }
    return r;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Bare character payload of a string literal: prefix letters and the
// surrounding quotes stripped.
std::string string_content(const std::string& text) {
    std::size_t b = 0;
    while (b < text.size() && std::isalpha(static_cast<unsigned char>(text[b])))
        ++b;
    std::size_t e = text.size();
    if (b >= e) return {};
    const char q = text[b];
    if (q != '\'' && q != '"') return text.substr(b);
    std::size_t qlen = 1;
    if (e - b >= 6 && text[b + 1] == q && text[b + 2] == q) qlen = 3;
    b += qlen;
    if (e >= b + qlen) e -= qlen;
    if (e < b) e = b;
    return text.substr(b, e - b);
}

}  // namespace

AnalysisRecord record_from_json(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    AnalysisRecord r;
    r.sstub_pattern = j.at("sstub_pattern").get<std::string>();
    r.edit_ops_count = j.at("edit_ops_count").get<int>();
    r.before_line = j.at("before_line").get<std::string>();
    r.after_line = j.at("after_line").get<std::string>();
    for (const auto& op : j.at("edit_script")) {
        const auto kind = op.at("kind").get<std::string>();
        const auto node = op.at("node").get<std::string>();
        std::string parent;
        if (op.contains("parent") && op["parent"].is_string())
            parent = op["parent"].get<std::string>();
        r.op_types.insert(format_op(kind, node, parent));
    }
    return r;
}

FrequencyTable pattern_frequencies(const std::vector<AnalysisRecord>& records) {
    std::map<std::string, long long> counts;
    FrequencyTable t;
    t.total = static_cast<long long>(records.size());
    for (const auto& r : records) {
        ++counts[r.sstub_pattern];
        if (is_sstub_key(r.sstub_pattern)) ++t.sstub_total;
    }
    std::vector<FrequencyRow> patterns;
    std::vector<FrequencyRow> rest;
    for (const auto& [key, n] : counts) {
        FrequencyRow row{key, n, 0.0};
        if (is_sstub_key(key)) {
            row.percent = t.sstub_total > 0
                              ? 100.0 * double(n) / double(t.sstub_total)
                              : 0.0;
            patterns.push_back(std::move(row));
        } else {
            rest.push_back(std::move(row));
        }
    }
    auto by_count = [](const FrequencyRow& a, const FrequencyRow& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.pattern < b.pattern;
    };
    std::sort(patterns.begin(), patterns.end(), by_count);
    std::sort(rest.begin(), rest.end(), by_count);
    t.rows = std::move(patterns);
    t.rows.insert(t.rows.end(), rest.begin(), rest.end());
    return t;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2) throw DegenerateInput("spearman: need at least 2 points");
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = double(rx.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw DegenerateInput("spearman: constant input has no rank order");
    return sxy / std::sqrt(sxx * syy);
}

double jaccard_distance(const std::set<std::string>& a,
                        const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& s : a) common += b.count(s);
    const std::size_t uni = a.size() + b.size() - common;
    return 1.0 - double(common) / double(uni);
}

DistanceReport sstub_distance_report(
    const std::vector<AnalysisRecord>& records) {
    std::set<std::set<std::string>> reference;
    for (const auto& r : records)
        if (is_sstub_key(r.sstub_pattern)) reference.insert(r.op_types);
    if (reference.empty())
        throw EmptyReference("distance report: no SStuB records to compare against");
    DistanceReport rep;
    for (const auto& r : records) {
        if (is_sstub_key(r.sstub_pattern)) continue;
        double best = 1.0;
        for (const auto& ref : reference)
            best = std::min(best, jaccard_distance(r.op_types, ref));
        int bin = std::min(19, int(best * 20.0));
        ++rep.histogram[std::size_t(bin)];
        if (best == 0.0)
            ++rep.alike;
        else if (best == 1.0)
            ++rep.unrelated;
        else
            ++rep.related;
    }
    return rep;
}

LengthHistogram script_length_histogram(
    const std::vector<AnalysisRecord>& records) {
    LengthHistogram h;
    long long sum = 0;
    for (const auto& r : records) {
        ++h.bins[r.edit_ops_count];
        sum += r.edit_ops_count;
    }
    if (!records.empty()) h.mean = double(sum) / double(records.size());
    return h;
}

OpTypeTable operation_type_table(const std::vector<AnalysisRecord>& records,
                                 int k) {
    std::map<std::string, std::map<std::string, long long>> per_kind;
    for (const char* kind : kKindNames) per_kind[kind];
    for (const auto& r : records) {
        for (const auto& op : r.op_types) {
            std::string kind;
            if (op.rfind("Insert(", 0) == 0) kind = "INSERT";
            else if (op.rfind("Move(", 0) == 0) kind = "MOVE";
            else if (op.rfind("Update(", 0) == 0) kind = "UPDATE";
            else kind = "DELETE";
            ++per_kind[kind][op];
        }
    }
    OpTypeTable t;
    for (const auto& [kind, ops] : per_kind) {
        long long total = 0;
        std::vector<std::pair<std::string, long long>> entries(ops.begin(),
                                                               ops.end());
        for (const auto& [_, n] : entries) total += n;
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (int(entries.size()) > k) entries.resize(std::size_t(k));
        t.totals[kind] = total;
        t.top[kind] = std::move(entries);
    }
    return t;
}

int damerau_levenshtein(std::string_view a, std::string_view b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0) return int(m);
    if (m == 0) return int(n);
    std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = int(i);
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = int(j);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = a[i - 1] == b[j - 1] ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] + sub});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
                d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
        }
    }
    return d[n][m];
}

bool is_typo_fix(const AnalysisRecord& r) {
    const int dist = damerau_levenshtein(r.before_line, r.after_line);
    if (dist == 0 || dist > 2) return false;
    const auto before = tokenize(r.before_line);
    const auto after = tokenize(r.after_line);
    if (before.size() != after.size()) return true;
    std::size_t changed = before.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (!before[i].same_lexeme(after[i])) {
            changed = i;
            ++hits;
        }
    }
    if (hits != 1) return true;
    const Token& tb = before[changed];
    const Token& ta = after[changed];
    if (tb.kind == TokenKind::Name && ta.kind == TokenKind::Name)
        return std::min(tb.text.size(), ta.text.size()) >= 3;
    if (tb.kind == TokenKind::String && ta.kind == TokenKind::String) {
        const auto cb = string_content(tb.text);
        const auto ca = string_content(ta.text);
        return std::min(cb.size(), ca.size()) >= 3;
    }
    return true;
}

std::string frequencies_csv(const FrequencyTable& t) {
    std::string out = "pattern,count,percent\r\n";
    for (const auto& row : t.rows) {
        out += csv_field(row.pattern);
        out += ',';
        out += std::to_string(row.count);
        out += ',';
        out += fixed(row.percent, 4);
        out += "\r\n";
    }
    return out;
}

std::string spearman_json(double rho) {
    nlohmann::ordered_json j;
    j["spearman_rho"] = rho;
    return j.dump();
}

std::string distance_report_json(const DistanceReport& r) {
    nlohmann::ordered_json j;
    j["histogram"] = r.histogram;
    j["alike"] = r.alike;
    j["related"] = r.related;
    j["unrelated"] = r.unrelated;
    return j.dump();
}

std::string length_histogram_csv(const LengthHistogram& h) {
    std::string out = "ops,count\r\n";
    for (const auto& [len, n] : h.bins) {
        out += std::to_string(len);
        out += ',';
        out += std::to_string(n);
        out += "\r\n";
    }
    out += "mean,";
    out += fixed(h.mean, 4);
    out += "\r\n";
    return out;
}

std::string op_types_csv(const OpTypeTable& t) {
    std::string out = "kind,op_type,count\r\n";
    for (const char* kind : kKindNames) {
        const auto tot = t.totals.count(kind) ? t.totals.at(kind) : 0;
        out += kind;
        out += ",,";
        out += std::to_string(tot);
        out += "\r\n";
        if (!t.top.count(kind)) continue;
        for (const auto& [op, n] : t.top.at(kind)) {
            out += kind;
            out += ',';
            out += csv_field(op);
            out += ',';
            out += std::to_string(n);
            out += "\r\n";
        }
    }
    return out;
}

std::string typo_stats_json(const std::vector<AnalysisRecord>& records) {
    long long typos = 0;
    for (const auto& r : records)
        if (is_typo_fix(r)) ++typos;
    nlohmann::ordered_json j;
    j["records"] = records.size();
    j["typos"] = typos;
    j["rate"] = records.empty() ? 0.0 : double(typos) / double(records.size());
    return j.dump();
}

}  // namespace sstubmine
