#pragma once

#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sstubmine {

// One dataset row as the statistics see it.
struct AnalysisRecord {
    std::string sstub_pattern;
    std::set<std::string> op_types;  // formatted abstract operation types
    int edit_ops_count = 0;
    std::string before_line;
    std::string after_line;
};

// Parses a jsonlines row; throws nlohmann exceptions on malformed input.
AnalysisRecord record_from_json(const std::string& line);

struct FrequencyRow {
    std::string pattern;
    long long count = 0;
    double percent = 0.0;  // of the SStuB total; 0 for fallback rows
};

// Pattern rows sorted by count descending (name ascending on ties), the
// two fallback rows appended last. Percents use only SStuB records as the
// 100% base.
struct FrequencyTable {
    std::vector<FrequencyRow> rows;
    long long sstub_total = 0;
    long long total = 0;
};

FrequencyTable pattern_frequencies(const std::vector<AnalysisRecord>& records);

struct DegenerateInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rank correlation with fractional ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// 1 - |a∩b| / |a∪b|; 0 when both sets are empty.
double jaccard_distance(const std::set<std::string>& a,
                        const std::set<std::string>& b);

struct DistanceReport {
    std::array<long long, 20> histogram{};  // over [0,1], d=1 in the last bin
    long long alike = 0;      // d == 0
    long long related = 0;    // 0 < d < 1
    long long unrelated = 0;  // d == 1
};

struct EmptyReference : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Minimum Jaccard distance of every NonSStuB record's op-type set to the
// distinct op-type sets of the SStuB records.
DistanceReport sstub_distance_report(
    const std::vector<AnalysisRecord>& records);

struct LengthHistogram {
    std::map<int, long long> bins;  // script length -> record count
    double mean = 0.0;
};

LengthHistogram script_length_histogram(
    const std::vector<AnalysisRecord>& records);

struct OpTypeTable {
    // kind name (INSERT/MOVE/UPDATE/DELETE) -> total operations
    std::map<std::string, long long> totals;
    // kind name -> most frequent abstract types, count descending
    std::map<std::string, std::vector<std::pair<std::string, long long>>> top;
};

OpTypeTable operation_type_table(const std::vector<AnalysisRecord>& records,
                                 int k = 5);

// Optimal string alignment distance: unit-cost insert, delete, substitute
// and adjacent transposition.
int damerau_levenshtein(std::string_view a, std::string_view b);

// Distance <= 2 between the changed lines; single identifier or string
// substitutions additionally need content length >= 3 (string quotes and
// prefixes excluded).
bool is_typo_fix(const AnalysisRecord& r);

// Report renderers. CSV is RFC 4180 (CRLF, quoted as needed).
std::string frequencies_csv(const FrequencyTable& t);
std::string spearman_json(double rho);
std::string distance_report_json(const DistanceReport& r);
std::string length_histogram_csv(const LengthHistogram& h);
std::string op_types_csv(const OpTypeTable& t);
std::string typo_stats_json(const std::vector<AnalysisRecord>& records);

}  // namespace sstubmine
