#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sstubmine/token.hpp"

namespace sstubmine {

struct BinaryContentError : std::runtime_error {
    explicit BinaryContentError(const std::string& what)
        : std::runtime_error(what) {}
};

// One numbered source line. line_no is 1-based.
struct NumberedLine {
    int line_no = 0;
    std::string text;
};

struct FileDiff {
    std::string path;
    std::vector<NumberedLine> removed;
    std::vector<NumberedLine> added;
    std::string unified;

    bool empty() const { return removed.empty() && added.empty(); }
};

struct ChangedLinePair {
    NumberedLine before_line;
    NumberedLine after_line;
};

// Line alignment via LCS over token-normalized equality: lines whose token
// sequences match are paired and never reported. Throws BinaryContentError
// when either input contains a NUL byte.
FileDiff diff_file(const std::string& path, const std::string& before,
                   const std::string& after);

// The pair iff the diff is exactly one removed and one added line occupying
// aligned positions. Pure insertions/deletions and multi-line changes yield
// nullopt.
std::optional<ChangedLinePair> single_line_edit(const FileDiff& d);

// Splits into lines without terminators; reports whether the text ended in a
// newline.
std::vector<std::string> split_lines(const std::string& text,
                                     bool* had_trailing_newline = nullptr);

}  // namespace sstubmine
