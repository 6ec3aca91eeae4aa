#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sstubmine {

struct OutputIOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One line per entry, newline-terminated, UTF-8. With gzip=true the file is
// a gzip stream of the same bytes. Written atomically (temp file + rename).
void write_lines(const std::string& path,
                 const std::vector<std::string>& lines, bool gzip);

// Reads either form; gzip is detected from the stream, not the name.
std::vector<std::string> read_lines(const std::string& path);

// Atomic whole-file write (temp file + rename).
void write_text(const std::string& path, const std::string& text);

}  // namespace sstubmine
