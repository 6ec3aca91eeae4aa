#include "sstubmine/jsonl.hpp"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace sstubmine {

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines, bool gzip) {
    const std::string tmp = path + ".tmp";
    if (gzip) {
        gzFile f = gzopen(tmp.c_str(), "wb");
        if (!f) throw OutputIOError("cannot open " + tmp);
        for (const auto& line : lines) {
            if ((!line.empty() &&
                 gzwrite(f, line.data(), unsigned(line.size())) !=
                     int(line.size())) ||
                gzwrite(f, "\n", 1) != 1) {
                gzclose(f);
                std::remove(tmp.c_str());
                throw OutputIOError("short write to " + tmp);
            }
        }
        if (gzclose(f) != Z_OK) {
            std::remove(tmp.c_str());
            throw OutputIOError("cannot finish " + tmp);
        }
    } else {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw OutputIOError("cannot open " + tmp);
        for (const auto& line : lines) f << line << '\n';
        f.flush();
        if (!f) {
            std::remove(tmp.c_str());
            throw OutputIOError("short write to " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw OutputIOError("cannot move " + tmp + " to " + path);
    }
}

void write_text(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw OutputIOError("cannot open " + tmp);
        f << text;
        f.flush();
        if (!f) {
            std::remove(tmp.c_str());
            throw OutputIOError("short write to " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw OutputIOError("cannot move " + tmp + " to " + path);
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    // zlib reads plain files transparently, so one path covers both forms.
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw OutputIOError("cannot open " + path);
    std::string data;
    char buf[65536];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) data.append(buf, std::size_t(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw OutputIOError("cannot read " + path);

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < data.size()) {
        auto pos = data.find('\n', start);
        if (pos == std::string::npos) pos = data.size();
        lines.push_back(data.substr(start, pos - start));
        start = pos + 1;
    }
    return lines;
}

}  // namespace sstubmine
