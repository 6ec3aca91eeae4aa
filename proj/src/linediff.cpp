#include "sstubmine/linediff.hpp"

#include <algorithm>
#include <cstdint>

namespace sstubmine {

namespace {

constexpr int kContextLines = 3;
// DP cell budget for the trimmed middle; beyond this the middle is reported
// as one coarse replacement (such files can never be single-line edits).
constexpr size_t kMaxDpCells = size_t(16) << 20;

struct Chunk {
    bool equal = false;
    int a_start = 0, a_len = 0;  // before-line index range
    int b_start = 0, b_len = 0;  // after-line index range
};

std::string normalized_key(const std::string& line) {
    std::string key;
    for (const Token& t : tokenize(line)) {
        key += to_string(t.kind);
        key += '\x01';
        key += t.text;
        key += '\x02';
    }
    return key;
}

// Chunked alignment of keys[lo_a, hi_a) vs keys[lo_b, hi_b): LCS with
// earliest-line tie-breaking, delete-before-insert emission order.
void align_middle(const std::vector<std::string>& ka, int lo_a, int hi_a,
                  const std::vector<std::string>& kb, int lo_b, int hi_b,
                  std::vector<Chunk>& chunks) {
    auto push = [&](bool equal, int as, int al, int bs, int bl) {
        if (al == 0 && bl == 0) return;
        if (!chunks.empty() && chunks.back().equal == equal &&
            chunks.back().a_start + chunks.back().a_len == as &&
            chunks.back().b_start + chunks.back().b_len == bs) {
            chunks.back().a_len += al;
            chunks.back().b_len += bl;
            return;
        }
        chunks.push_back(Chunk{equal, as, al, bs, bl});
    };

    const size_t n = size_t(hi_a - lo_a), m = size_t(hi_b - lo_b);
    if (n == 0 || m == 0 || n * m > kMaxDpCells) {
        push(false, lo_a, int(n), lo_b, int(m));
        return;
    }

    // suf[i][j] = LCS length of a[i..n) vs b[j..m)
    std::vector<int32_t> suf((n + 1) * (m + 1), 0);
    auto at = [&](size_t i, size_t j) -> int32_t& { return suf[i * (m + 1) + j]; };
    for (size_t i = n; i-- > 0;) {
        for (size_t j = m; j-- > 0;) {
            if (ka[lo_a + i] == kb[lo_b + j])
                at(i, j) = at(i + 1, j + 1) + 1;
            else
                at(i, j) = std::max(at(i + 1, j), at(i, j + 1));
        }
    }
    size_t i = 0, j = 0;
    int del_start = 0, del_len = 0, ins_start = 0, ins_len = 0;
    auto flush_change = [&] {
        if (del_len || ins_len)
            push(false, lo_a + del_start, del_len, lo_b + ins_start, ins_len);
        del_len = ins_len = 0;
    };
    while (i < n || j < m) {
        if (i < n && j < m && ka[lo_a + i] == kb[lo_b + j] &&
            at(i, j) == at(i + 1, j + 1) + 1) {
            flush_change();
            push(true, lo_a + int(i), 1, lo_b + int(j), 1);
            ++i, ++j;
        } else if (j >= m || (i < n && at(i + 1, j) >= at(i, j + 1))) {
            if (del_len == 0) del_start = int(i);
            if (ins_len == 0) ins_start = int(j);
            ++del_len;
            ++i;
        } else {
            if (del_len == 0) del_start = int(i);
            if (ins_len == 0) ins_start = int(j);
            ++ins_len;
            ++j;
        }
    }
    flush_change();
}

std::vector<Chunk> align(const std::vector<std::string>& a_lines,
                         const std::vector<std::string>& b_lines) {
    std::vector<std::string> ka(a_lines.size()), kb(b_lines.size());
    for (size_t i = 0; i < a_lines.size(); ++i) ka[i] = normalized_key(a_lines[i]);
    for (size_t i = 0; i < b_lines.size(); ++i) kb[i] = normalized_key(b_lines[i]);

    int n = int(ka.size()), m = int(kb.size());
    int pre = 0;
    while (pre < n && pre < m && ka[pre] == kb[pre]) ++pre;
    int post = 0;
    while (post < n - pre && post < m - pre &&
           ka[n - 1 - post] == kb[m - 1 - post])
        ++post;

    std::vector<Chunk> chunks;
    if (pre) chunks.push_back(Chunk{true, 0, pre, 0, pre});
    align_middle(ka, pre, n - post, kb, pre, m - post, chunks);
    if (post) {
        Chunk tail{true, n - post, post, m - post, post};
        if (!chunks.empty() && chunks.back().equal) {
            chunks.back().a_len += post;
            chunks.back().b_len += post;
        } else {
            chunks.push_back(tail);
        }
    }
    return chunks;
}

void render_hunk_range(std::string& out, int start, int len) {
    // 0-length ranges report the line before the hunk; 1-length ranges omit
    // the count, matching POSIX diff -u.
    if (len == 1) {
        out += std::to_string(start + 1);
    } else {
        out += std::to_string(len == 0 ? start : start + 1);
        out += ',';
        out += std::to_string(len);
    }
}

std::string render_unified(const std::string& path,
                           const std::vector<std::string>& a_lines,
                           bool a_nl,
                           const std::vector<std::string>& b_lines,
                           bool b_nl,
                           const std::vector<Chunk>& chunks_in) {
    auto a_last_missing = [&](int i) {
        return !a_nl && i == int(a_lines.size()) - 1;
    };
    auto b_last_missing = [&](int j) {
        return !b_nl && j == int(b_lines.size()) - 1;
    };
    auto pair_same_bytes = [&](int i, int j) {
        return a_lines[i] == b_lines[j] && a_last_missing(i) == b_last_missing(j);
    };

    // The rendering must reproduce the after-file byte for byte, so pairs the
    // token diff matched but whose bytes differ (formatting or comment edits,
    // trailing-newline changes) render as remove+add instead of context.
    std::vector<Chunk> chunks;
    auto push_chunk = [&](Chunk c) {
        if (!chunks.empty() && chunks.back().equal == c.equal &&
            chunks.back().a_start + chunks.back().a_len == c.a_start) {
            chunks.back().a_len += c.a_len;
            chunks.back().b_len += c.b_len;
        } else {
            chunks.push_back(c);
        }
    };
    for (const Chunk& c : chunks_in) {
        if (!c.equal) {
            push_chunk(c);
            continue;
        }
        for (int k = 0; k < c.a_len;) {
            bool same = pair_same_bytes(c.a_start + k, c.b_start + k);
            int run = k + 1;
            while (run < c.a_len &&
                   pair_same_bytes(c.a_start + run, c.b_start + run) == same)
                ++run;
            push_chunk(Chunk{same, c.a_start + k, run - k, c.b_start + k, run - k});
            k = run;
        }
    }

    bool any_change = false;
    for (const Chunk& c : chunks)
        if (!c.equal) any_change = true;
    if (!any_change) return "";

    std::string out = "--- a/" + path + "\n+++ b/" + path + "\n";

    struct Hunk {
        std::vector<size_t> change_idx;
        int a_lo, a_hi, b_lo, b_hi;  // line index ranges incl. context
    };
    std::vector<Hunk> hunks;
    for (size_t ci = 0; ci < chunks.size(); ++ci) {
        const Chunk& c = chunks[ci];
        if (c.equal) continue;
        int a_lo = std::max(0, c.a_start - kContextLines);
        int a_hi = std::min<int>(int(a_lines.size()), c.a_start + c.a_len + kContextLines);
        int b_lo = std::max(0, c.b_start - kContextLines);
        int b_hi = std::min<int>(int(b_lines.size()), c.b_start + c.b_len + kContextLines);
        if (!hunks.empty() && a_lo <= hunks.back().a_hi) {
            hunks.back().change_idx.push_back(ci);
            hunks.back().a_hi = a_hi;
            hunks.back().b_hi = b_hi;
        } else {
            hunks.push_back(Hunk{{ci}, a_lo, a_hi, b_lo, b_hi});
        }
    }

    auto emit_line = [&](char sign, const std::string& text, bool missing_nl) {
        out += sign;
        out += text;
        out += '\n';
        if (missing_nl) out += "\\ No newline at end of file\n";
    };
    auto a_missing_nl = [&](int idx) {
        return !a_nl && idx == int(a_lines.size()) - 1;
    };
    auto b_missing_nl = [&](int idx) {
        return !b_nl && idx == int(b_lines.size()) - 1;
    };

    for (const Hunk& h : hunks) {
        out += "@@ -";
        render_hunk_range(out, h.a_lo, h.a_hi - h.a_lo);
        out += " +";
        render_hunk_range(out, h.b_lo, h.b_hi - h.b_lo);
        out += " @@\n";
        int a_pos = h.a_lo;
        int b_pos = h.b_lo;
        for (size_t ci : h.change_idx) {
            const Chunk& c = chunks[ci];
            for (; a_pos < c.a_start; ++a_pos, ++b_pos)
                emit_line(' ', a_lines[a_pos], a_missing_nl(a_pos));
            for (int k = 0; k < c.a_len; ++k, ++a_pos)
                emit_line('-', a_lines[a_pos], a_missing_nl(a_pos));
            for (int k = 0; k < c.b_len; ++k, ++b_pos)
                emit_line('+', b_lines[b_pos], b_missing_nl(b_pos));
        }
        for (; a_pos < h.a_hi; ++a_pos, ++b_pos)
            emit_line(' ', a_lines[a_pos], a_missing_nl(a_pos));
    }
    return out;
}

}  // namespace

std::vector<std::string> split_lines(const std::string& text,
                                     bool* had_trailing_newline) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start < text.size()) {
        size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            start = text.size();
            if (had_trailing_newline) *had_trailing_newline = false;
            return lines;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (had_trailing_newline) *had_trailing_newline = true;
    return lines;
}

FileDiff diff_file(const std::string& path, const std::string& before,
                   const std::string& after) {
    if (before.find('\0') != std::string::npos ||
        after.find('\0') != std::string::npos)
        throw BinaryContentError(path + ": NUL byte in content");

    bool a_nl = true, b_nl = true;
    std::vector<std::string> a_lines = split_lines(before, &a_nl);
    std::vector<std::string> b_lines = split_lines(after, &b_nl);

    std::vector<Chunk> chunks = align(a_lines, b_lines);

    FileDiff d;
    d.path = path;
    for (const Chunk& c : chunks) {
        if (c.equal) continue;
        for (int k = 0; k < c.a_len; ++k)
            d.removed.push_back(NumberedLine{c.a_start + k + 1, a_lines[c.a_start + k]});
        for (int k = 0; k < c.b_len; ++k)
            d.added.push_back(NumberedLine{c.b_start + k + 1, b_lines[c.b_start + k]});
    }
    d.unified = render_unified(path, a_lines, a_nl, b_lines, b_nl, chunks);
    return d;
}

std::optional<ChangedLinePair> single_line_edit(const FileDiff& d) {
    if (d.removed.size() != 1 || d.added.size() != 1) return std::nullopt;
    // With exactly one unmatched line per side, every other line is matched
    // in order, so the two lines occupy aligned gaps iff their numbers agree.
    if (d.removed[0].line_no != d.added[0].line_no) return std::nullopt;
    return ChangedLinePair{d.removed[0], d.added[0]};
}

}  // namespace sstubmine
