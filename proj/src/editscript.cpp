#include <algorithm>
#include <cstddef>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sstubmine/editscript.hpp"
#include "sstubmine/syntax.hpp"

namespace sstubmine {

namespace {

constexpr int kMinHeight = 2;
constexpr double kMinDice = 0.5;
constexpr int kMaxSize = 100;
constexpr long long kInf = 1'000'000'000LL;

struct Flat {
    const SyntaxNode* node = nullptr;
    int parent = -1;
    std::vector<int> kids;
    int height = 1;
    int size = 1;
    std::size_t hash = 0;
};

int flatten_into(const SyntaxNode& n, int parent, std::vector<Flat>& out) {
    int id = int(out.size());
    out.push_back(Flat{});
    out[std::size_t(id)].node = &n;
    out[std::size_t(id)].parent = parent;
    int h = 0, sz = 1;
    // Incremental restatement of iso_hash so flattening stays linear.
    std::size_t hash = std::hash<std::string>{}(n.label);
    hash = hash * 1000003u ^ std::hash<std::string>{}(n.value);
    for (const SyntaxNode& c : n.children) {
        int cid = flatten_into(c, id, out);
        out[std::size_t(id)].kids.push_back(cid);
        h = std::max(h, out[std::size_t(cid)].height);
        sz += out[std::size_t(cid)].size;
        hash = hash * 1000003u ^ out[std::size_t(cid)].hash;
    }
    out[std::size_t(id)].height = h + 1;
    out[std::size_t(id)].size = sz;
    out[std::size_t(id)].hash = hash;
    return id;
}

std::vector<Flat> flatten(const SyntaxNode& root) {
    std::vector<Flat> out;
    flatten_into(root, -1, out);
    return out;
}

void postorder_ids(const std::vector<Flat>& t, int id, std::vector<int>& out) {
    for (int c : t[std::size_t(id)].kids) postorder_ids(t, c, out);
    out.push_back(id);
}

// ---------------------------------------------------------------------
// Zhang-Shasha optimal mapping for the bottom-up recovery pass.
// Relabel costs: 0 for identical label+value, 1 for same label, forbidden
// otherwise, so recovered pairs always agree on labels.
class ZsMatcher {
public:
    ZsMatcher(const std::vector<Flat>& a, int roota, const std::vector<Flat>& b,
              int rootb)
        : a_(a), b_(b) {
        build(a_, roota, post1_, lml1_);
        build(b_, rootb, post2_, lml2_);
        m_ = int(post1_.size()) - 1;
        n_ = int(post2_.size()) - 1;
        td_.assign(std::size_t(m_) + 1,
                   std::vector<long long>(std::size_t(n_) + 1, 0));
        compute();
    }

    // Pairs of flat ids in the two trees forming one optimal mapping.
    std::vector<std::pair<int, int>> mapping() {
        std::vector<std::pair<int, int>> out;
        if (m_ > 0 && n_ > 0) backtrack(m_, n_, out);
        return out;
    }

private:
    const std::vector<Flat>& a_;
    const std::vector<Flat>& b_;
    std::vector<int> post1_, post2_;  // 1-based local postorder -> flat id
    std::vector<int> lml1_, lml2_;    // leftmost leaf, 1-based
    int m_ = 0, n_ = 0;
    std::vector<std::vector<long long>> td_;

    static void build(const std::vector<Flat>& t, int root,
                      std::vector<int>& post, std::vector<int>& lml) {
        std::vector<int> order;
        postorder_ids(t, root, order);
        post.assign(order.size() + 1, -1);
        lml.assign(order.size() + 1, 0);
        // Subtree flat ids are contiguous in [root, root + size), so a
        // dense table maps flat id -> 1-based local postorder index.
        std::vector<int> local(std::size_t(t[std::size_t(root)].size), 0);
        for (std::size_t k = 0; k < order.size(); ++k) {
            post[k + 1] = order[k];
            local[std::size_t(order[k] - root)] = int(k + 1);
        }
        for (int i = 1; i <= int(order.size()); ++i) {
            const Flat& f = t[std::size_t(post[std::size_t(i)])];
            if (f.kids.empty())
                lml[std::size_t(i)] = i;
            else
                lml[std::size_t(i)] =
                    lml[std::size_t(local[std::size_t(f.kids.front() - root)])];
        }
    }

    long long rel(int i, int j) const {
        const SyntaxNode* x = a_[std::size_t(post1_[std::size_t(i)])].node;
        const SyntaxNode* y = b_[std::size_t(post2_[std::size_t(j)])].node;
        if (x->label != y->label) return kInf;
        return x->value == y->value ? 0 : 1;
    }

    std::vector<int> keyroots(const std::vector<int>& lml, int count) const {
        std::vector<int> latest(std::size_t(count) + 1, 0);
        for (int i = 1; i <= count; ++i)
            latest[std::size_t(lml[std::size_t(i)])] = i;
        std::vector<int> out;
        for (int i = 1; i <= count; ++i)
            if (latest[std::size_t(lml[std::size_t(i)])] == i)
                out.push_back(i);
        return out;
    }

    // Fills fd for the forests rooted at (i, j); fd is offset so that
    // fd[0][0] corresponds to (lml(i)-1, lml(j)-1).
    void forest_dist(int i, int j,
                     std::vector<std::vector<long long>>& fd) const {
        int li = lml1_[std::size_t(i)], lj = lml2_[std::size_t(j)];
        int rows = i - li + 2, cols = j - lj + 2;
        fd.assign(std::size_t(rows),
                  std::vector<long long>(std::size_t(cols), 0));
        for (int x = 1; x < rows; ++x) fd[std::size_t(x)][0] = x;
        for (int y = 1; y < cols; ++y) fd[0][std::size_t(y)] = y;
        for (int x = li; x <= i; ++x) {
            for (int y = lj; y <= j; ++y) {
                int rx = x - li + 1, ry = y - lj + 1;
                long long del = fd[std::size_t(rx - 1)][std::size_t(ry)] + 1;
                long long ins = fd[std::size_t(rx)][std::size_t(ry - 1)] + 1;
                if (lml1_[std::size_t(x)] == li &&
                    lml2_[std::size_t(y)] == lj) {
                    long long sub =
                        fd[std::size_t(rx - 1)][std::size_t(ry - 1)] +
                        rel(x, y);
                    fd[std::size_t(rx)][std::size_t(ry)] =
                        std::min({del, ins, sub});
                } else {
                    int px = lml1_[std::size_t(x)] - li;
                    int py = lml2_[std::size_t(y)] - lj;
                    long long sub = fd[std::size_t(px)][std::size_t(py)] +
                                    td_[std::size_t(x)][std::size_t(y)];
                    fd[std::size_t(rx)][std::size_t(ry)] =
                        std::min({del, ins, sub});
                }
            }
        }
    }

    void compute() {
        std::vector<std::vector<long long>> fd;
        for (int i : keyroots(lml1_, m_)) {
            for (int j : keyroots(lml2_, n_)) {
                forest_dist(i, j, fd);
                int li = lml1_[std::size_t(i)], lj = lml2_[std::size_t(j)];
                for (int x = li; x <= i; ++x)
                    for (int y = lj; y <= j; ++y)
                        if (lml1_[std::size_t(x)] == li &&
                            lml2_[std::size_t(y)] == lj)
                            td_[std::size_t(x)][std::size_t(y)] =
                                fd[std::size_t(x - li + 1)]
                                  [std::size_t(y - lj + 1)];
            }
        }
    }

    void backtrack(int i, int j, std::vector<std::pair<int, int>>& out) const {
        std::vector<std::vector<long long>> fd;
        forest_dist(i, j, fd);
        int li = lml1_[std::size_t(i)], lj = lml2_[std::size_t(j)];
        int x = i, y = j;
        while (x >= li && y >= lj) {
            int rx = x - li + 1, ry = y - lj + 1;
            long long cur = fd[std::size_t(rx)][std::size_t(ry)];
            bool x_complete = lml1_[std::size_t(x)] == li;
            bool y_complete = lml2_[std::size_t(y)] == lj;
            if (x_complete && y_complete &&
                rel(x, y) < kInf &&
                cur == fd[std::size_t(rx - 1)][std::size_t(ry - 1)] +
                           rel(x, y)) {
                out.emplace_back(post1_[std::size_t(x)],
                                 post2_[std::size_t(y)]);
                --x;
                --y;
            } else if (!(x_complete && y_complete) &&
                       cur == fd[std::size_t(lml1_[std::size_t(x)] - li)]
                                [std::size_t(lml2_[std::size_t(y)] - lj)] +
                                  td_[std::size_t(x)][std::size_t(y)]) {
                backtrack(x, y, out);
                x = lml1_[std::size_t(x)] - 1;
                y = lml2_[std::size_t(y)] - 1;
            } else if (cur == fd[std::size_t(rx - 1)][std::size_t(ry)] + 1) {
                --x;
            } else {
                --y;
            }
        }
    }
};

// ---------------------------------------------------------------------
class Matcher {
public:
    Matcher(const SyntaxTree& before, const SyntaxTree& after)
        : a_(flatten(before.root)), b_(flatten(after.root)) {
        m_ab_.assign(a_.size(), -1);
        m_ba_.assign(b_.size(), -1);
    }

    NodeMapping run() {
        top_down();
        bottom_up();
        NodeMapping m;
        for (int i = 0; i < int(a_.size()); ++i)
            if (m_ab_[std::size_t(i)] != -1)
                m.pairs.emplace_back(i, m_ab_[std::size_t(i)]);
        return m;
    }

private:
    std::vector<Flat> a_, b_;
    std::vector<int> m_ab_, m_ba_;

    bool mapped_a(int i) const { return m_ab_[std::size_t(i)] != -1; }
    bool mapped_b(int j) const { return m_ba_[std::size_t(j)] != -1; }

    void map_pair(int i, int j) {
        m_ab_[std::size_t(i)] = j;
        m_ba_[std::size_t(j)] = i;
    }

    void map_subtrees(int i, int j) {
        map_pair(i, j);
        const std::vector<int>& ka = a_[std::size_t(i)].kids;
        const std::vector<int>& kb = b_[std::size_t(j)].kids;
        for (std::size_t k = 0; k < ka.size(); ++k)
            map_subtrees(ka[k], kb[k]);
    }

    bool in_subtree(const std::vector<Flat>& t, int root, int id) const {
        return id >= root && id < root + t[std::size_t(root)].size;
    }

    double dice(int i, int j) const {
        if (i < 0 || j < 0) return 0.0;
        int da = a_[std::size_t(i)].size - 1;
        int db = b_[std::size_t(j)].size - 1;
        if (da + db == 0) return 0.0;
        int common = 0;
        for (int x = i + 1; x < i + a_[std::size_t(i)].size; ++x) {
            int y = m_ab_[std::size_t(x)];
            if (y != -1 && in_subtree(b_, j, y)) ++common;
        }
        return 2.0 * common / (da + db);
    }

    void top_down() {
        std::vector<int> l1{0}, l2{0};
        std::vector<std::pair<int, int>> iso;
        auto max_h = [](const std::vector<int>& l, const std::vector<Flat>& t) {
            int h = 0;
            for (int id : l) h = std::max(h, t[std::size_t(id)].height);
            return h;
        };
        auto open_max = [](std::vector<int>& l, const std::vector<Flat>& t,
                           int h) {
            std::vector<int> keep, opened;
            for (int id : l) {
                if (t[std::size_t(id)].height == h)
                    opened.push_back(id);
                else
                    keep.push_back(id);
            }
            for (int id : opened)
                for (int c : t[std::size_t(id)].kids) keep.push_back(c);
            l = std::move(keep);
        };

        while (true) {
            int h1 = max_h(l1, a_), h2 = max_h(l2, b_);
            if (std::min(h1, h2) < kMinHeight) break;
            if (h1 > h2) {
                open_max(l1, a_, h1);
                continue;
            }
            if (h2 > h1) {
                open_max(l2, b_, h2);
                continue;
            }
            std::vector<int> ca, cb, ra, rb;
            for (int id : l1)
                (a_[std::size_t(id)].height == h1 ? ca : ra).push_back(id);
            for (int id : l2)
                (b_[std::size_t(id)].height == h2 ? cb : rb).push_back(id);
            std::vector<bool> founda(ca.size(), false), foundb(cb.size(),
                                                               false);
            for (std::size_t x = 0; x < ca.size(); ++x) {
                for (std::size_t y = 0; y < cb.size(); ++y) {
                    if (a_[std::size_t(ca[x])].hash !=
                        b_[std::size_t(cb[y])].hash)
                        continue;
                    if (!isomorphic(*a_[std::size_t(ca[x])].node,
                                    *b_[std::size_t(cb[y])].node))
                        continue;
                    iso.emplace_back(ca[x], cb[y]);
                    founda[x] = foundb[y] = true;
                }
            }
            for (std::size_t x = 0; x < ca.size(); ++x)
                if (!founda[x])
                    for (int c : a_[std::size_t(ca[x])].kids) ra.push_back(c);
            for (std::size_t y = 0; y < cb.size(); ++y)
                if (!foundb[y])
                    for (int c : b_[std::size_t(cb[y])].kids) rb.push_back(c);
            l1 = std::move(ra);
            l2 = std::move(rb);
        }

        std::vector<int> cnt_a(a_.size(), 0), cnt_b(b_.size(), 0);
        for (const auto& [i, j] : iso) {
            ++cnt_a[std::size_t(i)];
            ++cnt_b[std::size_t(j)];
        }
        std::vector<std::pair<int, int>> ambiguous;
        for (const auto& [i, j] : iso) {
            if (cnt_a[std::size_t(i)] == 1 && cnt_b[std::size_t(j)] == 1)
                map_subtrees(i, j);
            else
                ambiguous.emplace_back(i, j);
        }
        std::stable_sort(ambiguous.begin(), ambiguous.end(),
                         [&](const std::pair<int, int>& p,
                             const std::pair<int, int>& q) {
                             double dp = dice(a_[std::size_t(p.first)].parent,
                                              b_[std::size_t(p.second)].parent);
                             double dq = dice(a_[std::size_t(q.first)].parent,
                                              b_[std::size_t(q.second)].parent);
                             if (dp != dq) return dp > dq;
                             return p < q;
                         });
        for (const auto& [i, j] : ambiguous)
            if (!mapped_a(i) && !mapped_b(j)) map_subtrees(i, j);
    }

    void last_chance(int i, int j) {
        if (std::max(a_[std::size_t(i)].size, b_[std::size_t(j)].size) >=
            kMaxSize)
            return;
        ZsMatcher zs(a_, i, b_, j);
        for (const auto& [x, y] : zs.mapping()) {
            if (mapped_a(x) || mapped_b(y)) continue;
            if (a_[std::size_t(x)].node->label !=
                b_[std::size_t(y)].node->label)
                continue;
            map_pair(x, y);
        }
    }

    void bottom_up() {
        std::vector<int> order;
        postorder_ids(a_, 0, order);
        for (int i : order) {
            if (i == 0) {
                // Script generation needs the roots paired with each other.
                if (m_ab_[0] != 0) {
                    if (m_ab_[0] != -1) {
                        m_ba_[std::size_t(m_ab_[0])] = -1;
                        m_ab_[0] = -1;
                    }
                    if (m_ba_[0] != -1) {
                        m_ab_[std::size_t(m_ba_[0])] = -1;
                        m_ba_[0] = -1;
                    }
                    map_pair(0, 0);
                }
                last_chance(0, 0);
                break;
            }
            if (mapped_a(i) || a_[std::size_t(i)].kids.empty()) continue;
            // Candidate containers: unmapped same-label ancestors of the
            // partners of i's mapped descendants.
            std::vector<int> cands;
            std::vector<bool> seen(b_.size(), false);
            for (int x = i + 1; x < i + a_[std::size_t(i)].size; ++x) {
                int y = m_ab_[std::size_t(x)];
                if (y == -1) continue;
                for (int anc = b_[std::size_t(y)].parent; anc != -1;
                     anc = b_[std::size_t(anc)].parent) {
                    if (seen[std::size_t(anc)]) break;
                    seen[std::size_t(anc)] = true;
                    if (!mapped_b(anc) &&
                        b_[std::size_t(anc)].node->label ==
                            a_[std::size_t(i)].node->label)
                        cands.push_back(anc);
                }
            }
            std::sort(cands.begin(), cands.end());
            int best = -1;
            double best_dice = 0.0;
            for (int c : cands) {
                double d = dice(i, c);
                if (d > best_dice) {
                    best_dice = d;
                    best = c;
                }
            }
            if (best != -1 && best_dice >= kMinDice) {
                last_chance(i, best);
                if (!mapped_a(i) && !mapped_b(best)) map_pair(i, best);
            }
        }
    }
};

// ---------------------------------------------------------------------
// Chawathe-style script generation over a mutable working copy.
class ScriptBuilder {
public:
    ScriptBuilder(const SyntaxTree& before, const SyntaxTree& after,
                  const NodeMapping& m)
        : b_(flatten(after.root)) {
        std::vector<Flat> a = flatten(before.root);
        nodes_.resize(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            nodes_[i].label = a[i].node->label;
            nodes_[i].value = a[i].node->value;
            nodes_[i].parent = a[i].parent;
            nodes_[i].kids = a[i].kids;
        }
        n_before_ = int(a.size());
        partner2_.assign(b_.size(), -1);
        inorder2_.assign(b_.size(), false);
        for (const auto& [i, j] : m.pairs) {
            nodes_[std::size_t(i)].partner = j;
            partner2_[std::size_t(j)] = i;
        }
        std::vector<int> post;
        postorder_ids(a, 0, post);
        delete_order_ = std::move(post);
    }

    EditScript run() {
        EditScript s;
        std::deque<int> queue{0};
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop_front();
            for (int c : b_[std::size_t(x)].kids) queue.push_back(c);
            process(x, s);
        }
        for (int i : delete_order_) {
            if (nodes_[std::size_t(i)].partner != -1) continue;
            EditOp op;
            op.kind = EditKind::Delete;
            op.node_label = nodes_[std::size_t(i)].label;
            int p = nodes_[std::size_t(i)].parent;
            op.parent_label = p == -1 ? "" : nodes_[std::size_t(p)].label;
            op.position = index_in_parent(i);
            op.path = path_of(i);
            s.ops.push_back(std::move(op));
            unlink(i);
        }
        return s;
    }

private:
    struct WNode {
        std::string label, value;
        int parent = -1;
        std::vector<int> kids;
        int partner = -1;
        bool inorder = false;
    };

    std::vector<Flat> b_;
    std::vector<WNode> nodes_;
    std::vector<int> partner2_;
    std::vector<bool> inorder2_;
    std::vector<int> delete_order_;
    int n_before_ = 0;

    int index_in_parent(int w) const {
        int p = nodes_[std::size_t(w)].parent;
        if (p == -1) return 0;
        const std::vector<int>& k = nodes_[std::size_t(p)].kids;
        for (std::size_t i = 0; i < k.size(); ++i)
            if (k[i] == w) return int(i);
        return 0;
    }

    std::vector<int> path_of(int w) const {
        std::vector<int> path;
        for (int cur = w; nodes_[std::size_t(cur)].parent != -1;
             cur = nodes_[std::size_t(cur)].parent)
            path.push_back(index_in_parent(cur));
        std::reverse(path.begin(), path.end());
        return path;
    }

    void unlink(int w) {
        int p = nodes_[std::size_t(w)].parent;
        if (p == -1) return;
        std::vector<int>& k = nodes_[std::size_t(p)].kids;
        k.erase(std::find(k.begin(), k.end(), w));
        nodes_[std::size_t(w)].parent = -1;
    }

    void link(int w, int parent, int pos) {
        std::vector<int>& k = nodes_[std::size_t(parent)].kids;
        k.insert(k.begin() + pos, w);
        nodes_[std::size_t(w)].parent = parent;
    }

    // Chawathe's findPos: position after the partner of the rightmost
    // in-order left sibling of x, or 0 when there is none.
    int find_pos(int x) const {
        int y = b_[std::size_t(x)].parent;
        int v = -1;
        for (int s : b_[std::size_t(y)].kids) {
            if (s == x) break;
            if (inorder2_[std::size_t(s)]) v = s;
        }
        if (v == -1) return 0;
        return index_in_parent(partner2_[std::size_t(v)]) + 1;
    }

    void process(int x, EditScript& s) {
        if (partner2_[std::size_t(x)] == -1) {
            int y = b_[std::size_t(x)].parent;
            int z = partner2_[std::size_t(y)];
            int k = find_pos(x);
            int w = int(nodes_.size());
            nodes_.push_back(WNode{});
            nodes_[std::size_t(w)].label = b_[std::size_t(x)].node->label;
            nodes_[std::size_t(w)].value = b_[std::size_t(x)].node->value;
            link(w, z, k);
            nodes_[std::size_t(w)].partner = x;
            partner2_[std::size_t(x)] = w;
            nodes_[std::size_t(w)].inorder = true;
            inorder2_[std::size_t(x)] = true;

            EditOp op;
            op.kind = EditKind::Insert;
            op.node_label = nodes_[std::size_t(w)].label;
            op.parent_label = nodes_[std::size_t(z)].label;
            op.position = k;
            op.value = nodes_[std::size_t(w)].value;
            op.has_value = !op.value.empty();
            op.dest_path = path_of(z);
            op.dest_path.push_back(k);
            s.ops.push_back(std::move(op));
        } else if (x != 0) {
            int w = partner2_[std::size_t(x)];
            if (nodes_[std::size_t(w)].value != b_[std::size_t(x)].node->value) {
                EditOp op;
                op.kind = EditKind::Update;
                op.node_label = nodes_[std::size_t(w)].label;
                int p = nodes_[std::size_t(w)].parent;
                op.parent_label = p == -1 ? "" : nodes_[std::size_t(p)].label;
                op.position = index_in_parent(w);
                op.value = b_[std::size_t(x)].node->value;
                op.has_value = true;
                op.path = path_of(w);
                s.ops.push_back(std::move(op));
                nodes_[std::size_t(w)].value = b_[std::size_t(x)].node->value;
            }
            int y = b_[std::size_t(x)].parent;
            int z = partner2_[std::size_t(y)];
            if (nodes_[std::size_t(w)].parent != z) {
                EditOp op;
                op.kind = EditKind::Move;
                op.node_label = nodes_[std::size_t(w)].label;
                op.parent_label = nodes_[std::size_t(z)].label;
                op.path = path_of(w);
                unlink(w);
                int k = find_pos(x);
                op.position = k;
                op.dest_path = path_of(z);
                op.dest_path.push_back(k);
                link(w, z, k);
                nodes_[std::size_t(w)].inorder = true;
                inorder2_[std::size_t(x)] = true;
                s.ops.push_back(std::move(op));
            }
        }
        align_children(partner2_[std::size_t(x)], x, s);
    }

    void align_children(int w, int x, EditScript& s) {
        for (int c : nodes_[std::size_t(w)].kids)
            nodes_[std::size_t(c)].inorder = false;
        for (int c : b_[std::size_t(x)].kids)
            inorder2_[std::size_t(c)] = false;

        std::vector<int> s1, s2;
        for (int c : nodes_[std::size_t(w)].kids) {
            int pc = nodes_[std::size_t(c)].partner;
            if (pc != -1 && b_[std::size_t(pc)].parent == x) s1.push_back(c);
        }
        for (int c : b_[std::size_t(x)].kids) {
            int pc = partner2_[std::size_t(c)];
            if (pc != -1 && nodes_[std::size_t(pc)].parent == w)
                s2.push_back(c);
        }

        // LCS over partner equality.
        std::vector<std::vector<int>> dp(
            s1.size() + 1, std::vector<int>(s2.size() + 1, 0));
        for (std::size_t i = s1.size(); i-- > 0;) {
            for (std::size_t j = s2.size(); j-- > 0;) {
                if (nodes_[std::size_t(s1[i])].partner == s2[j])
                    dp[i][j] = dp[i + 1][j + 1] + 1;
                else
                    dp[i][j] = std::max(dp[i + 1][j], dp[i][j + 1]);
            }
        }
        std::vector<bool> in_lcs2(b_.size(), false);
        {
            std::size_t i = 0, j = 0;
            while (i < s1.size() && j < s2.size()) {
                if (nodes_[std::size_t(s1[i])].partner == s2[j]) {
                    nodes_[std::size_t(s1[i])].inorder = true;
                    inorder2_[std::size_t(s2[j])] = true;
                    in_lcs2[std::size_t(s2[j])] = true;
                    ++i;
                    ++j;
                } else if (dp[i + 1][j] >= dp[i][j + 1]) {
                    ++i;
                } else {
                    ++j;
                }
            }
        }
        for (int c2 : s2) {
            if (in_lcs2[std::size_t(c2)]) continue;
            int c1 = partner2_[std::size_t(c2)];
            EditOp op;
            op.kind = EditKind::Move;
            op.node_label = nodes_[std::size_t(c1)].label;
            op.parent_label = nodes_[std::size_t(w)].label;
            op.path = path_of(c1);
            unlink(c1);
            int k = find_pos(c2);
            op.position = k;
            op.dest_path = path_of(w);
            op.dest_path.push_back(k);
            link(c1, w, k);
            nodes_[std::size_t(c1)].inorder = true;
            inorder2_[std::size_t(c2)] = true;
            s.ops.push_back(std::move(op));
        }
    }
};

SyntaxNode* resolve(SyntaxNode* root, const std::vector<int>& path,
                    std::size_t drop_last) {
    SyntaxNode* cur = root;
    for (std::size_t i = 0; i + drop_last < path.size(); ++i) {
        int idx = path[i];
        if (idx < 0 || std::size_t(idx) >= cur->children.size())
            throw InvalidOp("path step out of range");
        cur = &cur->children[std::size_t(idx)];
    }
    return cur;
}

}  // namespace

std::string_view edit_kind_name(EditKind k) {
    switch (k) {
        case EditKind::Insert: return "INSERT";
        case EditKind::Move: return "MOVE";
        case EditKind::Update: return "UPDATE";
        case EditKind::Delete: return "DELETE";
    }
    return "UPDATE";
}

std::string AbstractOpType::formatted() const {
    std::string name;
    switch (kind) {
        case EditKind::Insert: name = "Insert"; break;
        case EditKind::Move: name = "Move"; break;
        case EditKind::Update: name = "Update"; break;
        case EditKind::Delete: name = "Delete"; break;
    }
    name += "(" + node_label;
    if (kind == EditKind::Insert || kind == EditKind::Move)
        name += ", " + parent_label;
    name += ")";
    return name;
}

NodeMapping match_trees(const SyntaxTree& before, const SyntaxTree& after) {
    return Matcher(before, after).run();
}

EditScript compute_edit_script(const SyntaxTree& before,
                               const SyntaxTree& after, const NodeMapping& m) {
    return ScriptBuilder(before, after, m).run();
}

EditScript diff_trees(const SyntaxTree& before, const SyntaxTree& after) {
    return compute_edit_script(before, after, match_trees(before, after));
}

SyntaxTree apply_script(const SyntaxTree& before, const EditScript& s) {
    SyntaxTree out;
    out.root = before.root;
    for (const EditOp& op : s.ops) {
        switch (op.kind) {
            case EditKind::Insert: {
                if (op.dest_path.empty()) throw InvalidOp("insert at root");
                SyntaxNode* parent = resolve(&out.root, op.dest_path, 1);
                int pos = op.dest_path.back();
                if (pos != op.position)
                    throw InvalidOp("insert position mismatch");
                if (pos < 0 || std::size_t(pos) > parent->children.size())
                    throw InvalidOp("insert position out of range");
                if (parent->label != op.parent_label)
                    throw InvalidOp("insert parent label mismatch");
                SyntaxNode n;
                n.label = op.node_label;
                n.value = op.value;
                parent->children.insert(parent->children.begin() + pos,
                                        std::move(n));
                break;
            }
            case EditKind::Update: {
                SyntaxNode* n = resolve(&out.root, op.path, 0);
                if (n->label != op.node_label)
                    throw InvalidOp("update label mismatch");
                if (!n->children.empty())
                    throw InvalidOp("update of interior node");
                n->value = op.value;
                break;
            }
            case EditKind::Move: {
                SyntaxNode* n = resolve(&out.root, op.path, 0);
                if (n->label != op.node_label)
                    throw InvalidOp("move label mismatch");
                if (op.path.empty()) throw InvalidOp("move of root");
                SyntaxNode moved = std::move(*n);
                SyntaxNode* old_parent = resolve(&out.root, op.path, 1);
                old_parent->children.erase(old_parent->children.begin() +
                                           op.path.back());
                if (op.dest_path.empty()) throw InvalidOp("move to root");
                SyntaxNode* parent = resolve(&out.root, op.dest_path, 1);
                int pos = op.dest_path.back();
                if (pos != op.position)
                    throw InvalidOp("move position mismatch");
                if (pos < 0 || std::size_t(pos) > parent->children.size())
                    throw InvalidOp("move position out of range");
                if (parent->label != op.parent_label)
                    throw InvalidOp("move parent label mismatch");
                parent->children.insert(parent->children.begin() + pos,
                                        std::move(moved));
                break;
            }
            case EditKind::Delete: {
                if (op.path.empty()) throw InvalidOp("delete of root");
                SyntaxNode* n = resolve(&out.root, op.path, 0);
                if (n->label != op.node_label)
                    throw InvalidOp("delete label mismatch");
                if (!n->children.empty())
                    throw InvalidOp("delete of non-leaf");
                SyntaxNode* parent = resolve(&out.root, op.path, 1);
                parent->children.erase(parent->children.begin() +
                                       op.path.back());
                break;
            }
        }
    }
    return out;
}

std::vector<AbstractOpType> abstract_ops(const EditScript& s) {
    std::vector<AbstractOpType> out;
    for (const EditOp& op : s.ops) {
        AbstractOpType t;
        t.kind = op.kind;
        t.node_label = op.node_label;
        if (op.kind == EditKind::Insert || op.kind == EditKind::Move)
            t.parent_label = op.parent_label;
        out.push_back(std::move(t));
    }
    std::sort(out.begin(), out.end(),
              [](const AbstractOpType& x, const AbstractOpType& y) {
                  return x.formatted() < y.formatted();
              });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const AbstractOpType& x, const AbstractOpType& y) {
                              return x.formatted() == y.formatted();
                          }),
              out.end());
    return out;
}

std::string to_json(const EditScript& s) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const EditOp& op : s.ops) {
        nlohmann::ordered_json o;
        o["kind"] = std::string(edit_kind_name(op.kind));
        o["node"] = op.node_label;
        o["parent"] = op.parent_label;
        o["pos"] = op.position;
        if (op.has_value)
            o["value"] = op.value;
        else
            o["value"] = nullptr;
        arr.push_back(std::move(o));
    }
    return arr.dump();
}

}  // namespace sstubmine
