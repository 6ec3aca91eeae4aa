#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sstubmine/syntax.hpp"

namespace sstubmine {

// Node ids are preorder indices into the respective tree (root = 0).
struct NodeMapping {
    std::vector<std::pair<int, int>> pairs;  // (before id, after id), sorted
};

enum class EditKind { Insert, Move, Update, Delete };

std::string_view edit_kind_name(EditKind k);  // "INSERT", "MOVE", ...

struct EditOp {
    EditKind kind = EditKind::Update;
    std::string node_label;
    std::string parent_label;  // "" for the root
    int position = 0;          // child index under the parent
    std::string value;         // UPDATE: new value; INSERT: leaf text
    bool has_value = false;

    // Application addressing, valid when ops are replayed in order on the
    // original before-tree. `path` locates the subject (MOVE/UPDATE/DELETE),
    // `dest_path` the landing slot including the final index (INSERT/MOVE,
    // computed after the subject is detached).
    std::vector<int> path;
    std::vector<int> dest_path;
};

struct EditScript {
    std::vector<EditOp> ops;
};

struct InvalidOp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AbstractOpType {
    EditKind kind = EditKind::Update;
    std::string node_label;
    std::string parent_label;  // set for INSERT/MOVE only

    // "Insert(identifier, argument_list)" or "Update(identifier)"
    std::string formatted() const;
};

// Two-phase GumTree matching (greedy top-down isomorphic subtrees, greedy
// bottom-up containers by dice, optimal recovery for small containers).
NodeMapping match_trees(const SyntaxTree& before, const SyntaxTree& after);

// Chawathe-style script generation from a mapping.
EditScript compute_edit_script(const SyntaxTree& before,
                               const SyntaxTree& after, const NodeMapping& m);

// match_trees + compute_edit_script.
EditScript diff_trees(const SyntaxTree& before, const SyntaxTree& after);

// Replays a script; throws InvalidOp when an op does not fit the current
// tree state. apply_script(before, diff_trees(before, after)) is always
// label+value isomorphic to after.
SyntaxTree apply_script(const SyntaxTree& before, const EditScript& s);

// De-duplicated abstract operation types, sorted by formatted text.
std::vector<AbstractOpType> abstract_ops(const EditScript& s);

// [{"kind","node","parent","pos","value"}]; value is null when absent.
std::string to_json(const EditScript& s);

}  // namespace sstubmine
