#pragma once

#include <string>

#include "ucantor/tree.hpp"

namespace ucantor {

// Tree interchange format:
//   {"root": id, "max_depth": D,
//    "vertices": [{"id": int, "parent": int|null, "weight": float,
//                  "children": [ids in order]}]}
// Vertices keep file order; child order is meaningful (it is the numbering
// used by the embedding coordinates). Floats are written with 17 significant
// digits, so load -> save is byte-stable on files we produced.
//
// A childless vertex at max_depth is read as a truncation-frontier leaf and
// one above it as a dangling (genuine) leaf. When a tree carries a kind that
// differs from that rule (telescoped trees do), the vertex gets an extra
// "leaf": "frontier"|"dangling" key; the loader honors it.

/// Parse a tree document. Structural problems (duplicate ids, unknown parent
/// or child ids, missing fields) throw Error::parse; semantic problems
/// (weights, reachability) are left for validate().
WeightedTree tree_from_json_text(const std::string& text);

/// Canonical serialization, one vertex per line, trailing newline.
std::string tree_to_json_text(const WeightedTree& t);

WeightedTree load_tree(const std::string& path);
void save_tree(const WeightedTree& t, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// %.17g, the round-trip float format used across all file output.
std::string format_double(double x);

}  // namespace ucantor
