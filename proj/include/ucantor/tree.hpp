#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ucantor/errors.hpp"

namespace ucantor {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

// How a childless vertex should be read. A frontier leaf stands for a whole
// subtree cut off by truncation depth; a dangling leaf is a genuine leaf of
// the underlying tree (its boundary point is isolated unless reattached).
enum class LeafKind : std::uint8_t { internal = 0, frontier = 1, dangling = 2 };

struct Vertex {
  VertexId parent = kNoVertex;
  std::vector<VertexId> children;  // order is significant
  double weight = 1.0;
  std::uint32_t depth = 0;
  LeafKind leaf = LeafKind::internal;
  std::int64_t ext_id = 0;  // id used by the interchange format; preserved on load
};

/// Finite truncation of a weighted rooted tree. Weights are positive and
/// nonincreasing along edges; child order is significant everywhere.
class WeightedTree {
 public:
  VertexId add_root(double weight) {
    if (root_ != kNoVertex) throw Error::invalid("tree already has a root");
    Vertex v;
    v.weight = weight;
    v.ext_id = static_cast<std::int64_t>(v_.size());
    v_.push_back(std::move(v));
    root_ = 0;
    return root_;
  }

  VertexId add_child(VertexId parent, double weight) {
    if (parent >= v_.size()) throw Error::invalid("add_child: no such parent");
    Vertex v;
    v.parent = parent;
    v.weight = weight;
    v.depth = v_[parent].depth + 1;
    v.ext_id = static_cast<std::int64_t>(v_.size());
    const VertexId id = static_cast<VertexId>(v_.size());
    v_.push_back(std::move(v));
    v_[parent].children.push_back(id);
    return id;
  }

  /// Recompute depths and max depth from the link structure, then classify
  /// childless vertices: frontier at max depth, dangling above it. Kinds
  /// previously forced with set_leaf_kind survive.
  void finalize();

  /// Force the leaf kind of a childless vertex (survives finalize()).
  void set_leaf_kind(VertexId v, LeafKind k);

  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }
  VertexId root() const { return root_; }
  std::uint32_t max_depth() const { return max_depth_; }
  void set_max_depth(std::uint32_t d) { max_depth_ = d; }
  void set_root(VertexId r) { root_ = r; }

  const Vertex& at(VertexId id) const { return v_[id]; }
  Vertex& at(VertexId id) { return v_[id]; }
  double weight(VertexId id) const { return v_[id].weight; }
  bool is_leaf(VertexId id) const { return v_[id].children.empty(); }

  const std::vector<Vertex>& vertices() const { return v_; }
  std::vector<Vertex>& vertices() { return v_; }

 private:
  std::vector<Vertex> v_;
  VertexId root_ = kNoVertex;
  std::uint32_t max_depth_ = 0;
  std::vector<bool> forced_;  // leaf kind pinned by set_leaf_kind
};

/// Boundary point of the truncation: a root-to-leaf path recorded as child
/// indexes (position within each children array).
struct BoundaryPoint {
  std::vector<std::uint32_t> steps;
};

/// Vertices along the path of p, root first. Throws if a step is out of range
/// or the path stops short of a leaf.
std::vector<VertexId> resolve(const WeightedTree& t, const BoundaryPoint& p);

struct ValidationIssue {
  std::string code;     // stable machine-readable tag
  std::string message;  // human-readable detail
  std::vector<std::int64_t> ids;  // offending vertices (interchange ids)
};

struct ValidationReport {
  bool valid = true;
  std::vector<ValidationIssue> issues;
};

/// Structural and metric checks; never throws. Issue codes:
/// no-root, multiple-roots, root-mismatch, child-link, unreachable,
/// weight-positive, weight-monotone, max-depth-mismatch, leaf-kind.
ValidationReport validate(const WeightedTree& t);

/// Throws Error::domain carrying the first issue if validate() fails.
void require_valid(const WeightedTree& t, const char* op);

/// Deepest common ancestor of two vertices.
VertexId lca(const WeightedTree& t, VertexId a, VertexId b);

/// Deepest common vertex of two boundary paths.
VertexId lca(const WeightedTree& t, const BoundaryPoint& a, const BoundaryPoint& b);

/// Ultrametric distance: weight of the least common ancestor, 0 on equal
/// arguments.
double d_kappa(const WeightedTree& t, const BoundaryPoint& a, const BoundaryPoint& b);

/// True if every internal vertex has at least two children.
bool is_reduced(const WeightedTree& t);

/// Same shape, weights, and leaf kinds (ids and ext_ids ignored).
bool structurally_equal(const WeightedTree& a, const WeightedTree& b);

struct MappedTree {
  WeightedTree tree;
  std::vector<VertexId> source;  // output vertex -> originating input vertex
};

/// Contract unary chains so every surviving internal vertex branches. Leaves
/// survive with their kinds; boundary distances between surviving pairs are
/// unchanged. Throws Error::domain on a tree whose boundary is a single point.
WeightedTree reduce(const WeightedTree& t);
MappedTree reduce_mapped(const WeightedTree& t);

/// One vertex per telescoping cell: level k+1 holds, for each level-k cell v,
/// the maximal descendants w with weight(w) <= delta * weight(v). Frontier
/// leaves met below the first level survive as frontier leaves; meeting one
/// while building the first level is an error (truncation too shallow).
MappedTree telescope(const WeightedTree& t, double delta);

struct DepthFit {
  std::uint32_t depth = 0;
  double theta = 1.0;
  double c = 1.0;
};

struct DecayFit {
  std::uint32_t max_children = 0;   // M over internal vertices
  double theta = 1.0;               // fitted geometric decay rate, in (0, 1]
  double c = 1.0;                   // smallest c >= 1 with R_g <= c * theta^g
  std::vector<double> worst_ratio;  // worst_ratio[g-1] = max weight(w)/weight(v) over gap-g pairs
  std::vector<std::pair<std::int64_t, std::int64_t>> worst_pair;  // (ancestor, descendant) ext ids per gap
  std::vector<DepthFit> per_depth;  // same fit restricted to vertices of depth <= d
};

/// Fit weight(w)/weight(v) <= c * theta^(depth gap) over ancestor/descendant
/// pairs: theta = max of worst_ratio[g]^(1/g) over gaps that decay (flat
/// pairs are absorbed by c), c = smallest value making the bound hold
/// everywhere. Pairs whose descendant is a frontier leaf are excluded: in the
/// untruncated reduced tree those vertices sit inside contracted chains.
DecayFit fit_decay(const WeightedTree& t);

struct EmbedCheckOptions {
  double theta_max = 0.995;  // reject fits this close to no decay
  double c_ratio = 2.0;      // max/min fitted c over the stability window
  std::uint32_t window = 5;  // trailing depths examined for stability
};

struct RatioWitness {
  std::int64_t ancestor = 0;    // ext ids
  std::int64_t descendant = 0;
  std::uint32_t gap = 0;
  double ratio = 0.0;
  double excess = 0.0;  // ratio / theta^gap
};

struct EmbedCheck {
  bool satisfied = false;
  DecayFit fit;
  bool theta_stable = false;
  bool c_stable = false;
  std::vector<RatioWitness> witnesses;  // worst offenders when not satisfied
  std::string reason;
};

/// Decide whether the truncation is consistent with a uniformly branching,
/// geometrically decaying tree; requires a reduced tree.
EmbedCheck check_embeddable(const WeightedTree& t, const EmbedCheckOptions& opt = {});

}  // namespace ucantor
