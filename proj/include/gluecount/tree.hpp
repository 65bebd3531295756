#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gluecount {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoParent = std::numeric_limits<VertexId>::max();

/// Leaf label. Base colours come from input; Fresh colours are minted by the
/// cut preprocessor to stand in for a removed component and are identified
/// by their key alone.
class Colour {
 public:
  Colour() = default;

  static Colour base(std::uint64_t id);
  static Colour fresh(std::string key);

  bool is_base() const { return kind_ == Kind::kBase; }
  bool is_fresh() const { return kind_ == Kind::kFresh; }
  std::uint64_t base_id() const { return id_; }
  const std::string& fresh_key() const { return key_; }

  /// "*" for Base(0), decimal for other base colours, "#<key>" for fresh ones.
  std::string to_string() const;

  friend auto operator<=>(const Colour&, const Colour&) = default;
  friend bool operator==(const Colour&, const Colour&) = default;

 private:
  enum class Kind : std::uint8_t { kBase = 0, kFresh = 1 };
  Kind kind_ = Kind::kBase;
  std::uint64_t id_ = 0;
  std::string key_;
};

class ColourMultiset {
 public:
  void add(const Colour& c, std::size_t times = 1);

  std::size_t size() const { return size_; }
  std::size_t multiplicity(const Colour& c) const;
  const std::map<Colour, std::size_t>& counts() const { return counts_; }

  /// Canonical text, e.g. "[*^3;1^2;#x^1]". Equal multisets give equal keys.
  std::string key() const;

  friend bool operator==(const ColourMultiset&, const ColourMultiset&) = default;

 private:
  std::map<Colour, std::size_t> counts_;
  std::size_t size_ = 0;
};

/// An edge is named by its lower endpoint; every non-root vertex owns exactly
/// one edge.
struct Edge {
  VertexId child = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Rooted tree with unordered children and coloured leaves. Vertex 0 is the
/// root and ids are assigned in preorder. Immutable once built.
class RootedTree {
 public:
  /// The single-vertex tree, whose root is also its only leaf.
  RootedTree();

  static RootedTree leaf(Colour c = {});
  /// B+: a new root whose children are the roots of `subtrees`.
  static RootedTree graft(std::span<const RootedTree> subtrees);
  static RootedTree graft(std::initializer_list<RootedTree> subtrees);

  VertexId root() const { return 0; }
  std::size_t vertex_count() const { return parent_.size(); }
  std::size_t leaf_count() const { return leaf_count_; }

  VertexId parent(VertexId v) const;
  const std::vector<VertexId>& children(VertexId v) const;
  bool is_leaf(VertexId v) const { return children(v).empty(); }
  bool contains(VertexId v) const { return v < parent_.size(); }
  const Colour& colour(VertexId leaf) const;

  std::vector<VertexId> leaves() const;
  std::vector<Edge> edges() const;
  bool has_edge(Edge e) const { return e.child != 0 && contains(e.child); }
  bool is_internal_edge(Edge e) const { return has_edge(e) && !is_leaf(e.child); }

  /// True when `a` lies on the path from `d` to the root (inclusive).
  bool is_ancestor_or_self(VertexId a, VertexId d) const;

  RootedTree subtree(VertexId v) const;

 private:
  std::vector<VertexId> parent_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<Colour> colour_;
  std::size_t leaf_count_ = 1;
};

// Text form.
//   tree := node ; node := leaf | internal
//   leaf := '*' | nonneg-integer | '#' fresh-key
//   internal := '(' node (',' node)* ')'
// Whitespace is ignored between tokens.
RootedTree parse_tree(std::string_view text);
std::string serialize_tree(const RootedTree& t);
std::string serialize_subtree(const RootedTree& t, VertexId v);

/// Leaves in the order a canonical serialization visits them (children sorted
/// by their own serialization, ties kept in vertex order).
std::vector<VertexId> canonical_leaf_order(const RootedTree& t);

std::vector<VertexId> leaves_below(const RootedTree& t, Edge e);
std::vector<Edge> internal_edges(const RootedTree& t);

RootedTree contract_edge(const RootedTree& t, Edge e);
/// Inserts a new vertex in the middle of `e`.
RootedTree subdivide_edge(const RootedTree& t, Edge e);

/// Contracts away every non-root vertex with exactly one child when that
/// child is internal. Leaves and colours are untouched.
RootedTree normalize(const RootedTree& t);
bool is_normalized(const RootedTree& t);

struct SiblingSet {
  std::vector<Edge> edges;  // sorted
  friend bool operator==(const SiblingSet&, const SiblingSet&) = default;
};

/// Nonempty, internal, and no edge is an ancestor of another.
bool is_sibling_set(const RootedTree& t, std::span<const Edge> edges);
/// Every nonempty antichain of internal edges, each exactly once.
std::vector<SiblingSet> sibling_sets(const RootedTree& t);

ColourMultiset colour_multiset(const RootedTree& t);
ColourMultiset colour_multiset(const RootedTree& t, VertexId v);
/// All leaves share one colour (the uncoloured special case).
bool is_single_coloured(const RootedTree& t);

namespace family {
struct Line {
  unsigned k = 1;
};
struct LineS {
  unsigned k = 1;
  std::vector<unsigned> s;
};
struct TwoEnded {
  unsigned k = 1;
  unsigned l = 1;
};
struct FanLine {
  unsigned k = 3;
  unsigned i = 2;
  unsigned j = 1;
};
struct Fan {
  unsigned k = 1;
};
}  // namespace family

using FamilySpec = std::variant<family::Line, family::LineS, family::TwoEnded,
                                family::FanLine, family::Fan>;

/// Throws std::invalid_argument when the parameters are out of range.
void validate(const FamilySpec& spec);
RootedTree build_family(const FamilySpec& spec);
std::size_t family_leaf_count(const FamilySpec& spec);
std::string describe(const FamilySpec& spec);

}  // namespace gluecount
