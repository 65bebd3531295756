#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gluecount/count.hpp"
#include "gluecount/tree.hpp"

namespace gluecount {

enum class ZeroReason {
  None,             // the count is nonzero
  LeafMismatch,     // different leaf counts
  ColourMismatch,   // different colour multisets
  AllSubdivergent,  // gluings exist but every one has a subdivergence
};

std::string to_string(ZeroReason r);

struct SubfreeResult {
  Count count;
  ZeroReason zero_reason = ZeroReason::None;
};

/// Counts partial gluings of uncoloured trees by peeling children off the
/// root, with memoization. Trees are interned by canonical shape; leaf
/// subsets are bit masks over the canonical leaf order of the shape.
///
/// Safe for concurrent use. Trees with more than 24 leaves are rejected.
class RecursiveGluer {
 public:
  using ShapeId = std::uint32_t;
  using Mask = std::uint32_t;
  static constexpr unsigned kMaxLeaves = 24;

  RecursiveGluer();
  ~RecursiveGluer();
  RecursiveGluer(const RecursiveGluer&) = delete;
  RecursiveGluer& operator=(const RecursiveGluer&) = delete;

  Count p(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
          std::span<const VertexId> s2);
  Count p_bar(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
              std::span<const VertexId> s2);
  SubfreeResult count_subfree(const RootedTree& t1, const RootedTree& t2);

  /// Interns an uncoloured tree. `leaf_order`, when given, receives the
  /// leaves of t in the order that mask bits refer to.
  ShapeId intern(const RootedTree& t, std::vector<VertexId>* leaf_order = nullptr);
  unsigned leaf_count(ShapeId id) const;

  /// Mask-level entry points. bar selects p-bar.
  unsigned __int128 p_masked(ShapeId t1, ShapeId t2, unsigned k, Mask s1, Mask s2, bool bar);

  void clear_memo();
  std::size_t memo_size() const;
  std::uint64_t memo_hits() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Count p(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
        std::span<const VertexId> s2);
Count p_bar(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
            std::span<const VertexId> s2);
/// n(t1, t2) by the recursion. Uncoloured trees only.
SubfreeResult count_subfree_recursive(const RootedTree& t1, const RootedTree& t2);

}  // namespace gluecount
