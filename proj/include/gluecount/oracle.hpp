#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "gluecount/count.hpp"
#include "gluecount/tree.hpp"

namespace gluecount {

/// Injective pairing of some leaves of t1 with leaves of t2.
struct PartialGluing {
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::size_t size() const { return pairs.size(); }
};

enum class SubdivergenceKind { FullyInternal, LeftSided, RightSided };

enum class PartialMode {
  NoSubdivergence,         // p: excludes fully internal and both one-sided kinds
  NoInternalOrRightSided,  // p-bar: excludes fully internal and right-sided
};

struct BruteLimits {
  unsigned max_leaves = 9;
  /// Reads GLUECOUNT_BRUTE_LIMIT, falling back to the default.
  static BruteLimits from_env();
};

/// Throws std::invalid_argument unless g pairs leaves of t1 with leaves of t2
/// injectively.
void validate_gluing(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g);

/// Internal edges e1, e2 with leaves_below(e1) inside the domain and mapped
/// exactly onto leaves_below(e2).
bool has_fully_internal(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g);

/// RightSided: every leaf of t2 is glued and the domain is exactly the leaf
/// set below an internal edge of t1. LeftSided is the mirror image.
bool has_one_sided(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g,
                   SubdivergenceKind side);

// Literal graph versions of the two checks above: build the glued graph, cut
// edges, and inspect the components. Slow; kept as a second opinion.
bool has_fully_internal_literal(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g);
bool has_one_sided_literal(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g,
                           SubdivergenceKind side);

/// Number of colour-preserving full gluings with no fully internal
/// subdivergence, by enumeration.
Count count_subfree_brute(const RootedTree& t1, const RootedTree& t2,
                          BruteLimits limits = BruteLimits::from_env());
/// Same count, enumeration split across OpenMP threads.
Count count_subfree_brute_parallel(const RootedTree& t1, const RootedTree& t2,
                                   BruteLimits limits = BruteLimits::from_env());

/// Colour-preserving partial gluings of size k with domain inside s1 and
/// image inside s2 that avoid the subdivergences excluded by `mode`.
Count count_partial_brute(const RootedTree& t1, const RootedTree& t2, unsigned k,
                          std::span<const VertexId> s1, std::span<const VertexId> s2, PartialMode mode,
                          BruteLimits limits = BruteLimits::from_env());

/// Calls `visit` on every colour-preserving full gluing. Used by tests that
/// classify gluings individually.
void for_each_full_gluing(const RootedTree& t1, const RootedTree& t2,
                          const std::function<void(const PartialGluing&)>& visit,
                          BruteLimits limits = BruteLimits::from_env());

/// Brute-force counts of n(t1, t2) for one fixed uncoloured t1 against many
/// partners. All gluings of t1 are enumerated once and grouped by which leaf
/// sets the internal edges of t1 are sent to; each partner is then answered
/// from the groups.
class SubfreeBatch {
 public:
  explicit SubfreeBatch(const RootedTree& t1, BruteLimits limits = BruteLimits::from_env());

  /// t2 must be uncoloured with the same leaf colour as t1.
  Count count(const RootedTree& t2) const;

  /// Leaf sets below the internal edges of t2, as a bitmap over leaf masks.
  /// Lets callers answer many t1 batches against a fixed t2 cheaply.
  struct PartnerBitmap {
    std::size_t leaves = 0;
    bool single_coloured = true;
    Colour colour;
    std::vector<std::uint64_t> words;
  };
  static PartnerBitmap partner_bitmap(const RootedTree& t2);
  std::uint64_t count(const PartnerBitmap& partner) const;
  std::size_t leaf_count() const { return leaves_; }
  std::size_t signature_count() const { return multiplicity_.size(); }

 private:
  std::size_t leaves_ = 0;
  Colour colour_;
  std::size_t words_ = 1;                // 64-bit words per signature
  std::vector<std::uint64_t> signatures_;  // words_ words each
  std::vector<std::uint64_t> multiplicity_;
};

/// Brute-force p and p-bar for every (k, S1, S2) of one pair of trees at
/// once. Masks are over the leaves of each tree in vertex order.
class PartialTable {
 public:
  PartialTable(const RootedTree& t1, const RootedTree& t2, BruteLimits limits = BruteLimits::from_env());

  std::uint64_t count(PartialMode mode, unsigned k, std::uint32_t s1, std::uint32_t s2) const;
  unsigned leaves1() const { return n1_; }
  unsigned leaves2() const { return n2_; }

 private:
  unsigned n1_ = 0;
  unsigned n2_ = 0;
  // [mode][k] -> table indexed by s1 | s2 << n1
  std::vector<std::vector<std::uint64_t>> table_[2];
};

}  // namespace gluecount
