#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "gluecount/count.hpp"
#include "gluecount/tree.hpp"

namespace gluecount {

/// A tree with the subtrees below a sibling set removed. Each removed subtree
/// becomes a component and is replaced in `u` by one leaf whose fresh colour
/// names the component's colour multiset.
struct CutDecomposition {
  RootedTree u;
  std::vector<RootedTree> components;  // in the order of the sibling set's edges
};

/// Colour-preserving gluings between trees with these leaf colour multisets:
/// 0 when they differ, else the product of the factorials of multiplicities.
Count colour_preserving_count(const ColourMultiset& c1, const ColourMultiset& c2);

/// Key of the fresh colour standing for a component with these colours: the
/// multiset's key, primed as often as needed to avoid every fresh key in
/// `taken` (the fresh colours already present in the tree being cut).
std::string fresh_key_for(const ColourMultiset& component, const std::set<std::string>& taken);

/// Throws std::invalid_argument when s is not a sibling set of t.
CutDecomposition cut_and_relabel(const RootedTree& t, const SiblingSet& s);

/// Counts subdivergence-free gluings of coloured trees as all
/// colour-preserving gluings minus those with a subdivergence. Gluings with a
/// subdivergence are split by the outermost edges of their cuts: for each
/// pair of equal-size sibling sets, the trees above the cuts must glue
/// without a subdivergence and the components glue freely.
///
/// Trees are interned by canonical serialization, each tree's list of cut
/// decompositions is computed once and reused for every partner, and results
/// are memoized. Safe for concurrent use.
class CutPreprocessor {
 public:
  /// prune: skip sibling-set pairs of different sizes before recursing.
  explicit CutPreprocessor(bool prune = true);
  ~CutPreprocessor();
  CutPreprocessor(const CutPreprocessor&) = delete;
  CutPreprocessor& operator=(const CutPreprocessor&) = delete;

  /// n(t1, t2). Inputs are normalized first.
  Count subdivergence_free(const RootedTree& t1, const RootedTree& t2);

  /// Normalizes and interns t, for repeated queries against many partners.
  using Handle = std::uint32_t;
  Handle prepare(const RootedTree& t);
  Count subdivergence_free(Handle t1, Handle t2);
  /// n(t1, t) for every t in `partners`, from the same recursion expanded
  /// into chains of cuts. Each tree gets a profile: for every sequence of
  /// colour multisets its chains of cuts pass through, the chain count and
  /// the component-weighted chain count. n is then a signed inner product of
  /// two profiles, so a row costs one profile walk per partner instead of a
  /// memoized recursion per pair. Profiles grow quickly with tree size; meant
  /// for exhaustive sweeps over small trees.
  std::vector<Count> subdivergence_free_row(Handle t1, const std::vector<Handle>& partners);
  /// Entries in the profile of a prepared tree.
  std::size_t profile_size(Handle t);

  /// Colour-preserving gluings of t1 and t2 that have a subdivergence.
  Count subdivergence(const RootedTree& t1, const RootedTree& t2);

  struct Term {
    SiblingSet s1;  // edges of normalize(t1)
    SiblingSet s2;  // edges of normalize(t2)
    Count value;
  };
  /// The summands of subdivergence(), one per sibling-set pair considered.
  std::vector<Term> subdivergence_terms(const RootedTree& t1, const RootedTree& t2);

  /// Number of cut decompositions of t, from the reusable per-tree list.
  std::size_t decomposition_count(const RootedTree& t);

  void clear_memo();
  std::size_t memo_size() const;
  std::uint64_t memo_hits() const;
  std::size_t interned_trees() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Count count_with_subdivergences(const RootedTree& t1, const RootedTree& t2);
Count count_subfree_cutpre(const RootedTree& t1, const RootedTree& t2);

}  // namespace gluecount
