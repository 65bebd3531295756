#include <random>

#include "doctest.h"

#include "gluecount/enumerate.hpp"
#include "gluecount/errors.hpp"
#include "gluecount/oracle.hpp"

using namespace gluecount;

namespace {

std::vector<RootedTree> trees_upto(unsigned n) {
  std::vector<RootedTree> out;
  for (unsigned k = 1; k <= n; ++k)
    for (RootedTree& t : normalized_trees(k)) out.push_back(std::move(t));
  return out;
}

std::vector<VertexId> subset(const std::vector<VertexId>& leaves, std::uint32_t mask) {
  std::vector<VertexId> out;
  for (std::size_t i = 0; i < leaves.size(); ++i)
    if (mask >> i & 1) out.push_back(leaves[i]);
  return out;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("fully internal cuts on the two-leaf line") {
    const RootedTree l2 = parse_tree("((*),*)");
    const VertexId deep = l2.children(1)[0];
    const VertexId shallow = l2.children(0)[1] == 1 ? l2.children(0)[0] : l2.children(0)[1];
    const PartialGluing identity{{{deep, deep}, {shallow, shallow}}};
    const PartialGluing swap{{{deep, shallow}, {shallow, deep}}};
    CHECK(has_fully_internal(l2, l2, identity));
    CHECK_FALSE(has_fully_internal(l2, l2, swap));
    CHECK(has_fully_internal_literal(l2, l2, identity));
    CHECK_FALSE(has_fully_internal_literal(l2, l2, swap));
  }

  TEST_CASE("fans never have subdivergences") {
    const RootedTree fan = build_family(family::Fan{4});
    for (const RootedTree& t : normalized_trees(4))
      for_each_full_gluing(fan, t, [&](const PartialGluing& g) {
        CHECK_FALSE(has_fully_internal(fan, t, g));
        CHECK_FALSE(has_one_sided(fan, t, g, SubdivergenceKind::RightSided));
      });
  }

  TEST_CASE("one-sided cuts") {
    const RootedTree t1 = parse_tree("((*,*))");
    const RootedTree t2 = build_family(family::Fan{2});
    const auto l1 = t1.leaves();
    const auto l2 = t2.leaves();
    const PartialGluing full{{{l1[0], l2[0]}, {l1[1], l2[1]}}};
    CHECK(has_one_sided(t1, t2, full, SubdivergenceKind::RightSided));
    CHECK(has_one_sided_literal(t1, t2, full, SubdivergenceKind::RightSided));
    CHECK_FALSE(has_one_sided(t1, t2, full, SubdivergenceKind::LeftSided));

    const PartialGluing partial{{{l1[0], l2[0]}}};
    CHECK_FALSE(has_one_sided(t1, t2, partial, SubdivergenceKind::RightSided));
    CHECK_FALSE(has_one_sided_literal(t1, t2, partial, SubdivergenceKind::RightSided));
  }

  TEST_CASE("gluing validation") {
    const RootedTree t = build_family(family::Fan{2});
    const auto l = t.leaves();
    CHECK_THROWS_AS(validate_gluing(t, t, PartialGluing{{{l[0], l[0]}, {l[1], l[0]}}}), std::invalid_argument);
    CHECK_THROWS_AS(validate_gluing(t, t, PartialGluing{{{t.root(), l[0]}}}), std::invalid_argument);
    CHECK_NOTHROW(validate_gluing(t, t, PartialGluing{{{l[0], l[1]}}}));
  }

  TEST_CASE("characterizations agree with the literal graph checks") {
    const auto trees = trees_upto(4);
    std::mt19937_64 rng(3);
    for (const RootedTree& a : trees)
      for (const RootedTree& b : trees) {
        if (a.leaf_count() != b.leaf_count()) continue;
        for_each_full_gluing(a, b, [&](const PartialGluing& g) {
          CHECK(has_fully_internal(a, b, g) == has_fully_internal_literal(a, b, g));
          // Drop a random subset of pairs to exercise partial gluings too.
          PartialGluing p;
          for (const auto& pr : g.pairs)
            if (rng() % 3) p.pairs.push_back(pr);
          CHECK(has_fully_internal(a, b, p) == has_fully_internal_literal(a, b, p));
          for (auto side : {SubdivergenceKind::LeftSided, SubdivergenceKind::RightSided}) {
            CHECK(has_one_sided(a, b, g, side) == has_one_sided_literal(a, b, g, side));
            CHECK(has_one_sided(a, b, p, side) == has_one_sided_literal(a, b, p, side));
          }
        });
      }
  }

  TEST_CASE("known counts") {
    CHECK(count_subfree_brute(parse_tree("((*),*)"), parse_tree("((*),*)")) == 1);
    CHECK(count_subfree_brute(build_family(family::Line{4}), build_family(family::Line{4})) == 13);
    CHECK(count_subfree_brute(build_family(family::TwoEnded{1, 1}), build_family(family::TwoEnded{1, 1})) == 0);
    for (const RootedTree& t : normalized_trees(4)) CHECK(count_subfree_brute(build_family(family::Fan{4}), t) == 24);
    CHECK(count_subfree_brute(parse_tree("(*,*)"), parse_tree("(*,*,*)")) == 0);
    CHECK(count_subfree_brute(parse_tree("(1,2)"), parse_tree("(1,1)")) == 0);
  }

  TEST_CASE("partial counts") {
    const RootedTree f2 = build_family(family::Fan{2});
    const RootedTree f3 = build_family(family::Fan{3});
    for (auto mode : {PartialMode::NoSubdivergence, PartialMode::NoInternalOrRightSided}) {
      CHECK(count_partial_brute(f2, f3, 2, f2.leaves(), f3.leaves(), mode) == 6);
      CHECK(count_partial_brute(f2, f3, 3, f2.leaves(), f3.leaves(), mode) == 0);
      const RootedTree dot;
      const RootedTree l3 = build_family(family::Line{3});
      const auto s2 = subset(l3.leaves(), 0b101);
      CHECK(count_partial_brute(dot, l3, 1, dot.leaves(), s2, mode) == 2);
    }
  }

  TEST_CASE("brute-force limit") {
    const RootedTree l4 = build_family(family::Line{4});
    CHECK_THROWS_AS(count_subfree_brute(l4, l4, BruteLimits{3}), LimitExceeded);
    CHECK_THROWS_AS(count_subfree_brute_parallel(l4, l4, BruteLimits{3}), LimitExceeded);
    CHECK_THROWS_AS(SubfreeBatch(l4, BruteLimits{3}), LimitExceeded);
    CHECK(count_subfree_brute(l4, l4, BruteLimits{4}) == 13);
  }

  TEST_CASE("symmetry, parallel enumeration and batches agree with the serial count") {
    const auto trees = trees_upto(5);
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 300; ++rep) {
      const RootedTree& a = trees[rng() % trees.size()];
      const RootedTree& b = trees[rng() % trees.size()];
      const Count n = count_subfree_brute(a, b);
      CHECK(count_subfree_brute(b, a) == n);
      CHECK(count_subfree_brute_parallel(a, b) == n);
    }
    for (unsigned leaves = 1; leaves <= 5; ++leaves) {
      const auto same = normalized_trees(leaves);
      for (const RootedTree& a : same) {
        const SubfreeBatch batch(a);
        for (const RootedTree& b : same) {
          const Count n = count_subfree_brute(a, b);
          CHECK(batch.count(b) == n);
          CHECK(batch.count(SubfreeBatch::partner_bitmap(b)) == n);
        }
      }
    }
  }

  TEST_CASE("coloured partners in a batch") {
    const SubfreeBatch batch(build_family(family::Line{3}));
    CHECK(batch.count(parse_tree("((1),1,2)")) == 0);
    CHECK(batch.count(parse_tree("((*,*),*,*)")) == 0);
  }

  TEST_CASE("partial table agrees with the direct partial count") {
    const auto trees = trees_upto(4);
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 60; ++rep) {
      const RootedTree& a = trees[rng() % trees.size()];
      const RootedTree& b = trees[rng() % trees.size()];
      const PartialTable table(a, b);
      const auto la = a.leaves();
      const auto lb = b.leaves();
      for (unsigned k = 0; k <= std::min(la.size(), lb.size()); ++k)
        for (std::uint32_t s1 = 0; s1 < (1u << la.size()); ++s1)
          for (std::uint32_t s2 = 0; s2 < (1u << lb.size()); ++s2)
            for (auto mode : {PartialMode::NoSubdivergence, PartialMode::NoInternalOrRightSided})
              CHECK(Count(static_cast<unsigned long>(table.count(mode, k, s1, s2))) ==
                    count_partial_brute(a, b, k, subset(la, s1), subset(lb, s2), mode));
    }
  }

  TEST_CASE("environment override of the limit") {
    setenv("GLUECOUNT_BRUTE_LIMIT", "4", 1);
    CHECK(BruteLimits::from_env().max_leaves == 4);
    unsetenv("GLUECOUNT_BRUTE_LIMIT");
    CHECK(BruteLimits::from_env().max_leaves == 9);
  }
}
