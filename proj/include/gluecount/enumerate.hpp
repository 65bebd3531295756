#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "gluecount/tree.hpp"

namespace gluecount {

/// Canonical serializations of every uncoloured normalized tree with `leaves`
/// leaves, sorted. Includes the single-vertex tree for one leaf.
///
/// Shapes are built by composition: a non-root subtree is a leaf, a unary
/// vertex over a leaf, or a vertex with at least two non-root subtrees; a
/// root has at least one non-root subtree. The result is cached.
const std::vector<std::string>& normalized_tree_strings(unsigned leaves);

std::vector<RootedTree> normalized_trees(unsigned leaves);

/// Uniform over normalized_tree_strings(leaves).
RootedTree random_normalized_tree(unsigned leaves, std::mt19937_64& rng);

/// Replaces every leaf colour with one drawn uniformly from 0..colours-1.
RootedTree recolour_randomly(const RootedTree& t, unsigned colours, std::mt19937_64& rng);

/// Rebuilds `shape` with its leaves (in vertex order) coloured by `colours`.
RootedTree with_leaf_colours(const RootedTree& shape, const std::vector<Colour>& colours);

}  // namespace gluecount
