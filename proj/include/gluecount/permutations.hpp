#pragma once

#include <set>

#include "gluecount/count.hpp"

namespace gluecount {

/// Prefix sizes a permutation must not fix. Any integers are accepted; see
/// s_connected_count for how out-of-range elements are read.
using PrefixSet = std::set<int>;

/// Number of permutations of {1..n} that fix no proper prefix {1..j}.
Count connected_count(unsigned n);

/// Number of permutations of {1..n} that fix no prefix {1..j} with j in S.
/// A prefix of size 0 or of size >= n is fixed by every permutation, so any
/// such element makes the answer 0. Negative elements never match a prefix
/// and are ignored.
Count s_connected_count(unsigned n, const PrefixSet& s);

/// The same quantity by direct enumeration of all n! permutations. Throws
/// LimitExceeded when n is above `limit`.
Count brute_s_connected(unsigned n, const PrefixSet& s, unsigned limit = 9);

/// {lo, lo+1, ..., hi}; empty when lo > hi.
PrefixSet prefix_range(int lo, int hi);

PrefixSet set_union(const PrefixSet& a, const PrefixSet& b);
PrefixSet set_intersection(const PrefixSet& a, const PrefixSet& b);

}  // namespace gluecount
