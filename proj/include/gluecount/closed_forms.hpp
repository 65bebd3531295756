#pragma once

#include "gluecount/count.hpp"
#include "gluecount/permutations.hpp"

namespace gluecount {

/// n(line(k), line(k)).
Count line_count(unsigned k);

/// n(line-s(k,S1), line-s(k,S2)).
Count line_s_count(unsigned k, const PrefixSet& s1, const PrefixSet& s2);

/// n(d, d) for the two-ended tree d with arms line(k) and line(k).
Count two_ended_equal_count(unsigned k);

/// n(d, d) for arms line(k) and line(l), k != l. Argument order is irrelevant.
Count two_ended_unequal_count(unsigned k, unsigned l);

/// n(f, f) for f = fan-line(k, i, j). Requires 1 < i < k and j >= 1.
Count fan_line_count(unsigned k, unsigned i, unsigned j);

}  // namespace gluecount
