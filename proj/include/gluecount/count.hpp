#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace gluecount {

/// Exact nonnegative counting result. Every count in the library is carried
/// as an unbounded integer; nothing is ever rounded.
using Count = mpz_class;

Count factorial(unsigned n);
Count binomial(unsigned n, unsigned k);

/// Exact decimal rendering, never scientific notation.
std::string to_string(const Count& c);

Count from_u128(unsigned __int128 v);

}  // namespace gluecount
