#include "gluecount/count.hpp"

#include <mutex>
#include <vector>

namespace gluecount {

Count factorial(unsigned n) {
  static std::mutex mu;
  static std::vector<Count> table{Count(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (table.size() <= n) {
    table.push_back(table.back() * static_cast<unsigned long>(table.size()));
  }
  return table[n];
}

Count binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Count r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

std::string to_string(const Count& c) { return c.get_str(10); }

Count from_u128(unsigned __int128 v) {
  Count hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
  Count lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return (hi << 64) + lo;
}

}  // namespace gluecount
