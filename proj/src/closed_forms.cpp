#include "gluecount/closed_forms.hpp"

#include <algorithm>
#include <stdexcept>

namespace gluecount {

namespace {

Count c(unsigned n) { return connected_count(n); }

Count cs(int n, const PrefixSet& s) {
  if (n < 1) throw std::logic_error("closed form evaluated a permutation count of size < 1");
  return s_connected_count(static_cast<unsigned>(n), s);
}

}  // namespace

Count line_count(unsigned k) {
  if (k < 1) throw std::invalid_argument("line_count needs k >= 1");
  return c(k);
}

Count line_s_count(unsigned k, const PrefixSet& s1, const PrefixSet& s2) {
  if (k < 1) throw std::invalid_argument("line_s_count needs k >= 1");
  for (const PrefixSet* s : {&s1, &s2})
    for (int x : *s)
      if (x < 1 || x >= static_cast<int>(k)) throw std::invalid_argument("line_s_count: S must lie in 1..k-1");
  return s_connected_count(k, set_intersection(s1, s2));
}

Count two_ended_equal_count(unsigned k) {
  if (k < 1) throw std::invalid_argument("two_ended_equal_count needs k >= 1");
  Count inner = factorial(k) * factorial(k);
  for (unsigned i = 1; i < k; ++i)
    for (unsigned j = 1; j < k; ++j) inner += factorial(i) * factorial(j) * c(2 * k - i - j);
  Count ends = 0;
  for (unsigned i = 1; i < k; ++i) ends += factorial(i) * c(2 * k - i);
  inner += 2 * ends;
  return factorial(2 * k) - 2 * inner;
}

Count two_ended_unequal_count(unsigned k, unsigned l) {
  if (k < 1 || l < 1) throw std::invalid_argument("two_ended_unequal_count needs k, l >= 1");
  if (k == l) throw std::invalid_argument("two_ended_unequal_count needs k != l; use two_ended_equal_count");
  if (k < l) std::swap(k, l);
  const int K = static_cast<int>(k);
  const int L = static_cast<int>(l);
  const int a = std::min(K, L);

  // Gluings with a subdivergence inside one arm or on a whole arm.
  Count A = factorial(k) * factorial(l);
  for (int i = 1; i < K; ++i)
    for (int j = 1; j < L; ++j) A += factorial(i) * factorial(j) * c(K + L - i - j);
  for (int i = 1; i < K; ++i) A += factorial(i) * c(K + L - i);
  for (int j = 1; j < L; ++j) A += factorial(j) * c(K + L - j);

  // Gluings where the ends of the arms are glued across.
  Count B = 0;
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= a; ++j) {
      const int n = K + L - i - j;
      PrefixSet s = set_union(prefix_range(1, a - i), prefix_range(n - (a - j), n - 1));
      B += factorial(i) * factorial(j) * cs(n, s);
    }
  for (int i = 1; i <= a; ++i) {
    const int n = K + L - i;
    PrefixSet s = set_union(prefix_range(1, a - i), prefix_range(n - a, n - 1));
    B += 2 * factorial(i) * cs(n, s);
  }
  return factorial(k + l) - A - B;
}

Count fan_line_count(unsigned k, unsigned i, unsigned j) {
  if (!(1 < i && i < k)) throw std::invalid_argument("fan_line_count needs 1 < i < k");
  if (j < 1) throw std::invalid_argument("fan_line_count needs j >= 1");
  const int K = static_cast<int>(k);
  const int I = static_cast<int>(i);
  const int J = static_cast<int>(j);
  const int n = K + 2 * (J - 1);
  Count result = cs(n, set_union(prefix_range(J, I + J - 2), prefix_range(I + 2 * (J - 1), n - 1)));
  result -= 2 * factorial(j) * cs(K + J - 2, prefix_range(I + J - 2, K + J - 3));
  result += factorial(j) * factorial(j) * cs(K - 2, prefix_range(I - 2, K - 3));
  result -= factorial(j) * cs(K + J - 2, prefix_range(J, K + J - 3));
  return result;
}

}  // namespace gluecount
