#include "gluecount/permutations.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <iterator>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gluecount/errors.hpp"

namespace gluecount {

namespace {

// Constraint set reduced to {1..n-1}, or nullopt when it forces zero.
std::optional<std::vector<unsigned>> effective(unsigned n, const PrefixSet& s) {
  std::vector<unsigned> out;
  for (int j : s) {
    if (j < 0) continue;
    if (j == 0 || static_cast<unsigned>(j) >= n) return std::nullopt;
    out.push_back(static_cast<unsigned>(j));
  }
  return out;
}

using MemoKey = std::pair<unsigned, std::vector<unsigned>>;

struct Memo {
  std::shared_mutex mu;
  std::map<MemoKey, Count> table;
};

Memo& memo() {
  static Memo m;
  return m;
}

// s is sorted and lies inside {1..n-1}.
Count recurse(unsigned n, const std::vector<unsigned>& s) {
  if (s.empty()) return factorial(n);
  MemoKey key{n, s};
  auto& m = memo();
  {
    std::shared_lock lock(m.mu);
    auto it = m.table.find(key);
    if (it != m.table.end()) return it->second;
  }
  Count result = factorial(n);
  for (unsigned i : s) {
    std::vector<unsigned> shifted;
    for (unsigned x : s)
      if (x > i) shifted.push_back(x - i);
    result -= factorial(i) * recurse(n - i, shifted);
  }
  std::unique_lock lock(m.mu);
  m.table.emplace(std::move(key), result);
  return result;
}

}  // namespace

Count connected_count(unsigned n) {
  if (n == 0) throw std::invalid_argument("connected_count needs n >= 1");
  std::vector<unsigned> s(n - 1);
  std::iota(s.begin(), s.end(), 1u);
  return recurse(n, s);
}

Count s_connected_count(unsigned n, const PrefixSet& s) {
  if (n == 0) throw std::invalid_argument("s_connected_count needs n >= 1");
  auto eff = effective(n, s);
  if (!eff) return 0;
  return recurse(n, *eff);
}

Count brute_s_connected(unsigned n, const PrefixSet& s, unsigned limit) {
  if (n == 0) throw std::invalid_argument("brute_s_connected needs n >= 1");
  if (n > limit) throw LimitExceeded("brute_s_connected: n exceeds the brute-force limit");
  auto eff = effective(n, s);
  if (!eff) return 0;
  std::vector<unsigned> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  unsigned long long count = 0;
  do {
    // Prefix {0..j-1} is fixed iff the running maximum of the first j
    // images equals j-1.
    bool ok = true;
    unsigned running_max = 0;
    std::size_t next = 0;
    for (unsigned j = 1; j < n && next < eff->size(); ++j) {
      running_max = std::max(running_max, perm[j - 1]);
      if ((*eff)[next] != j) continue;
      ++next;
      if (running_max == j - 1) {
        ok = false;
        break;
      }
    }
    if (ok) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Count(static_cast<unsigned long>(count));
}

PrefixSet prefix_range(int lo, int hi) {
  PrefixSet s;
  for (int x = lo; x <= hi; ++x) s.insert(x);
  return s;
}

PrefixSet set_union(const PrefixSet& a, const PrefixSet& b) {
  PrefixSet s = a;
  s.insert(b.begin(), b.end());
  return s;
}

PrefixSet set_intersection(const PrefixSet& a, const PrefixSet& b) {
  PrefixSet s;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(s, s.begin()));
  return s;
}

}  // namespace gluecount
