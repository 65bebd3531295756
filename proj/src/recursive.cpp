#include "gluecount/recursive.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "gluecount/errors.hpp"
#include "stable_store.hpp"

namespace gluecount {

std::string to_string(ZeroReason r) {
  switch (r) {
    case ZeroReason::None: return "none";
    case ZeroReason::LeafMismatch: return "leaf-mismatch";
    case ZeroReason::ColourMismatch: return "colour-mismatch";
    case ZeroReason::AllSubdivergent: return "all-subdivergent";
  }
  return "unknown";
}

namespace {

using U128 = unsigned __int128;

U128 checked_add(U128 a, U128 b) {
  U128 r;
  if (__builtin_add_overflow(a, b, &r)) throw LimitExceeded("recursive count overflowed 128 bits");
  return r;
}

U128 checked_mul(U128 a, U128 b) {
  U128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw LimitExceeded("recursive count overflowed 128 bits");
  return r;
}

struct SmallTables {
  U128 fact[RecursiveGluer::kMaxLeaves + 1];
  U128 binom[RecursiveGluer::kMaxLeaves + 1][RecursiveGluer::kMaxLeaves + 1];
  SmallTables() {
    fact[0] = 1;
    for (unsigned i = 1; i <= RecursiveGluer::kMaxLeaves; ++i) fact[i] = fact[i - 1] * i;
    for (unsigned n = 0; n <= RecursiveGluer::kMaxLeaves; ++n)
      for (unsigned k = 0; k <= RecursiveGluer::kMaxLeaves; ++k)
        binom[n][k] = k > n ? 0 : (k == 0 || k == n) ? 1 : binom[n - 1][k - 1] + binom[n - 1][k];
  }
};

const SmallTables& small() {
  static const SmallTables t;
  return t;
}

// Uncoloured canonical text of every vertex's subtree, plus the leaves in
// canonical order.
std::string shape_key(const RootedTree& t, std::vector<VertexId>* order) {
  std::vector<std::string> key(t.vertex_count());
  for (VertexId v = static_cast<VertexId>(t.vertex_count()); v-- > 0;) {
    if (t.is_leaf(v)) {
      key[v] = "*";
      continue;
    }
    std::vector<const std::string*> parts;
    for (VertexId c : t.children(v)) parts.push_back(&key[c]);
    std::stable_sort(parts.begin(), parts.end(), [](auto* a, auto* b) { return *a < *b; });
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + *parts[i];
    key[v] = s + ")";
  }
  if (order) {
    order->clear();
    std::vector<VertexId> stack{t.root()};
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      if (t.is_leaf(v)) {
        order->push_back(v);
        continue;
      }
      std::vector<VertexId> ch = t.children(v);
      std::stable_sort(ch.begin(), ch.end(), [&](VertexId a, VertexId b) { return key[a] < key[b]; });
      stack.insert(stack.end(), ch.rbegin(), ch.rend());
    }
  }
  return key[t.root()];
}

// Top-level children of "(a,b,...)".
std::vector<std::string> split_children(const std::string& key) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 1;
  for (std::size_t i = 1; i + 1 < key.size(); ++i) {
    const char c = key[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(key.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(key.substr(start, key.size() - 1 - start));
  return out;
}

struct Key {
  std::uint64_t hi;
  std::uint64_t lo;
  friend bool operator==(const Key&, const Key&) = default;
  template <typename H>
  friend H AbslHashValue(H h, const Key& k) {
    return H::combine(std::move(h), k.hi, k.lo);
  }
};

}  // namespace

struct RecursiveGluer::Impl {
  struct Shape {
    unsigned leaves = 0;
    bool fan = false;          // no internal edges (includes the single vertex)
    bool single = false;       // the single vertex
    bool unary = false;        // root has one child and that child is internal
    ShapeId only_child = 0;
    ShapeId first = 0;         // B+(smallest child)
    ShapeId rest = 0;          // B+(other children)
    unsigned first_leaves = 0;
  };

  mutable std::shared_mutex shapes_mu;  // guards ids and appends to shapes
  detail::StableStore<Shape> shapes;
  std::unordered_map<std::string, ShapeId> ids;
  std::vector<ShapeId> fans;  // fans[k] = fan with k leaves

  struct MemoShard {
    std::mutex mu;
    absl::flat_hash_map<Key, U128> map;
  };
  static constexpr std::size_t kShards = 16;
  mutable std::array<MemoShard, kShards> memo;
  std::atomic<std::uint64_t> hits{0};

  // Caller holds shapes_mu exclusively.
  ShapeId intern_locked(const std::string& key) {
    if (auto it = ids.find(key); it != ids.end()) return it->second;
    Shape s;
    s.leaves = static_cast<unsigned>(std::count(key.begin(), key.end(), '*'));
    if (s.leaves > kMaxLeaves) throw LimitExceeded("recursive algorithm supports at most 24 leaves");
    if (key == "*") {
      s.fan = true;
      s.single = true;
    } else {
      const auto children = split_children(key);
      s.fan = std::all_of(children.begin(), children.end(), [](const std::string& c) { return c == "*"; });
      if (!s.fan && children.size() == 1) {
        s.unary = true;
        s.only_child = intern_locked(children[0]);
      } else if (!s.fan) {
        s.first = intern_locked("(" + children[0] + ")");
        std::string rest = "(";
        for (std::size_t i = 1; i < children.size(); ++i) rest += (i > 1 ? "," : "") + children[i];
        s.rest = intern_locked(rest + ")");
        s.first_leaves = static_cast<unsigned>(std::count(children[0].begin(), children[0].end(), '*'));
      }
    }
    const ShapeId id = shapes.append(std::make_unique<Shape>(s));
    ids.emplace(key, id);
    return id;
  }

  const Shape& shape(ShapeId id) const {
    if (id >= shapes.size()) throw std::out_of_range("unknown shape id");
    return shapes[id];
  }

  MemoShard& shard(const Key& key) const { return memo[absl::Hash<Key>{}(key) % kShards]; }

  static U128 fan_formula(unsigned k, unsigned c1, unsigned c2) {
    const auto& t = small();
    return checked_mul(checked_mul(t.fact[k], t.binom[c1][k]), t.binom[c2][k]);
  }

  U128 P(ShapeId a, ShapeId b, unsigned k, Mask s1, Mask s2, bool bar) {
    if (k == 0) return 1;
    const auto c1 = static_cast<unsigned>(std::popcount(s1));
    const auto c2 = static_cast<unsigned>(std::popcount(s2));
    if (k > c1 || k > c2) return 0;
    const Shape& A = shape(a);
    const Shape& B = shape(b);
    // The single vertex never takes part in a one-sided subdivergence.
    if (A.fan && (B.fan || bar || A.single)) return fan_formula(k, c1, c2);
    if (B.single) return fan_formula(k, c1, c2);
    if (A.fan) return P(b, a, k, s2, s1, false);

    const Key key{(std::uint64_t{a} << 32) | b,
                  (std::uint64_t{k} << 49) | (std::uint64_t{bar} << 48) | (std::uint64_t{s1} << 24) | s2};
    MemoShard& sh = shard(key);
    {
      std::lock_guard lock(sh.mu);
      if (auto it = sh.map.find(key); it != sh.map.end()) {
        hits.fetch_add(1, std::memory_order_relaxed);
        return it->second;
      }
    }

    U128 result = 0;
    if (A.unary) {
      // The root edge is a bridge of every gluing that uses all leaves.
      result = (k == A.leaves && k == B.leaves) ? 0 : P(A.only_child, b, k, s1, s2, false);
    } else if (bar || k != A.leaves) {
      result = split(A, b, k, s1, s2);
    } else {
      // Drop the gluings with a left-sided subdivergence: the image R must
      // not be the leaf set below an internal edge of t2, which is exactly
      // when gluing a fan onto R survives.
      const ShapeId fan = fans.at(k);
      const Mask full = (Mask{1} << k) - 1;
      for (Mask r = s2;; r = (r - 1) & s2) {
        if (static_cast<unsigned>(std::popcount(r)) == k && P(fan, b, k, full, r, false) != 0)
          result = checked_add(result, P(a, b, k, s1, r, true));
        if (r == 0) break;
      }
    }

    std::lock_guard lock(sh.mu);
    sh.map.emplace(key, result);
    return result;
  }

  // Two or more children: glue the smallest child and the remainder
  // separately, over every split R of the image set.
  U128 split(const Shape& A, ShapeId b, unsigned k, Mask s1, Mask s2) {
    const Mask s11 = s1 & ((Mask{1} << A.first_leaves) - 1);
    const Mask rest = s1 >> A.first_leaves;
    const auto c11 = static_cast<unsigned>(std::popcount(s11));
    const auto crest = static_cast<unsigned>(std::popcount(rest));
    U128 total = 0;
    for (Mask r = s2;; r = (r - 1) & s2) {
      const auto j = static_cast<unsigned>(std::popcount(r));
      if (j <= k && j <= c11 && k - j <= crest) {
        const U128 x = P(A.first, b, j, s11, r, true);
        if (x != 0) total = checked_add(total, checked_mul(x, P(A.rest, b, k - j, rest, s2 & ~r, true)));
      }
      if (r == 0) break;
    }
    return total;
  }
};

RecursiveGluer::RecursiveGluer() : impl_(std::make_unique<Impl>()) {
  std::unique_lock lock(impl_->shapes_mu);
  impl_->fans.push_back(impl_->intern_locked("*"));
  for (unsigned k = 1; k <= kMaxLeaves; ++k) {
    std::string key = "(";
    for (unsigned i = 0; i < k; ++i) key += i ? ",*" : "*";
    impl_->fans.push_back(impl_->intern_locked(key + ")"));
  }
}

RecursiveGluer::~RecursiveGluer() = default;

RecursiveGluer::ShapeId RecursiveGluer::intern(const RootedTree& t, std::vector<VertexId>* leaf_order) {
  if (t.leaf_count() > kMaxLeaves) throw LimitExceeded("recursive algorithm supports at most 24 leaves");
  const std::string key = shape_key(t, leaf_order);
  {
    std::shared_lock lock(impl_->shapes_mu);
    if (auto it = impl_->ids.find(key); it != impl_->ids.end()) return it->second;
  }
  std::unique_lock lock(impl_->shapes_mu);
  return impl_->intern_locked(key);
}

unsigned RecursiveGluer::leaf_count(ShapeId id) const { return impl_->shape(id).leaves; }

unsigned __int128 RecursiveGluer::p_masked(ShapeId t1, ShapeId t2, unsigned k, Mask s1, Mask s2, bool bar) {
  const unsigned l1 = leaf_count(t1);
  const unsigned l2 = leaf_count(t2);
  if ((l1 < 32 && (s1 >> l1) != 0) || (l2 < 32 && (s2 >> l2) != 0))
    throw std::invalid_argument("leaf mask has bits beyond the leaf count");
  return impl_->P(t1, t2, k, s1, s2, bar);
}

namespace {

RecursiveGluer::Mask to_mask(std::span<const VertexId> subset, const std::vector<VertexId>& order,
                             const RootedTree& t, const char* which) {
  std::vector<int> pos(t.vertex_count(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  RecursiveGluer::Mask m = 0;
  for (VertexId v : subset) {
    if (!t.contains(v) || pos[v] < 0) throw std::invalid_argument(std::string(which) + " contains a non-leaf");
    const RecursiveGluer::Mask bit = RecursiveGluer::Mask{1} << pos[v];
    if (m & bit) throw std::invalid_argument(std::string(which) + " contains a repeated leaf");
    m |= bit;
  }
  return m;
}

void require_uncoloured(const RootedTree& t) {
  if (!is_single_coloured(t))
    throw std::invalid_argument("the recursive algorithm handles uncoloured trees only");
}

Colour only_colour(const RootedTree& t) { return colour_multiset(t).counts().begin()->first; }

}  // namespace

static Count partial(RecursiveGluer& g, const RootedTree& t1, const RootedTree& t2, unsigned k,
                     std::span<const VertexId> s1, std::span<const VertexId> s2, bool bar) {
  require_uncoloured(t1);
  require_uncoloured(t2);
  std::vector<VertexId> o1, o2;
  const auto a = g.intern(t1, &o1);
  const auto b = g.intern(t2, &o2);
  const auto m1 = to_mask(s1, o1, t1, "S1");
  const auto m2 = to_mask(s2, o2, t2, "S2");
  if (k > 0 && !(only_colour(t1) == only_colour(t2))) return 0;
  return from_u128(g.p_masked(a, b, k, m1, m2, bar));
}

Count RecursiveGluer::p(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
                        std::span<const VertexId> s2) {
  return partial(*this, t1, t2, k, s1, s2, false);
}

Count RecursiveGluer::p_bar(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
                            std::span<const VertexId> s2) {
  return partial(*this, t1, t2, k, s1, s2, true);
}

SubfreeResult RecursiveGluer::count_subfree(const RootedTree& t1, const RootedTree& t2) {
  require_uncoloured(t1);
  require_uncoloured(t2);
  if (t1.leaf_count() != t2.leaf_count()) return {Count(0), ZeroReason::LeafMismatch};
  if (!(only_colour(t1) == only_colour(t2))) return {Count(0), ZeroReason::ColourMismatch};
  ShapeId a = intern(t1);
  ShapeId b = intern(t2);
  // A root with a single internal child makes the root edge a candidate cut
  // only when the other tree has one too.
  for (;;) {
    const auto A = impl_->shape(a);
    const auto B = impl_->shape(b);
    if (A.unary && B.unary) return {Count(0), ZeroReason::AllSubdivergent};
    if (A.unary) {
      a = A.only_child;
    } else if (B.unary) {
      b = B.only_child;
    } else {
      break;
    }
  }
  const unsigned n = leaf_count(a);
  const Mask full = n == 32 ? ~Mask{0} : (Mask{1} << n) - 1;
  Count c = from_u128(impl_->P(a, b, n, full, full, false));
  return {c, c == 0 ? ZeroReason::AllSubdivergent : ZeroReason::None};
}

void RecursiveGluer::clear_memo() {
  for (auto& sh : impl_->memo) {
    std::lock_guard lock(sh.mu);
    sh.map.clear();
  }
}

std::size_t RecursiveGluer::memo_size() const {
  std::size_t n = 0;
  for (auto& sh : impl_->memo) {
    std::lock_guard lock(sh.mu);
    n += sh.map.size();
  }
  return n;
}

std::uint64_t RecursiveGluer::memo_hits() const { return impl_->hits.load(); }

namespace {
RecursiveGluer& shared_gluer() {
  static RecursiveGluer g;
  return g;
}
}  // namespace

Count p(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
        std::span<const VertexId> s2) {
  return shared_gluer().p(t1, t2, k, s1, s2);
}

Count p_bar(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
            std::span<const VertexId> s2) {
  return shared_gluer().p_bar(t1, t2, k, s1, s2);
}

SubfreeResult count_subfree_recursive(const RootedTree& t1, const RootedTree& t2) {
  return shared_gluer().count_subfree(t1, t2);
}

}  // namespace gluecount
