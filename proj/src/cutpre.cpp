#include "gluecount/cutpre.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <map>
#include <atomic>
#include <limits>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "gluecount/enumerate.hpp"
#include "gluecount/errors.hpp"
#include "stable_store.hpp"

namespace gluecount {

Count colour_preserving_count(const ColourMultiset& c1, const ColourMultiset& c2) {
  if (!(c1 == c2)) return 0;
  Count r = 1;
  for (const auto& [c, m] : c1.counts()) r *= factorial(static_cast<unsigned>(m));
  return r;
}

std::string fresh_key_for(const ColourMultiset& component, const std::set<std::string>& taken) {
  std::string key = component.key();
  while (taken.count(key)) key += '\'';
  return key;
}

CutDecomposition cut_and_relabel(const RootedTree& t, const SiblingSet& s) {
  if (!is_sibling_set(t, s.edges)) throw std::invalid_argument("not a sibling set of this tree");
  std::set<std::string> taken;
  for (VertexId v : t.leaves())
    if (t.colour(v).is_fresh()) taken.insert(t.colour(v).fresh_key());
  CutDecomposition out;
  std::vector<bool> cut(t.vertex_count(), false);
  for (Edge e : s.edges) cut[e.child] = true;
  std::vector<std::pair<VertexId, RootedTree>> found;
  auto build = [&](auto&& self, VertexId v) -> RootedTree {
    if (cut[v]) {
      RootedTree component = t.subtree(v);
      Colour fresh = Colour::fresh(fresh_key_for(colour_multiset(component), taken));
      found.emplace_back(v, std::move(component));
      return RootedTree::leaf(std::move(fresh));
    }
    if (t.is_leaf(v)) return RootedTree::leaf(t.colour(v));
    std::vector<RootedTree> parts;
    for (VertexId c : t.children(v)) parts.push_back(self(self, c));
    return RootedTree::graft(parts);
  };
  out.u = build(build, t.root());
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [v, comp] : found) out.components.push_back(std::move(comp));
  return out;
}

namespace {

using TreeId = std::uint32_t;

struct Overflow {};

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}

std::int64_t to_signed(std::uint64_t a) {
  if (a > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) throw Overflow{};
  return static_cast<std::int64_t>(a);
}

// Exact arithmetic in two widths: a fast 64-bit pass that bails out on
// overflow, and an unbounded pass used only when the fast one bails.
struct Narrow {
  using T = std::uint64_t;
  static T add(T a, T b) {
    T r;
    if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
    return r;
  }
  static T mul(T a, T b) {
    T r;
    if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
    return r;
  }
  static T sub(T a, T b) {
    if (b > a) throw std::logic_error("negative subdivergence-free count");
    return a - b;
  }
  static bool is_zero(T a) { return a == 0; }
};

struct Wide {
  using T = Count;
  static T add(const T& a, const T& b) { return a + b; }
  static T mul(const T& a, const T& b) { return a * b; }
  static T sub(const T& a, const T& b) {
    if (b > a) throw std::logic_error("negative subdivergence-free count");
    return a - b;
  }
  static bool is_zero(const T& a) { return a == 0; }
};

// Both widths of one exact value; `fits` says whether narrow is valid.
struct Dual {
  Count wide;
  std::uint64_t narrow = 0;
  bool fits = false;

  explicit Dual(Count c = 0) : wide(std::move(c)) {
    if (sgn(wide) >= 0 && wide.fits_ulong_p()) {
      narrow = wide.get_ui();
      fits = true;
    }
  }
  const std::uint64_t& get(Narrow) const {
    if (!fits) throw Overflow{};
    return narrow;
  }
  const Count& get(Wide) const { return wide; }
};

// n(u1, u2) is unchanged when one colour bijection is applied to both trees.
// Renaming by multiplicity rank depends only on the colour multiset, so two
// trees with equal multisets are renamed by the same bijection.
RootedTree rename_colours(const RootedTree& t) {
  const ColourMultiset m = colour_multiset(t);
  std::vector<std::pair<std::size_t, Colour>> order;
  for (const auto& [c, k] : m.counts()) order.emplace_back(k, c);
  std::sort(order.begin(), order.end());
  std::map<Colour, Colour> rename;
  for (std::size_t i = 0; i < order.size(); ++i) rename.emplace(order[i].second, Colour::fresh("c" + std::to_string(i)));
  std::vector<Colour> colours;
  for (VertexId v : t.leaves()) colours.push_back(rename.at(t.colour(v)));
  return with_leaf_colours(t, colours);
}

}  // namespace

struct CutPreprocessor::Impl {
  struct Decomp {
    std::size_t size;
    TreeId u;
    std::uint32_t u_colours;
    Dual weight;  // colour-preserving self-gluings of all components
    SiblingSet s;
  };
  struct ProfileEntry {
    std::uint32_t seq;
    std::int64_t weighted;  // chains weighted by their component gluings
    std::int64_t chains;
  };
  struct Entry {
    RootedTree tree;
    ColourMultiset colours;
    std::uint32_t colour_id = 0;
    Dual self_gluings;
    std::once_flag once;
    std::vector<Decomp> decomps;
    bool profile_ready = false;  // guarded by profile_mu
    std::vector<ProfileEntry> profile;
  };

  bool prune = true;

  mutable std::shared_mutex trees_mu;
  detail::StableStore<Entry> trees;
  std::unordered_map<std::string, TreeId> ids;
  std::unordered_map<std::string, std::uint32_t> colour_ids;
  detail::StableStore<Dual> colour_r;  // self-gluings of each interned multiset

  mutable std::shared_mutex memo_mu;
  absl::flat_hash_map<std::uint64_t, std::uint64_t> narrow_memo;
  absl::flat_hash_map<std::uint64_t, Count> wide_memo;
  std::atomic<std::uint64_t> hits{0};

  // Sequences of multiset ids, as cons cells: 0 is empty, and
  // cons(m, tail) is m followed by tail.
  std::mutex profile_mu;
  absl::flat_hash_map<std::uint64_t, std::uint32_t> seq_ids;
  std::vector<std::uint32_t> seq_last{0};
  std::vector<std::uint8_t> seq_odd{0};
  std::vector<std::int64_t> dense;

  auto& memo(Narrow) { return narrow_memo; }
  auto& memo(Wide) { return wide_memo; }

  TreeId intern(const RootedTree& t) {
    std::string key = serialize_tree(t);
    {
      std::shared_lock lock(trees_mu);
      if (auto it = ids.find(key); it != ids.end()) return it->second;
    }
    auto entry = std::make_unique<Entry>();
    entry->tree = t;
    entry->colours = colour_multiset(t);
    entry->self_gluings = Dual(colour_preserving_count(entry->colours, entry->colours));
    std::unique_lock lock(trees_mu);
    if (auto it = ids.find(key); it != ids.end()) return it->second;
    entry->colour_id = colour_id_locked(entry->colours);
    const TreeId id = trees.append(std::move(entry));
    ids.emplace(std::move(key), id);
    return id;
  }

  std::uint32_t colour_id_locked(const ColourMultiset& m) {
    auto [it, inserted] = colour_ids.emplace(m.key(), static_cast<std::uint32_t>(colour_ids.size()));
    if (inserted) colour_r.append(std::make_unique<Dual>(colour_preserving_count(m, m)));
    return it->second;
  }

  std::uint32_t colour_id(const ColourMultiset& m) {
    std::unique_lock lock(trees_mu);
    return colour_id_locked(m);
  }

  Entry& entry(TreeId id) const { return trees[id]; }

  const std::vector<Decomp>& decomps(TreeId id) {
    Entry& e = entry(id);
    std::call_once(e.once, [&] {
      for (SiblingSet& s : sibling_sets(e.tree)) {
        CutDecomposition d = cut_and_relabel(e.tree, s);
        Count weight = 1;
        for (const RootedTree& c : d.components) {
          const ColourMultiset m = colour_multiset(c);
          weight *= colour_preserving_count(m, m);
        }
        const std::uint32_t u_colours = colour_id(colour_multiset(d.u));
        const TreeId u = intern(rename_colours(d.u));
        e.decomps.push_back(Decomp{s.edges.size(), u, u_colours, Dual(std::move(weight)), std::move(s)});
      }
      std::stable_sort(e.decomps.begin(), e.decomps.end(),
                       [](const Decomp& x, const Decomp& y) { return x.u_colours < y.u_colours; });
    });
    return e.decomps;
  }

  std::uint32_t cons(std::uint32_t m, std::uint32_t tail) {
    auto [it, inserted] = seq_ids.emplace((std::uint64_t{m} << 32) | tail, static_cast<std::uint32_t>(seq_last.size()));
    if (inserted) {
      seq_last.push_back(tail == 0 ? m : seq_last[tail]);
      seq_odd.push_back(!seq_odd[tail]);
    }
    return it->second;
  }

  // Caller holds profile_mu.
  const std::vector<ProfileEntry>& profile(TreeId id) {
    Entry& e = entry(id);
    if (e.profile_ready) return e.profile;
    absl::flat_hash_map<std::uint32_t, std::pair<std::int64_t, std::int64_t>> acc;
    acc[0] = {1, 1};
    for (const Decomp& x : decomps(id)) {
      const std::int64_t w = to_signed(x.weight.get(Narrow{}));
      for (const ProfileEntry& p : profile(x.u)) {
        auto& a = acc[cons(x.u_colours, p.seq)];
        a.first = checked_add(a.first, checked_mul(p.weighted, w));
        a.second = checked_add(a.second, p.chains);
      }
    }
    e.profile.reserve(acc.size());
    for (const auto& [seq, v] : acc) e.profile.push_back(ProfileEntry{seq, v.first, v.second});
    std::sort(e.profile.begin(), e.profile.end(),
              [](const ProfileEntry& x, const ProfileEntry& y) { return x.seq < y.seq; });
    e.profile_ready = true;
    return e.profile;
  }

  std::vector<Count> row(TreeId a, const std::vector<TreeId>& partners) {
    std::lock_guard lock(profile_mu);
    try {
      const auto& pa = profile(a);
      for (TreeId b : partners)
        if (entry(b).colour_id == entry(a).colour_id) profile(b);
      // Signed so that a chain of j cuts enters with sign (-1)^j, times the
      // gluings of the multiset it ends in.
      dense.resize(seq_last.size(), 0);
      for (const ProfileEntry& p : pa) {
        const Dual& r = p.seq == 0 ? entry(a).self_gluings : colour_r[seq_last[p.seq]];
        const std::int64_t v = checked_mul(p.weighted, to_signed(r.get(Narrow{})));
        dense[p.seq] = seq_odd[p.seq] ? -v : v;
      }
      std::vector<Count> out;
      out.reserve(partners.size());
      for (TreeId b : partners) {
        std::int64_t total = 0;
        if (entry(b).colour_id == entry(a).colour_id)
          for (const ProfileEntry& p : entry(b).profile) total = checked_add(total, checked_mul(dense[p.seq], p.chains));
        if (total < 0) throw std::logic_error("negative subdivergence-free count");
        out.emplace_back(static_cast<unsigned long>(total));
      }
      for (const ProfileEntry& p : pa) dense[p.seq] = 0;
      return out;
    } catch (const Overflow&) {
      std::fill(dense.begin(), dense.end(), 0);
    }
    std::vector<Count> out;
    for (TreeId b : partners) out.push_back(subfree_exact(a, b));
    return out;
  }

  Count subfree_exact(TreeId a, TreeId b) {
    try {
      return Count(static_cast<unsigned long>(subfree(a, b, Narrow{})));
    } catch (const Overflow&) {
      return subfree(a, b, Wide{});
    }
  }

  Count subdivergence_exact(TreeId a, TreeId b) {
    try {
      return Count(static_cast<unsigned long>(subdivergence(a, b, Narrow{})));
    } catch (const Overflow&) {
      return subdivergence(a, b, Wide{});
    }
  }

  template <typename A>
  typename A::T subfree(TreeId a, TreeId b, A arith) {
    using T = typename A::T;
    const Entry& ea = entry(a);
    const Entry& eb = entry(b);
    if (ea.colour_id != eb.colour_id) return T(0);
    // No sibling set on one side means no subdivergence at all.
    if (decomps(a).empty() || decomps(b).empty()) return ea.self_gluings.get(arith);
    // n is symmetric, so one memo entry serves both orders.
    const std::uint64_t key = a < b ? (std::uint64_t{a} << 32) | b : (std::uint64_t{b} << 32) | a;
    auto& table = memo(arith);
    {
      std::shared_lock lock(memo_mu);
      if (auto it = table.find(key); it != table.end()) {
        hits.fetch_add(1, std::memory_order_relaxed);
        return it->second;
      }
    }
    T r = A::sub(ea.self_gluings.get(arith), subdivergence(a, b, arith));
    std::unique_lock lock(memo_mu);
    table.emplace(key, r);
    return r;
  }

  template <typename A>
  typename A::T subdivergence(TreeId a, TreeId b, A arith) {
    using T = typename A::T;
    T total(0);
    const auto& d1 = decomps(a);
    const auto& d2 = decomps(b);
    auto add_term = [&](const Decomp& x, const Decomp& y) {
      if (x.u_colours != y.u_colours) return;
      T v = subfree(x.u, y.u, arith);
      if (!A::is_zero(v)) total = A::add(total, A::mul(v, x.weight.get(arith)));
    };
    if (!prune) {
      for (const Decomp& x : d1)
        for (const Decomp& y : d2) add_term(x, y);
      return total;
    }
    // Both lists are sorted by the colour multiset of u; only equal
    // multisets (which forces equal sibling-set sizes) can contribute.
    auto i = d1.begin();
    auto j = d2.begin();
    while (i != d1.end() && j != d2.end()) {
      if (i->u_colours < j->u_colours) {
        ++i;
      } else if (j->u_colours < i->u_colours) {
        ++j;
      } else {
        auto j_end = j;
        while (j_end != d2.end() && j_end->u_colours == i->u_colours) ++j_end;
        for (; i != d1.end() && i->u_colours == j->u_colours; ++i)
          for (auto y = j; y != j_end; ++y) add_term(*i, *y);
        j = j_end;
      }
    }
    return total;
  }
};

CutPreprocessor::CutPreprocessor(bool prune) : impl_(std::make_unique<Impl>()) { impl_->prune = prune; }

CutPreprocessor::~CutPreprocessor() = default;

Count CutPreprocessor::subdivergence_free(const RootedTree& t1, const RootedTree& t2) {
  return impl_->subfree_exact(impl_->intern(normalize(t1)), impl_->intern(normalize(t2)));
}

CutPreprocessor::Handle CutPreprocessor::prepare(const RootedTree& t) { return impl_->intern(normalize(t)); }

Count CutPreprocessor::subdivergence_free(Handle t1, Handle t2) { return impl_->subfree_exact(t1, t2); }

std::vector<Count> CutPreprocessor::subdivergence_free_row(Handle t1, const std::vector<Handle>& partners) {
  return impl_->row(t1, partners);
}

std::size_t CutPreprocessor::profile_size(Handle t) {
  std::lock_guard lock(impl_->profile_mu);
  return impl_->profile(t).size();
}

Count CutPreprocessor::subdivergence(const RootedTree& t1, const RootedTree& t2) {
  return impl_->subdivergence_exact(impl_->intern(normalize(t1)), impl_->intern(normalize(t2)));
}

std::vector<CutPreprocessor::Term> CutPreprocessor::subdivergence_terms(const RootedTree& t1,
                                                                         const RootedTree& t2) {
  const auto a = impl_->intern(normalize(t1));
  const auto b = impl_->intern(normalize(t2));
  std::vector<Term> out;
  for (const auto& x : impl_->decomps(a))
    for (const auto& y : impl_->decomps(b)) {
      if (impl_->prune && x.size != y.size) continue;
      Count value = x.u_colours == y.u_colours ? impl_->subfree_exact(x.u, y.u) * x.weight.wide : Count(0);
      out.push_back(Term{x.s, y.s, std::move(value)});
    }
  return out;
}

std::size_t CutPreprocessor::decomposition_count(const RootedTree& t) {
  return impl_->decomps(impl_->intern(normalize(t))).size();
}

void CutPreprocessor::clear_memo() {
  std::unique_lock lock(impl_->memo_mu);
  impl_->narrow_memo.clear();
  impl_->wide_memo.clear();
  std::lock_guard profile_lock(impl_->profile_mu);
  std::shared_lock trees_lock(impl_->trees_mu);
  for (std::uint32_t id = 0; id < impl_->trees.size(); ++id) {
    impl_->entry(id).profile_ready = false;
    impl_->entry(id).profile = {};
  }
  impl_->seq_ids.clear();
  impl_->seq_last.assign(1, 0);
  impl_->seq_odd.assign(1, 0);
  impl_->dense = {};
}

std::size_t CutPreprocessor::memo_size() const {
  std::shared_lock lock(impl_->memo_mu);
  return impl_->narrow_memo.size() + impl_->wide_memo.size();
}

std::uint64_t CutPreprocessor::memo_hits() const { return impl_->hits.load(); }

std::size_t CutPreprocessor::interned_trees() const {
  std::shared_lock lock(impl_->trees_mu);
  return impl_->trees.size();
}

namespace {
CutPreprocessor& shared_preprocessor() {
  static CutPreprocessor p;
  return p;
}
}  // namespace

Count count_with_subdivergences(const RootedTree& t1, const RootedTree& t2) {
  return shared_preprocessor().subdivergence(t1, t2);
}

Count count_subfree_cutpre(const RootedTree& t1, const RootedTree& t2) {
  return shared_preprocessor().subdivergence_free(t1, t2);
}

}  // namespace gluecount
