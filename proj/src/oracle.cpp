#include "gluecount/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "gluecount/errors.hpp"

namespace gluecount {

namespace {

using Mask = std::uint32_t;

// Leaves indexed by vertex order, and the leaf sets below internal edges as
// masks over that indexing.
struct LeafIndex {
  std::vector<VertexId> leaves;
  std::vector<int> position;  // vertex -> leaf index or -1
  std::vector<Mask> below;    // one per internal edge
  std::vector<bool> is_below; // indexed by mask; sized 2^leaves
  Mask full = 0;
  bool single_vertex = false;

  explicit LeafIndex(const RootedTree& t, bool with_lookup = true) {
    single_vertex = t.vertex_count() == 1;
    if (t.leaf_count() > 24) throw LimitExceeded("tree too large for brute-force enumeration");
    leaves = t.leaves();
    position.assign(t.vertex_count(), -1);
    for (std::size_t i = 0; i < leaves.size(); ++i) position[leaves[i]] = static_cast<int>(i);
    std::vector<Mask> sub(t.vertex_count(), 0);
    for (VertexId v = static_cast<VertexId>(t.vertex_count()); v-- > 0;) {
      if (t.is_leaf(v)) sub[v] = Mask{1} << position[v];
      if (v != t.root()) sub[t.parent(v)] |= sub[v];
    }
    for (Edge e : internal_edges(t)) below.push_back(sub[e.child]);
    full = leaves.size() == 32 ? ~Mask{0} : (Mask{1} << leaves.size()) - 1;
    if (with_lookup) {
      is_below.assign(std::size_t{1} << leaves.size(), false);
      for (Mask m : below) is_below[m] = true;
    }
  }
};

void check_limit(const RootedTree& t1, const RootedTree& t2, const BruteLimits& limits) {
  if (t1.leaf_count() > limits.max_leaves || t2.leaf_count() > limits.max_leaves)
    throw LimitExceeded("leaf count " + std::to_string(std::max(t1.leaf_count(), t2.leaf_count())) +
                        " exceeds the brute-force limit " + std::to_string(limits.max_leaves));
}

Mask image_of(Mask m, const std::vector<int>& map) {
  Mask out = 0;
  while (m) {
    const int i = std::countr_zero(m);
    m &= m - 1;
    out |= Mask{1} << map[i];
  }
  return out;
}

// Colour-preserving bijections between the leaves of two trees, as a product
// of independent permutations inside each colour class. Position `r` of the
// enumeration is the mixed-radix number whose least significant digit is the
// lexicographic rank inside the first class.
class ClassPermutations {
 public:
  ClassPermutations(const RootedTree& t1, const LeafIndex& a, const RootedTree& t2, const LeafIndex& b) {
    std::map<Colour, std::pair<std::vector<int>, std::vector<int>>> classes;
    for (std::size_t i = 0; i < a.leaves.size(); ++i) classes[t1.colour(a.leaves[i])].first.push_back(int(i));
    for (std::size_t i = 0; i < b.leaves.size(); ++i) classes[t2.colour(b.leaves[i])].second.push_back(int(i));
    matched_ = true;
    for (auto& [c, pr] : classes) {
      if (pr.first.size() != pr.second.size()) matched_ = false;
      sources_.push_back(pr.first);
      targets_.push_back(pr.second);
    }
    total_ = 1;
    for (const auto& s : sources_) {
      std::uint64_t f = 1;
      for (std::size_t x = 2; x <= s.size(); ++x) f *= x;
      radix_.push_back(f);
      total_ *= f;
    }
    map_.assign(a.leaves.size(), 0);
  }

  bool matched() const { return matched_; }
  std::uint64_t total() const { return matched_ ? total_ : 0; }

  // Positions the enumeration at rank r.
  void seek(std::uint64_t r) {
    perms_.clear();
    for (std::size_t c = 0; c < sources_.size(); ++c) {
      perms_.push_back(unrank(targets_[c], r % radix_[c]));
      r /= radix_[c];
    }
    rebuild();
  }

  // Advances to the next rank; false after the last.
  bool next() {
    for (std::size_t c = 0; c < perms_.size(); ++c) {
      const bool more = std::next_permutation(perms_[c].begin(), perms_[c].end());
      apply(c);
      if (more) return true;
    }
    return false;
  }

  const std::vector<int>& map() const { return map_; }

 private:
  static std::vector<int> unrank(std::vector<int> items, std::uint64_t r) {
    std::sort(items.begin(), items.end());
    std::vector<int> out;
    std::vector<std::uint64_t> fact(items.size() + 1, 1);
    for (std::size_t i = 1; i <= items.size(); ++i) fact[i] = fact[i - 1] * i;
    while (!items.empty()) {
      const std::uint64_t f = fact[items.size() - 1];
      const std::size_t idx = static_cast<std::size_t>(r / f);
      r %= f;
      out.push_back(items[idx]);
      items.erase(items.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    return out;
  }

  void apply(std::size_t c) {
    for (std::size_t i = 0; i < sources_[c].size(); ++i) map_[sources_[c][i]] = perms_[c][i];
  }
  void rebuild() {
    for (std::size_t c = 0; c < perms_.size(); ++c) apply(c);
  }

  bool matched_ = false;
  std::vector<std::vector<int>> sources_;
  std::vector<std::vector<int>> targets_;
  std::vector<std::vector<int>> perms_;
  std::vector<std::uint64_t> radix_;
  std::uint64_t total_ = 0;
  std::vector<int> map_;
};

bool subdivergent(const LeafIndex& a, const LeafIndex& b, const std::vector<int>& map) {
  for (Mask m : a.below)
    if (b.is_below[image_of(m, map)]) return true;
  return false;
}

std::vector<int> leaf_positions(const RootedTree& t, std::span<const VertexId> subset, const LeafIndex& idx,
                                const char* which) {
  std::vector<int> out;
  Mask seen = 0;
  for (VertexId v : subset) {
    if (!t.contains(v) || idx.position[v] < 0)
      throw std::invalid_argument(std::string(which) + " contains a vertex that is not a leaf");
    const Mask bit = Mask{1} << idx.position[v];
    if (seen & bit) throw std::invalid_argument(std::string(which) + " contains a repeated leaf");
    seen |= bit;
    out.push_back(idx.position[v]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct GluingMasks {
  Mask dom = 0;
  Mask img = 0;
  std::vector<int> map;  // t1 leaf index -> t2 leaf index (or -1)
};

GluingMasks masks_of(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g, const LeafIndex& a,
                     const LeafIndex& b) {
  validate_gluing(t1, t2, g);
  GluingMasks out;
  out.map.assign(a.leaves.size(), -1);
  for (auto [u, v] : g.pairs) {
    const int i = a.position[u];
    const int j = b.position[v];
    out.dom |= Mask{1} << i;
    out.img |= Mask{1} << j;
    out.map[i] = j;
  }
  return out;
}

bool fully_internal(const LeafIndex& a, const LeafIndex& b, Mask dom, const std::vector<int>& map) {
  for (Mask m : a.below)
    if ((m & ~dom) == 0 && b.is_below[image_of(m, map)]) return true;
  return false;
}

// The single-vertex tree is root and leaf at once; by convention a part
// holding its root never makes a one-sided subdivergence.
bool right_sided(const LeafIndex& a, const LeafIndex& b, Mask dom, Mask img) {
  return !b.single_vertex && img == b.full && a.is_below[dom];
}

bool left_sided(const LeafIndex& a, const LeafIndex& b, Mask dom, Mask img) {
  return !a.single_vertex && dom == a.full && b.is_below[img];
}

bool excluded(PartialMode mode, const LeafIndex& a, const LeafIndex& b, Mask dom, Mask img,
              const std::vector<int>& map) {
  if (right_sided(a, b, dom, img)) return true;
  if (mode == PartialMode::NoSubdivergence && left_sided(a, b, dom, img)) return true;
  return fully_internal(a, b, dom, map);
}

// Glued graph: t1 vertices first, then t2 vertices; each glued t2 leaf is
// identified with its t1 partner.
class GluedGraph {
 public:
  GluedGraph(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g)
      : t1_(t1), t2_(t2), offset_(static_cast<VertexId>(t1.vertex_count())) {
    const std::size_t n = t1.vertex_count() + t2.vertex_count();
    rep_.resize(n);
    std::iota(rep_.begin(), rep_.end(), 0u);
    for (auto [u, v] : g.pairs) rep_[offset_ + v] = u;
    glued_.assign(n, false);
    for (auto [u, v] : g.pairs) {
      glued_[u] = true;
      glued_[offset_ + v] = true;
    }
  }

  VertexId root1() const { return rep_[0]; }
  VertexId root2() const { return rep_[offset_]; }

  // Component labels after deleting the given edges (named by child vertex in
  // each tree).
  std::vector<int> components(std::optional<VertexId> cut1, std::optional<VertexId> cut2) const {
    const std::size_t n = rep_.size();
    std::vector<std::vector<VertexId>> adj(n);
    auto link = [&](VertexId x, VertexId y) {
      adj[rep_[x]].push_back(rep_[y]);
      adj[rep_[y]].push_back(rep_[x]);
    };
    for (VertexId v = 1; v < t1_.vertex_count(); ++v)
      if (!cut1 || *cut1 != v) link(t1_.parent(v), v);
    for (VertexId v = 1; v < t2_.vertex_count(); ++v)
      if (!cut2 || *cut2 != v) link(offset_ + t2_.parent(v), offset_ + v);
    std::vector<int> label(n, -1);
    int next = 0;
    for (VertexId s = 0; s < n; ++s) {
      if (rep_[s] != s || label[s] >= 0) continue;
      std::vector<VertexId> stack{s};
      label[s] = next;
      while (!stack.empty()) {
        const VertexId x = stack.back();
        stack.pop_back();
        for (VertexId y : adj[x])
          if (label[y] < 0) {
            label[y] = next;
            stack.push_back(y);
          }
      }
      ++next;
    }
    for (VertexId s = 0; s < n; ++s) label[s] = label[rep_[s]];
    return label;
  }

  // Components holding an unpaired leaf of either tree.
  std::vector<bool> with_unpaired_leaf(const std::vector<int>& label) const {
    std::vector<bool> out(label.size(), false);
    for (VertexId v : t1_.leaves())
      if (!glued_[v]) out[label[v]] = true;
    for (VertexId v : t2_.leaves())
      if (!glued_[offset_ + v]) out[label[offset_ + v]] = true;
    return out;
  }

  VertexId offset() const { return offset_; }

 private:
  const RootedTree& t1_;
  const RootedTree& t2_;
  VertexId offset_;
  std::vector<VertexId> rep_;
  std::vector<bool> glued_;
};

}  // namespace

BruteLimits BruteLimits::from_env() {
  BruteLimits limits;
  if (const char* env = std::getenv("GLUECOUNT_BRUTE_LIMIT")) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(env, &used);
      if (used != std::string(env).size() || v == 0 || v > 24) throw std::invalid_argument("range");
      limits.max_leaves = static_cast<unsigned>(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("GLUECOUNT_BRUTE_LIMIT must be an integer in 1..24");
    }
  }
  return limits;
}

void validate_gluing(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g) {
  std::vector<bool> used1(t1.vertex_count(), false);
  std::vector<bool> used2(t2.vertex_count(), false);
  for (auto [u, v] : g.pairs) {
    if (!t1.contains(u) || !t1.is_leaf(u)) throw std::invalid_argument("gluing uses a non-leaf of t1");
    if (!t2.contains(v) || !t2.is_leaf(v)) throw std::invalid_argument("gluing uses a non-leaf of t2");
    if (used1[u] || used2[v]) throw std::invalid_argument("gluing is not injective");
    used1[u] = used2[v] = true;
  }
}

bool has_fully_internal(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g) {
  LeafIndex a(t1), b(t2);
  auto m = masks_of(t1, t2, g, a, b);
  return fully_internal(a, b, m.dom, m.map);
}

bool has_one_sided(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g, SubdivergenceKind side) {
  if (side == SubdivergenceKind::FullyInternal)
    throw std::invalid_argument("has_one_sided takes LeftSided or RightSided");
  LeafIndex a(t1), b(t2);
  auto m = masks_of(t1, t2, g, a, b);
  return side == SubdivergenceKind::RightSided ? right_sided(a, b, m.dom, m.img) : left_sided(a, b, m.dom, m.img);
}

bool has_fully_internal_literal(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g) {
  validate_gluing(t1, t2, g);
  GluedGraph graph(t1, t2, g);
  for (Edge e1 : internal_edges(t1))
    for (Edge e2 : internal_edges(t2)) {
      auto label = graph.components(e1.child, e2.child);
      auto dirty = graph.with_unpaired_leaf(label);
      dirty[label[graph.root1()]] = true;
      dirty[label[graph.root2()]] = true;
      for (int c : label)
        if (!dirty[c]) return true;
    }
  return false;
}

bool has_one_sided_literal(const RootedTree& t1, const RootedTree& t2, const PartialGluing& g,
                           SubdivergenceKind side) {
  if (side == SubdivergenceKind::FullyInternal)
    throw std::invalid_argument("has_one_sided_literal takes LeftSided or RightSided");
  validate_gluing(t1, t2, g);
  const bool right = side == SubdivergenceKind::RightSided;
  if ((right ? t2 : t1).vertex_count() == 1) return false;
  GluedGraph graph(t1, t2, g);
  // A bridge inside one tree whose far side holds the other tree's root, not
  // its own root, and no unpaired leaf.
  for (Edge e : internal_edges(right ? t1 : t2)) {
    auto label = right ? graph.components(e.child, std::nullopt) : graph.components(std::nullopt, e.child);
    const int part = label[right ? e.child : graph.offset() + e.child];
    const int own_root = label[right ? graph.root1() : graph.root2()];
    const int other_root = label[right ? graph.root2() : graph.root1()];
    if (part == own_root || part != other_root) continue;
    if (!graph.with_unpaired_leaf(label)[part]) return true;
  }
  return false;
}

Count count_subfree_brute(const RootedTree& t1, const RootedTree& t2, BruteLimits limits) {
  check_limit(t1, t2, limits);
  if (t1.leaf_count() != t2.leaf_count()) return 0;
  LeafIndex a(t1), b(t2);
  ClassPermutations perms(t1, a, t2, b);
  if (!perms.matched()) return 0;
  perms.seek(0);
  std::uint64_t count = 0;
  do {
    if (!subdivergent(a, b, perms.map())) ++count;
  } while (perms.next());
  return Count(static_cast<unsigned long>(count));
}

Count count_subfree_brute_parallel(const RootedTree& t1, const RootedTree& t2, BruteLimits limits) {
  check_limit(t1, t2, limits);
  if (t1.leaf_count() != t2.leaf_count()) return 0;
  const LeafIndex a(t1), b(t2);
  const ClassPermutations proto(t1, a, t2, b);
  if (!proto.matched()) return 0;
  const std::uint64_t total = proto.total();
  constexpr std::uint64_t kChunk = 2048;
  const auto chunks = static_cast<std::int64_t>((total + kChunk - 1) / kChunk);
  std::uint64_t count = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : count)
  for (std::int64_t c = 0; c < chunks; ++c) {
    ClassPermutations perms = proto;
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    perms.seek(begin);
    for (std::uint64_t r = begin; r < end; ++r) {
      if (!subdivergent(a, b, perms.map())) ++count;
      perms.next();
    }
  }
  return Count(static_cast<unsigned long>(count));
}

Count count_partial_brute(const RootedTree& t1, const RootedTree& t2, unsigned k, std::span<const VertexId> s1,
                          std::span<const VertexId> s2, PartialMode mode, BruteLimits limits) {
  check_limit(t1, t2, limits);
  LeafIndex a(t1), b(t2);
  const auto from = leaf_positions(t1, s1, a, "S1");
  const auto to = leaf_positions(t2, s2, b, "S2");
  if (k > from.size() || k > to.size()) return 0;

  std::vector<Colour> colour1, colour2;
  for (VertexId v : a.leaves) colour1.push_back(t1.colour(v));
  for (VertexId v : b.leaves) colour2.push_back(t2.colour(v));

  std::vector<int> map(a.leaves.size(), -1);
  std::vector<bool> used(b.leaves.size(), false);
  std::uint64_t count = 0;
  auto rec = [&](auto&& self, std::size_t pos, unsigned placed, Mask dom, Mask img) -> void {
    if (placed == k) {
      if (!excluded(mode, a, b, dom, img, map)) ++count;
      return;
    }
    if (from.size() - pos < k - placed) return;
    const int i = from[pos];
    self(self, pos + 1, placed, dom, img);
    for (int j : to) {
      if (used[j] || colour1[i] != colour2[j]) continue;
      used[j] = true;
      map[i] = j;
      self(self, pos + 1, placed + 1, dom | (Mask{1} << i), img | (Mask{1} << j));
      map[i] = -1;
      used[j] = false;
    }
  };
  rec(rec, 0, 0, 0, 0);
  return Count(static_cast<unsigned long>(count));
}

void for_each_full_gluing(const RootedTree& t1, const RootedTree& t2,
                          const std::function<void(const PartialGluing&)>& visit, BruteLimits limits) {
  check_limit(t1, t2, limits);
  if (t1.leaf_count() != t2.leaf_count()) return;
  LeafIndex a(t1), b(t2);
  ClassPermutations perms(t1, a, t2, b);
  if (!perms.matched()) return;
  perms.seek(0);
  PartialGluing g;
  do {
    g.pairs.clear();
    for (std::size_t i = 0; i < a.leaves.size(); ++i) g.pairs.emplace_back(a.leaves[i], b.leaves[perms.map()[i]]);
    visit(g);
  } while (perms.next());
}

// ---------------------------------------------------------------------------

SubfreeBatch::SubfreeBatch(const RootedTree& t1, BruteLimits limits) {
  check_limit(t1, t1, limits);
  if (!is_single_coloured(t1)) throw std::invalid_argument("SubfreeBatch needs an uncoloured tree");
  LeafIndex a(t1, false);
  leaves_ = a.leaves.size();
  colour_ = t1.colour(a.leaves[0]);
  words_ = ((std::size_t{1} << leaves_) + 63) / 64;

  std::map<std::vector<std::uint64_t>, std::uint64_t> groups;
  std::vector<int> perm(leaves_);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::uint64_t> sig(words_);
  do {
    std::fill(sig.begin(), sig.end(), 0);
    for (Mask m : a.below) {
      const Mask img = image_of(m, perm);
      sig[img / 64] |= std::uint64_t{1} << (img % 64);
    }
    ++groups[sig];
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (const auto& [s, mult] : groups) {
    signatures_.insert(signatures_.end(), s.begin(), s.end());
    multiplicity_.push_back(mult);
  }
}

SubfreeBatch::PartnerBitmap SubfreeBatch::partner_bitmap(const RootedTree& t2) {
  PartnerBitmap out;
  LeafIndex b(t2, false);
  out.leaves = b.leaves.size();
  out.single_coloured = is_single_coloured(t2);
  out.colour = t2.colour(b.leaves[0]);
  out.words.assign(((std::size_t{1} << out.leaves) + 63) / 64, 0);
  for (Mask m : b.below) out.words[m / 64] |= std::uint64_t{1} << (m % 64);
  return out;
}

std::uint64_t SubfreeBatch::count(const PartnerBitmap& partner) const {
  if (partner.leaves != leaves_ || !partner.single_coloured || !(partner.colour == colour_)) return 0;
  std::uint64_t total = 0;
  const std::uint64_t* sig = signatures_.data();
  for (std::size_t g = 0; g < multiplicity_.size(); ++g, sig += words_) {
    bool hit = false;
    for (std::size_t w = 0; w < words_ && !hit; ++w) hit = (sig[w] & partner.words[w]) != 0;
    if (!hit) total += multiplicity_[g];
  }
  return total;
}

Count SubfreeBatch::count(const RootedTree& t2) const {
  if (t2.leaf_count() != leaves_) return 0;
  return Count(static_cast<unsigned long>(count(partner_bitmap(t2))));
}

// ---------------------------------------------------------------------------

PartialTable::PartialTable(const RootedTree& t1, const RootedTree& t2, BruteLimits limits) {
  check_limit(t1, t2, limits);
  LeafIndex a(t1), b(t2);
  n1_ = static_cast<unsigned>(a.leaves.size());
  n2_ = static_cast<unsigned>(b.leaves.size());
  if (n1_ + n2_ > 20) throw LimitExceeded("PartialTable supports at most 20 leaves in total");
  const std::size_t cells = std::size_t{1} << (n1_ + n2_);
  const unsigned kmax = std::min(n1_, n2_);
  for (auto& per_mode : table_) per_mode.assign(kmax + 1, std::vector<std::uint64_t>(cells, 0));

  std::vector<Colour> colour1, colour2;
  for (VertexId v : a.leaves) colour1.push_back(t1.colour(v));
  for (VertexId v : b.leaves) colour2.push_back(t2.colour(v));

  std::vector<int> map(n1_, -1);
  std::vector<bool> used(n2_, false);
  auto rec = [&](auto&& self, unsigned i, unsigned k, Mask dom, Mask img) -> void {
    if (i == n1_) {
      const std::size_t cell = dom | (std::size_t{img} << n1_);
      if (!excluded(PartialMode::NoSubdivergence, a, b, dom, img, map)) ++table_[0][k][cell];
      if (!excluded(PartialMode::NoInternalOrRightSided, a, b, dom, img, map)) ++table_[1][k][cell];
      return;
    }
    self(self, i + 1, k, dom, img);
    for (unsigned j = 0; j < n2_; ++j) {
      if (used[j] || colour1[i] != colour2[j]) continue;
      used[j] = true;
      map[i] = static_cast<int>(j);
      self(self, i + 1, k + 1, dom | (Mask{1} << i), img | (Mask{1} << j));
      map[i] = -1;
      used[j] = false;
    }
  };
  rec(rec, 0, 0, 0, 0);

  // Subset sums: each cell becomes the total over all (dom, img) inside it.
  for (auto& per_mode : table_)
    for (auto& f : per_mode)
      for (unsigned bit = 0; bit < n1_ + n2_; ++bit) {
        const std::size_t step = std::size_t{1} << bit;
        for (std::size_t s = 0; s < cells; ++s)
          if (s & step) f[s] += f[s ^ step];
      }
}

std::uint64_t PartialTable::count(PartialMode mode, unsigned k, std::uint32_t s1, std::uint32_t s2) const {
  const auto& per_mode = table_[mode == PartialMode::NoSubdivergence ? 0 : 1];
  if (k >= per_mode.size()) return 0;
  if ((s1 >> n1_) != 0 || (s2 >> n2_) != 0) throw std::invalid_argument("mask has bits beyond the leaf count");
  return per_mode[k][s1 | (std::size_t{s2} << n1_)];
}

}  // namespace gluecount
