#include "gluecount/enumerate.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gluecount {

namespace {

struct ShapeTables {
  std::mutex mu;
  std::vector<std::vector<std::string>> nonroot{{}};  // by leaf count
  std::map<unsigned, std::vector<std::string>> rooted;
};

ShapeTables& tables() {
  static ShapeTables t;
  return t;
}

// Multisets of non-root shapes with total leaf count `n` and at least
// `min_parts` members, rendered as sorted "(a,b,...)" strings. Requires the
// nonroot table to be filled up to n (or n-1 when min_parts >= 2).
std::vector<std::string> multisets(const std::vector<std::vector<std::string>>& nonroot, unsigned n,
                                   unsigned min_parts) {
  std::vector<std::string> out;
  std::vector<const std::string*> acc;
  // Members are chosen in nondecreasing (size, index) order.
  auto rec = [&](auto&& self, unsigned rem, unsigned min_size, std::size_t min_idx) -> void {
    if (rem == 0) {
      if (acc.size() < min_parts) return;
      std::vector<std::string> parts;
      for (const auto* s : acc) parts.push_back(*s);
      std::sort(parts.begin(), parts.end());
      std::string text = "(";
      for (std::size_t i = 0; i < parts.size(); ++i) text += (i ? "," : "") + parts[i];
      out.push_back(text + ")");
      return;
    }
    for (unsigned m = min_size; m <= rem; ++m) {
      if (m == n && min_parts >= 2) continue;
      if (m >= nonroot.size()) break;
      const auto& pool = nonroot[m];
      for (std::size_t i = (m == min_size ? min_idx : 0); i < pool.size(); ++i) {
        acc.push_back(&pool[i]);
        self(self, rem - m, m, i);
        acc.pop_back();
      }
    }
  };
  rec(rec, n, 1, 0);
  return out;
}

void fill_nonroot(ShapeTables& t, unsigned n) {
  while (t.nonroot.size() <= n) {
    const auto m = static_cast<unsigned>(t.nonroot.size());
    std::vector<std::string> shapes;
    if (m == 1) shapes = {"*", "(*)"};
    auto more = multisets(t.nonroot, m, 2);
    shapes.insert(shapes.end(), more.begin(), more.end());
    std::sort(shapes.begin(), shapes.end());
    t.nonroot.push_back(std::move(shapes));
  }
}

}  // namespace

const std::vector<std::string>& normalized_tree_strings(unsigned leaves) {
  if (leaves == 0) throw std::invalid_argument("trees have at least one leaf");
  auto& t = tables();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.rooted.find(leaves);
  if (it != t.rooted.end()) return it->second;
  fill_nonroot(t, leaves);
  auto shapes = multisets(t.nonroot, leaves, 1);
  if (leaves == 1) shapes.push_back("*");
  std::sort(shapes.begin(), shapes.end());
  return t.rooted.emplace(leaves, std::move(shapes)).first->second;
}

std::vector<RootedTree> normalized_trees(unsigned leaves) {
  std::vector<RootedTree> out;
  for (const auto& s : normalized_tree_strings(leaves)) out.push_back(parse_tree(s));
  return out;
}

RootedTree random_normalized_tree(unsigned leaves, std::mt19937_64& rng) {
  const auto& pool = normalized_tree_strings(leaves);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  return parse_tree(pool[pick(rng)]);
}

RootedTree with_leaf_colours(const RootedTree& shape, const std::vector<Colour>& colours) {
  if (colours.size() != shape.leaf_count()) throw std::invalid_argument("colour count does not match leaf count");
  std::size_t next = 0;
  auto build = [&](auto&& self, VertexId v) -> RootedTree {
    if (shape.is_leaf(v)) return RootedTree::leaf(colours[next++]);
    std::vector<RootedTree> parts;
    for (VertexId c : shape.children(v)) parts.push_back(self(self, c));
    return RootedTree::graft(parts);
  };
  return build(build, shape.root());
}

RootedTree recolour_randomly(const RootedTree& t, unsigned colours, std::mt19937_64& rng) {
  if (colours == 0) throw std::invalid_argument("need at least one colour");
  std::uniform_int_distribution<unsigned> pick(0, colours - 1);
  std::vector<Colour> cs;
  for (std::size_t i = 0; i < t.leaf_count(); ++i) cs.push_back(Colour::base(pick(rng)));
  return with_leaf_colours(t, cs);
}

}  // namespace gluecount
