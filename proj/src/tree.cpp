#include "gluecount/tree.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "gluecount/errors.hpp"

namespace gluecount {

Colour Colour::base(std::uint64_t id) {
  Colour c;
  c.kind_ = Kind::kBase;
  c.id_ = id;
  return c;
}

Colour Colour::fresh(std::string key) {
  if (key.empty()) throw std::invalid_argument("fresh colour key must be nonempty");
  Colour c;
  c.kind_ = Kind::kFresh;
  c.key_ = std::move(key);
  return c;
}

std::string Colour::to_string() const {
  if (is_fresh()) return "#" + key_;
  if (id_ == 0) return "*";
  return std::to_string(id_);
}

void ColourMultiset::add(const Colour& c, std::size_t times) {
  if (times == 0) return;
  counts_[c] += times;
  size_ += times;
}

std::size_t ColourMultiset::multiplicity(const Colour& c) const {
  auto it = counts_.find(c);
  return it == counts_.end() ? 0 : it->second;
}

std::string ColourMultiset::key() const {
  std::string out = "[";
  bool first = true;
  for (const auto& [c, m] : counts_) {
    if (!first) out += ';';
    first = false;
    out += c.to_string();
    out += '^';
    out += std::to_string(m);
  }
  out += ']';
  return out;
}

// ---------------------------------------------------------------------------

RootedTree::RootedTree() : parent_{kNoParent}, children_(1), colour_(1) {}

RootedTree RootedTree::leaf(Colour c) {
  RootedTree t;
  t.colour_[0] = std::move(c);
  return t;
}

RootedTree RootedTree::graft(std::span<const RootedTree> subtrees) {
  if (subtrees.empty()) throw std::invalid_argument("graft needs at least one subtree");
  RootedTree t;
  t.leaf_count_ = 0;
  for (const RootedTree& s : subtrees) {
    const auto offset = static_cast<VertexId>(t.parent_.size());
    t.children_[0].push_back(offset);
    for (VertexId v = 0; v < s.vertex_count(); ++v) {
      t.parent_.push_back(v == 0 ? 0 : s.parent_[v] + offset);
      std::vector<VertexId> ch = s.children_[v];
      for (VertexId& c : ch) c += offset;
      t.children_.push_back(std::move(ch));
      t.colour_.push_back(s.colour_[v]);
    }
    t.leaf_count_ += s.leaf_count_;
  }
  t.colour_[0] = Colour{};
  return t;
}

RootedTree RootedTree::graft(std::initializer_list<RootedTree> subtrees) {
  return graft(std::span<const RootedTree>(subtrees.begin(), subtrees.size()));
}

VertexId RootedTree::parent(VertexId v) const {
  if (!contains(v)) throw std::out_of_range("unknown vertex");
  return parent_[v];
}

const std::vector<VertexId>& RootedTree::children(VertexId v) const {
  if (!contains(v)) throw std::out_of_range("unknown vertex");
  return children_[v];
}

const Colour& RootedTree::colour(VertexId leaf) const {
  if (!is_leaf(leaf)) throw std::invalid_argument("colour requested for an internal vertex");
  return colour_[leaf];
}

std::vector<VertexId> RootedTree::leaves() const {
  std::vector<VertexId> out;
  out.reserve(leaf_count_);
  for (VertexId v = 0; v < vertex_count(); ++v)
    if (children_[v].empty()) out.push_back(v);
  return out;
}

std::vector<Edge> RootedTree::edges() const {
  std::vector<Edge> out;
  for (VertexId v = 1; v < vertex_count(); ++v) out.push_back(Edge{v});
  return out;
}

bool RootedTree::is_ancestor_or_self(VertexId a, VertexId d) const {
  for (VertexId v = d; v != kNoParent; v = parent_[v])
    if (v == a) return true;
  return false;
}

RootedTree RootedTree::subtree(VertexId v) const {
  if (is_leaf(v)) return leaf(colour_[v]);
  std::vector<RootedTree> parts;
  for (VertexId c : children_[v]) parts.push_back(subtree(c));
  return graft(parts);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  RootedTree parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty input", pos_);
    RootedTree t = node();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return t;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  RootedTree node() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char ch = text_[pos_];
    if (ch == '(') {
      ++pos_;
      std::vector<RootedTree> parts;
      parts.push_back(node());
      for (;;) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("missing ')'", pos_);
        if (text_[pos_] == ',') {
          ++pos_;
          parts.push_back(node());
        } else if (text_[pos_] == ')') {
          ++pos_;
          break;
        } else {
          throw ParseError(std::string("expected ',' or ')' but found '") + text_[pos_] + "'", pos_);
        }
      }
      return RootedTree::graft(parts);
    }
    if (ch == '*') {
      ++pos_;
      return RootedTree::leaf(Colour::base(0));
    }
    if (ch == '#') return RootedTree::leaf(fresh());
    if (std::isdigit(static_cast<unsigned char>(ch))) return RootedTree::leaf(number());
    throw ParseError(std::string("unexpected character '") + ch + "'", pos_);
  }

  Colour number() {
    const std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10)
        throw ParseError("colour out of range", start);
      value = value * 10 + digit;
      ++pos_;
    }
    return Colour::base(value);
  }

  // A fresh key runs until a delimiter outside square brackets.
  Colour fresh() {
    const std::size_t start = ++pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '[') {
        ++depth;
      } else if (c == ']') {
        if (--depth < 0) throw ParseError("unbalanced ']' in fresh colour", pos_);
      } else if (depth == 0 && (c == ',' || c == '(' || c == ')' ||
                                std::isspace(static_cast<unsigned char>(c)))) {
        break;
      }
      ++pos_;
    }
    if (depth != 0) throw ParseError("unterminated fresh colour", start);
    if (pos_ == start) throw ParseError("empty fresh colour", start);
    return Colour::fresh(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::vector<std::string> child_serializations(const RootedTree& t, VertexId v) {
  std::vector<std::string> parts;
  for (VertexId c : t.children(v)) parts.push_back(serialize_subtree(t, c));
  return parts;
}

// Children of v, ordered as the canonical serialization lists them.
std::vector<VertexId> canonical_children(const RootedTree& t, VertexId v) {
  const auto& ch = t.children(v);
  std::vector<std::string> keys = child_serializations(t, v);
  std::vector<std::size_t> idx(ch.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::vector<VertexId> out;
  for (std::size_t i : idx) out.push_back(ch[i]);
  return out;
}

// Rebuilds t below v. `expand(u)` says whether u should be spliced into its
// parent (its children take its place); `wrap(u)` says whether u should get a
// new unary vertex above it.
template <typename Expand, typename Wrap>
RootedTree rebuild(const RootedTree& t, VertexId v, const Expand& expand, const Wrap& wrap) {
  RootedTree out;
  if (t.is_leaf(v)) {
    out = RootedTree::leaf(t.colour(v));
  } else {
    std::vector<RootedTree> parts;
    std::vector<VertexId> stack(t.children(v).rbegin(), t.children(v).rend());
    while (!stack.empty()) {
      const VertexId c = stack.back();
      stack.pop_back();
      if (expand(c)) {
        const auto& gc = t.children(c);
        stack.insert(stack.end(), gc.rbegin(), gc.rend());
      } else {
        parts.push_back(rebuild(t, c, expand, wrap));
      }
    }
    out = RootedTree::graft(parts);
  }
  if (wrap(v)) out = RootedTree::graft({out});
  return out;
}

bool collapsible(const RootedTree& t, VertexId v) {
  if (v == t.root() || t.is_leaf(v)) return false;
  const auto& ch = t.children(v);
  return ch.size() == 1 && !t.is_leaf(ch[0]);
}

}  // namespace

RootedTree parse_tree(std::string_view text) { return Parser(text).parse(); }

std::string serialize_subtree(const RootedTree& t, VertexId v) {
  if (t.is_leaf(v)) return t.colour(v).to_string();
  std::vector<std::string> parts = child_serializations(t, v);
  std::sort(parts.begin(), parts.end());
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  out += ')';
  return out;
}

std::string serialize_tree(const RootedTree& t) { return serialize_subtree(t, t.root()); }

std::vector<VertexId> canonical_leaf_order(const RootedTree& t) {
  std::vector<VertexId> out;
  std::vector<VertexId> stack{t.root()};
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    if (t.is_leaf(v)) {
      out.push_back(v);
      continue;
    }
    auto ch = canonical_children(t, v);
    stack.insert(stack.end(), ch.rbegin(), ch.rend());
  }
  return out;
}

std::vector<VertexId> leaves_below(const RootedTree& t, Edge e) {
  if (!t.has_edge(e)) throw std::invalid_argument("unknown edge");
  std::vector<VertexId> out;
  std::vector<VertexId> stack{e.child};
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    if (t.is_leaf(v)) out.push_back(v);
    for (VertexId c : t.children(v)) stack.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> internal_edges(const RootedTree& t) {
  std::vector<Edge> out;
  for (Edge e : t.edges())
    if (!t.is_leaf(e.child)) out.push_back(e);
  return out;
}

RootedTree contract_edge(const RootedTree& t, Edge e) {
  if (!t.has_edge(e)) throw std::invalid_argument("unknown edge");
  if (t.is_leaf(e.child)) throw std::invalid_argument("cannot contract an edge incident to a leaf");
  return rebuild(t, t.root(), [&](VertexId u) { return u == e.child; }, [](VertexId) { return false; });
}

RootedTree subdivide_edge(const RootedTree& t, Edge e) {
  if (!t.has_edge(e)) throw std::invalid_argument("unknown edge");
  return rebuild(t, t.root(), [](VertexId) { return false; }, [&](VertexId u) { return u == e.child; });
}

RootedTree normalize(const RootedTree& t) {
  return rebuild(t, t.root(), [&](VertexId u) { return collapsible(t, u); }, [](VertexId) { return false; });
}

bool is_normalized(const RootedTree& t) {
  for (VertexId v = 0; v < t.vertex_count(); ++v)
    if (collapsible(t, v)) return false;
  return true;
}

bool is_sibling_set(const RootedTree& t, std::span<const Edge> edges) {
  if (edges.empty()) return false;
  for (Edge e : edges)
    if (!t.is_internal_edge(e)) return false;
  for (std::size_t a = 0; a < edges.size(); ++a)
    for (std::size_t b = 0; b < edges.size(); ++b)
      if (a != b && t.is_ancestor_or_self(edges[a].child, edges[b].child)) return false;
  return true;
}

std::vector<SiblingSet> sibling_sets(const RootedTree& t) {
  // below[v]: antichains of internal edges strictly inside the subtree of v
  // (possibly empty). Built bottom-up; ids are preorder so reverse order works.
  std::vector<std::vector<std::vector<Edge>>> below(t.vertex_count());
  for (VertexId v = static_cast<VertexId>(t.vertex_count()); v-- > 0;) {
    std::vector<std::vector<Edge>> acc{{}};
    for (VertexId c : t.children(v)) {
      std::vector<std::vector<Edge>> options = std::move(below[c]);
      if (!t.is_leaf(c)) options.push_back({Edge{c}});
      std::vector<std::vector<Edge>> next;
      next.reserve(acc.size() * options.size());
      for (const auto& a : acc)
        for (const auto& o : options) {
          auto merged = a;
          merged.insert(merged.end(), o.begin(), o.end());
          next.push_back(std::move(merged));
        }
      acc = std::move(next);
    }
    below[v] = std::move(acc);
  }
  std::vector<SiblingSet> out;
  for (auto& s : below[t.root()]) {
    if (s.empty()) continue;
    std::sort(s.begin(), s.end());
    out.push_back(SiblingSet{std::move(s)});
  }
  return out;
}

ColourMultiset colour_multiset(const RootedTree& t, VertexId v) {
  ColourMultiset m;
  std::vector<VertexId> stack{v};
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    if (t.is_leaf(u)) m.add(t.colour(u));
    for (VertexId c : t.children(u)) stack.push_back(c);
  }
  return m;
}

ColourMultiset colour_multiset(const RootedTree& t) { return colour_multiset(t, t.root()); }

bool is_single_coloured(const RootedTree& t) { return colour_multiset(t).counts().size() == 1; }

// ---------------------------------------------------------------------------
// Families

namespace {

std::vector<RootedTree> plain_leaves(unsigned n) { return std::vector<RootedTree>(n, RootedTree::leaf()); }

RootedTree line_s(unsigned k, const std::vector<unsigned>& s) {
  // Deepest vertex first: vertex m carries s_m - s_{m-1} leaves, so that s_m
  // leaves lie below it; the root takes the remaining k - s_last.
  if (s.empty()) return RootedTree::graft(plain_leaves(k));
  RootedTree t = RootedTree::graft(plain_leaves(s[0]));
  for (std::size_t m = 1; m < s.size(); ++m) {
    auto parts = plain_leaves(s[m] - s[m - 1]);
    parts.push_back(std::move(t));
    t = RootedTree::graft(parts);
  }
  auto parts = plain_leaves(k - s.back());
  parts.push_back(std::move(t));
  return RootedTree::graft(parts);
}

std::vector<unsigned> full_range(unsigned k) {
  std::vector<unsigned> s;
  for (unsigned x = 1; x < k; ++x) s.push_back(x);
  return s;
}

RootedTree fan_line(unsigned k, unsigned i, unsigned j) {
  RootedTree t;
  for (unsigned v = 1; v <= k; ++v) {
    std::vector<RootedTree> parts;
    if (v == i) {
      parts.push_back(RootedTree::graft(plain_leaves(j)));
    } else {
      parts.push_back(RootedTree::leaf());
    }
    if (v == 1)
      for (unsigned x = 1; x < j; ++x) parts.push_back(RootedTree::leaf());
    if (v > 1) parts.push_back(std::move(t));
    t = RootedTree::graft(parts);
  }
  return t;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate(const FamilySpec& spec) {
  std::visit(Overloaded{
                 [](const family::Line& f) {
                   if (f.k < 1) throw std::invalid_argument("line: k must be >= 1");
                 },
                 [](const family::LineS& f) {
                   if (f.k < 1) throw std::invalid_argument("line-s: k must be >= 1");
                   for (std::size_t m = 0; m < f.s.size(); ++m) {
                     if (f.s[m] < 1 || f.s[m] >= f.k)
                       throw std::invalid_argument("line-s: elements of S must lie in 1..k-1");
                     if (m && f.s[m] <= f.s[m - 1])
                       throw std::invalid_argument("line-s: S must be strictly increasing");
                   }
                 },
                 [](const family::TwoEnded& f) {
                   if (f.k < 1 || f.l < 1) throw std::invalid_argument("two-ended: k and l must be >= 1");
                 },
                 [](const family::FanLine& f) {
                   if (!(1 < f.i && f.i < f.k)) throw std::invalid_argument("fan-line: need 1 < i < k");
                   if (f.j < 1) throw std::invalid_argument("fan-line: need j >= 1");
                 },
                 [](const family::Fan& f) {
                   if (f.k < 1) throw std::invalid_argument("fan: k must be >= 1");
                 },
             },
             spec);
}

RootedTree build_family(const FamilySpec& spec) {
  validate(spec);
  return std::visit(Overloaded{
                        [](const family::Line& f) { return line_s(f.k, full_range(f.k)); },
                        [](const family::LineS& f) { return line_s(f.k, f.s); },
                        [](const family::TwoEnded& f) {
                          return RootedTree::graft({line_s(f.k, full_range(f.k)), line_s(f.l, full_range(f.l))});
                        },
                        [](const family::FanLine& f) { return fan_line(f.k, f.i, f.j); },
                        [](const family::Fan& f) { return line_s(f.k, {}); },
                    },
                    spec);
}

std::size_t family_leaf_count(const FamilySpec& spec) {
  return std::visit(Overloaded{
                        [](const family::Line& f) -> std::size_t { return f.k; },
                        [](const family::LineS& f) -> std::size_t { return f.k; },
                        [](const family::TwoEnded& f) -> std::size_t { return f.k + f.l; },
                        [](const family::FanLine& f) -> std::size_t { return f.k + 2 * (f.j - 1); },
                        [](const family::Fan& f) -> std::size_t { return f.k; },
                    },
                    spec);
}

std::string describe(const FamilySpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const family::Line& f) { os << "line(" << f.k << ")"; },
                 [&](const family::LineS& f) {
                   os << "line-s(" << f.k << ",{";
                   for (std::size_t m = 0; m < f.s.size(); ++m) os << (m ? "," : "") << f.s[m];
                   os << "})";
                 },
                 [&](const family::TwoEnded& f) { os << "two-ended(" << f.k << "," << f.l << ")"; },
                 [&](const family::FanLine& f) { os << "fan-line(" << f.k << "," << f.i << "," << f.j << ")"; },
                 [&](const family::Fan& f) { os << "fan(" << f.k << ")"; },
             },
             spec);
  return os.str();
}

}  // namespace gluecount
