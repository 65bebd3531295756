#include "gluecount/cli.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "gluecount/closed_forms.hpp"
#include "gluecount/cutpre.hpp"
#include "gluecount/enumerate.hpp"
#include "gluecount/errors.hpp"
#include "gluecount/oracle.hpp"

namespace gluecount::cli {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::optional<Algo> parse_algo(std::string_view name) {
  if (name == "brute") return Algo::Brute;
  if (name == "recursive") return Algo::Recursive;
  if (name == "cutpre") return Algo::CutPre;
  if (name == "closed") return Algo::Closed;
  if (name == "auto") return Algo::Auto;
  return std::nullopt;
}

std::string to_string(Algo a) {
  switch (a) {
    case Algo::Brute: return "brute";
    case Algo::Recursive: return "recursive";
    case Algo::CutPre: return "cutpre";
    case Algo::Closed: return "closed";
    case Algo::Auto: return "auto";
  }
  return "unknown";
}

namespace {

ZeroReason parse_zero_reason(const std::string& s) {
  for (ZeroReason r : {ZeroReason::None, ZeroReason::LeafMismatch, ZeroReason::ColourMismatch,
                       ZeroReason::AllSubdivergent})
    if (gluecount::to_string(r) == s) return r;
  throw std::invalid_argument("unknown zero reason '" + s + "'");
}

ZeroReason zero_reason_for(const RootedTree& t1, const RootedTree& t2, const Count& c) {
  if (c != 0) return ZeroReason::None;
  if (t1.leaf_count() != t2.leaf_count()) return ZeroReason::LeafMismatch;
  if (!(colour_multiset(t1) == colour_multiset(t2))) return ZeroReason::ColourMismatch;
  return ZeroReason::AllSubdivergent;
}

RootedTree plain(const RootedTree& t) { return with_leaf_colours(t, std::vector<Colour>(t.leaf_count())); }

// k and S when t is a line-s tree: a path of internal vertices from the root,
// each with at least one leaf child.
std::optional<std::pair<unsigned, PrefixSet>> as_line_s(const RootedTree& t) {
  if (t.is_leaf(t.root())) return std::nullopt;
  std::vector<unsigned> leaves_at;
  VertexId v = t.root();
  while (true) {
    unsigned leaves = 0;
    std::optional<VertexId> inner;
    for (VertexId c : t.children(v)) {
      if (t.is_leaf(c)) {
        ++leaves;
      } else if (inner) {
        return std::nullopt;
      } else {
        inner = c;
      }
    }
    if (leaves == 0) return std::nullopt;
    leaves_at.push_back(leaves);
    if (!inner) break;
    v = *inner;
  }
  PrefixSet s;
  unsigned below = 0;
  for (std::size_t m = leaves_at.size(); m-- > 1;) {
    below += leaves_at[m];
    s.insert(static_cast<int>(below));
  }
  return std::pair{below + leaves_at[0], s};
}

std::optional<Count> equal_family_count(const RootedTree& t) {
  const unsigned n = static_cast<unsigned>(t.leaf_count());
  const std::string key = serialize_tree(t);
  for (unsigned k = 1; 2 * k <= n; ++k) {
    const family::TwoEnded d{k, n - k};
    if (serialize_tree(build_family(d)) == key) return closed_family_count(d);
  }
  for (unsigned j = 1; 2 * (j - 1) + 3 <= n; ++j) {
    const unsigned k = n - 2 * (j - 1);
    for (unsigned i = 2; i < k; ++i) {
      const family::FanLine f{k, i, j};
      if (serialize_tree(build_family(f)) == key) return closed_family_count(f);
    }
  }
  return std::nullopt;
}

unsigned parse_number(std::string_view s) {
  unsigned v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end)
    throw std::invalid_argument("expected a nonnegative integer, got '" + std::string(s) + "'");
  return v;
}

double millis(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

std::string fmt_ms(std::chrono::nanoseconds d) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << millis(d);
  return os.str();
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const LimitExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kLimit;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace

std::string to_json(const RunReport& r) {
  json j;
  j["t1"] = r.t1;
  j["t2"] = r.t2;
  j["algorithm"] = to_string(r.algorithm);
  j["count"] = r.count ? json(gluecount::to_string(*r.count)) : json(nullptr);
  j["elapsed_ns"] = r.elapsed.count();
  j["zero_reason"] = gluecount::to_string(r.zero_reason);
  j["cache_hits"] = r.cache_hits;
  j["error"] = r.error;
  return j.dump();
}

RunReport report_from_json(std::string_view line) {
  try {
    const json j = json::parse(line);
    RunReport r;
    r.t1 = j.at("t1").get<std::string>();
    r.t2 = j.at("t2").get<std::string>();
    const auto algo = parse_algo(j.at("algorithm").get<std::string>());
    if (!algo) throw std::invalid_argument("unknown algorithm");
    r.algorithm = *algo;
    if (!j.at("count").is_null()) r.count = Count(j.at("count").get<std::string>());
    r.elapsed = std::chrono::nanoseconds(j.at("elapsed_ns").get<std::int64_t>());
    r.zero_reason = parse_zero_reason(j.at("zero_reason").get<std::string>());
    r.cache_hits = j.at("cache_hits").get<std::uint64_t>();
    r.error = j.at("error").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

std::optional<Count> closed_form(const RootedTree& t1, const RootedTree& t2) {
  if (t1.leaf_count() != t2.leaf_count() || !(colour_multiset(t1) == colour_multiset(t2))) return Count(0);
  if (!is_single_coloured(t1)) return std::nullopt;
  const RootedTree a = normalize(plain(t1));
  const RootedTree b = normalize(plain(t2));
  if (internal_edges(a).empty() || internal_edges(b).empty())
    return factorial(static_cast<unsigned>(a.leaf_count()));
  const auto la = as_line_s(a);
  const auto lb = as_line_s(b);
  if (la && lb) return line_s_count(la->first, la->second, lb->second);
  if (serialize_tree(a) == serialize_tree(b)) return equal_family_count(a);
  return std::nullopt;
}

RunReport run_count(const RootedTree& t1, const RootedTree& t2, Algo algo) {
  RunReport r;
  r.t1 = serialize_tree(t1);
  r.t2 = serialize_tree(t2);
  r.algorithm = algo;
  const auto start = Clock::now();
  switch (algo) {
    case Algo::Brute:
      r.count = count_subfree_brute_parallel(t1, t2);
      break;
    case Algo::Recursive: {
      if (!is_single_coloured(t1) || !is_single_coloured(t2))
        throw std::invalid_argument("the recursive algorithm needs uncoloured trees");
      if (t1.leaf_count() != t2.leaf_count() || !(colour_multiset(t1) == colour_multiset(t2))) {
        r.count = Count(0);
        break;
      }
      RecursiveGluer g;
      r.count = g.count_subfree(t1, t2).count;
      r.cache_hits = g.memo_hits();
      break;
    }
    case Algo::CutPre:
    case Algo::Auto: {
      CutPreprocessor c;
      r.count = c.subdivergence_free(t1, t2);
      r.cache_hits = c.memo_hits();
      break;
    }
    case Algo::Closed:
      r.count = closed_form(t1, t2);
      if (!r.count) throw std::invalid_argument("closed: the inputs are not a recognized family pair");
      break;
  }
  r.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  r.zero_reason = zero_reason_for(t1, t2, *r.count);
  return r;
}

FamilySpec parse_family(std::string_view family, std::string_view params) {
  std::vector<unsigned> v;
  std::size_t start = 0;
  while (start <= params.size()) {
    const std::size_t end = std::min(params.find(',', start), params.size());
    v.push_back(parse_number(params.substr(start, end - start)));
    start = end + 1;
  }
  auto need = [&](std::size_t n) {
    if (v.size() != n)
      throw std::invalid_argument(std::string(family) + " takes " + std::to_string(n) + " parameter(s)");
  };
  if (family == "line") {
    need(1);
    return family::Line{v[0]};
  }
  if (family == "line-s") {
    if (v.empty()) throw std::invalid_argument("line-s takes k followed by the elements of S");
    return family::LineS{v[0], std::vector<unsigned>(v.begin() + 1, v.end())};
  }
  if (family == "two-ended") {
    need(2);
    return family::TwoEnded{v[0], v[1]};
  }
  if (family == "fan-line") {
    need(3);
    return family::FanLine{v[0], v[1], v[2]};
  }
  if (family == "fan") {
    need(1);
    return family::Fan{v[0]};
  }
  throw std::invalid_argument("unknown family '" + std::string(family) + "'");
}

std::string substitute(std::string_view pattern, unsigned value) {
  if (pattern.find('?') == std::string_view::npos) throw std::invalid_argument("parameters need a '?'");
  std::string out;
  for (char c : pattern) out += c == '?' ? std::to_string(value) : std::string(1, c);
  return out;
}

Count closed_family_count(const FamilySpec& spec) {
  validate(spec);
  if (auto* f = std::get_if<family::Line>(&spec)) return line_count(f->k);
  if (auto* f = std::get_if<family::LineS>(&spec)) {
    const PrefixSet s(f->s.begin(), f->s.end());
    return line_s_count(f->k, s, s);
  }
  if (auto* f = std::get_if<family::TwoEnded>(&spec))
    return f->k == f->l ? two_ended_equal_count(f->k) : two_ended_unequal_count(f->k, f->l);
  if (auto* f = std::get_if<family::FanLine>(&spec)) return fan_line_count(f->k, f->i, f->j);
  return factorial(std::get<family::Fan>(spec).k);
}

int cmd_count(const CountOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RootedTree t1 = parse_tree(o.t1);
    const RootedTree t2 = parse_tree(o.t2);
    const RunReport r = run_count(t1, t2, o.algo);
    if (o.json) {
      out << to_json(r) << "\n";
    } else {
      out << "t1          " << r.t1 << "\n"
          << "t2          " << r.t2 << "\n"
          << "algorithm   " << to_string(r.algorithm) << "\n"
          << "count       " << gluecount::to_string(*r.count) << "\n"
          << "elapsed_ms  " << fmt_ms(r.elapsed) << "\n"
          << "zero_reason " << gluecount::to_string(r.zero_reason) << "\n"
          << "cache_hits  " << r.cache_hits << "\n";
    }
    return int{kOk};
  });
}

namespace {

struct Mismatch {
  RootedTree t1;
  RootedTree t2;
  Count brute;
  Count recursive;
  Count cutpre;

  auto rank() const {
    return std::tuple{t1.leaf_count() + t2.leaf_count(), serialize_tree(t1), serialize_tree(t2)};
  }
};

}  // namespace

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BruteLimits limits = BruteLimits::from_env();
    if (o.max_leaves == 0) throw std::invalid_argument("max-leaves must be at least 1");
    if (o.max_leaves > limits.max_leaves || (o.samples && o.max_leaves + 2 > limits.max_leaves))
      throw LimitExceeded("verification would exceed the brute-force leaf limit of " +
                          std::to_string(limits.max_leaves));

    std::optional<Mismatch> worst;
    auto check = [&](const RootedTree& t1, const RootedTree& t2, Count b, Count r, Count c) {
      if (o.fault) o.fault(t1, t2, c);
      if (b == r && r == c) return;
      Mismatch m{t1, t2, std::move(b), std::move(r), std::move(c)};
      if (!worst || m.rank() < worst->rank()) worst = std::move(m);
    };

    std::vector<RootedTree> trees;
    for (unsigned n = 1; n <= o.max_leaves; ++n)
      for (RootedTree& t : normalized_trees(n)) trees.push_back(std::move(t));
    RecursiveGluer rec;
    CutPreprocessor cut;
    std::vector<CutPreprocessor::Handle> handles;
    for (const RootedTree& t : trees) handles.push_back(cut.prepare(t));
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const SubfreeBatch batch(trees[i], limits);
      const std::vector<Count> row = cut.subdivergence_free_row(handles[i], handles);
      for (std::size_t j = 0; j < trees.size(); ++j)
        check(trees[i], trees[j], batch.count(trees[j]), rec.count_subfree(trees[i], trees[j]).count, row[j]);
      if (rec.memo_size() > (std::size_t{1} << 22)) rec.clear_memo();
    }
    out << "exhaustive: " << trees.size() * trees.size() << " pairs with up to " << o.max_leaves << " leaves\n";

    std::mt19937_64 rng(o.seed);
    for (unsigned s = 0; s < o.samples; ++s) {
      const unsigned n = o.max_leaves + 1 + static_cast<unsigned>(rng() % 2);
      const RootedTree t1 = random_normalized_tree(n, rng);
      const RootedTree t2 = random_normalized_tree(n, rng);
      check(t1, t2, count_subfree_brute_parallel(t1, t2, limits), rec.count_subfree(t1, t2).count,
            cut.subdivergence_free(t1, t2));
    }
    if (o.samples)
      out << "samples: " << o.samples << " pairs with " << o.max_leaves + 1 << "-" << o.max_leaves + 2
          << " leaves, seed " << o.seed << "\n";

    if (worst) {
      out << "DISAGREEMENT t1=" << serialize_tree(worst->t1) << " t2=" << serialize_tree(worst->t2)
          << " brute=" << gluecount::to_string(worst->brute)
          << " recursive=" << gluecount::to_string(worst->recursive)
          << " cutpre=" << gluecount::to_string(worst->cutpre) << "\n";
      return int{kDisagreement};
    }
    out << "OK: all algorithms agree\n";
    return int{kOk};
  });
}

int cmd_sequence(const SequenceOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    parse_family(o.family, substitute(o.params, 1));
    if (!o.json) out << "param  count  method  elapsed_ms\n";
    unsigned rows = 0;
    for (unsigned v = 0; v <= o.upto; ++v) {
      const FamilySpec spec = parse_family(o.family, substitute(o.params, v));
      try {
        validate(spec);
      } catch (const std::invalid_argument&) {
        continue;
      }
      const RootedTree t = build_family(spec);
      const auto start = Clock::now();
      const Count c = o.algo == Algo::Closed ? closed_family_count(spec) : *run_count(t, t, o.algo).count;
      const auto elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
      ++rows;
      if (o.json) {
        json j;
        j["family"] = describe(spec);
        j["param"] = v;
        j["tree"] = serialize_tree(t);
        j["count"] = gluecount::to_string(c);
        j["method"] = to_string(o.algo);
        j["elapsed_ns"] = elapsed.count();
        out << j.dump() << "\n";
      } else {
        out << v << "  " << gluecount::to_string(c) << "  " << to_string(o.algo) << "  " << fmt_ms(elapsed) << "\n";
      }
    }
    if (rows == 0) throw std::invalid_argument("no valid family member for values 0.." + std::to_string(o.upto));
    return int{kOk};
  });
}

int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.reps == 0) throw std::invalid_argument("reps must be at least 1");
    parse_family(o.family, substitute(o.params, 1));
    const std::vector<Algo> algos =
        o.algos.empty() ? std::vector{Algo::Brute, Algo::Recursive, Algo::CutPre, Algo::Closed} : o.algos;
    const unsigned brute_cap = BruteLimits::from_env().max_leaves;
    if (!o.json) out << "param  leaves  algorithm  count  min_ms  median_ms\n";
    for (unsigned v = 0; v <= o.upto; ++v) {
      const FamilySpec spec = parse_family(o.family, substitute(o.params, v));
      try {
        validate(spec);
      } catch (const std::invalid_argument&) {
        continue;
      }
      const RootedTree t = build_family(spec);
      std::optional<std::pair<Algo, Count>> reference;
      for (Algo a : algos) {
        if (a == Algo::Brute && t.leaf_count() > brute_cap) {
          if (!o.json) out << v << "  " << t.leaf_count() << "  brute  skipped\n";
          continue;
        }
        std::vector<std::chrono::nanoseconds> times;
        Count c;
        for (unsigned r = 0; r < o.reps; ++r) {
          const RunReport rep = run_count(t, t, a);
          times.push_back(rep.elapsed);
          c = *rep.count;
        }
        std::sort(times.begin(), times.end());
        if (reference && reference->second != c) {
          err << "disagreement on " << serialize_tree(t) << ": " << to_string(reference->first) << "="
              << gluecount::to_string(reference->second) << " " << to_string(a) << "=" << gluecount::to_string(c)
              << "\n";
          return int{kDisagreement};
        }
        if (!reference) reference.emplace(a, c);
        const auto median = times[(times.size() - 1) / 2];
        if (o.json) {
          json j;
          j["family"] = describe(spec);
          j["param"] = v;
          j["leaves"] = t.leaf_count();
          j["algorithm"] = to_string(a);
          j["count"] = gluecount::to_string(c);
          j["min_ns"] = times.front().count();
          j["median_ns"] = median.count();
          j["reps"] = o.reps;
          out << j.dump() << "\n";
        } else {
          out << v << "  " << t.leaf_count() << "  " << to_string(a) << "  " << gluecount::to_string(c) << "  "
              << fmt_ms(times.front()) << "  " << fmt_ms(median) << "\n";
        }
      }
    }
    return int{kOk};
  });
}

int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const FamilySpec spec = parse_family(o.family, o.params);
    out << serialize_tree(build_family(spec)) << "\n";
    return int{kOk};
  });
}

}  // namespace gluecount::cli
