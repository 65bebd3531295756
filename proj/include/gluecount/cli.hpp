#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gluecount/count.hpp"
#include "gluecount/recursive.hpp"
#include "gluecount/tree.hpp"

namespace gluecount::cli {

enum ExitCode : int {
  kOk = 0,
  kDisagreement = 1,
  kUsage = 2,
  kLimit = 3,
};

enum class Algo { Brute, Recursive, CutPre, Closed, Auto };

std::optional<Algo> parse_algo(std::string_view name);
std::string to_string(Algo a);

struct RunReport {
  std::string t1;  // canonical serializations of the inputs
  std::string t2;
  Algo algorithm = Algo::Auto;
  std::optional<Count> count;
  std::chrono::nanoseconds elapsed{0};
  ZeroReason zero_reason = ZeroReason::None;
  std::uint64_t cache_hits = 0;
  std::string error;
};

/// One-line JSON record. The count is a decimal string.
std::string to_json(const RunReport& r);
/// Throws std::invalid_argument on a malformed record.
RunReport report_from_json(std::string_view line);

/// Counts n(t1, t2) with `algo`. Auto runs the cut preprocessor. Throws
/// std::invalid_argument when Closed does not recognize the inputs or
/// Recursive gets coloured trees, and LimitExceeded past a size cap.
RunReport run_count(const RootedTree& t1, const RootedTree& t2, Algo algo);

/// Closed-form n(t1, t2) when the pair is recognized: either tree a fan,
/// two line-s trees, or two equal two-ended or fan-line trees.
std::optional<Count> closed_form(const RootedTree& t1, const RootedTree& t2);

/// "line", "line-s", "two-ended", "fan-line" or "fan" with comma-separated
/// numbers: k; k followed by the elements of S; k,l; k,i,j; k.
FamilySpec parse_family(std::string_view family, std::string_view params);
/// Replaces every '?' in `pattern` by `value`. Throws unless the pattern has
/// at least one '?'.
std::string substitute(std::string_view pattern, unsigned value);
/// n(f, f) for a family member straight from its closed form.
Count closed_family_count(const FamilySpec& spec);

struct CountOptions {
  std::string t1;
  std::string t2;
  Algo algo = Algo::Auto;
  bool json = false;
};
int cmd_count(const CountOptions& o, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  unsigned max_leaves = 5;
  unsigned samples = 0;
  std::uint64_t seed = 42;
  /// Test hook: may alter the cut preprocessor's answer before comparison.
  std::function<void(const RootedTree&, const RootedTree&, Count&)> fault;
};
/// Brute force, recursion and cut preprocessor on every normalized pair up to
/// max_leaves, then on `samples` random pairs with max_leaves + 1 or + 2
/// leaves. Random trees are drawn uniformly from the normalized shapes.
int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);

struct SequenceOptions {
  std::string family;
  std::string params;  // every '?' takes the row's value
  unsigned upto = 8;
  Algo algo = Algo::Auto;
  bool json = false;
};
/// n(f, f) for f = family member at each value 0..upto that is valid.
int cmd_sequence(const SequenceOptions& o, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::string family;
  std::string params = "?";
  unsigned upto = 6;
  unsigned reps = 3;
  std::vector<Algo> algos;  // empty: every algorithm that applies
  bool json = false;
};
/// Times each algorithm on n(f, f) over the family. Counts must agree.
int cmd_bench(const BenchOptions& o, std::ostream& out, std::ostream& err);

struct GenOptions {
  std::string family;
  std::string params;
};
int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err);

}  // namespace gluecount::cli
