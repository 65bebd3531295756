#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gluecount/cli.hpp"

namespace cli = gluecount::cli;

namespace {

cli::Algo to_algo(const std::string& name) {
  if (auto a = cli::parse_algo(name)) return *a;
  throw CLI::ValidationError("--algo", "unknown algorithm '" + name + "'");
}

const auto kAlgoCheck = CLI::IsMember({"brute", "recursive", "cutpre", "closed", "auto"});
const auto kFamilyCheck = CLI::IsMember({"line", "line-s", "two-ended", "fan-line", "fan"});

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counts subdivergence-free gluings of rooted trees."};
  app.require_subcommand(1);

  cli::CountOptions count;
  std::string count_algo = "auto";
  auto* c = app.add_subcommand("count", "Count subdivergence-free gluings of two trees");
  c->add_option("--t1", count.t1, "First tree, e.g. ((*),*)")->required();
  c->add_option("--t2", count.t2, "Second tree")->required();
  c->add_option("--algo", count_algo, "brute|recursive|cutpre|closed|auto")->check(kAlgoCheck);
  c->add_flag("--json", count.json, "Print one JSON record");

  cli::VerifyOptions verify;
  auto* v = app.add_subcommand("verify", "Cross-check all algorithms");
  v->add_option("--max-leaves", verify.max_leaves, "Exhaustive up to this many leaves")->required();
  v->add_option("--samples", verify.samples, "Random pairs just above the exhaustive range");
  v->add_option("--seed", verify.seed, "Seed for the random pairs");

  cli::SequenceOptions seq;
  std::string seq_algo = "auto";
  auto* s = app.add_subcommand("sequence", "Counts along a tree family");
  s->add_option("--family", seq.family, "line|line-s|two-ended|fan-line|fan")->required()->check(kFamilyCheck);
  s->add_option("--params", seq.params, "Comma list; each '?' takes the row value")->required();
  s->add_option("--upto", seq.upto, "Last value of the free parameter")->required();
  s->add_option("--algo", seq_algo, "brute|recursive|cutpre|closed|auto")->check(kAlgoCheck);
  s->add_flag("--json", seq.json, "Print JSON records");

  cli::BenchOptions bench;
  std::vector<std::string> bench_algos;
  auto* b = app.add_subcommand("bench", "Time the algorithms along a tree family");
  b->add_option("--family", bench.family, "line|line-s|two-ended|fan-line|fan")->required()->check(kFamilyCheck);
  b->add_option("--params", bench.params, "Comma list; each '?' takes the row value");
  b->add_option("--upto", bench.upto, "Last value of the free parameter")->required();
  b->add_option("--reps", bench.reps, "Repetitions per algorithm");
  b->add_option("--algos", bench_algos, "Subset of algorithms to run")->check(kAlgoCheck);
  b->add_flag("--json", bench.json, "Print JSON records");

  cli::GenOptions gen;
  auto* g = app.add_subcommand("gen", "Print a family tree");
  g->add_option("--family", gen.family, "line|line-s|two-ended|fan-line|fan")->required()->check(kFamilyCheck);
  g->add_option("--params", gen.params, "Comma list of parameters")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  if (c->parsed()) {
    count.algo = to_algo(count_algo);
    return cli::cmd_count(count, std::cout, std::cerr);
  }
  if (v->parsed()) return cli::cmd_verify(verify, std::cout, std::cerr);
  if (s->parsed()) {
    seq.algo = to_algo(seq_algo);
    return cli::cmd_sequence(seq, std::cout, std::cerr);
  }
  if (b->parsed()) {
    for (const auto& name : bench_algos) bench.algos.push_back(to_algo(name));
    return cli::cmd_bench(bench, std::cout, std::cerr);
  }
  return cli::cmd_gen(gen, std::cout, std::cerr);
}
