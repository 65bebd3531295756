// Serial and OpenMP brute force against the recursion and the cut
// preprocessor, on n(t, t) for family trees.

#include <benchmark/benchmark.h>

#include "gluecount/cutpre.hpp"
#include "gluecount/enumerate.hpp"
#include "gluecount/oracle.hpp"
#include "gluecount/recursive.hpp"

using namespace gluecount;

namespace {

RootedTree line(const benchmark::State& state) { return build_family(family::Line{static_cast<unsigned>(state.range(0))}); }

RootedTree two_ended(const benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  return build_family(family::TwoEnded{k, k});
}

template <RootedTree (*Make)(const benchmark::State&)>
void BM_BruteSerial(benchmark::State& state) {
  const RootedTree t = Make(state);
  for (auto _ : state) benchmark::DoNotOptimize(count_subfree_brute(t, t));
}

template <RootedTree (*Make)(const benchmark::State&)>
void BM_BruteParallel(benchmark::State& state) {
  const RootedTree t = Make(state);
  for (auto _ : state) benchmark::DoNotOptimize(count_subfree_brute_parallel(t, t));
}

template <RootedTree (*Make)(const benchmark::State&)>
void BM_Recursive(benchmark::State& state) {
  const RootedTree t = Make(state);
  for (auto _ : state) benchmark::DoNotOptimize(count_subfree_recursive(t, t));
}

template <RootedTree (*Make)(const benchmark::State&)>
void BM_CutPre(benchmark::State& state) {
  const RootedTree t = Make(state);
  for (auto _ : state) benchmark::DoNotOptimize(count_subfree_cutpre(t, t));
}

// One row of the exhaustive table: a fixed tree against every normalized
// tree with the same leaf count.
void BM_RowBatch(benchmark::State& state) {
  const auto trees = normalized_trees(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    const SubfreeBatch batch(trees.back());
    for (const RootedTree& t : trees) benchmark::DoNotOptimize(batch.count(t));
  }
}

void BM_RowRecursive(benchmark::State& state) {
  const auto trees = normalized_trees(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    RecursiveGluer g;
    for (const RootedTree& t : trees) benchmark::DoNotOptimize(g.count_subfree(trees.back(), t));
  }
}

void BM_RowCutPre(benchmark::State& state) {
  const auto trees = normalized_trees(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) {
    CutPreprocessor cut;
    std::vector<CutPreprocessor::Handle> h;
    for (const RootedTree& t : trees) h.push_back(cut.prepare(t));
    benchmark::DoNotOptimize(cut.subdivergence_free_row(h.back(), h));
  }
}

}  // namespace

BENCHMARK(BM_BruteSerial<line>)->DenseRange(4, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteParallel<line>)->DenseRange(4, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Recursive<line>)->DenseRange(4, 12, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CutPre<line>)->DenseRange(4, 12, 2)->Unit(benchmark::kMillisecond);

BENCHMARK(BM_BruteSerial<two_ended>)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteParallel<two_ended>)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Recursive<two_ended>)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CutPre<two_ended>)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

BENCHMARK(BM_RowBatch)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RowRecursive)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RowCutPre)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
