#include <benchmark/benchmark.h>

#include "quatmark/qsvd.hpp"

namespace {

using quatmark::BidiagOptions;
using quatmark::QuatMatrix;

QuatMatrix pure_block(std::size_t m, std::size_t n) {
  QuatMatrix q = quatmark::random_quat_matrix(m, n, 42);
  q.plane(0) = quatmark::RealMatrix(m, n);
  return q;
}

void BM_Qsvd4x4(benchmark::State& state) {
  const QuatMatrix q = pure_block(4, 4);
  const BidiagOptions options{.use_givens = state.range(0) != 0};
  for (auto _ : state) benchmark::DoNotOptimize(quatmark::qsvd(q, nullptr, options));
  state.SetLabel(options.use_givens ? "givens" : "householder-only");
}
BENCHMARK(BM_Qsvd4x4)->Arg(1)->Arg(0);

void BM_Bidiagonalize4x4(benchmark::State& state) {
  const QuatMatrix q = pure_block(4, 4);
  const BidiagOptions options{.use_givens = state.range(0) != 0};
  for (auto _ : state) benchmark::DoNotOptimize(quatmark::bidiagonalize(q, nullptr, options));
  state.SetLabel(options.use_givens ? "givens" : "householder-only");
}
BENCHMARK(BM_Bidiagonalize4x4)->Arg(1)->Arg(0);

void BM_QsvdScaled(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const QuatMatrix q = quatmark::random_quat_matrix(9 * k, 6 * k, 7);
  for (auto _ : state) benchmark::DoNotOptimize(quatmark::qsvd(q));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_QsvdScaled)->DenseRange(1, 6)->Unit(benchmark::kMicrosecond)->Complexity(benchmark::oNCubed);

}  // namespace
