#include <benchmark/benchmark.h>

#include <vector>

#include "hqflow/oracle.hpp"
#include "hqflow/symmfunc.hpp"

using namespace hqflow;

namespace {

std::vector<double> sample(int n, std::uint64_t seed) {
  SampleRng rng({seed, -1.0, 3.0});
  return sample_gamma_k(n, 1, rng);
}

}  // namespace

static void BM_Sigma(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto lam = sample(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sigma(lam, n / 2));
}
BENCHMARK(BM_Sigma)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

static void BM_SigmaBrute(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto lam = sample(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sigma_brute(lam, n / 2));
}
BENCHMARK(BM_SigmaBrute)->Arg(2)->Arg(4)->Arg(8)->Arg(12);

static void BM_DQuotient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SampleRng rng({2, -1.0, 3.0});
  const auto lam = sample_gamma_k(n, 2, rng);
  const QuotientIndices q{2, 1, n};
  for (auto _ : state) benchmark::DoNotOptimize(d_quotient(lam, q));
}
BENCHMARK(BM_DQuotient)->Arg(2)->Arg(4)->Arg(8);

static void BM_LogQuotientMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SampleRng rng({3, -1.0, 3.0});
  const auto lam = sample_gamma_k(n, 2, rng);
  const SymMatrix a = random_symmetric_with_spectrum(lam, rng);
  const QuotientIndices q{2, 0, n};
  for (auto _ : state) benchmark::DoNotOptimize(log_quotient_matrix(a, q));
}
BENCHMARK(BM_LogQuotientMatrix)->Arg(2)->Arg(3)->Arg(4)->Arg(8);
