#include <benchmark/benchmark.h>

#include <memory>

#include "hqflow/flow.hpp"

using namespace hqflow;

namespace {

ProblemSpec laplace_problem(int k) {
  ProblemSpec p;
  p.q = {k, 0, 2};
  p.f = parse_expr("1 + 0.25*x1^2", ExprSlot::data);
  p.phi = parse_expr("1 + 0.05*x1", ExprSlot::data);
  p.u0 = parse_expr("(x1^2+x2^2)/2 + 0.05*x1", ExprSlot::initial);
  return p;
}

Discretization disk(int nr) {
  return Discretization(std::make_shared<const Grid>(build_grid(Domain::disk(1), {nr, 2 * nr, 0})));
}

}  // namespace

static void BM_BuildDiscretization(benchmark::State& state) {
  const int nr = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(disk(nr));
}
BENCHMARK(BM_BuildDiscretization)->Arg(16)->Arg(32)->Arg(64);

static void BM_EvaluateOperator(benchmark::State& state) {
  const Discretization d = disk(static_cast<int>(state.range(0)));
  const ProblemSpec p = laplace_problem(2);
  const GridFn u = initial_state(p, d);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_operator(d, p, u));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.grid().interior().size()));
}
BENCHMARK(BM_EvaluateOperator)->Arg(16)->Arg(32)->Arg(64);

static void BM_ApplyNeumann(benchmark::State& state) {
  const Discretization d = disk(static_cast<int>(state.range(0)));
  const ProblemSpec p = laplace_problem(2);
  const GridFn u = initial_state(p, d);
  const BoundaryFn phi = p.boundary_fn();
  for (auto _ : state) benchmark::DoNotOptimize(apply_neumann(d, u, phi));
}
BENCHMARK(BM_ApplyNeumann)->Arg(16)->Arg(32)->Arg(64);

static void BM_ImplicitStep(benchmark::State& state) {
  const Discretization d = disk(static_cast<int>(state.range(0)));
  const ProblemSpec p = laplace_problem(2);
  FlowOptions opt;
  opt.mode = FlowMode::translating;
  FlowStepper stepper(d, p, opt);
  FlowState s;
  s.u = initial_state(p, d);
  s.dt = 0.01;
  for (auto _ : state) {
    FlowState next = stepper.step(s);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_ImplicitStep)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ExplicitStep(benchmark::State& state) {
  const Discretization d = disk(static_cast<int>(state.range(0)));
  const ProblemSpec p = laplace_problem(2);
  FlowOptions opt;
  opt.mode = FlowMode::translating;
  opt.integrator = Integrator::explicit_euler;
  FlowStepper stepper(d, p, opt);
  FlowState s;
  s.u = initial_state(p, d);
  for (auto _ : state) {
    FlowState next = stepper.step(s);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_ExplicitStep)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK_MAIN();
