// Serial reference against the OpenMP kernels. Arg(0) is serial, Arg(1) parallel.
#include "xr/chi.hpp"
#include "xr/symplectic.hpp"

#include <benchmark/benchmark.h>

using namespace xr;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "parallel" : "serial"); }

const GeneratorSet& octagon() {
  static const GeneratorSet g = octagon_fuchsian();
  return g;
}

const CurvePair& curves3() {
  static const CurvePair c = CurvePair::eigen_sampled(n_fuchsian(octagon(), 3));
  return c;
}

const SampleSet& samples(int L) {
  static const SampleSet s4 = sample_boundary(octagon(), 4), s6 = sample_boundary(octagon(), 6);
  return L == 4 ? s4 : s6;
}

void BM_sample_boundary(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(sample_boundary(octagon(), 5, mode(st)));
  label(st);
}
BENCHMARK(BM_sample_boundary)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_check_axioms(benchmark::State& st) {
  const auto b = curve_fn(curves3(), "b_rho");
  const auto& s = samples(6);
  for (auto _ : st) benchmark::DoNotOptimize(check_axioms(b, s, 1000, 1, 0.1, mode(st)).worst());
  label(st);
}
BENCHMARK(BM_check_axioms)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_hitchin_rank(benchmark::State& st) {
  const auto b = curve_fn(curves3(), "b_rho");
  const auto& s = samples(4);
  for (auto _ : st)
    benchmark::DoNotOptimize(hitchin_rank_test(b, 3, s, 200, 1, TupleDesign::interleaved, mode(st)).max_zero_raw);
  label(st);
}
BENCHMARK(BM_hitchin_rank)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_polarized_quadrature(benchmark::State& st) {
  const auto c = CurvePair::veronese(3);
  const auto& s = samples(4);
  const ProjPoint e(c.xi(s[0])), f(c.xi(s[s.size() / 2]));
  const ProjHyperplane u(c.xistar(s[s.size() / 4])), v(c.xistar(s[3 * s.size() / 4]));
  for (auto _ : st) benchmark::DoNotOptimize(polarized_cr_quadrature(e, u, f, v, 512, mode(st)).value);
  label(st);
}
BENCHMARK(BM_polarized_quadrature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
