// Timing harness comparing the serial and OpenMP paths of the three
// data-parallel kernels: generator application, moment-trajectory
// evaluation, and sweep cells.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <omp.h>

#include "vibroq/analysis.hpp"
#include "vibroq/fock.hpp"
#include "vibroq/gaussian.hpp"
#include "vibroq/scenarios.hpp"

using namespace vibroq;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) {
    fn();
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %.2fx\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const auto scen = scenarios::get("table1");
  std::printf("threads available: %d\n", omp_get_max_threads());

  {
    const int cutoff = 10;
    const auto gen = fock::make_generator(scen.params, cutoff, false);
    const fock::CompiledGenerator lgen(gen);
    const int rows = lgen.dim() * lgen.dim();
    Eigen::ArrayXd re = Eigen::ArrayXd::Random(rows), im = Eigen::ArrayXd::Random(rows);
    Eigen::ArrayXd ore(rows), oim(rows);
    const int reps = quick ? 20 : 400;
    const double s = time_ms(
        [&] { lgen.apply(re.data(), im.data(), ore.data(), oim.data(), ExecMode::Serial); },
        reps);
    const double p = time_ms(
        [&] { lgen.apply(re.data(), im.data(), ore.data(), oim.data(), ExecMode::Parallel); },
        reps);
    report("generator apply (c=10)", s, p);
  }

  {
    const auto grid = gaussian::uniform_grid(quick ? 0.05 : 2.0, 1e-5);
    const int reps = quick ? 3 : 10;
    const double s = time_ms(
        [&] { gaussian::propagate_moments(scen.params, grid, ExecMode::Serial); }, reps);
    const double p = time_ms(
        [&] { gaussian::propagate_moments(scen.params, grid, ExecMode::Parallel); }, reps);
    report("moment trajectory", s, p);
  }

  {
    analysis::SweepSpec spec;
    spec.base = scen.params;
    spec.selector = analysis::Selector::T2;
    spec.t_max_ps = 0.5;
    spec.dt_ps = 1e-4;
    const int npts = quick ? 4 : 12;
    std::vector<double> deltas;
    for (int i = 0; i < npts; ++i) {
      deltas.push_back(0.05 + 0.25 * i / (npts - 1));
    }
    spec.axes = {{"delta_ev", deltas}};
    const double s = time_ms([&] { analysis::sweep(spec, ExecMode::Serial); }, 1);
    const double p = time_ms([&] { analysis::sweep(spec, ExecMode::Parallel); }, 1);
    report("timescale sweep cells", s, p);
  }

  {
    const double t_span = quick ? 0.0005 : 0.005; // ps
    const auto grid = gaussian::uniform_grid(t_span, 1e-5);
    const double s = time_ms(
        [&] { fock::integrate_oracle(scen.params, 8, grid, false, ExecMode::Serial); }, 1);
    const double p = time_ms(
        [&] { fock::integrate_oracle(scen.params, 8, grid, false, ExecMode::Parallel); }, 1);
    report("oracle integration (c=8)", s, p);
  }
  return 0;
}
