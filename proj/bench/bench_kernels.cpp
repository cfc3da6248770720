// Parallel kernels against their serial reference: interior-point normal
// matrix assembly and the chunked rolling dispatch.
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "tees/dispatch.hpp"
#include "tees/lp/normal_equations.hpp"
#include "tees/synthetic.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

// Constraint matrix shaped like a week of dispatch: a few entries per column
// spread over neighbouring rows.
tees::lp::SparseMatrix dispatch_like(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::uniform_int_distribution<int> jitter(-3, 3);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(cols) * 4);
  for (int j = 0; j < cols; ++j) {
    const int centre = static_cast<int>(static_cast<long long>(j) * rows / cols);
    for (int k = 0; k < 4; ++k) t.emplace_back(std::clamp(centre + jitter(rng), 0, rows - 1), j, value(rng));
  }
  tees::lp::SparseMatrix a(rows, cols);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

void bench_assembly(int rows, int cols, int reps) {
  const auto a = dispatch_like(rows, cols, 7);
  std::vector<double> d(static_cast<std::size_t>(cols));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (auto& v : d) v = u(rng);

  const tees::lp::NormalEquationsPlan plan(a);
  auto serial = plan.make_matrix();
  auto parallel = plan.make_matrix();
  const double ts = best_of(reps, [&] { plan.assemble_serial(d, 1e-8, serial); });
  const double tp = best_of(reps, [&] { plan.assemble(d, 1e-8, parallel); });
  double diff = 0.0;
  for (int i = 0; i < serial.nonZeros(); ++i) {
    diff = std::max(diff, std::abs(serial.valuePtr()[i] - parallel.valuePtr()[i]));
  }
  std::printf("normal_matrix,%d,%d,%zu,%.6f,%.6f,%.2f,%.1e\n", rows, cols, plan.nonzeros(), ts, tp, ts / tp, diff);
}

void bench_rolling(int houses, int days, int reps) {
  tees::SyntheticOptions o;
  o.houses = houses;
  o.profile.start = tees::parse_timestamp("2023-03-06");
  o.profile.days = days;
  const auto sc = tees::synthetic_scenario(o);
  const auto params = tees::draw_house_params(sc.house_ranges, sc.topology.houses().size(), 1);
  const auto& pathway = sc.pathway("TP3b");
  const auto from = sc.demand.start();
  const auto to = sc.demand.end();
  const int workers = omp_get_max_threads();

  tees::RollingResult serial, parallel;
  const double ts = best_of(reps, [&] { serial = tees::rolling_solve_serial(sc, pathway, params, from, to, 7); });
  const double tp = best_of(reps, [&] { parallel = tees::rolling_solve(sc, pathway, params, from, to, 7, workers); });
  const bool same = serial.solution.p_g == parallel.solution.p_g && serial.solution.objective == parallel.solution.objective;
  std::printf("rolling_solve,%d,%d,%zu,%.6f,%.6f,%.2f,%s\n", houses, days, serial.chunks.size(), ts, tp, ts / tp,
              same ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial versus OpenMP kernels"};
  int reps = 5;
  int threads = 0;
  bool quick = false;
  app.add_option("--reps", reps, "repetitions, best time kept")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (default: runtime choice)");
  app.add_flag("--quick", quick, "small sizes, for smoke testing");
  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  std::printf("# threads %d\n", omp_get_max_threads());
  std::printf("kernel,size_a,size_b,work_items,serial_s,parallel_s,speedup,check\n");
  if (quick) {
    bench_assembly(2000, 6000, 1);
    bench_rolling(2, 14, 1);
    return 0;
  }
  for (int cols : {20000, 80000, 320000}) bench_assembly(cols / 3, cols, reps);
  bench_rolling(5, 28, std::max(1, reps / 5));
  return 0;
}
