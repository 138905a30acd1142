// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Outputs one line per kernel with both times and the
// speedup; results must agree bitwise (asserted here as well).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "blockprec/cv.hpp"
#include "blockprec/dataset.hpp"
#include "blockprec/gibbs.hpp"
#include "blockprec/model.hpp"
#include "blockprec/threads.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s serial %8.3fs   openmp %8.3fs   speedup %5.2fx   identical %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s, identical ? "yes" : "NO");
  if (!identical) {
    std::exit(1);
  }
}

}  // namespace

int main() {
  blockprec::apply_thread_cap();
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif

  // importance-sampling normalizer estimate, D = 4
  {
    const blockprec::Partition p({0, 0, 1, 1});
    const blockprec::PenaltyConfig c{0.5, 0.5, 1.5, 1.0};
    const long long n = 400000;

    auto t0 = clock_type::now();
    const auto serial = blockprec::estimate_logz_is_serial(p, c, blockprec::PriorKind::gl1, n, 7);
    const double ts = seconds(t0);

    t0 = clock_type::now();
    const auto parallel = blockprec::estimate_logz_is(p, c, blockprec::PriorKind::gl1, n, 7);
    const double tp = seconds(t0);

    report("estimate_logz_is", ts, tp,
           serial.logz == parallel.logz && serial.std_err == parallel.std_err);
  }

  // independent Gibbs chains, D = 4
  {
    const blockprec::Partition p({0, 0, 1, 1});
    const blockprec::PenaltyConfig c{0.1, 0.1, 1.0, 1.0};
    blockprec::ChainConfig cfg;
    cfg.n_sweeps = 600;
    cfg.burn_in = 100;
    cfg.seed = 11;
    const int chains = 4;

    auto t0 = clock_type::now();
    const auto serial =
        blockprec::run_chains_serial(blockprec::PriorKind::gl1, p, c, cfg, chains);
    const double ts = seconds(t0);

    t0 = clock_type::now();
    const auto parallel = blockprec::run_chains(blockprec::PriorKind::gl1, p, c, cfg, chains);
    const double tp = seconds(t0);

    bool identical = true;
    for (int k = 0; k < chains; ++k) {
      identical = identical &&
                  serial[k].mean_abs.dense() == parallel[k].mean_abs.dense() &&
                  serial[k].mean_diag == parallel[k].mean_diag;
    }
    report("gibbs chains x4", ts, tp, identical);
  }

  // cross-validation grid (parallel over candidates)
  {
    blockprec::SynthSpec spec;
    spec.group_sizes = {4, 4};
    spec.n = 80;
    spec.within = 0.4;
    spec.seed = 3;
    const blockprec::Dataset data = blockprec::synth_blocks(spec).data;

    blockprec::CvOptions opts;
    opts.seed = 5;
    opts.grid.points = 6;
    const std::vector<blockprec::Method> methods = {blockprec::Method::il1};

    blockprec::CvOptions serial_opts = opts;
    serial_opts.parallel_grid = false;
    auto t0 = clock_type::now();
    const auto serial = blockprec::cross_validate(data, methods, serial_opts);
    const double ts = seconds(t0);

    t0 = clock_type::now();
    const auto parallel = blockprec::cross_validate(data, methods, opts);
    const double tp = seconds(t0);

    bool identical = true;
    for (std::size_t f = 0; f < serial.methods[0].folds.size(); ++f) {
      identical = identical && serial.methods[0].folds[f].test_loglik ==
                                   parallel.methods[0].folds[f].test_loglik;
    }
    report("cv penalty grid", ts, tp, identical);
  }

  return 0;
}
