#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>

#include "blockprec/cv.hpp"
#include "blockprec/gibbs.hpp"
#include "blockprec/json_io.hpp"
#include "blockprec/model.hpp"
#include "blockprec/search.hpp"
#include "blockprec/threads.hpp"

using namespace blockprec;

TEST_CASE("importance sampling: OpenMP kernel equals the serial reference bitwise") {
  const Partition p({0, 0, 1});
  const PenaltyConfig c{0.7, 0.7, 1.4, 1.0};
  for (PriorKind kind : {PriorKind::gl1, PriorKind::gl12}) {
    const LogZEstimate par = estimate_logz_is(p, c, kind, 20000, 99);
    const LogZEstimate ser = estimate_logz_is_serial(p, c, kind, 20000, 99);
    CHECK(par.logz == ser.logz);
    CHECK(par.std_err == ser.std_err);
  }
}

TEST_CASE("importance sampling is invariant to the thread count") {
#ifdef _OPENMP
  const Partition p({0, 1, 1});
  const PenaltyConfig c{0.5, 0.5, 1.0, 1.0};
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const LogZEstimate one = estimate_logz_is(p, c, PriorKind::gl1, 10000, 7);
  omp_set_num_threads(saved > 1 ? saved : 2);
  const LogZEstimate many = estimate_logz_is(p, c, PriorKind::gl1, 10000, 7);
  omp_set_num_threads(saved);
  CHECK(one.logz == many.logz);
  CHECK(one.std_err == many.std_err);
#endif
}

TEST_CASE("multi-chain Gibbs: OpenMP equals serial") {
  const Partition p({0, 0, 1, 1});
  const PenaltyConfig c{0.1, 0.1, 1.0, 1.0};
  ChainConfig cfg;
  cfg.n_sweeps = 30;
  cfg.burn_in = 5;
  cfg.seed = 12;
  const auto par = run_chains(PriorKind::gl12, p, c, cfg, 3);
  const auto ser = run_chains_serial(PriorKind::gl12, p, c, cfg, 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(par[k].mean_abs.dense() == ser[k].mean_abs.dense());
  }
}

TEST_CASE("exhaustive search scoring is invariant to concurrency") {
  SynthSpec spec;
  spec.group_sizes = {3, 3, 3};
  spec.n = 150;
  spec.within = 0.45;
  spec.seed = 8;
  const auto [std_data, stats] = standardize(synth_blocks(spec).data);
  const PenaltyConfig c{5.0, 3.0, 30.0, 1.0};

  SearchOptions par;
  par.kind = PriorKind::gl1;
  par.parallel_scoring = true;
  SearchOptions ser = par;
  ser.parallel_scoring = false;

  const SearchReport a = exhaustive_search(stats, c, par);
  const SearchReport b = exhaustive_search(stats, c, ser);
  CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("thread cap honors the environment variable") {
  setenv("BLOCKPREC_THREADS", "1", 1);
  CHECK(thread_cap() == 1);
  unsetenv("BLOCKPREC_THREADS");
  CHECK(thread_cap() >= 1);
}
