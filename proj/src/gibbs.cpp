#include "blockprec/gibbs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "blockprec/errors.hpp"
#include "blockprec/pdcore.hpp"
#include "blockprec/rng.hpp"
#include "blockprec/trunc_samplers.hpp"

namespace blockprec {

namespace {

// effective sample size via Geyer's initial positive sequence on the lag
// autocovariances
double effective_sample_size(const std::vector<double>& series) {
  const int n = static_cast<int>(series.size());
  if (n < 4) {
    return static_cast<double>(n);
  }
  double mean = 0.0;
  for (double v : series) {
    mean += v;
  }
  mean /= n;
  auto autocov = [&](int lag) {
    double acc = 0.0;
    for (int t = 0; t + lag < n; ++t) {
      acc += (series[t] - mean) * (series[t + lag] - mean);
    }
    return acc / n;
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) {
    return static_cast<double>(n);
  }
  double rho_sum = 0.0;
  for (int k = 1; k + 1 < n; k += 2) {
    const double pair = (autocov(k) + autocov(k + 1)) / c0;
    if (pair <= 0.0) {
      break;
    }
    rho_sum += pair;
  }
  const double denom = 1.0 + 2.0 * rho_sum;
  return std::max(1.0, n / std::max(denom, 1e-12));
}

double gamma_for_entry(const SymMatrix& x, const Partition& p, int i, int j, int ball_k,
                       int ball_l) {
  double sq = 0.0;
  const int d = x.dim();
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (a == i && b == j) {
        continue;
      }
      const int ga = p.group(a);
      const int gb = p.group(b);
      if ((ga == ball_k && gb == ball_l) || (ga == ball_l && gb == ball_k)) {
        sq += x(a, b) * x(a, b);
      }
    }
  }
  return std::sqrt(sq);
}

}  // namespace

ChainSummary gibbs_chain(PriorKind kind, const Partition& p, const PenaltyConfig& c,
                         const ChainConfig& cfg) {
  c.validate();
  if (cfg.n_sweeps <= cfg.burn_in || cfg.burn_in < 0 || cfg.thin < 1) {
    throw InvalidInputError("gibbs_chain: need n_sweeps > burn_in >= 0 and thin >= 1");
  }
  const int d = p.dim();
  SymMatrix x = SymMatrix::identity(d);

  std::vector<std::pair<int, int>> order;
  order.reserve(d * (d + 1) / 2);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      order.emplace_back(i, j);
    }
  }

  RandomStream rng = RandomStream::substream(cfg.seed, 0);

  ChainSummary out;
  out.seed = cfg.seed;
  out.mean_abs = SymMatrix(d);
  out.ess = SymMatrix(d);
  out.mean_diag = Eigen::VectorXd::Zero(d);

  const int n_entries = static_cast<int>(order.size());
  std::vector<std::vector<double>> series(order.size());

  Eigen::MatrixXd abs_sum = Eigen::MatrixXd::Zero(d, d);

  for (int sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
    if (cfg.randomized_order) {
      for (int k = n_entries - 1; k > 0; --k) {
        const int r = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(k + 1));
        std::swap(order[k], order[r]);
      }
    }
    for (auto [i, j] : order) {
      const PdInterval iv = pd_interval(x, i, j);
      double t;
      if (i == j) {
        t = sample_trunc_exponential(c.lambda_d, std::max(iv.lo, 0.0), iv.hi, rng);
      } else if (kind == PriorKind::gl1 || p.same_group(i, j)) {
        const double rate = p.same_group(i, j) ? c.lambda_1 : c.lambda_0;
        t = sample_trunc_laplace(rate, iv.lo, iv.hi, rng);
      } else {
        const int gk = p.group(i);
        const int gl = p.group(j);
        const double rate = static_cast<double>(p.cross_pairs(gk, gl)) * c.lambda_0;
        const double gamma = gamma_for_entry(x, p, i, j, gk, gl);
        try {
          TruncHyperbolicSampler sampler(rate, gamma, iv.lo, iv.hi);
          t = sampler.draw(rng);
        } catch (const EstimationFailedError&) {
          ++out.quadrature_fallbacks;
          t = sample_trunc_hyperbolic_rejection(rate, gamma, iv.lo, iv.hi, rng);
        }
      }
      // keep the state away from the cone boundary
      const double width = std::isfinite(iv.hi) ? iv.hi - iv.lo : 1.0 + std::abs(iv.lo);
      if (t - iv.lo < 1e-14 * width) {
        t = iv.lo + 1e-12 * width;
        ++out.boundary_nudges;
      } else if (std::isfinite(iv.hi) && iv.hi - t < 1e-14 * width) {
        t = iv.hi - 1e-12 * width;
        ++out.boundary_nudges;
      }
      x.set(i, j, t);
      if (!is_pd(x)) {
        throw Error("gibbs_chain: internal invariant failure, state left the PD cone");
      }
    }

    if (sweep >= cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0) {
      ++out.kept;
      // record in raster order regardless of the update order
      std::vector<double> upper;
      upper.reserve(order.size());
      std::size_t e = 0;
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          const double v = x(i, j);
          abs_sum(i, j) += std::abs(v);
          series[e].push_back(v);
          upper.push_back(v);
          ++e;
        }
      }
      if (cfg.keep_samples) {
        out.samples.push_back(std::move(upper));
      }
    }
  }

  std::size_t e = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      out.mean_abs.set(i, j, abs_sum(i, j) / out.kept);
      out.ess.set(i, j, effective_sample_size(series[e]));
      if (i == j) {
        double acc = 0.0;
        for (double v : series[e]) {
          acc += v;
        }
        out.mean_diag(i) = acc / out.kept;
      }
      ++e;
    }
  }
  return out;
}

namespace {

std::uint64_t chain_seed(std::uint64_t base, int chain) {
  return mix64(base + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(chain) + 1));
}

}  // namespace

std::vector<ChainSummary> run_chains(PriorKind kind, const Partition& p, const PenaltyConfig& c,
                                     const ChainConfig& base, int n_chains) {
  if (n_chains < 1) {
    throw InvalidInputError("run_chains: need at least one chain");
  }
  std::vector<ChainSummary> out(n_chains);
  std::vector<std::string> failures(n_chains);
#pragma omp parallel for schedule(dynamic)
  for (int chain = 0; chain < n_chains; ++chain) {
    try {
      ChainConfig cfg = base;
      cfg.seed = chain_seed(base.seed, chain);
      out[chain] = gibbs_chain(kind, p, c, cfg);
    } catch (const std::exception& ex) {
      failures[chain] = ex.what();
    }
  }
  for (const std::string& message : failures) {
    if (!message.empty()) {
      throw Error("run_chains: " + message);
    }
  }
  return out;
}

std::vector<ChainSummary> run_chains_serial(PriorKind kind, const Partition& p,
                                            const PenaltyConfig& c, const ChainConfig& base,
                                            int n_chains) {
  if (n_chains < 1) {
    throw InvalidInputError("run_chains: need at least one chain");
  }
  std::vector<ChainSummary> out(n_chains);
  for (int chain = 0; chain < n_chains; ++chain) {
    ChainConfig cfg = base;
    cfg.seed = chain_seed(base.seed, chain);
    out[chain] = gibbs_chain(kind, p, c, cfg);
  }
  return out;
}

ChainSummary pool_summaries(const std::vector<ChainSummary>& chains) {
  if (chains.empty()) {
    throw InvalidInputError("pool_summaries: no chains");
  }
  const int d = chains.front().mean_abs.dim();
  ChainSummary out;
  out.mean_abs = SymMatrix(d);
  out.ess = SymMatrix(d);
  out.mean_diag = Eigen::VectorXd::Zero(d);
  long long total = 0;
  for (const ChainSummary& ch : chains) {
    total += ch.kept;
    out.boundary_nudges += ch.boundary_nudges;
    out.quadrature_fallbacks += ch.quadrature_fallbacks;
  }
  out.kept = static_cast<int>(total);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double acc_abs = 0.0;
      double acc_ess = 0.0;
      for (const ChainSummary& ch : chains) {
        acc_abs += ch.mean_abs(i, j) * ch.kept;
        acc_ess += ch.ess(i, j);
      }
      out.mean_abs.set(i, j, acc_abs / total);
      out.ess.set(i, j, acc_ess);
    }
    double acc_diag = 0.0;
    for (const ChainSummary& ch : chains) {
      acc_diag += ch.mean_diag(i) * ch.kept;
    }
    out.mean_diag(i) = acc_diag / total;
  }
  return out;
}

}  // namespace blockprec
