#include "blockprec/trunc_samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blockprec/errors.hpp"

namespace blockprec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_interval(double rate, double lo, double hi) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidInputError("truncated sampler: rate must be positive and finite");
  }
  if (!(lo < hi)) {
    throw InvalidInputError("truncated sampler: need lo < hi");
  }
}

double nudge_into(double x, double lo, double hi) {
  if (x <= lo) {
    return std::nextafter(lo, hi);
  }
  if (x >= hi) {
    return std::nextafter(hi, lo);
  }
  return x;
}

// exp(rate) variable truncated to (0, w); w may be +inf
double trunc_exp_from_zero(double rate, double w, RandomStream& rng) {
  const double u = rng.next_uniform();
  if (!std::isfinite(w)) {
    return -std::log(u) / rate;
  }
  const double q = -std::expm1(-rate * w);  // mass of (0, w), in (0, 1]
  if (!(q > 0.0)) {
    throw ResampleAtBoundaryError("truncated exponential: interval mass underflow");
  }
  return -std::log1p(-u * q) / rate;
}

}  // namespace

double sample_trunc_exponential(double rate, double lo, double hi, RandomStream& rng) {
  check_interval(rate, lo, hi);
  if (lo < 0.0) {
    throw InvalidInputError("sample_trunc_exponential: lo must be >= 0");
  }
  const double x = lo + trunc_exp_from_zero(rate, hi - lo, rng);
  return nudge_into(x, lo, hi);
}

double sample_trunc_laplace(double rate, double lo, double hi, RandomStream& rng) {
  check_interval(rate, lo, hi);
  if (lo >= 0.0) {
    return nudge_into(lo + trunc_exp_from_zero(rate, hi - lo, rng), lo, hi);
  }
  if (hi <= 0.0) {
    return nudge_into(-(-hi + trunc_exp_from_zero(rate, hi - lo, rng)), lo, hi);
  }
  // interval straddles the kink: pick a side by its mass, then invert there
  const double mass_left = -std::expm1(rate * lo);   // rate * integral of (lo, 0)
  const double mass_right = -std::expm1(-rate * hi);
  const double total = mass_left + mass_right;
  if (!(total > 0.0)) {
    throw ResampleAtBoundaryError("truncated Laplace: interval mass underflow");
  }
  const double u = rng.next_uniform() * total;
  double x;
  if (u < mass_left) {
    const double v = u / mass_left;  // in (0,1)
    x = std::log1p((1.0 - v) * std::expm1(rate * lo)) / rate;
  } else {
    const double v = (u - mass_left) / mass_right;
    x = -std::log1p(-v * mass_right) / rate;
  }
  return nudge_into(x, lo, hi);
}

double TruncHyperbolicSampler::density_shifted(double x) const {
  return std::exp(-(rate_ * std::sqrt(gamma_ * gamma_ + x * x) - shift_));
}

TruncHyperbolicSampler::TruncHyperbolicSampler(double rate, double gamma, double lo, double hi)
    : rate_(rate), gamma_(gamma), lo_(lo), hi_(hi) {
  check_interval(rate, lo, hi);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidInputError("TruncHyperbolicSampler: gamma must be >= 0 and finite");
  }

  // peak of the density inside the interval
  const double x_peak = std::clamp(0.0, lo, hi);
  shift_ = rate_ * std::sqrt(gamma_ * gamma_ + x_peak * x_peak);

  // clip where the density has fallen 60 nats below the peak; the discarded
  // tail mass is ~1e-26 of the total, far below the inversion tolerance
  const double reach = shift_ / rate_ + 60.0 / rate_;
  const double xcut = std::sqrt(std::max(0.0, reach * reach - gamma_ * gamma_));
  a_ = std::max(lo, -xcut);
  b_ = std::min(hi, xcut);
  if (!(a_ < b_)) {
    a_ = std::isfinite(lo) ? lo : -xcut;
    b_ = std::isfinite(hi) ? hi : xcut;
  }
  if (!(a_ < b_) || !std::isfinite(a_) || !std::isfinite(b_)) {
    throw EstimationFailedError("TruncHyperbolicSampler: cannot bracket the density support");
  }

  // composite Simpson, doubling panels until the total mass stabilizes. The
  // density has a derivative kink at x = 0 when gamma is small, so a panel
  // boundary is pinned there to keep each panel smooth.
  int panels = 256;
  const int max_panels = 1 << 18;
  double prev_mass = -1.0;
  while (true) {
    grid_.clear();
    if (a_ < 0.0 && b_ > 0.0) {
      const int left = std::clamp(
          static_cast<int>(std::lround(panels * (-a_) / (b_ - a_))), 1, panels - 1);
      for (int k = 0; k < left; ++k) {
        grid_.push_back(a_ + (0.0 - a_) * k / left);
      }
      const int right = panels - left;
      for (int k = 0; k < right; ++k) {
        grid_.push_back(b_ * static_cast<double>(k) / right);
      }
    } else {
      for (int k = 0; k < panels; ++k) {
        grid_.push_back(a_ + (b_ - a_) * k / panels);
      }
    }
    grid_.push_back(b_);

    cum_.assign(grid_.size(), 0.0);
    double acc = 0.0;
    double f0 = density_shifted(grid_[0]);
    for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
      const double x0 = grid_[k];
      const double x1 = grid_[k + 1];
      const double f1 = density_shifted(x1);
      const double fm = density_shifted(0.5 * (x0 + x1));
      acc += (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
      cum_[k + 1] = acc;
      f0 = f1;
    }
    mass_ = acc;
    if (!(mass_ > 0.0) || !std::isfinite(mass_)) {
      throw EstimationFailedError("TruncHyperbolicSampler: quadrature mass underflow");
    }
    if (prev_mass > 0.0 && std::abs(mass_ - prev_mass) <= 1e-12 * mass_) {
      break;
    }
    if (panels >= max_panels) {
      break;
    }
    prev_mass = mass_;
    panels *= 2;
  }
}

double TruncHyperbolicSampler::cdf(double x) const {
  if (x <= a_) {
    return 0.0;
  }
  if (x >= b_) {
    return 1.0;
  }
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double x0 = grid_[k];
  const double f0 = density_shifted(x0);
  const double f1 = density_shifted(x);
  const double fm = density_shifted(0.5 * (x0 + x));
  const double partial = (x - x0) / 6.0 * (f0 + 4.0 * fm + f1);
  return (cum_[k] + partial) / mass_;
}

double TruncHyperbolicSampler::draw(RandomStream& rng) const {
  const double target = rng.next_uniform();
  // locate the panel, then bisect within it to 1e-10 in CDF space
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), target * mass_);
  std::size_t k = static_cast<std::size_t>(it - cum_.begin());
  k = std::min(std::max<std::size_t>(k, 1), cum_.size() - 1) - 1;
  double left = grid_[k];
  double right = grid_[k + 1];
  for (int step = 0; step < 200; ++step) {
    const double mid = 0.5 * (left + right);
    const double c = cdf(mid);
    if (std::abs(c - target) <= 1e-10) {
      return nudge_into(mid, lo_, hi_);
    }
    if (c < target) {
      left = mid;
    } else {
      right = mid;
    }
    if (right - left <= 1e-15 * (1.0 + std::abs(left))) {
      break;
    }
  }
  return nudge_into(0.5 * (left + right), lo_, hi_);
}

double sample_trunc_hyperbolic_rejection(double rate, double gamma, double lo, double hi,
                                         RandomStream& rng) {
  check_interval(rate, lo, hi);
  // envelope: truncated Laplace with the same rate; the ratio
  // exp(-rate*(sqrt(g^2+y^2)-|y|)) peaks at the endpoint of largest |y|
  double log_m = 0.0;
  const double abs_lo = std::abs(lo);
  const double abs_hi = std::abs(hi);
  const double far = std::max(abs_lo, abs_hi);
  if (std::isfinite(far)) {
    log_m = -rate * (std::sqrt(gamma * gamma + far * far) - far);
  }
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double y = sample_trunc_laplace(rate, lo, hi, rng);
    const double log_accept = -rate * (std::sqrt(gamma * gamma + y * y) - std::abs(y)) - log_m;
    if (std::log(rng.next_uniform()) <= log_accept) {
      return y;
    }
  }
  throw EstimationFailedError("sample_trunc_hyperbolic_rejection: acceptance rate too low");
}

double sample_trunc_hyperbolic(double rate, double gamma, double lo, double hi, RandomStream& rng) {
  if (gamma <= 1e-14) {
    // sqrt(0 + x^2) = |x|: exactly the truncated Laplace, with exact inversion
    return sample_trunc_laplace(rate, lo, hi, rng);
  }
  try {
    TruncHyperbolicSampler sampler(rate, gamma, lo, hi);
    return sampler.draw(rng);
  } catch (const EstimationFailedError&) {
    return sample_trunc_hyperbolic_rejection(rate, gamma, lo, hi, rng);
  }
}

}  // namespace blockprec
