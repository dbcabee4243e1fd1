#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "photocount/errors.hpp"

namespace photocount {

/// Laser parameters shared by every mode of an ensemble. Rates are measured
/// in units of the linear gain, so gain_A = 1 is the usual choice.
struct LaserParams
{
  double gain_A = 1.0;
  double saturation_B = 0.005;
  double absorption_kappa = 0.0;
  double counting_time_t = 1.0;

  /// Saturation photon number n_s = A / B.
  double saturation_photons() const { return gain_A / saturation_B; }

  void validate() const
  {
    detail::require(std::isfinite(gain_A) && gain_A > 0.0, "gain_A must be finite and > 0");
    detail::require(std::isfinite(saturation_B) && saturation_B > 0.0,
                    "saturation_B must be finite and > 0 (n_s = A/B undefined otherwise)");
    detail::require(std::isfinite(absorption_kappa) && absorption_kappa >= 0.0,
                    "absorption_kappa must be finite and >= 0");
    detail::require(std::isfinite(counting_time_t) && counting_time_t > 0.0,
                    "counting_time_t must be finite and > 0");
    const double ns = saturation_photons();
    detail::require(std::isfinite(ns) && ns > 0.0, "saturation photon number must be finite and > 0");
  }
};

struct TruncationOptions
{
  /// Natural-log drop below the mode at which the support is cut.
  double log_drop = 40.0;
  /// Hard cap on the largest photon number.
  std::size_t max_photons = 10'000'000;
  /// Upper bound on the probability mass outside the retained support.
  double tail_tolerance = 1e-12;
};

/// Stationary photon-number distribution on a contiguous support
/// [first_n, n_max]. Probabilities outside the support are treated as zero.
class PhotonDistribution
{
public:
  PhotonDistribution() = default;

  /// Wraps an explicit probability table starting at photon number first_n.
  /// The table is renormalized to unit mass.
  static PhotonDistribution from_probabilities(std::size_t first_n, std::vector<double> probs)
  {
    detail::require(!probs.empty(), "probability table must not be empty");
    double sum = 0.0;
    for (double p : probs) {
      detail::require(std::isfinite(p) && p >= 0.0, "probabilities must be finite and >= 0");
      sum += p;
    }
    detail::require(sum > 0.0, "probability table has zero mass");
    for (double& p : probs) {
      p /= sum;
    }
    PhotonDistribution d;
    d.first_n_ = first_n;
    d.probabilities_ = std::move(probs);
    d.log_norm_ = std::numeric_limits<double>::quiet_NaN();
    d.total_loss_ = std::numeric_limits<double>::quiet_NaN();
    return d;
  }

  std::size_t first_n() const { return first_n_; }
  std::size_t n_max() const { return first_n_ + probabilities_.size() - 1; }
  std::span<const double> probabilities() const { return probabilities_; }

  double probability(std::size_t n) const
  {
    if (n < first_n_ || n > n_max()) {
      return 0.0;
    }
    return probabilities_[n - first_n_];
  }

  /// log of the normalization constant in front of x^(n+n_s) / Gamma(n+n_s+1).
  double log_norm() const { return log_norm_; }
  double total_loss() const { return total_loss_; }
  double tail_mass_estimate() const { return tail_mass_; }

private:
  friend PhotonDistribution compute_photon_distribution(const LaserParams&, double,
                                                        const TruncationOptions&);

  std::size_t first_n_ = 0;
  std::vector<double> probabilities_;
  double log_norm_ = 0.0;
  double total_loss_ = 0.0;
  double tail_mass_ = 0.0;
};

/// P_n proportional to (A n_s / C)^(n + n_s) / Gamma(n + n_s + 1).
///
/// Relative log-weights are accumulated from the mode with the exact ratio
/// P_{n+1}/P_n = (A n_s / C) / (n + n_s + 1), so the support can be grown in
/// both directions without ever forming the normalization constant. The
/// absolute scale is anchored once at the mode through lgamma.
inline PhotonDistribution compute_photon_distribution(const LaserParams& params, double total_loss_C,
                                                      const TruncationOptions& options = {})
{
  params.validate();
  detail::require(std::isfinite(total_loss_C) && total_loss_C > 0.0, "total loss C must be > 0");

  const double ns = params.saturation_photons();
  const double x = params.gain_A * ns / total_loss_C;
  const double log_x = std::log(x);
  if (!std::isfinite(x) || !std::isfinite(log_x)) {
    throw NumericalError("non-finite A*n_s/C; parameters overflow the photon distribution");
  }

  const double mode_real = std::floor(x - ns);
  if (mode_real > static_cast<double>(options.max_photons)) {
    throw TruncationError("distribution mode exceeds the photon-number cap");
  }
  const std::size_t mode = mode_real > 0.0 ? static_cast<std::size_t>(mode_real) : 0;

  // log-weight relative to the mode; step(n) = log P_{n+1} - log P_n
  auto step = [&](std::size_t n) { return log_x - std::log(static_cast<double>(n) + ns + 1.0); };

  std::vector<double> upper{0.0}; // n = mode, mode+1, ...
  std::vector<double> lower;      // n = mode-1, mode-2, ...

  {
    double lw = 0.0;
    for (std::size_t n = mode; n > 0;) {
      lw -= step(n - 1);
      --n;
      lower.push_back(lw);
      if (lw < -options.log_drop) {
        break;
      }
    }
  }
  {
    double lw = 0.0;
    std::size_t n = mode;
    for (;;) {
      lw += step(n);
      ++n;
      upper.push_back(lw);
      if (n >= options.max_photons) {
        throw TruncationError("photon distribution support exceeds the configured cap");
      }
      if (lw < -options.log_drop) {
        // geometric bound on the remaining upper tail, relative to the mode
        const double q = x / (static_cast<double>(n) + ns + 1.0);
        if (q < 1.0 && std::exp(lw) * q / (1.0 - q) < 1e-3 * options.tail_tolerance) {
          break;
        }
      }
    }
  }

  const std::size_t first_n = mode - lower.size();
  std::vector<double> logw;
  logw.reserve(lower.size() + upper.size());
  logw.insert(logw.end(), lower.rbegin(), lower.rend());
  logw.insert(logw.end(), upper.begin(), upper.end());

  // log-sum-exp; the mode has log-weight 0 so the maximum is 0
  double sum = 0.0;
  for (double lw : logw) {
    sum += std::exp(lw);
  }
  const double log_sum = std::log(sum);

  std::vector<double> probs(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) {
    probs[i] = std::exp(logw[i] - log_sum);
  }

  double tail = 0.0;
  {
    const double n_last = static_cast<double>(first_n + probs.size() - 1);
    const double q = x / (n_last + ns + 1.0);
    tail += probs.back() * q / (1.0 - q);
    if (first_n > 0) {
      const double q_down = (static_cast<double>(first_n) + ns) / x;
      if (q_down >= 1.0) {
        throw NumericalError("lower truncation is not below the mode");
      }
      tail += probs.front() * q_down / (1.0 - q_down);
    }
  }
  if (!(tail < options.tail_tolerance)) {
    throw TruncationError("truncated tail mass exceeds tolerance");
  }

  const double mode_abs = (static_cast<double>(mode) + ns) * log_x - std::lgamma(static_cast<double>(mode) + ns + 1.0);
  const double log_norm = -(mode_abs + log_sum);
  if (!std::isfinite(log_norm)) {
    throw NumericalError("non-finite normalization constant");
  }

  PhotonDistribution d;
  d.first_n_ = first_n;
  d.probabilities_ = std::move(probs);
  d.log_norm_ = log_norm;
  d.total_loss_ = total_loss_C;
  d.tail_mass_ = tail;
  return d;
}

inline constexpr int kMaxFactorialOrder = 8;

/// Sum over n of n (n-1) ... (n-r+1) P_n.
///
/// The summands are unimodal in n, so merging from both ends of the support
/// towards the peak adds them from the smallest to the largest.
inline double factorial_moment(const PhotonDistribution& dist, int r, int max_order = kMaxFactorialOrder)
{
  detail::require(r >= 1, "factorial moment order must be >= 1");
  detail::require(r <= max_order, "factorial moment order exceeds the configured cap");

  const auto probs = dist.probabilities();
  const std::size_t first = dist.first_n();
  auto term = [&](std::size_t i) {
    const double n = static_cast<double>(first + i);
    double falling = 1.0;
    for (int k = 0; k < r; ++k) {
      falling *= n - k;
    }
    return falling * probs[i];
  };

  // terms with n < r vanish
  std::size_t lo = first >= static_cast<std::size_t>(r) ? 0 : static_cast<std::size_t>(r) - first;
  if (lo >= probs.size()) {
    return 0.0;
  }
  std::size_t hi = probs.size() - 1;
  double t_lo = term(lo);
  double t_hi = term(hi);
  double sum = 0.0;
  while (lo < hi) {
    if (t_lo <= t_hi) {
      sum += t_lo;
      t_lo = term(++lo);
    } else {
      sum += t_hi;
      t_hi = term(--hi);
    }
  }
  return sum + t_lo;
}

inline double mean_photon_number(const PhotonDistribution& dist) { return factorial_moment(dist, 1); }

/// Variance over mean of the photon number.
inline double fano_factor(const PhotonDistribution& dist)
{
  const double mean = mean_photon_number(dist);
  if (!(mean > 0.0)) {
    throw std::domain_error("Fano factor undefined for zero mean");
  }
  const auto probs = dist.probabilities();
  double var = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double d = static_cast<double>(dist.first_n() + i) - mean;
    var += d * d * probs[i];
  }
  return var / mean;
}

/// mu_r = (Gamma t)^r times the r-th factorial moment of P_n at total loss
/// C = Gamma + kappa. Valid in the short-counting-time regime, which is
/// treated as exact here.
inline double short_time_moment(const LaserParams& params, double escape_gamma, int r,
                                const TruncationOptions& options = {})
{
  detail::require(std::isfinite(escape_gamma) && escape_gamma >= 0.0, "escape rate must be >= 0");
  const double total_loss = escape_gamma + params.absorption_kappa;
  detail::require(total_loss > 0.0, "total loss C = Gamma + kappa must be > 0");
  params.validate();
  if (escape_gamma == 0.0) {
    return 0.0;
  }
  const auto dist = compute_photon_distribution(params, total_loss, options);
  return std::pow(escape_gamma * params.counting_time_t, r) * factorial_moment(dist, r);
}

/// mu_1 .. mu_{r_max} for one escape rate, sharing a single distribution.
inline std::vector<double> short_time_moments(const LaserParams& params, double escape_gamma, int r_max,
                                              const TruncationOptions& options = {})
{
  detail::require(r_max >= 1, "r_max must be >= 1");
  detail::require(std::isfinite(escape_gamma) && escape_gamma >= 0.0, "escape rate must be >= 0");
  const double total_loss = escape_gamma + params.absorption_kappa;
  detail::require(total_loss > 0.0, "total loss C = Gamma + kappa must be > 0");
  params.validate();

  std::vector<double> mu(static_cast<std::size_t>(r_max), 0.0);
  if (escape_gamma == 0.0) {
    return mu;
  }
  const auto dist = compute_photon_distribution(params, total_loss, options);
  const double scale = escape_gamma * params.counting_time_t;
  for (int r = 1; r <= r_max; ++r) {
    mu[static_cast<std::size_t>(r - 1)] = std::pow(scale, r) * factorial_moment(dist, r);
  }
  return mu;
}

} // namespace photocount
