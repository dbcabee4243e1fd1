#pragma once

#include <cmath>

#include "photocount/errors.hpp"
#include "photocount/photon_stats.hpp"

namespace photocount {

/// Exponent of the small-count law P(mu_r) ~ mu_r^(beta M / 2r - 1).
inline double small_count_exponent(int beta, int channels_M, int r)
{
  detail::require(beta == 1 || beta == 2, "beta must be 1 or 2");
  detail::require(channels_M >= 1 && r >= 1, "M and r must be >= 1");
  return static_cast<double>(beta * channels_M) / (2.0 * r) - 1.0;
}

/// Relative distance |C - A| / A inside which the far-from-threshold mean
/// photocount is not used.
inline constexpr double kThresholdNeighbourhood = 1e-3;

/// Far-from-threshold mean photocount:
///   t Gamma n_s (A - C) / C   for C < A,
///   t Gamma A / (C - A)       for C > A,
/// with C = Gamma + kappa.
inline double asymptotic_mu1(const LaserParams& params, double gamma)
{
  params.validate();
  detail::require(std::isfinite(gamma) && gamma >= 0.0, "escape rate must be >= 0");
  const double a = params.gain_A;
  const double c = gamma + params.absorption_kappa;
  if (std::abs(c - a) < kThresholdNeighbourhood * a) {
    throw std::domain_error("total loss is at threshold; use exact summation");
  }
  const double t = params.counting_time_t;
  if (c < a) {
    return t * gamma * params.saturation_photons() * (a - c) / c;
  }
  return t * gamma * a / (c - a);
}

/// asymptotic_mu1 away from threshold, exact summation inside the
/// threshold neighbourhood.
inline double mean_photocount_estimate(const LaserParams& params, double gamma)
{
  const double c = gamma + params.absorption_kappa;
  if (std::abs(c - params.gain_A) < kThresholdNeighbourhood * params.gain_A) {
    return short_time_moment(params, gamma, 1);
  }
  return asymptotic_mu1(params, gamma);
}

/// Escape rate maximizing the above-threshold branch of asymptotic_mu1:
/// sqrt(A kappa) - kappa.
inline double gamma_star_analytic(double gain_A, double kappa)
{
  detail::require(kappa > 0.0, "kappa must be > 0");
  if (gain_A < kappa) {
    throw std::domain_error("below-threshold ensemble has no interior maximum");
  }
  return std::sqrt(gain_A * kappa) - kappa;
}

} // namespace photocount
