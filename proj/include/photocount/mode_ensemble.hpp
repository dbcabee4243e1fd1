#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "photocount/errors.hpp"

namespace photocount {

/// Ensemble of chaotic cavity modes: escape rates follow a chi-squared law
/// with nu = beta * M degrees of freedom and mean mean_gamma.
struct ModeEnsemble
{
  int beta = 1;
  int channels_M = 1;
  double mean_gamma = 1.0;

  int nu() const { return beta * channels_M; }

  void validate() const
  {
    detail::require(beta == 1 || beta == 2, "beta must be 1 or 2");
    detail::require(channels_M >= 1, "channel count M must be >= 1");
    detail::require(std::isfinite(mean_gamma) && mean_gamma > 0.0, "mean escape rate must be > 0");
  }
};

/// Reproducible random stream: identical (seed, stream) pairs give identical
/// sample sequences.
struct RngHandle
{
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::mt19937_64 engine() const
  {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return std::mt19937_64(seq);
  }

  RngHandle substream(std::uint64_t index) const
  {
    return {seed, stream * 0x100000001b3ull + index + 1};
  }
};

/// log of A_nu = (nu / 2 Gbar)^(nu/2) / Gamma(nu/2).
inline double log_gamma_normalization(const ModeEnsemble& ensemble)
{
  const double half_nu = 0.5 * ensemble.nu();
  return half_nu * std::log(half_nu / ensemble.mean_gamma) - std::lgamma(half_nu);
}

inline double gamma_pdf(const ModeEnsemble& ensemble, double gamma)
{
  ensemble.validate();
  detail::require(gamma >= 0.0, "escape rate must be >= 0");
  const double half_nu = 0.5 * ensemble.nu();
  if (gamma == 0.0) {
    if (half_nu < 1.0) {
      return std::numeric_limits<double>::infinity();
    }
    return half_nu == 1.0 ? std::exp(log_gamma_normalization(ensemble)) : 0.0;
  }
  const double log_p = log_gamma_normalization(ensemble) + (half_nu - 1.0) * std::log(gamma) -
                       half_nu * gamma / ensemble.mean_gamma;
  return std::exp(log_p);
}

inline double gamma_cdf(const ModeEnsemble& ensemble, double gamma)
{
  ensemble.validate();
  if (gamma <= 0.0) {
    return 0.0;
  }
  const double half_nu = 0.5 * ensemble.nu();
  return boost::math::gamma_p(half_nu, half_nu * gamma / ensemble.mean_gamma);
}

inline constexpr int kMaxSumOfSquaresNu = 32;

/// Draws from an already-seeded engine; used by the Monte Carlo sampler so
/// that every chunk owns its own engine.
template <class Engine>
double draw_gamma(const ModeEnsemble& ensemble, Engine& engine)
{
  const int nu = ensemble.nu();
  if (nu <= kMaxSumOfSquaresNu) {
    std::normal_distribution<double> normal(0.0, 1.0);
    double sum = 0.0;
    for (int k = 0; k < nu; ++k) {
      const double z = normal(engine);
      sum += z * z;
    }
    return ensemble.mean_gamma / nu * sum;
  }
  std::gamma_distribution<double> gamma(0.5 * nu, 2.0 * ensemble.mean_gamma / nu);
  return gamma(engine);
}

inline std::vector<double> sample_gamma(const ModeEnsemble& ensemble, const RngHandle& rng, std::size_t count)
{
  ensemble.validate();
  detail::require(count >= 1, "sample count must be >= 1");
  auto engine = rng.engine();
  std::vector<double> out(count);
  for (double& g : out) {
    g = draw_gamma(ensemble, engine);
  }
  return out;
}

/// Saddle-point Gaussian approximation for many channels: (mean, std).
inline std::pair<double, double> gaussian_limit_stats(const ModeEnsemble& ensemble)
{
  ensemble.validate();
  const double half_nu = 0.5 * ensemble.nu();
  return {ensemble.mean_gamma, ensemble.mean_gamma / std::sqrt(half_nu)};
}

} // namespace photocount
