#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "photocount/asymptotics.hpp"
#include "photocount/errors.hpp"
#include "photocount/mode_ensemble.hpp"
#include "photocount/parallel.hpp"
#include "photocount/photon_stats.hpp"
#include "photocount/response_curve.hpp"

namespace photocount {

enum class DensityMethod { deterministic, monte_carlo };

enum class NodeKind : std::uint8_t {
  regular,
  /// value matched to the analytic endpoint exponent instead of evaluated
  matched,
  /// Monte Carlo bin touching an integrable divergence
  singular,
};

struct SingularPoint
{
  double location = 0.0;
  double exponent = 0.0;
  std::string kind;
};

/// Ensemble distribution of one photocount moment on [0, mu_max].
struct CountDensity
{
  int moment_order_r = 1;
  double mu_max = 0.0;
  DensityMethod method = DensityMethod::deterministic;
  /// Deterministic: nodes strictly inside (0, mu_max). Monte Carlo: bin centres.
  std::vector<double> mu_grid;
  std::vector<double> density;
  std::vector<NodeKind> node_kind;
  /// Monte Carlo only.
  std::vector<double> bin_edges;
  std::vector<SingularPoint> singular_points;
  double mass_check = 0.0;
  /// Exponent of the mu -> 0 sliver.
  double lower_exponent = 0.0;
  /// Exponent in (mu_max - mu) of the top sliver when the density diverges there.
  std::optional<double> upper_exponent;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<std::string> flags;

  bool diverges_at_max() const { return upper_exponent.has_value(); }

  /// Probability mass on [0, mu].
  double cumulative(double mu) const
  {
    if (mu <= 0.0) {
      return 0.0;
    }
    if (method == DensityMethod::monte_carlo) {
      double acc = 0.0;
      for (std::size_t i = 0; i < density.size(); ++i) {
        const double lo = bin_edges[i];
        const double hi = bin_edges[i + 1];
        if (mu >= hi) {
          acc += density[i] * (hi - lo);
        } else {
          acc += density[i] * (mu - lo);
          break;
        }
      }
      return acc;
    }
    if (mu >= mu_max) {
      return mass_check;
    }
    const double mu0 = mu_grid.front();
    if (mu < mu0) {
      return cum_.front() * std::pow(mu / mu0, lower_exponent + 1.0);
    }
    const double mul = mu_grid.back();
    if (mu >= mul) {
      const double delta = mu_max - mul;
      const double rest = mass_check - cum_.back();
      const double frac = (mu_max - mu) / delta;
      const double e = upper_exponent.value_or(1.0);
      return mass_check - rest * std::pow(frac, e + 1.0);
    }
    const auto it = std::upper_bound(mu_grid.begin(), mu_grid.end(), mu);
    const std::size_t i = static_cast<std::size_t>(it - mu_grid.begin()) - 1;
    const double w = (mu - mu_grid[i]) / (mu_grid[i + 1] - mu_grid[i]);
    const double d_at = density[i] + w * (density[i + 1] - density[i]);
    return cum_[i] + 0.5 * (mu - mu_grid[i]) * (density[i] + d_at);
  }

  /// Integrates the node values: power-law slivers at the endpoints,
  /// trapezoids in between. Sets mass_check.
  void integrate()
  {
    cum_.assign(mu_grid.size(), 0.0);
    if (mu_grid.empty()) {
      mass_check = 0.0;
      return;
    }
    cum_[0] = density[0] * mu_grid[0] / (lower_exponent + 1.0);
    for (std::size_t i = 1; i < mu_grid.size(); ++i) {
      cum_[i] = cum_[i - 1] + 0.5 * (density[i] + density[i - 1]) * (mu_grid[i] - mu_grid[i - 1]);
    }
    // above: d (mu_max - mu)^e sliver; below: linear fall to zero at mu_max
    const double delta = mu_max - mu_grid.back();
    const double e = upper_exponent.value_or(1.0);
    mass_check = cum_.back() + density.back() * delta / (e + 1.0);
  }

private:
  std::vector<double> cum_;
};

struct DensityGridSpec
{
  std::size_t uniform_points = 2000;
  std::size_t points_per_decade = 40;
  /// Smallest endpoint distance, as a fraction of mu_max.
  double min_fraction = 1e-7;
  /// Largest endpoint distance covered by the log-spaced clusters.
  double cluster_fraction = 0.1;
  /// Nodes closer than this fraction of mu_max to a square-root divergence
  /// are matched to the analytic exponent.
  double singular_window = 1e-3;
};

namespace detail {

inline std::vector<double> density_nodes(double mu_max, const DensityGridSpec& spec)
{
  std::vector<double> fr;
  for (std::size_t i = 1; i < spec.uniform_points; ++i) {
    fr.push_back(static_cast<double>(i) / static_cast<double>(spec.uniform_points));
  }
  const double decades = std::log10(spec.cluster_fraction / spec.min_fraction);
  const auto count = static_cast<std::size_t>(std::ceil(decades * spec.points_per_decade)) + 1;
  for (double f : log_grid(spec.min_fraction, spec.cluster_fraction, count)) {
    fr.push_back(f);
    fr.push_back(1.0 - f);
  }
  std::sort(fr.begin(), fr.end());
  fr.erase(std::unique(fr.begin(), fr.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }), fr.end());
  std::vector<double> nodes;
  nodes.reserve(fr.size());
  for (double f : fr) {
    if (f > 0.0 && f < 1.0) {
      nodes.push_back(f * mu_max);
    }
  }
  return nodes;
}

/// Central difference with one Richardson step; one-sided near Gamma = 0.
template <class F>
double richardson_derivative(F&& f, double x, double h)
{
  if (x - h > 0.0) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
  }
  const double d1 = (f(x + h) - f(x)) / h;
  const double d2 = (f(x + 0.5 * h) - f(x)) / (0.5 * h);
  return 2.0 * d2 - d1;
}

inline void annotate_endpoints(const ResponseCurve& curve, const ModeEnsemble& ensemble, double& lower,
                               std::optional<double>& upper, std::vector<SingularPoint>& points)
{
  lower = small_count_exponent(ensemble.beta, ensemble.channels_M, curve.moment_order_r);
  points.push_back({0.0, lower, lower < 0.0 ? "power_law_divergence" : "power_law"});
  if (curve.peak) {
    upper = -0.5;
    points.push_back({curve.mu_max, -0.5, "square_root_divergence"});
  }
}

} // namespace detail

/// P(mu) = sum over branches of P(Gamma_i) / |d mu_r / d Gamma| at the
/// branch solutions Gamma_i(mu).
inline CountDensity density_deterministic(const ResponseCurve& curve, const ModeEnsemble& ensemble,
                                          const DensityGridSpec& spec = {})
{
  ensemble.validate();
  detail::require(!curve.branches.empty(), "response curve has no branches");

  CountDensity out;
  out.moment_order_r = curve.moment_order_r;
  out.mu_max = curve.mu_max;
  out.method = DensityMethod::deterministic;
  detail::annotate_endpoints(curve, ensemble, out.lower_exponent, out.upper_exponent, out.singular_points);
  if (curve.multiple_maxima) {
    out.flags.push_back("multiple_maxima");
  }

  out.mu_grid = detail::density_nodes(curve.mu_max, spec);
  const std::size_t n = out.mu_grid.size();
  out.density.assign(n, 0.0);
  out.node_kind.assign(n, NodeKind::regular);

  const double window = spec.singular_window * curve.mu_max;
  if (out.upper_exponent) {
    for (std::size_t i = 0; i < n; ++i) {
      if (curve.mu_max - out.mu_grid[i] < window) {
        out.node_kind[i] = NodeKind::matched;
      }
    }
  }

  const double gamma_floor = 1e-8 * ensemble.mean_gamma;
  auto mu_of = [&](double g) { return curve.evaluate(g); };
  std::vector<std::string> failures(n);

  parallel_for(n, [&](std::size_t i) {
    if (out.node_kind[i] != NodeKind::regular) {
      return;
    }
    const double mu = out.mu_grid[i];
    double total = 0.0;
    for (std::size_t b = 0; b < curve.branches.size(); ++b) {
      const auto [lo, hi] = curve.branch_range(b);
      if (!(mu >= lo && mu <= hi)) {
        continue;
      }
      if (curve.branches[b].open_ended && mu == curve.plateau_estimate) {
        continue;
      }
      const double gamma = invert_on_branch(curve, b, mu);
      const double p = gamma_pdf(ensemble, gamma);
      if (p == 0.0) {
        continue;
      }
      const double h = std::max(1e-4 * gamma, gamma_floor);
      const double slope = detail::richardson_derivative(mu_of, gamma, h);
      const bool near_peak = curve.peak && std::abs(gamma - curve.peak->gamma_star) < 1e-3 * curve.peak->gamma_star;
      if (std::abs(slope) * std::max(gamma, gamma_floor) < 1e-12 * curve.mu_max && !near_peak) {
        failures[i] = "vanishing derivative away from the peak";
        return;
      }
      total += p / std::abs(slope);
    }
    out.density[i] = total;
  });
  for (const auto& f : failures) {
    if (!f.empty()) {
      throw NumericalError("grid pathology: " + f);
    }
  }

  if (out.upper_exponent) {
    // anchor: the regular node closest to mu_max
    std::optional<std::size_t> anchor;
    for (std::size_t i = 0; i < n; ++i) {
      if (out.node_kind[i] == NodeKind::regular) {
        anchor = i;
      }
    }
    if (anchor) {
      const double d_anchor = curve.mu_max - out.mu_grid[*anchor];
      const double e = *out.upper_exponent;
      for (std::size_t i = *anchor + 1; i < n; ++i) {
        out.density[i] = out.density[*anchor] * std::pow((curve.mu_max - out.mu_grid[i]) / d_anchor, e);
      }
    }
  }

  out.integrate();
  return out;
}

/// Histogram of mu_r over Gamma ~ chi^2 samples, each evaluated exactly.
/// Samples are drawn in fixed-size chunks with one substream per chunk, so
/// the histogram does not depend on the worker count.
inline CountDensity density_monte_carlo(const LaserParams& params, const ModeEnsemble& ensemble, int r,
                                        const RngHandle& rng, std::size_t n_samples, std::size_t bins,
                                        const ResponseCurve& curve)
{
  params.validate();
  ensemble.validate();
  detail::require(n_samples >= 10'000, "Monte Carlo density needs at least 1e4 samples");
  detail::require(bins >= 2, "need at least two bins");
  detail::require(curve.moment_order_r == r, "curve and requested moment order differ");

  CountDensity out;
  out.moment_order_r = r;
  out.mu_max = curve.mu_max;
  out.method = DensityMethod::monte_carlo;
  out.seed = rng.seed;
  out.samples = n_samples;
  detail::annotate_endpoints(curve, ensemble, out.lower_exponent, out.upper_exponent, out.singular_points);

  const double upper = 1.001 * curve.mu_max;
  const double width = upper / static_cast<double>(bins);
  out.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    out.bin_edges[i] = upper * static_cast<double>(i) / static_cast<double>(bins);
  }

  constexpr std::size_t kChunk = 1 << 15;
  const std::size_t chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<std::vector<std::uint64_t>> counts(chunks);
  std::vector<std::uint64_t> overflow(chunks, 0);

  parallel_for(chunks, [&](std::size_t c) {
    auto engine = rng.substream(c).engine();
    auto& local = counts[c];
    local.assign(bins, 0);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(n_samples, begin + kChunk);
    for (std::size_t s = begin; s < end; ++s) {
      const double gamma = draw_gamma(ensemble, engine);
      const double mu = short_time_moment(params, gamma, r);
      auto bin = static_cast<std::size_t>(mu / width);
      if (bin >= bins) {
        bin = bins - 1;
        ++overflow[c];
      }
      ++local[bin];
    }
  });

  std::vector<std::uint64_t> total(bins, 0);
  std::uint64_t overflowed = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t b = 0; b < bins; ++b) {
      total[b] += counts[c][b];
    }
    overflowed += overflow[c];
  }
  if (overflowed > 0) {
    out.flags.push_back("samples_above_range:" + std::to_string(overflowed));
  }

  out.mu_grid.resize(bins);
  out.density.resize(bins);
  out.node_kind.assign(bins, NodeKind::regular);
  std::uint64_t counted = 0;
  const double norm = static_cast<double>(n_samples) * width;
  for (std::size_t b = 0; b < bins; ++b) {
    out.mu_grid[b] = 0.5 * (out.bin_edges[b] + out.bin_edges[b + 1]);
    out.density[b] = static_cast<double>(total[b]) / norm;
    counted += total[b];
  }
  if (out.lower_exponent < 0.0) {
    out.node_kind.front() = NodeKind::singular;
  }
  if (out.upper_exponent) {
    out.node_kind[std::min(bins - 1, static_cast<std::size_t>(curve.mu_max / width))] = NodeKind::singular;
  }
  out.mass_check = static_cast<double>(counted) / static_cast<double>(n_samples);
  return out;
}

/// Convenience overload building the response curve with default settings.
inline CountDensity density_monte_carlo(const LaserParams& params, const ModeEnsemble& ensemble, int r,
                                        const RngHandle& rng, std::size_t n_samples, std::size_t bins)
{
  const double gamma_max = std::max(20.0 * ensemble.mean_gamma, 4.0 * std::max(params.gain_A, params.absorption_kappa));
  return density_monte_carlo(params, ensemble, r, rng, n_samples, bins, build_response_curve(params, r, gamma_max, 400));
}

struct DensityComparison
{
  double total_variation = 0.0;
  double ks_statistic = 0.0;
  std::size_t bins_used = 0;
};

/// Total variation over common regular bins and the KS distance between the
/// two cumulative distributions at the interior bin edges. Bins touching an
/// annotated divergence of either density are left out.
inline DensityComparison compare_densities(const CountDensity& a, const CountDensity& b, std::size_t bins = 400)
{
  if (std::abs(a.mu_max - b.mu_max) > 1e-9 * std::max(a.mu_max, b.mu_max)) {
    throw std::invalid_argument("densities cover different mu ranges");
  }
  std::vector<double> edges;
  if (!a.bin_edges.empty() && !b.bin_edges.empty()) {
    if (a.bin_edges != b.bin_edges) {
      throw std::invalid_argument("incompatible histogram grids");
    }
    edges = a.bin_edges;
  } else if (!a.bin_edges.empty()) {
    edges = a.bin_edges;
  } else if (!b.bin_edges.empty()) {
    edges = b.bin_edges;
  } else {
    detail::require(bins >= 2, "need at least two bins");
    edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
      edges[i] = a.mu_max * static_cast<double>(i) / static_cast<double>(bins);
    }
  }

  const bool lower_singular = a.lower_exponent < 0.0 || b.lower_exponent < 0.0;
  const bool upper_singular = a.diverges_at_max() || b.diverges_at_max();
  const double mu_max = a.mu_max;

  DensityComparison out;
  double prev_a = 0.0;
  double prev_b = 0.0;
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double ca = a.cumulative(edges[i + 1]);
    const double cb = b.cumulative(edges[i + 1]);
    const bool first = i == 0;
    const bool holds_max = edges[i] <= mu_max && mu_max <= edges[i + 1];
    if (!(first && lower_singular) && !(holds_max && upper_singular)) {
      tv += std::abs((ca - prev_a) - (cb - prev_b));
      ++out.bins_used;
    }
    if (edges[i + 1] > 0.0 && edges[i + 1] < mu_max) {
      out.ks_statistic = std::max(out.ks_statistic, std::abs(ca - cb));
    }
    prev_a = ca;
    prev_b = cb;
  }
  out.total_variation = 0.5 * tv;
  return out;
}

/// True if the density rises somewhere inside [(1 - fraction) mu_max, mu_max),
/// i.e. it has a local maximum (or divergence) at the top of the range.
inline bool has_peak_near_max(const CountDensity& density, double fraction = 0.02)
{
  const double lo = (1.0 - fraction) * density.mu_max;
  std::optional<double> first;
  double best = 0.0;
  for (std::size_t i = 0; i < density.mu_grid.size(); ++i) {
    const double mu = density.mu_grid[i];
    if (mu < lo || mu >= density.mu_max || density.node_kind[i] == NodeKind::singular) {
      continue;
    }
    if (!first) {
      first = density.density[i];
    }
    best = std::max(best, density.density[i]);
  }
  return first && best > *first * (1.0 + 1e-9);
}

} // namespace photocount
