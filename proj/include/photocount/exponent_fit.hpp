#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "photocount/count_density.hpp"
#include "photocount/errors.hpp"

namespace photocount {

struct ExponentFit
{
  double exponent = 0.0;
  double standard_error = 0.0;
  /// Fit window in mu units.
  std::pair<double, double> window;
  std::size_t n_points = 0;
};

namespace detail {

inline ExponentFit least_squares_slope(const std::vector<double>& x, const std::vector<double>& y,
                                       std::pair<double, double> window)
{
  const std::size_t n = x.size();
  if (n < 10) {
    throw std::invalid_argument("exponent fit needs at least 10 usable nodes");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    ssr += r * r;
  }
  ExponentFit fit;
  fit.exponent = slope;
  fit.standard_error = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  fit.window = window;
  fit.n_points = n;
  return fit;
}

} // namespace detail

/// Slope of log P against log mu over regular nodes with mu in [lo, hi].
inline ExponentFit fit_power_law(const CountDensity& density, std::pair<double, double> window)
{
  detail::require(window.first > 0.0 && window.first < window.second, "invalid fit window");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < density.mu_grid.size(); ++i) {
    const double mu = density.mu_grid[i];
    if (mu < window.first || mu > window.second || density.node_kind[i] != NodeKind::regular) {
      continue;
    }
    if (!(density.density[i] > 0.0)) {
      throw std::invalid_argument("density not strictly positive on the fit window");
    }
    x.push_back(std::log(mu));
    y.push_back(std::log(density.density[i]));
  }
  return detail::least_squares_slope(x, y, window);
}

/// Slope of log P against log(mu_max - mu) over regular nodes with
/// mu / mu_max in the window (default 0.99 .. 0.999).
inline ExponentFit fit_singularity_at_max(const CountDensity& density, double mu_max,
                                          std::pair<double, double> window = {0.99, 0.999})
{
  if (!density.diverges_at_max()) {
    throw std::domain_error("density does not diverge at mu_max");
  }
  detail::require(window.first < window.second && window.second < 1.0, "invalid fit window");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < density.mu_grid.size(); ++i) {
    const double f = density.mu_grid[i] / mu_max;
    if (f < window.first || f > window.second || density.node_kind[i] != NodeKind::regular) {
      continue;
    }
    if (!(density.density[i] > 0.0)) {
      throw std::invalid_argument("density not strictly positive on the fit window");
    }
    x.push_back(std::log(mu_max - density.mu_grid[i]));
    y.push_back(std::log(density.density[i]));
  }
  return detail::least_squares_slope(x, y, {window.first * mu_max, window.second * mu_max});
}

} // namespace photocount
