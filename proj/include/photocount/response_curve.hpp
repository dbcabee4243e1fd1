#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "photocount/errors.hpp"
#include "photocount/parallel.hpp"
#include "photocount/photon_stats.hpp"

namespace photocount {

enum class Direction { increasing, decreasing };

/// Monotonic piece of a response curve: grid indices [first, last].
/// Neighbouring branches share their turning-point node.
struct Branch
{
  std::size_t first = 0;
  std::size_t last = 0;
  Direction direction = Direction::increasing;
  /// The last branch continues past the grid towards the Gamma -> infinity
  /// plateau.
  bool open_ended = false;
};

struct Peak
{
  double gamma_star = 0.0;
  double mu_max = 0.0;
};

struct PeakSearch
{
  std::optional<Peak> peak;
  std::vector<Peak> maxima;
  bool ambiguous = false;
};

/// mu_r(Gamma) tabulated on a grid that starts at Gamma = 0.
struct ResponseCurve
{
  LaserParams params;
  int moment_order_r = 1;
  std::vector<double> gamma_grid;
  std::vector<double> mu_values;
  std::vector<Branch> branches;
  std::optional<Peak> peak;
  /// Every interior maximum found on the grid; more than one is flagged.
  std::vector<Peak> maxima;
  bool multiple_maxima = false;
  /// Exact Gamma -> infinity limit of mu_r.
  double plateau_estimate = 0.0;
  /// Largest tabulated value.
  double grid_supremum = 0.0;
  /// Peak value if an interior maximum exists, otherwise the plateau.
  double mu_max = 0.0;

  double evaluate(double gamma) const { return short_time_moment(params, gamma, moment_order_r); }

  /// Branch index owning grid node i (the earlier branch at a shared node).
  std::size_t branch_of(std::size_t i) const
  {
    for (std::size_t b = 0; b < branches.size(); ++b) {
      if (i >= branches[b].first && i <= branches[b].last) {
        return b;
      }
    }
    return branches.size() - 1;
  }

  /// Closed value range of a branch; for the open-ended branch the far end is
  /// the plateau, which is approached but not attained.
  std::pair<double, double> branch_range(std::size_t b) const
  {
    const Branch& br = branches.at(b);
    double a = mu_values[br.first];
    double z = br.open_ended ? plateau_estimate : mu_values[br.last];
    if (br.open_ended) {
      z = br.direction == Direction::increasing ? std::max(z, mu_values[br.last])
                                                : std::min(z, mu_values[br.last]);
    }
    return {std::min(a, z), std::max(a, z)};
  }
};

/// r! (A t)^r prod_{j=1..r} n_s / (n_s + j): the leading small-(A n_s/C)
/// behaviour of (Gamma t)^r times the r-th factorial moment.
inline double plateau_limit(const LaserParams& params, int r)
{
  const double ns = params.saturation_photons();
  double value = 1.0;
  for (int j = 1; j <= r; ++j) {
    value *= j * params.gain_A * params.counting_time_t * ns / (ns + j);
  }
  return value;
}

enum class ThresholdClass { above_ensemble, below_ensemble };

struct ThresholdClassification
{
  ThresholdClass cls = ThresholdClass::below_ensemble;
  /// A == kappa exactly; classified below by convention.
  bool critical = false;
};

inline ThresholdClassification classify_threshold(const LaserParams& params)
{
  params.validate();
  if (params.gain_A == params.absorption_kappa) {
    return {ThresholdClass::below_ensemble, true};
  }
  return {params.gain_A > params.absorption_kappa ? ThresholdClass::above_ensemble
                                                  : ThresholdClass::below_ensemble,
          false};
}

/// Golden-section search for the maximum of a unimodal f on [a, b]. Stops
/// once the bracket is narrower than rel_tol times its midpoint.
template <class F>
double golden_section_maximize(F&& f, double a, double b, double rel_tol = 1e-6, int max_iter = 200)
{
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(b - a) <= rel_tol * std::abs(0.5 * (a + b))) {
      break;
    }
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace detail {

// +1 / -1 per grid interval; changes smaller than tol inherit the previous
// direction so round-off on a flat plateau cannot split a branch.
inline std::vector<int> interval_directions(const std::vector<double>& mu)
{
  double scale = 0.0;
  for (double v : mu) {
    scale = std::max(scale, std::abs(v));
  }
  const double tol = 1e-12 * scale;
  std::vector<int> dir(mu.size() - 1, 0);
  int previous = +1;
  for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
    const double diff = mu[i + 1] - mu[i];
    if (diff > tol) {
      previous = +1;
    } else if (diff < -tol) {
      previous = -1;
    }
    dir[i] = previous;
  }
  return dir;
}

inline std::vector<Branch> split_branches(const std::vector<double>& mu)
{
  const auto dir = interval_directions(mu);
  std::vector<Branch> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= dir.size(); ++i) {
    if (i == dir.size() || dir[i] != dir[start]) {
      out.push_back({start, i, dir[start] > 0 ? Direction::increasing : Direction::decreasing, false});
      start = i;
    }
  }
  out.back().open_ended = true;
  return out;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t points)
{
  std::vector<double> g(points);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = std::exp(llo + step * static_cast<double>(i));
  }
  g.back() = hi;
  return g;
}

} // namespace detail

/// Locates interior maxima of the tabulated curve and refines each one by
/// golden-section search on the exact mu_r between its bracketing nodes.
inline PeakSearch find_peak(const ResponseCurve& curve)
{
  PeakSearch result;
  const auto& g = curve.gamma_grid;
  const auto& mu = curve.mu_values;
  if (mu.size() < 3) {
    return result;
  }
  const auto dir = detail::interval_directions(mu);
  for (std::size_t i = 1; i < dir.size(); ++i) {
    if (dir[i - 1] > 0 && dir[i] < 0) {
      // the run of +1 may end on a flat stretch; bracket generously
      const double lo = g[i - 1];
      const double hi = g[i + 1];
      const double star = golden_section_maximize([&](double x) { return curve.evaluate(x); }, lo, hi);
      result.maxima.push_back({star, curve.evaluate(star)});
    }
  }
  if (result.maxima.empty()) {
    return result;
  }
  result.ambiguous = result.maxima.size() > 1;
  result.peak = *std::max_element(result.maxima.begin(), result.maxima.end(),
                                  [](const Peak& a, const Peak& b) { return a.mu_max < b.mu_max; });
  return result;
}

/// Tabulates mu_r on {0} plus a log-spaced grid [gamma_min, gamma_max]
/// (gamma_min defaults to 5e-6 gamma_max, i.e. 1e-4 of the ensemble mean when
/// gamma_max = 20 Gbar), then adds a linear refinement of total width
/// 0.2 Gamma* around a detected peak.
inline ResponseCurve build_response_curve(const LaserParams& params, int r, double gamma_max,
                                          std::size_t grid_points, double gamma_min = 0.0)
{
  params.validate();
  detail::require(r >= 1 && r <= kMaxFactorialOrder, "moment order out of range");
  detail::require(std::isfinite(gamma_max) && gamma_max > 0.0, "gamma_max must be > 0");
  detail::require(grid_points >= 200, "response curve needs at least 200 grid points");
  if (gamma_min <= 0.0) {
    gamma_min = 5e-6 * gamma_max;
  }
  detail::require(gamma_min < gamma_max, "gamma_min must be below gamma_max");
  if (params.absorption_kappa == 0.0) {
    // C = Gamma at the first node; Gamma = 0 itself is still mu = 0
    detail::require(gamma_min > 0.0, "kappa = 0 needs a positive gamma_min");
  }

  ResponseCurve curve;
  curve.params = params;
  curve.moment_order_r = r;
  curve.gamma_grid.push_back(0.0);
  const auto logs = detail::log_grid(gamma_min, gamma_max, grid_points - 1);
  curve.gamma_grid.insert(curve.gamma_grid.end(), logs.begin(), logs.end());

  auto tabulate = [&](ResponseCurve& c) {
    c.mu_values.assign(c.gamma_grid.size(), 0.0);
    parallel_for(c.gamma_grid.size(), [&](std::size_t i) { c.mu_values[i] = c.evaluate(c.gamma_grid[i]); });
  };
  tabulate(curve);

  const PeakSearch first = find_peak(curve);
  if (first.peak) {
    std::vector<double> extra;
    for (const Peak& p : first.maxima) {
      const double lo = 0.9 * p.gamma_star;
      const double hi = 1.1 * p.gamma_star;
      constexpr int kRefine = 81;
      for (int k = 0; k < kRefine; ++k) {
        extra.push_back(lo + (hi - lo) * k / (kRefine - 1));
      }
      extra.push_back(p.gamma_star);
    }
    curve.gamma_grid.insert(curve.gamma_grid.end(), extra.begin(), extra.end());
    std::sort(curve.gamma_grid.begin(), curve.gamma_grid.end());
    curve.gamma_grid.erase(std::unique(curve.gamma_grid.begin(), curve.gamma_grid.end(),
                                       [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::abs(b); }),
                           curve.gamma_grid.end());
    tabulate(curve);
    // maxima now sit on grid nodes; keep the refined values
    curve.maxima = first.maxima;
    curve.peak = first.peak;
    curve.multiple_maxima = first.ambiguous;
  }

  curve.branches = detail::split_branches(curve.mu_values);
  curve.plateau_estimate = plateau_limit(params, r);
  curve.grid_supremum = *std::max_element(curve.mu_values.begin(), curve.mu_values.end());
  curve.mu_max = curve.peak ? curve.peak->mu_max : curve.plateau_estimate;
  return curve;
}

/// Solves mu_r(Gamma) = mu on one monotonic branch: binary search over the
/// branch nodes for a bracket, then TOMS 748 on the exact mu_r. The open-ended
/// branch is followed beyond the grid by doubling the bracket.
inline double invert_on_branch(const ResponseCurve& curve, std::size_t branch, double mu)
{
  if (branch >= curve.branches.size()) {
    throw std::out_of_range("branch index out of range");
  }
  const Branch& br = curve.branches[branch];
  const auto [lo_val, hi_val] = curve.branch_range(branch);
  if (!(mu >= lo_val && mu <= hi_val)) {
    throw std::out_of_range("mu outside the branch value range");
  }
  const auto& g = curve.gamma_grid;
  const auto& v = curve.mu_values;
  const double sign = br.direction == Direction::increasing ? 1.0 : -1.0;

  // exact node hits
  if (mu == v[br.first]) {
    return g[br.first];
  }
  if (mu == v[br.last]) {
    return g[br.last];
  }

  double a = 0.0;
  double b = 0.0;
  const bool beyond_grid = sign * (mu - v[br.last]) > 0.0;
  if (beyond_grid) {
    if (!br.open_ended || mu == curve.plateau_estimate) {
      throw std::out_of_range("mu outside the branch value range");
    }
    a = g[br.last];
    b = 2.0 * a;
    int doublings = 0;
    while (sign * (curve.evaluate(b) - mu) < 0.0) {
      a = b;
      b *= 2.0;
      if (++doublings > 200 || !std::isfinite(b)) {
        throw NumericalError("could not bracket mu beyond the tabulated grid");
      }
    }
  } else {
    std::size_t lo = br.first;
    std::size_t hi = br.last;
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (sign * (v[mid] - mu) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    a = g[lo];
    b = g[hi];
  }

  auto f = [&](double gamma) { return curve.evaluate(gamma) - mu; };
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) {
    return a;
  }
  if (fb == 0.0) {
    return b;
  }
  if (fa * fb > 0.0) {
    // grid values and the exact re-evaluation disagree at round-off level
    return std::abs(fa) < std::abs(fb) ? a : b;
  }
  auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-14 * std::max(std::abs(x), std::abs(y)); };
  std::uintmax_t iters = 200;
  const auto [x0, x1] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  const double root = 0.5 * (x0 + x1);
  const double residual = std::abs(f(root));
  const double scale = curve.mu_max > 0.0 ? curve.mu_max : 1.0;
  if (residual > 1e-9 * scale) {
    throw NumericalError("branch inversion residual exceeds tolerance");
  }
  return root;
}

} // namespace photocount
