// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance and
// runtime budget is fixed here; the exit status is nonzero if any criterion
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "photocount/app.hpp"

using namespace photocount;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what)
  {
    pass = pass && ok;
    detail << (ok ? "" : "!") << what << "; ";
  }
};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double default_gamma_max(const LaserParams& p, const ModeEnsemble& e)
{
  return std::max(20.0 * e.mean_gamma, 4.0 * std::max(p.gain_A, p.absorption_kappa));
}

struct Preset
{
  std::string name;
  LaserParams laser;
  ModeEnsemble ensemble;
};

std::vector<Preset> presets()
{
  std::vector<Preset> out;
  for (const auto& name : app::preset_names()) {
    const auto c = app::preset(name);
    out.push_back({name, c.laser, c.ensemble});
  }
  return out;
}

CountDensity deterministic(const LaserParams& p, const ModeEnsemble& e, int r = 1)
{
  return density_deterministic(build_response_curve(p, r, default_gamma_max(p, e), 400), e);
}

double integrate_pdf(const ModeEnsemble& e)
{
  boost::math::quadrature::tanh_sinh<double> quad;
  return quad.integrate([&](double g) { return gamma_pdf(e, g); }, 0.0, 50.0 * e.mean_gamma, 1e-14);
}

Outcome criterion_1()
{
  Outcome o;
  double worst_pn = 0.0;
  for (const auto& p : presets()) {
    for (double g : {p.ensemble.mean_gamma, 0.5 * p.ensemble.mean_gamma, 5.0 * p.ensemble.mean_gamma}) {
      const auto dist = compute_photon_distribution(p.laser, g + p.laser.absorption_kappa);
      double sum = 0.0;
      for (double v : dist.probabilities()) {
        sum += v;
      }
      worst_pn = std::max(worst_pn, std::abs(sum - 1.0));
    }
  }
  o.require(worst_pn <= 1e-10, "max|sum P_n - 1| = " + fmt(worst_pn) + " <= 1e-10");

  double worst_pg = 0.0;
  for (const auto& p : presets()) {
    worst_pg = std::max(worst_pg, std::abs(integrate_pdf(p.ensemble) - 1.0));
  }
  for (int nu : {1, 2, 4, 100}) {
    const ModeEnsemble e = nu % 2 ? ModeEnsemble{1, nu, 1.0} : ModeEnsemble{2, nu / 2, 1.0};
    worst_pg = std::max(worst_pg, std::abs(integrate_pdf(e) - 1.0));
  }
  o.require(worst_pg <= 1e-8, "max|int P(Gamma) - 1| = " + fmt(worst_pg) + " <= 1e-8");
  return o;
}

Outcome criterion_2()
{
  Outcome o;
  const auto p = app::preset("fig2a-solid");
  for (int r : {1, 2}) {
    const auto d = deterministic(p.laser, p.ensemble, r);
    const double target = r == 1 ? -0.5 : -0.75;
    const double e = fit_power_law(d, {1e-4 * d.mu_max, 1e-2 * d.mu_max}).exponent;
    o.require(std::abs(e - target) <= 0.05, "r=" + std::to_string(r) + " exponent " + fmt(e) + " vs " + fmt(target) + " +- 0.05");
  }
  return o;
}

Outcome criterion_3()
{
  Outcome o;
  for (const auto& p : presets()) {
    const auto d = deterministic(p.laser, p.ensemble);
    if (p.name == "fig2a-solid") {
      const double e = fit_singularity_at_max(d, d.mu_max).exponent;
      o.require(std::abs(e + 0.5) <= 0.07, p.name + " exponent " + fmt(e) + " vs -0.5 +- 0.07");
    } else if (p.name.rfind("fig2b", 0) == 0) {
      o.require(!d.diverges_at_max() && app::decreases_toward_max(d),
                p.name + " non-divergent and decreasing toward mu_max");
    }
  }
  return o;
}

Outcome criterion_4()
{
  Outcome o;
  int agree = 0;
  for (double a : {0.9, 1.0, 1.5}) {
    for (double kappa : {0.7, 1.1, 2.0}) {
      const LaserParams p{a, 0.005, kappa, 1.0};
      const ModeEnsemble e{1, 1, 0.2};
      const bool peak = has_peak_near_max(deterministic(p, e), 0.02);
      const bool expected = a > kappa;
      agree += peak == expected;
      if (peak != expected) {
        o.require(false, "A=" + fmt(a) + " kappa=" + fmt(kappa) + " peak=" + (peak ? "yes" : "no"));
      }
    }
  }
  o.require(agree == 9, std::to_string(agree) + "/9 grid points match A > kappa");
  return o;
}

Outcome criterion_5()
{
  Outcome o;
  for (double kappa : {0.5, 0.7, 0.9}) {
    const LaserParams p{1.0, 0.005, kappa, 1.0};
    const auto curve = build_response_curve(p, 1, 4.0, 400);
    if (!curve.peak) {
      o.require(false, "kappa=" + fmt(kappa) + " no peak");
      continue;
    }
    const double analytic = gamma_star_analytic(1.0, kappa);
    const double rel = std::abs(curve.peak->gamma_star - analytic) / analytic;
    o.require(rel <= 0.10, "kappa=" + fmt(kappa) + " Gamma* " + fmt(curve.peak->gamma_star) + " vs " + fmt(analytic) +
                               " rel " + fmt(rel) + " <= 0.10");
  }
  return o;
}

Outcome criterion_6()
{
  Outcome o;
  for (const auto& p : presets()) {
    const double g = p.ensemble.mean_gamma;
    const double c = g + p.laser.absorption_kappa;
    if (std::abs(p.laser.gain_A - c) < 0.2 * p.laser.gain_A) {
      o.detail << p.name << " skipped (|A-C| = " << fmt(std::abs(p.laser.gain_A - c)) << "); ";
      continue;
    }
    const double exact = short_time_moment(p.laser, g, 1);
    const double rel = std::abs(asymptotic_mu1(p.laser, g) - exact) / exact;
    o.require(rel <= 0.05, p.name + " rel " + fmt(rel) + " <= 0.05");
  }
  for (double kappa : {0.7, 2.0}) {
    const LaserParams p{1.0, 0.005, kappa, 1.0};
    const double g = 100.0 * std::max(p.gain_A, kappa);
    const double ratio = short_time_moment(p, g, 1) * (g + kappa - p.gain_A) / (g * p.gain_A * p.counting_time_t);
    o.require(std::abs(ratio - 1.0) <= 0.02, "plateau kappa=" + fmt(kappa) + " ratio " + fmt(ratio) + " within 0.02");
  }
  return o;
}

Outcome criterion_7()
{
  Outcome o;
  std::uint64_t stream = 0;
  for (const auto& p : presets()) {
    const auto curve = build_response_curve(p.laser, 1, default_gamma_max(p.laser, p.ensemble), 400);
    const auto det = density_deterministic(curve, p.ensemble);
    const auto mc = density_monte_carlo(p.laser, p.ensemble, 1, {20011, stream++}, 1'000'000, 400, curve);
    const double tv = compare_densities(det, mc).total_variation;
    o.require(tv < 0.02, p.name + " TV " + fmt(tv) + " < 0.02");
  }
  return o;
}

Outcome criterion_8()
{
  Outcome o;
  const ModeEnsemble e{2, 50, 1.0};
  const auto s = sample_gamma(e, {20011, 0}, 1'000'000);
  double mean = 0.0;
  for (double g : s) {
    mean += g;
  }
  mean /= static_cast<double>(s.size());
  double m2 = 0.0;
  double m3 = 0.0;
  for (double g : s) {
    m2 += (g - mean) * (g - mean);
    m3 += (g - mean) * (g - mean) * (g - mean);
  }
  m2 /= static_cast<double>(s.size());
  m3 /= static_cast<double>(s.size());
  const double sd = std::sqrt(m2);
  const double skew = m3 / (sd * sd * sd);
  const double sd_target = 1.0 / std::sqrt(50.0);
  o.require(std::abs(mean - 1.0) <= 0.005, "mean " + fmt(mean) + " within 0.5%");
  o.require(std::abs(sd - sd_target) <= 0.03 * sd_target, "std " + fmt(sd) + " vs " + fmt(sd_target) + " within 3%");
  o.require(std::abs(skew) < 0.35, "|skewness| " + fmt(std::abs(skew)) + " < 0.35");
  return o;
}

Outcome criterion_9()
{
  Outcome o;
  const LaserParams p{1.0, 0.005, 0.0, 1.0};
  for (double c : {2.0, 0.1}) {
    const double fano = fano_factor(compute_photon_distribution(p, c));
    const double target = c > 1.0 ? c / (c - 1.0) : 1.0 / (1.0 - c);
    const double rel = std::abs(fano - target) / target;
    o.require(rel <= 0.02, "C=" + fmt(c) + " Fano " + fmt(fano) + " vs " + fmt(target) + " rel " + fmt(rel) + " <= 0.02");
  }
  return o;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion_10()
{
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "photocount_acceptance";
  fs::remove_all(root);
  std::vector<std::vector<fs::path>> runs;
  for (const char* run : {"run1", "run2"}) {
    app::ExperimentConfig c;
    c.seed = 20011;
    c.output_dir = root / run;
    const auto r = app::cmd_fig2(c);
    std::vector<fs::path> files;
    for (const auto& f : fs::recursive_directory_iterator(c.output_dir)) {
      if (f.is_regular_file()) {
        files.push_back(fs::relative(f.path(), c.output_dir));
      }
    }
    std::sort(files.begin(), files.end());
    runs.push_back(files);
  }
  o.require(runs[0] == runs[1] && !runs[0].empty(), std::to_string(runs[0].size()) + " files in both runs");
  std::size_t differing = 0;
  for (const auto& f : runs[0]) {
    differing += slurp(root / "run1" / f) != slurp(root / "run2" / f);
  }
  o.require(differing == 0, std::to_string(differing) + " files differ");
  fs::remove_all(root);
  return o;
}

} // namespace

int main()
{
  struct Criterion
  {
    int id;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "normalization", 10, criterion_1},
      {2, "small-count power law", 60, criterion_2},
      {3, "singularity at mu_max", 60, criterion_3},
      {4, "threshold structure", 300, criterion_4},
      {5, "Gamma* estimate", 30, criterion_5},
      {6, "far-from-threshold mean photocount", 30, criterion_6},
      {7, "deterministic vs Monte Carlo density", 300, criterion_7},
      {8, "Gaussian limit", 30, criterion_8},
      {9, "thermal/Poisson crossover", 10, criterion_9},
      {10, "reproducibility", 600, criterion_10},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(seconds < c.budget_seconds, "runtime " + fmt(seconds) + " s < " + fmt(c.budget_seconds) + " s");
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
