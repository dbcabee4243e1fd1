#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "photocount/mode_ensemble.hpp"

using namespace photocount;

namespace {

ModeEnsemble with_nu(int nu, double mean = 1.0)
{
  return nu % 2 == 0 && nu > 1 ? ModeEnsemble{2, nu / 2, mean} : ModeEnsemble{1, nu, mean};
}

double integrate(const ModeEnsemble& e, auto&& weight)
{
  boost::math::quadrature::tanh_sinh<double> quad;
  return quad.integrate([&](double g) { return weight(g) * gamma_pdf(e, g); }, 0.0, 50.0 * e.mean_gamma, 1e-14);
}

struct Moments
{
  double mean, var, skew;
};

Moments moments(const std::vector<double>& x)
{
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : x) {
    m2 += (v - mean) * (v - mean);
    m3 += (v - mean) * (v - mean) * (v - mean);
  }
  m2 /= n;
  m3 /= n;
  return {mean, m2, m3 / std::pow(m2, 1.5)};
}

} // namespace

TEST(GammaPdf, NormalizedWithUnitMean)
{
  for (int nu : {1, 2, 3, 4, 8, 100}) {
    const auto e = with_nu(nu, 0.37);
    EXPECT_NEAR(integrate(e, [](double) { return 1.0; }), 1.0, 1e-8) << "nu=" << nu;
    EXPECT_NEAR(integrate(e, [](double g) { return g; }), 0.37, 1e-6 * 0.37) << "nu=" << nu;
  }
}

TEST(GammaPdf, PorterThomasDivergence)
{
  const ModeEnsemble pt{1, 1, 1.0};
  // Gamma^{-1/2} at small Gamma: halving Gamma multiplies the density by sqrt(2)
  const double ratio = gamma_pdf(pt, 1e-8) / gamma_pdf(pt, 2e-8);
  EXPECT_NEAR(ratio, std::sqrt(2.0), 1e-6);
  EXPECT_TRUE(std::isinf(gamma_pdf(pt, 0.0)));
  EXPECT_THROW(gamma_pdf(pt, -1.0), std::invalid_argument);
}

TEST(GammaPdf, CdfMatchesQuadrature)
{
  for (int nu : {1, 2, 4}) {
    const auto e = with_nu(nu);
    boost::math::quadrature::tanh_sinh<double> quad;
    for (double g : {0.01, 0.3, 1.0, 2.5}) {
      const double ref = quad.integrate([&](double x) { return gamma_pdf(e, x); }, 0.0, g, 1e-14);
      EXPECT_NEAR(gamma_cdf(e, g), ref, 1e-10);
    }
  }
}

TEST(ModeEnsemble, Validation)
{
  EXPECT_THROW((ModeEnsemble{3, 1, 1.0}).validate(), std::invalid_argument);
  EXPECT_THROW((ModeEnsemble{1, 0, 1.0}).validate(), std::invalid_argument);
  EXPECT_THROW((ModeEnsemble{1, 1, 0.0}).validate(), std::invalid_argument);
}

TEST(SampleGamma, Deterministic)
{
  const ModeEnsemble e{1, 3, 0.5};
  const auto a = sample_gamma(e, {123, 4}, 1000);
  const auto b = sample_gamma(e, {123, 4}, 1000);
  EXPECT_EQ(a, b);
  const auto c = sample_gamma(e, {123, 5}, 1000);
  EXPECT_NE(a, c);
  EXPECT_THROW(sample_gamma(e, {1, 0}, 0), std::invalid_argument);
}

TEST(SampleGamma, MeanAndVariance)
{
  constexpr std::size_t kN = 1'000'000;
  for (int nu : {1, 2, 4, 40, 100}) {
    const auto e = with_nu(nu, 0.8);
    const auto s = sample_gamma(e, {99, static_cast<std::uint64_t>(nu)}, kN);
    const auto m = moments(s);
    const double var = 0.8 * 0.8 * 2.0 / nu;
    EXPECT_NEAR(m.mean, 0.8, 3.0 * std::sqrt(var / kN)) << "nu=" << nu;
    // variance of the sample variance for chi^2: sigma^4 (2 + 12/nu) / N
    EXPECT_NEAR(m.var, var, 5.0 * var * std::sqrt((2.0 + 12.0 / nu) / kN)) << "nu=" << nu;
  }
}

TEST(SampleGamma, PorterThomasSmallFraction)
{
  constexpr std::size_t kN = 1'000'000;
  const ModeEnsemble e{1, 1, 1.0};
  const auto s = sample_gamma(e, {5, 0}, kN);
  const double frac = static_cast<double>(std::count_if(s.begin(), s.end(), [](double g) { return g < 0.01; })) / kN;
  const double expected = 0.07965567455405799; // chi^2_1 CDF at 0.01
  EXPECT_NEAR(gamma_cdf(e, 0.01), expected, 1e-12);
  EXPECT_NEAR(frac, expected, 3.0 * std::sqrt(expected * (1.0 - expected) / kN));
}

TEST(SampleGamma, KolmogorovSmirnovAgainstCdf)
{
  constexpr std::size_t kN = 1'000'000;
  for (int nu : {1, 2, 4}) {
    const auto e = with_nu(nu);
    auto s = sample_gamma(e, {2024, static_cast<std::uint64_t>(nu)}, kN);
    std::sort(s.begin(), s.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < kN; ++i) {
      const double f = gamma_cdf(e, s[i]);
      ks = std::max({ks, std::abs(f - static_cast<double>(i) / kN), std::abs(f - static_cast<double>(i + 1) / kN)});
    }
    EXPECT_LT(ks, 0.002) << "nu=" << nu;
  }
}

TEST(SampleGamma, ManyChannelsNearlyGaussian)
{
  constexpr std::size_t kN = 1'000'000;
  const ModeEnsemble e{2, 50, 1.0};
  const auto m = moments(sample_gamma(e, {11, 0}, kN));
  EXPECT_LT(std::abs(m.skew), 0.35);
  // chi^2 skewness sqrt(8/nu) = 0.283
  EXPECT_NEAR(m.skew, std::sqrt(0.08), 0.02);
}

TEST(GaussianLimit, StandardDeviation)
{
  EXPECT_DOUBLE_EQ(gaussian_limit_stats({2, 2, 3.0}).second, 3.0 / std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(gaussian_limit_stats({1, 1, 3.0}).second, 3.0 * std::sqrt(2.0));
  for (int m : {1, 5, 50, 500}) {
    const auto [mean, sd] = gaussian_limit_stats({1, m, 2.0});
    EXPECT_DOUBLE_EQ(mean, 2.0);
    EXPECT_NEAR(sd / mean, std::sqrt(2.0 / m), 1e-15);
  }
}
