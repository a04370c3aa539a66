#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>

#include "fracheat/lemma_verifier.hpp"

using namespace fracheat;
using namespace fracheat::verifier;

namespace {

constexpr double pi = std::numbers::pi;

double gauss(double t, double y) { return std::exp(-y * y / (4 * t)) / std::sqrt(4 * pi * t); }

// int |p_t(y - x) - p_t(y)| dy for alpha = 2, by quadrature split at x/2
double gaussian_shift_quadrature(double t, double x) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double y) { return gauss(t, y - x) - gauss(t, y); };
  const double lim = x + 40 * std::sqrt(t);
  return ts.integrate(f, x / 2, lim) - ts.integrate(f, -lim, x / 2);
}

}  // namespace

TEST(KernelBounds, CauchyRatioAtOrigin) {
  const auto r = check_kernel_bounds({1.0}, {10.0});
  ASSERT_TRUE(r.has_detail("ratio_at_zero_cauchy_t=10.000000"));
  EXPECT_NEAR(r.detail("ratio_at_zero_cauchy_t=10.000000"), 1 / pi, 1e-9);
  EXPECT_TRUE(r.pass);
}

TEST(KernelBounds, SelfSimilarAcrossTimeDecades) {
  const auto r = check_kernel_bounds({1.5, 2.0}, {0.01, 0.1, 1.0, 10.0});
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.stability_ratio, 1.01);
  EXPECT_LE(r.detail("collapse_alpha=1.5"), 0.01);
  EXPECT_GT(r.detail("c1_alpha=1.5"), 0.0);
  EXPECT_LT(r.detail("c2_alpha=1.5"), 10.0);
  // Gaussian: bounded sweep, ratio decays with |x|/sqrt(t) but stays positive
  EXPECT_GT(r.detail("c1_alpha=2"), 0.0);
  EXPECT_LT(r.detail("c1_alpha=2"), 1e-6);
  const auto g = check_gradient_bounds({1.5}, {0.1, 1.0, 10.0});
  EXPECT_TRUE(g.pass);
  EXPECT_TRUE(std::isfinite(g.fitted_constant));
}

TEST(SpaceModulus, GaussianRowsAndCap) {
  for (double t : {0.01, 1.0})
    for (double x : {0.05, 0.5, 3.0})
      EXPECT_NEAR(kernel::l1_space_modulus(2.0, t, x), gaussian_shift_quadrature(t, x), 1e-6);
  const auto r = check_space_modulus({1.5, 2.0}, {0.01, 0.1, 1.0, 10.0}, {0.0, 1e-3, 0.1, 10.0, 100.0});
  EXPECT_TRUE(r.pass) << r.stability_ratio;
  EXPECT_EQ(r.detail("cap_violations"), 0.0);
  EXPECT_LT(r.detail("gaussian_max_abs_err"), 1e-6);
  // saturated rows: ratio is the value itself, at most 2
  EXPECT_LE(r.fitted_constant, 2.0 + 1e-9);
  EXPECT_GT(r.fitted_constant, 1.9);
}

TEST(TimeModulus, FitsAndBothReadings) {
  const auto r = check_time_modulus({1.5, 2.0}, {0.01, 1.0, 10.0}, {0.0, 1e-2, 1.0, 100.0});
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.stability_ratio, 3.0);
  EXPECT_LT(r.detail("gaussian_max_abs_err"), 1e-6);
  EXPECT_LE(r.fitted_constant, 2.0);
  // eps >> t: modulus above 1, so the (C log) ^ 1 reading is violated
  EXPECT_GT(r.detail("min_inside_reading_violations"), 0.0);
}

TEST(Smoothing, StableConstantsAndTrivialRows) {
  const auto r = check_smoothing(1.5, {1e-5, 1e-4, 1e-3, 1e-2}, {0.5});
  EXPECT_TRUE(r.pass) << r.stability_ratio;
  EXPECT_EQ(r.detail("trivial_rows"), 0.0);
  EXPECT_LE(r.detail("C_space_rho=0.5"), 1.0);
  EXPECT_GT(r.detail("C_time_rho=0.5"), 0.0);
}

TEST(RieszSup, ValueSlopeAndDoubling) {
  EXPECT_NEAR(kernel::riesz_smoothed_at_zero(2.0, 0.5, 1.0), 1.4464, 1e-4);
  EXPECT_NEAR(kernel::riesz_smoothed_at_zero(1.5, 0.5, 2.0) / kernel::riesz_smoothed_at_zero(1.5, 0.5, 1.0),
              std::pow(2.0, -0.5 / 1.5), 1e-10);
  const auto r = check_riesz_sup({1.2, 1.5, 2.0}, {0.2, 0.5, 0.8}, {0.1, 1.0, 10.0});
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.detail("max_slope_err"), 1e-3);
  EXPECT_LT(r.detail("max_rel_err_closed_form"), 1e-6);
}

TEST(GammaIdentity, ValueDoublingAndStressCell) {
  const auto c = kernel::weighted_transform_energy(2.0, 0.5, 1.0);
  EXPECT_NEAR(c.quadrature, 1.2163, 1e-4);
  EXPECT_NEAR(c.closed_form, 1.2163, 1e-4);
  const auto c2 = kernel::weighted_transform_energy(2.0, 0.5, 2.0);
  EXPECT_NEAR(c2.quadrature / c.quadrature, std::pow(2.0, -0.25), 1e-9);
  const auto r = check_gamma_identity({1.2, 1.5, 1.8, 2.0}, {0.2, 0.5, 0.8, 0.99}, {0.1, 1.0, 10.0});
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_LT(r.detail("max_rel_err"), 1e-6);
}

TEST(LogInequality, GridAndSharpnessProbe) {
  EXPECT_LE(std::log(2.0), 1.0);
  const auto r = check_log_inequality(logspace(1e-6, 1e3, 10000), linspace(0.5, 1.0, 101));
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_LE(r.fitted_constant, 1.0);
  // threshold from the tangency condition: log(1+mu) = mu^r and
  // 1/(1+mu) = r mu^{r-1}, i.e. r = mu / ((1+mu) log(1+mu))
  auto r_of = [](double mu) { return mu / ((1 + mu) * std::log1p(mu)); };
  auto g = [&](double mu) { return std::log(std::log1p(mu)) - r_of(mu) * std::log(mu); };
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::bisect(g, 1.0, 100.0, tol, iters);
  const double r_star = r_of(0.5 * (a + b));
  EXPECT_NEAR(r.detail("probe_threshold_r"), r_star, 1e-4);
  EXPECT_NEAR(r_star, 0.37983, 1e-4);
  EXPECT_NEAR(r.detail("probe_first_violating_r"), 0.35, 1e-12);
  const double mu = r.detail("probe_violating_mu");
  EXPECT_GT(std::log1p(mu), std::pow(mu, 0.35));
  EXPECT_LT(r.detail("probe_sup_ratio_r=0.4"), 1.0);
  EXPECT_THROW(check_log_inequality({1.0}, {0.4}), InputError);
}

TEST(Summary, OneLinePerCheck) {
  CheckReport a, b;
  a.check_name = "first";
  a.pass = true;
  b.check_name = "second";
  const auto s = summary_table({a, b});
  EXPECT_NE(s.find("first"), std::string::npos);
  EXPECT_NE(s.find("PASS"), std::string::npos);
  EXPECT_NE(s.find("FAIL"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
