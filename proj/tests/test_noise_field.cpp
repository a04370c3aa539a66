#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <thread>

#include "fracheat/noise_field.hpp"

using namespace fracheat;
using namespace fracheat::noise;

namespace {

constexpr double pi = std::numbers::pi;

// Parseval against the self-dual Gaussian e^{-pi x^2}, using F|x|^{-b} = c_b |xi|^{b-1}:
// int |x|^{-b} e^{-pi x^2} dx = c_b int |xi|^{b-1} e^{-pi xi^2} dxi.
double riesz_constant_oracle(double b) {
  return std::pow(pi, b - 0.5) * std::tgamma((1 - b) / 2) / std::tgamma(b / 2);
}

double half_line_gaussian_moment(double p) {
  auto f = [p](double x) { return std::pow(x, p) * std::exp(-pi * x * x); };
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  return 2 * (ts.integrate(f, 0.0, 1.0) + es.integrate(f, 1.0, std::numeric_limits<double>::infinity()));
}

NoiseSpec criterion_spec(ZeroModeRule zm) {
  NoiseSpec s;
  s.beta = 0.5;
  s.grid = {32.0, 1024, 0.0, 0.0};
  s.dt = 0.01;
  s.seed_base = 20240611;
  s.zero_mode = zm;
  return s;
}

}  // namespace

TEST(RieszConstant, HalfIsOne) {
  EXPECT_NEAR(riesz_constant(0.5), 1.0, 1e-12);
  EXPECT_NEAR(riesz_constant_oracle(0.5), 1.0, 1e-15);
}

TEST(RieszConstant, PointThree) {
  EXPECT_NEAR(riesz_constant(0.3), 0.3256, 1e-4);
  EXPECT_NEAR(riesz_constant(0.3), riesz_constant_oracle(0.3), 1e-13);
  // the transform pair numerically: moments of the Gaussian on both sides
  const double lhs = half_line_gaussian_moment(-0.3);
  const double rhs = riesz_constant(0.3) * half_line_gaussian_moment(-0.7);
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-9);
}

TEST(RieszConstant, RejectsOutOfRange) {
  EXPECT_THROW(riesz_constant(0.0), ParameterError);
  EXPECT_THROW(riesz_constant(1.0), ParameterError);
}

TEST(RieszKernel, ValuesAndHomogeneity) {
  EXPECT_NEAR(riesz_kernel_value(0.5, 1.0), 1.0, 1e-12);
  EXPECT_NEAR(riesz_kernel_value(0.3, 0.5), riesz_constant_oracle(0.7) * std::pow(0.5, -0.3), 1e-12);
  for (double b : {0.1, 0.5, 0.9})
    for (double x : {0.01, 0.3, 7.0}) {
      EXPECT_NEAR(riesz_kernel_value(b, 2 * x) / riesz_kernel_value(b, x), std::pow(2.0, -b), 1e-13);
      EXPECT_EQ(riesz_kernel_value(b, -x), riesz_kernel_value(b, x));
    }
  EXPECT_THROW(riesz_kernel_value(0.5, 0.0), SingularityError);
}

TEST(SpectralWeights, EvenPowerLawAndNonnegative) {
  NoiseSpec s = criterion_spec(ZeroModeRule::drop());
  const auto w = spectral_weights(s);
  const std::size_t n = w.size();
  for (std::size_t j = 1; j < n; ++j) ASSERT_EQ(w[j], w[n - j]);
  for (double v : w) ASSERT_GE(v, 0.0);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_NEAR(w[20] / w[10], std::pow(2.0, -0.5), 1e-14);
  s.zero_mode = ZeroModeRule::finite(3.5);
  EXPECT_EQ(spectral_weights(s)[0], 3.5);
  s.zero_mode = ZeroModeRule::compensated();
  EXPECT_NEAR(spectral_weights(s)[0], -2 * (-1.4603545088095868) * std::sqrt(32.0), 1e-12);
  s.zero_mode = ZeroModeRule::finite(-1.0);
  EXPECT_THROW(spectral_weights(s), ParameterError);
}

TEST(SpectralWeights, WhiteLimitIsFlat) {
  NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  s.beta = 1.0;
  for (double v : spectral_weights(s)) ASSERT_EQ(v, 1.0);
  EXPECT_THROW(s.validate(), ParameterError);
}

TEST(SpectralCovariance, ReproducesRieszKernel) {
  const NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  const auto c = spectral_covariance(s);
  const double dx = s.grid.dx();
  for (std::size_t m = 4; m * dx <= s.grid.length / 8; ++m) {
    const double target = s.dt * riesz_kernel_value(s.beta, m * dx);
    ASSERT_NEAR(c[m] / target, 1.0, 0.02) << m * dx;
  }
  // direct cosine sum as an oracle for the transform
  const auto w = spectral_weights(s);
  for (std::size_t m : {0u, 8u, 64u, 300u}) {
    double acc = 0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * std::cos(2 * pi * j * m / w.size());
    EXPECT_NEAR(c[m], s.dt / s.grid.length * acc, 1e-12);
  }
}

TEST(SpectralCovariance, DroppedZeroModeShiftsByConstant) {
  const auto cd = spectral_covariance(criterion_spec(ZeroModeRule::drop()));
  const auto cc = spectral_covariance(criterion_spec(ZeroModeRule::compensated()));
  const double shift = 0.01 / 32.0 * zero_mode_weight(criterion_spec(ZeroModeRule::compensated()));
  for (std::size_t m = 0; m < cd.size(); m += 37) EXPECT_NEAR(cc[m] - cd[m], shift, 1e-14);
  // drop conserves the spatial mean: sum of the field is exactly the zero mode
  const auto inc = sample_increment(criterion_spec(ZeroModeRule::drop()), 3, 4);
  EXPECT_NEAR(pairwise_sum(inc.values), 0.0, 1e-12);
}

TEST(SampleIncrement, DeterministicPerCoordinates) {
  const NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  const auto a = sample_increment(s, 5, 17);
  const auto b = sample_increment(s, 5, 17);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.stream_id, 5u);
  EXPECT_EQ(a.step_index, 17u);
  EXPECT_NE(a.values, sample_increment(s, 5, 18).values);
  EXPECT_NE(a.values, sample_increment(s, 6, 17).values);
  NoiseSpec s2 = s;
  s2.seed_base += 1;
  EXPECT_NE(a.values, sample_increment(s2, 5, 17).values);
}

TEST(SampleIncrement, ConcurrentGenerationMatchesSequential) {
  const NoiseSpec s = criterion_spec(ZeroModeRule::drop());
  std::vector<std::vector<double>> seq, par(8);
  for (std::uint64_t k = 0; k < 8; ++k) seq.push_back(sample_increment(s, k, 2 * k).values);
  std::vector<std::thread> th;
  for (std::uint64_t k = 0; k < 8; ++k)
    th.emplace_back([&, k] { par[k] = sample_increment(s, k, 2 * k).values; });
  for (auto& t : th) t.join();
  EXPECT_EQ(seq, par);
}

TEST(SampleIncrement, MeanIsZero) {
  const NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  IncrementSampler sampler(s);
  const double var = spectral_covariance(s)[0];
  std::vector<double> x;
  for (std::uint64_t d = 0; d < 10000; ++d) x.push_back(sampler.sample(1, d).values[123]);
  const double mean = pairwise_sum(x) / x.size();
  EXPECT_LT(std::abs(mean), 4 * std::sqrt(var / x.size()));
}

class CovarianceSample : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    const NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
    IncrementSampler sampler(s);
    draws_ = new std::vector<NoiseIncrement>;
    for (std::uint64_t d = 0; d < 10000; ++d) draws_->push_back(sampler.sample(0, d));
  }
  static void TearDownTestSuite() { delete draws_; }
  static std::vector<NoiseIncrement>* draws_;
};
std::vector<NoiseIncrement>* CovarianceSample::draws_ = nullptr;

TEST_F(CovarianceSample, MatchesRieszKernelWithinFivePercent) {
  const NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  for (double lag : {0.25, 0.5, 1.0, 2.0}) {
    const auto e = empirical_covariance(*draws_, s.grid, lag);
    EXPECT_NEAR(e.estimate / (s.dt * riesz_kernel_value(0.5, lag)), 1.0, 0.05) << lag;
  }
}

TEST_F(CovarianceSample, SymmetricLagAndLogSlope) {
  const NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  EXPECT_EQ(empirical_covariance(*draws_, 16).estimate, empirical_covariance(*draws_, -16).estimate);
  std::vector<double> lx, ly;
  for (long m = 4; m <= 40; m += 4) {
    lx.push_back(std::log(m * s.grid.dx()));
    ly.push_back(std::log(empirical_covariance(*draws_, m).estimate));
  }
  EXPECT_NEAR(least_squares(lx, ly).slope, -0.5, 0.05);
}

TEST_F(CovarianceSample, StationaryInBasePosition) {
  const std::size_t m = 16;
  auto at = [&](std::size_t i) {
    std::vector<double> v;
    for (const auto& d : *draws_) v.push_back(d.values[i] * d.values[(i + m) % 1024]);
    const double mean = pairwise_sum(v) / v.size();
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / (v.size() - 1) / v.size())};
  };
  const auto [a, sa] = at(0);
  const auto [b, sb] = at(517);
  EXPECT_LT(std::abs(a - b), 4 * std::hypot(sa, sb));
}

TEST_F(CovarianceSample, StreamsAreUncorrelated) {
  const NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  IncrementSampler sampler(s);
  std::vector<double> v;
  for (std::uint64_t d = 0; d < 2000; ++d) v.push_back(sampler.sample(1, d).values[7] * (*draws_)[d].values[7]);
  const double mean = pairwise_sum(v) / v.size();
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  EXPECT_LT(std::abs(mean), 4 * std::sqrt(ss / (v.size() - 1) / v.size()));
}

TEST(EmpiricalCovariance, WhiteLimitLagZero) {
  NoiseSpec s = criterion_spec(ZeroModeRule::compensated());
  s.beta = 1.0;
  s.grid = {8.0, 256, 0.0, 0.0};
  IncrementSampler sampler(s);
  std::vector<NoiseIncrement> d;
  for (std::uint64_t k = 0; k < 4000; ++k) d.push_back(sampler.sample(0, k));
  const double flat = s.dt / s.grid.length * 256;  // (dt/L) * sum of unit weights
  const auto e = empirical_covariance(d, 0);
  EXPECT_NEAR(e.estimate, flat, 4 * e.std_error);
  EXPECT_NEAR(empirical_covariance(d, 3).estimate, 0.0, 4 * empirical_covariance(d, 3).std_error);
}

TEST(EmpiricalCovariance, Errors) {
  std::vector<NoiseIncrement> none;
  EXPECT_THROW(empirical_covariance(none, 1), InputError);
  const NoiseSpec s = criterion_spec(ZeroModeRule::drop());
  std::vector<NoiseIncrement> one{sample_increment(s, 0, 0)};
  EXPECT_THROW(empirical_covariance(one, s.grid, 0.3 * s.grid.dx()), InputError);
  EXPECT_NO_THROW(empirical_covariance(one, s.grid, 3 * s.grid.dx()));
}
