#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracheat/holder_estimator.hpp"
#include "fracheat/spde_solver.hpp"

using namespace fracheat;
using namespace fracheat::estimator;

namespace {

constexpr double pi = std::numbers::pi;

MomentTable power_table(double c, double p, std::vector<double> lags) {
  MomentTable t;
  t.lags = lags;
  for (double h : lags) {
    t.moments.push_back(c * std::pow(h, p));
    t.stderrs.push_back(0.0);
  }
  return t;
}

solver::SolverConfig additive_config(std::size_t paths) {
  solver::SolverConfig c;
  c.grid = {4.0, 128, 1e-3, 0.2};
  c.zero_mode = noise::ZeroModeRule::compensated();
  c.path_count = paths;
  c.threads = 4;
  c.snapshot_times = {0.1};
  for (int j = 8; j <= 64; j *= 2) c.snapshot_times.push_back(0.1 + j * 1e-3);
  return c;
}

const std::vector<std::vector<FieldSnapshot>>& additive_paths() {
  static const auto paths = [] {
    solver::ModelSpec m;  // alpha 1.5, beta 0.5, sigma 1, phi 0
    return solver::simulate_ensemble(m, additive_config(1000));
  }();
  return paths;
}

}  // namespace

TEST(ReducePaths, JackknifeMatchesSampleStandardError) {
  const std::vector<double> v{1.0, 4.0, 2.5, -3.0, 0.25, 7.0};
  const auto e = reduce_paths(v);
  double m = 0, s = 0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s += (x - m) * (x - m);
  EXPECT_NEAR(e.mean, m, 1e-15);
  EXPECT_NEAR(e.std_error, std::sqrt(s / (v.size() - 1) / v.size()), 1e-14);
  EXPECT_THROW(reduce_paths(std::vector<double>{}), InputError);
}

TEST(SpatialStructure, CosineFieldClosedForm) {
  const GridSpec g{4.0, 256, 1e-3, 0.0};
  FieldSnapshot s{0.0, std::vector<double>(256)};
  for (std::size_t i = 0; i < 256; ++i) s.values[i] = std::cos(2 * pi * i * g.dx() / g.length);
  std::vector<double> lags{0.0};
  for (int m = 4; m <= 32; m += 4) lags.push_back(m * g.dx());
  const std::vector<FieldSnapshot> one{s};
  const auto t = spatial_structure(one, g, 2.0, lags);
  EXPECT_EQ(t.moments[0], 0.0);
  for (std::size_t i = 1; i < lags.size(); ++i)
    EXPECT_NEAR(t.moments[i], 2 * (1 - std::cos(2 * pi * lags[i] / g.length)) * 0.5, 1e-14);
  EXPECT_EQ(t.stderrs[1], 0.0);
}

TEST(SpatialStructure, RejectsBadInput) {
  const GridSpec g{4.0, 256, 1e-3, 0.0};
  FieldSnapshot s{0.0, std::vector<double>(256, 1.0)};
  const std::vector<FieldSnapshot> one{s};
  EXPECT_THROW(spatial_structure(std::span<const FieldSnapshot>{}, g, 2.0, {0.0}), InputError);
  EXPECT_THROW(spatial_structure(one, g, 2.0, {g.dx()}), InputError);          // below 4 dx
  EXPECT_THROW(spatial_structure(one, g, 2.0, {0.6}), InputError);             // above L/8
  EXPECT_THROW(spatial_structure(one, g, 2.0, {4.5 * g.dx()}), InputError);    // off grid
  EXPECT_THROW(spatial_structure(one, g, 2.0, {8 * g.dx(), 4 * g.dx()}), InputError);
}

TEST(TemporalStructure, DeterministicDecay) {
  solver::ModelSpec m;
  m.sigma = solver::SigmaSpec::zero();
  m.K = 0;
  m.phi = solver::PhiSpec::sinusoid(1.0, 2);
  auto cfg = additive_config(1);
  const auto paths = solver::simulate_ensemble(m, cfg);
  std::vector<double> deltas{0.0};
  for (int j = 8; j <= 64; j *= 2) deltas.push_back(j * 1e-3);
  const auto t = temporal_structure(paths, 0.1, 2.0, deltas, 0.1);
  const double lam = std::pow(2 * pi * 2 / 4.0, 1.5);
  EXPECT_EQ(t.moments[0], 0.0);
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    const double a = std::exp(-lam * 0.1) * std::expm1(-lam * deltas[i]);
    EXPECT_NEAR(t.moments[i] / (a * a * 0.5), 1.0, 1e-12);
  }
  EXPECT_THROW(temporal_structure(paths, 0.1, 2.0, {0.005}), InputError);      // no snapshot at 0.105
  EXPECT_THROW(temporal_structure(paths, 0.1, 2.0, {0.008}, 0.15), InputError); // before burn-in
  EXPECT_THROW(temporal_structure(std::span<const std::vector<FieldSnapshot>>{}, 0.1, 2.0, {0.008}),
               InputError);
}

TEST(SpatialStructure, AdditiveMatchesOracle) {
  const auto& paths = additive_paths();
  const auto cfg = additive_config(1000);
  solver::ModelSpec m;
  const double dx = cfg.grid.dx();
  std::vector<double> lags{4 * dx, 8 * dx, 12 * dx, 16 * dx};
  const auto mc = spatial_structure(paths, 0.1, cfg.grid, 2.0, lags, 4);
  const auto oracle = solver::gaussian_oracle_structure(m, cfg, 0.1, lags);
  for (std::size_t i = 0; i < lags.size(); ++i) {
    EXPECT_NEAR(mc.moments[i] / oracle.moments[i], 1.0, 0.05) << lags[i];
    if (i > 0) EXPECT_GE(mc.moments[i] + 2 * mc.stderrs[i], mc.moments[i - 1]);
  }
}

TEST(TemporalStructure, AdditiveMatchesOracle) {
  const auto& paths = additive_paths();
  const auto cfg = additive_config(1000);
  solver::ModelSpec m;
  std::vector<double> deltas;
  for (int j = 8; j <= 64; j *= 2) deltas.push_back(j * 1e-3);
  const auto mc = temporal_structure(paths, 0.1, 2.0, deltas, 0.1);
  const auto oracle = solver::gaussian_oracle_temporal(m, cfg, 0.1, deltas);
  for (std::size_t i = 0; i < deltas.size(); ++i)
    EXPECT_NEAR(mc.moments[i] / oracle.moments[i], 1.0, 0.05) << deltas[i];
}

TEST(SpatialStructure, JensenBetweenSecondAndFourthMoments) {
  const auto& paths = additive_paths();
  const auto cfg = additive_config(1000);
  const double dx = cfg.grid.dx();
  const std::vector<double> lags{4 * dx, 8 * dx, 16 * dx};
  const auto m2 = spatial_structure(paths, 0.1, cfg.grid, 2.0, lags);
  const auto m4 = spatial_structure(paths, 0.1, cfg.grid, 4.0, lags);
  for (std::size_t i = 0; i < lags.size(); ++i) {
    EXPECT_LE(m2.moments[i] * m2.moments[i], m4.moments[i] + 2 * m4.stderrs[i]);
    // Gaussian increments: E X^4 = 3 (E X^2)^2
    EXPECT_NEAR(m4.moments[i] / (3 * m2.moments[i] * m2.moments[i]), 1.0, 0.1);
  }
}

TEST(SpatialStructure, StandardErrorScalesWithPaths) {
  const auto& paths = additive_paths();
  const auto cfg = additive_config(1000);
  const std::vector<double> lags{8 * cfg.grid.dx()};
  const std::span<const std::vector<FieldSnapshot>> all(paths);
  const auto small = spatial_structure(all.first(250), 0.1, cfg.grid, 2.0, lags);
  const auto big = spatial_structure(all.first(1000), 0.1, cfg.grid, 2.0, lags);
  // four times the paths halves the standard error
  EXPECT_NEAR(small.stderrs[0] / big.stderrs[0], 2.0, 0.6);
}

TEST(SpatialStructure, ThreadCountDoesNotChangeBits) {
  const auto& paths = additive_paths();
  const auto cfg = additive_config(1000);
  const std::vector<double> lags{4 * cfg.grid.dx(), 8 * cfg.grid.dx()};
  const auto a = spatial_structure(paths, 0.1, cfg.grid, 2.0, lags, 1);
  const auto b = spatial_structure(paths, 0.1, cfg.grid, 2.0, lags, 7);
  EXPECT_EQ(a.moments, b.moments);
  EXPECT_EQ(a.stderrs, b.stderrs);
  auto c1 = additive_config(40);
  c1.threads = 1;
  auto c5 = c1;
  c5.threads = 5;
  solver::ModelSpec m;
  const auto p1 = solver::simulate_ensemble(m, c1);
  const auto p5 = solver::simulate_ensemble(m, c5);
  for (std::size_t p = 0; p < 40; ++p) EXPECT_EQ(p1[p].back().values, p5[p].back().values);
}

TEST(FitExponent, ExactPowerLaws) {
  const std::vector<double> lags{0.1, 0.2, 0.4, 0.8, 1.6};
  auto f = fit_exponent(power_table(1.0, 1.0, lags), {0.1, 1.6});
  EXPECT_NEAR(f.slope, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, 0.0, 1e-12);
  EXPECT_EQ(f.lags_used, 5u);
  f = fit_exponent(power_table(2.0, 0.5, lags), {0.1, 1.6});
  EXPECT_NEAR(f.slope, 0.5, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(2.0), 1e-12);
}

TEST(FitExponent, UsesOnlyTheWindow) {
  auto t = power_table(1.0, 1.0, {0.05, 0.1, 0.2, 0.4, 0.8, 1.6});
  t.moments[0] = 0.0;    // outside the window, ignored
  t.moments[5] = 100.0;  // outside the window, ignored
  const auto f = fit_exponent(t, {0.1, 0.8});
  EXPECT_NEAR(f.slope, 1.0, 1e-12);
  EXPECT_EQ(f.lags_used, 4u);
  t.moments[2] = 0.0;
  EXPECT_THROW(fit_exponent(t, {0.1, 0.8}), DegenerateDataError);
  EXPECT_THROW(fit_exponent(t, {0.4, 1.6}), DegenerateDataError);  // three lags
}

TEST(FitExponent, OracleTableSlope) {
  solver::ModelSpec m;
  solver::SolverConfig cfg;
  const double dx = cfg.grid.dx();
  std::vector<double> lags;
  for (int j = 8; j <= 64; j += 4) lags.push_back(j * dx);
  const auto f = fit_exponent(solver::gaussian_oracle_structure(m, cfg, 0.5, lags), {8 * dx, 64 * dx});
  EXPECT_NEAR(f.slope, 1.0, 0.05);
}

TEST(TheoremBounds, Substitution) {
  auto b = theorem_bounds(2.0, 0.5, 0.9);
  EXPECT_DOUBLE_EQ(b.c_sup, 0.5);
  EXPECT_DOUBLE_EQ(b.d_sup, 0.375);
  EXPECT_DOUBLE_EQ(b.b_sup, 0.5);
  EXPECT_TRUE(b.temporal_applicable);
  b = theorem_bounds(1.5, 0.5, 0.9);
  EXPECT_DOUBLE_EQ(b.c_sup, 0.25);
  EXPECT_NEAR(b.d_sup, 1.0 / 3.0, 1e-15);
  b = theorem_bounds(1.5, 0.9, 0.9);
  EXPECT_FALSE(b.temporal_applicable);
  EXPECT_TRUE(theorem_bounds(1.5, 0.75, 1.0).temporal_applicable);
  b = theorem_bounds(1.8, 0.2, 0.1);
  EXPECT_DOUBLE_EQ(b.c_sup, 0.1);
  EXPECT_NEAR(b.d_sup, 0.1 / 1.8, 1e-15);
  EXPECT_THROW(theorem_bounds(1.0, 0.5, 0.5), RangeError);
  EXPECT_THROW(theorem_bounds(2.1, 0.5, 0.5), RangeError);
  EXPECT_THROW(theorem_bounds(1.5, 1.0, 0.5), RangeError);
  EXPECT_THROW(theorem_bounds(1.5, 0.5, 0.0), RangeError);
}

TEST(ConsistencyReport, PassFailAndMismatch) {
  const auto b = theorem_bounds(1.5, 0.5, 0.9);
  ExponentFit fs{Axis::space, 2.0, 1.0, 0.0, 0.01, {0.03, 0.25}, 8};
  auto r = consistency_report(fs, b, 2.0);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.detail("target_slope"), 0.46, 1e-12);
  EXPECT_NEAR(r.detail("margin"), 1.02 - 0.46, 1e-12);
  ExponentFit ft{Axis::time, 2.0, 2.0 / 3.0, 0.0, 0.0, {0.008, 0.064}, 4};
  r = consistency_report(ft, b, 2.0, Axis::time);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.detail("target_slope"), 2 * (1.0 / 3.0 - 0.02), 1e-12);
  ft.slope = 0.5;
  r = consistency_report(ft, b, 2.0);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.detail("margin"), 0.0);
  EXPECT_EQ(r.violations, 1u);
  EXPECT_THROW(consistency_report(ft, b, 2.0, Axis::space), UsageError);
  EXPECT_THROW(consistency_report(ft, b, 4.0), UsageError);
  const auto out = theorem_bounds(1.5, 0.9, 0.9);
  ft.slope = 2.0 / 3.0;
  r = consistency_report(ft, out, 2.0);
  EXPECT_EQ(r.detail("applicable"), 0.0);
  EXPECT_FALSE(r.note.empty());
}
