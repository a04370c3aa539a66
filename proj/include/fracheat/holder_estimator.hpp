#pragma once

// Moment-scaling estimates from path ensembles and the exponent targets
// they are compared with.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "fracheat/check_report.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/grid.hpp"
#include "fracheat/moment_table.hpp"
#include "fracheat/numeric.hpp"
#include "fracheat/parallel.hpp"

namespace fracheat::estimator {

/// Allowed spatial lags: 0, or a grid multiple in [4 dx, L/8].
struct LagWindow {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double h) const {
    const double slack = 1e-9 * std::max(1.0, std::abs(hi));
    return h >= lo - slack && h <= hi + slack;
  }
};

inline LagWindow spatial_window(const GridSpec& g) { return {4.0 * g.dx(), g.length / 8.0}; }

struct Ensemble {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean over paths (index order, pairwise) and its jackknife standard error.
inline Ensemble reduce_paths(std::span<const double> per_path) {
  const std::size_t n = per_path.size();
  if (n == 0) throw InputError("empty ensemble");
  Ensemble e;
  e.mean = pairwise_sum(per_path) / static_cast<double>(n);
  if (n < 2) return e;
  const double total = e.mean * static_cast<double>(n);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double loo = (total - per_path[i]) / static_cast<double>(n - 1);
    dev[i] = (loo - e.mean) * (loo - e.mean);
  }
  e.std_error = std::sqrt(static_cast<double>(n - 1) / static_cast<double>(n) * pairwise_sum(dev));
  return e;
}

namespace detail {

inline std::size_t grid_lag(const GridSpec& g, double h) {
  const double m = h / g.dx();
  if (!(m >= 0.0) || std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m)) {
    std::ostringstream os;
    os << "lag " << h << " is not a nonnegative multiple of dx=" << g.dx();
    throw InputError(os.str());
  }
  return static_cast<std::size_t>(std::llround(m));
}

inline void check_increasing(const std::vector<double>& lags) {
  for (std::size_t i = 1; i < lags.size(); ++i)
    if (!(lags[i] > lags[i - 1])) throw InputError("lags must be strictly increasing");
}

inline double moment_of(double d, double k) { return k == 2.0 ? d * d : k == 4.0 ? (d * d) * (d * d) : std::pow(std::abs(d), k); }

}  // namespace detail

/// E|u(x+h) - u(x)|^k over x and paths; one snapshot per path, all at the
/// same time. Lags are 0 or grid multiples in [4 dx, L/8].
inline MomentTable spatial_structure(std::span<const FieldSnapshot> snapshots, const GridSpec& grid, double k,
                                     const std::vector<double>& lags, unsigned threads = 1) {
  if (snapshots.empty()) throw InputError("spatial_structure: empty ensemble");
  if (!(k > 0.0)) throw InputError("moment order k must be positive");
  grid.validate_space();
  detail::check_increasing(lags);
  const std::size_t n = grid.points;
  const LagWindow win = spatial_window(grid);
  std::vector<std::size_t> steps;
  for (double h : lags) {
    const std::size_t m = detail::grid_lag(grid, h);
    if (m != 0 && !win.contains(h)) {
      std::ostringstream os;
      os << "spatial lag " << h << " outside [4dx, L/8] = [" << win.lo << ", " << win.hi << "]";
      throw InputError(os.str());
    }
    steps.push_back(m);
  }
  for (const auto& s : snapshots) {
    if (s.values.size() != n) throw InputError("spatial_structure: snapshot size differs from the grid");
    if (s.time != snapshots.front().time) throw InputError("spatial_structure: snapshots at different times");
  }
  const std::size_t paths = snapshots.size();
  std::vector<std::vector<double>> per(lags.size(), std::vector<double>(paths));
  parallel_for(paths, threads, [&](std::size_t p) {
    const auto& u = snapshots[p].values;
    std::vector<double> d(n);
    for (std::size_t j = 0; j < steps.size(); ++j) {
      for (std::size_t i = 0; i < n; ++i) d[i] = detail::moment_of(u[(i + steps[j]) % n] - u[i], k);
      per[j][p] = pairwise_sum(d) / static_cast<double>(n);
    }
  });
  MomentTable t{Axis::space, k, lags, {}, {}, paths, snapshots.front().time};
  for (const auto& col : per) {
    const auto e = reduce_paths(col);
    t.moments.push_back(e.mean);
    t.stderrs.push_back(e.std_error);
  }
  return t;
}

/// Overload for an ensemble of per-path snapshot lists: uses the snapshot at time t.
inline MomentTable spatial_structure(std::span<const std::vector<FieldSnapshot>> paths, double t,
                                     const GridSpec& grid, double k, const std::vector<double>& lags,
                                     unsigned threads = 1) {
  if (paths.empty()) throw InputError("spatial_structure: empty ensemble");
  std::vector<FieldSnapshot> at;
  at.reserve(paths.size());
  const double tol = 1e-9 * std::max(grid.dt, 1e-12);
  for (const auto& path : paths) {
    auto it = std::find_if(path.begin(), path.end(), [&](const FieldSnapshot& s) { return std::abs(s.time - t) <= tol; });
    if (it == path.end()) throw InputError("spatial_structure: no snapshot at t=" + std::to_string(t));
    at.push_back(*it);
  }
  return spatial_structure(at, grid, k, lags, threads);
}

/// E|u_{t+delta}(x) - u_t(x)|^k over x and paths. Each path holds
/// snapshots at t and every t + delta; t must be at least burn_in.
inline MomentTable temporal_structure(std::span<const std::vector<FieldSnapshot>> paths, double t, double k,
                                      const std::vector<double>& deltas, double burn_in = 0.0,
                                      double time_tol = 1e-9, unsigned threads = 1) {
  if (paths.empty()) throw InputError("temporal_structure: empty ensemble");
  if (!(k > 0.0)) throw InputError("moment order k must be positive");
  if (t < burn_in - time_tol) {
    std::ostringstream os;
    os << "temporal base time " << t << " is before the burn-in " << burn_in;
    throw InputError(os.str());
  }
  detail::check_increasing(deltas);
  if (!deltas.empty() && deltas.front() < 0.0) throw InputError("time lags must be >= 0");
  auto find = [&](const std::vector<FieldSnapshot>& path, double when) -> const FieldSnapshot& {
    for (const auto& s : path)
      if (std::abs(s.time - when) <= time_tol) return s;
    std::ostringstream os;
    os << "missing snapshot at t=" << when;
    throw InputError(os.str());
  };
  const std::size_t count = paths.size();
  std::vector<std::vector<double>> per(deltas.size(), std::vector<double>(count));
  parallel_for(count, threads, [&](std::size_t p) {
    const auto& base = find(paths[p], t).values;
    std::vector<double> d(base.size());
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      const auto& later = find(paths[p], t + deltas[j]).values;
      if (later.size() != base.size()) throw InputError("temporal_structure: snapshot sizes differ");
      for (std::size_t i = 0; i < base.size(); ++i) d[i] = detail::moment_of(later[i] - base[i], k);
      per[j][p] = base.empty() ? 0.0 : pairwise_sum(d) / static_cast<double>(base.size());
    }
  });
  MomentTable tab{Axis::time, k, deltas, {}, {}, count, t};
  for (const auto& col : per) {
    const auto e = reduce_paths(col);
    tab.moments.push_back(e.mean);
    tab.stderrs.push_back(e.std_error);
  }
  return tab;
}

struct ExponentFit {
  Axis axis = Axis::space;
  double k = 2.0;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  LagWindow window;
  std::size_t lags_used = 0;
};

/// Least squares of log moment on log lag, over the lags inside the window.
inline ExponentFit fit_exponent(const MomentTable& table, LagWindow window) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < table.lags.size(); ++i) {
    if (!window.contains(table.lags[i])) continue;
    if (!(table.moments[i] > 0.0) || !(table.lags[i] > 0.0)) {
      std::ostringstream os;
      os << "nonpositive moment " << table.moments[i] << " at lag " << table.lags[i] << " inside the fit window";
      throw DegenerateDataError(os.str());
    }
    lx.push_back(std::log(table.lags[i]));
    ly.push_back(std::log(table.moments[i]));
  }
  if (lx.size() < 4) {
    std::ostringstream os;
    os << "fit window [" << window.lo << ", " << window.hi << "] holds " << lx.size() << " lags, need >= 4";
    throw DegenerateDataError(os.str());
  }
  const auto f = least_squares(lx, ly);
  return {table.axis, table.k, f.slope, f.intercept, f.slope_stderr, window, lx.size()};
}

struct TheoremBounds {
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double k = 2.0;
  double b_sup = 0.0;
  double c_sup = 0.0;
  double d_sup = 0.0;
  /// beta <= alpha / 2, the range where the temporal moment bound is proved.
  bool temporal_applicable = false;
};

inline TheoremBounds theorem_bounds(double alpha, double beta, double rho, double k = 2.0) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw RangeError("spatial moment theorem needs alpha in (1, 2], got " + std::to_string(alpha));
  if (!(beta > 0.0 && beta < 1.0))
    throw RangeError("spatial moment theorem needs beta in (0, 1), got " + std::to_string(beta));
  if (!(rho > 0.0 && rho <= 1.0))
    throw RangeError("Hoelder theorem needs rho in (0, 1], got " + std::to_string(rho));
  if (!(k >= 2.0)) throw RangeError("moment theorems need k >= 2, got " + std::to_string(k));
  TheoremBounds b{alpha, beta, rho, k, 1.0 - 1.0 / alpha, 0.0, 0.0, beta <= alpha / 2.0};
  b.c_sup = std::min((alpha - 1.0) / 2.0, rho);
  b.d_sup = std::min((alpha - beta) / (2.0 * alpha), rho / alpha);
  return b;
}

constexpr double kBoundSlack = 0.02;

/// Passes iff slope + 2 stderr >= k (bound_sup - 0.02). The temporal check
/// outside beta <= alpha/2 is reported but marked out of theorem.
inline CheckReport consistency_report(const ExponentFit& fit, const TheoremBounds& bounds, double k,
                                      std::optional<Axis> axis = std::nullopt) {
  if (axis && *axis != fit.axis)
    throw UsageError("consistency_report: fit is on the " + axis_name(fit.axis) + " axis, expected " +
                     axis_name(*axis));
  if (fit.k != k || bounds.k != k) {
    std::ostringstream os;
    os << "consistency_report: moment order mismatch (fit k=" << fit.k << ", bounds k=" << bounds.k
       << ", requested k=" << k << ")";
    throw UsageError(os.str());
  }
  const bool space = fit.axis == Axis::space;
  const double sup = space ? bounds.c_sup : bounds.d_sup;
  const double target = k * (sup - kBoundSlack);
  const double margin = fit.slope + 2.0 * fit.slope_stderr - target;
  CheckReport r;
  r.check_name = space ? "spatial_moment_bound" : "temporal_moment_bound";
  std::ostringstream grid;
  grid << "alpha=" << bounds.alpha << " beta=" << bounds.beta << " rho=" << bounds.rho << " k=" << k
       << " window=[" << fit.window.lo << ", " << fit.window.hi << "]";
  r.parameter_grid = grid.str();
  r.fitted_constant = fit.slope;
  r.tolerance = kBoundSlack;
  r.violations = margin >= 0.0 ? 0 : 1;
  r.pass = margin >= 0.0;
  r.details = {{"slope", fit.slope},
               {"slope_stderr", fit.slope_stderr},
               {"bound_sup", sup},
               {"target_slope", target},
               {"margin", margin}};
  if (!space && !bounds.temporal_applicable) {
    r.details.emplace_back("applicable", 0.0);
    r.note = "out of theorem: beta > alpha/2, temporal bound not proved here";
  } else {
    r.details.emplace_back("applicable", 1.0);
  }
  return r;
}

}  // namespace fracheat::estimator
