#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"
#include "bergman/series.hpp"
#include "bergman/spaces.hpp"
#include "bergman/weights.hpp"

namespace bergman {

inline constexpr double kDefaultInset = 1.0 / 1048576.0;  // 2^-20

// Sample grid for the dilation condition r^k w(z/r) <= C w(z), r0 <= r < 1, z/r in the domain.
//   radii:      r_j = r0 + j (1 - r0 - eps) / radii,  j = 0..radii
//   shells:     z = t r u with t_i = (i + 1)(1 - eps) / shells
//   directions: seeded unit vectors u (max-modulus 1 on the polydisk, Euclidean 1 on the ball)
// Doubling any count refines the grid to a superset of the old one.
struct ConditionGrid {
  std::size_t radii = 32;
  std::size_t shells = 10;
  std::size_t directions = 16;
  std::uint64_t seed = 0;
  Domain domain = Domain::polydisk;
  double epsilon = kDefaultInset;
};

struct ConditionReport {
  std::string weight_id;
  unsigned k = 0;
  double r0 = 0.5;
  ConditionGrid grid;
  double bound = 1e6;
  double sup_ratio = 0.0;
  double C_estimate = 0.0;
  double tail_C = 0.0;  // sup over grid radii r >= 0.9
  bool passed = false;
  double argmax_r = 0.0;
  Point argmax_z;
};

namespace detail {

inline std::vector<Point> sample_directions(std::size_t n, std::size_t count, std::uint64_t seed, Domain domain) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Point u(n);
    for (auto& c : u) {
      const double re = normal(rng);
      const double im = normal(rng);
      c = {re, im};
    }
    const double size = domain_size(u, domain);
    for (auto& c : u) c /= size;
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace detail

inline ConditionReport check_condition(const Weight& w, unsigned k, double r0, const ConditionGrid& grid = {},
                                       double bound = 1e6, Parallelism par = {}) {
  if (!(r0 > 0.0 && r0 < 1.0)) throw invalid_argument_error("check_condition requires 0 < r0 < 1");
  if (grid.radii == 0 || grid.shells == 0 || grid.directions == 0)
    throw invalid_argument_error("condition grid counts must be positive");
  if (!(grid.epsilon > 0.0 && grid.epsilon < 1.0 - r0)) throw invalid_argument_error("grid inset must lie in (0, 1 - r0)");
  const std::size_t n = w.dimension();
  const auto dirs = detail::sample_directions(n, grid.directions, grid.seed, grid.domain);
  const std::size_t radii = grid.radii + 1;

  struct Best {
    double ratio = -std::numeric_limits<double>::infinity();
    std::size_t shell = 0, dir = 0;
  };
  std::vector<Best> per_radius(radii);
  std::vector<double> radius(radii);
  for (std::size_t j = 0; j < radii; ++j)
    radius[j] = r0 + static_cast<double>(j) * (1.0 - r0 - grid.epsilon) / static_cast<double>(grid.radii);

  detail::parallel_for(radii, par, [&](std::size_t j) {
    const double r = radius[j];
    Best best;
    Point z(n);
    for (std::size_t i = 0; i < grid.shells; ++i) {
      const double t = static_cast<double>(i + 1) * (1.0 - grid.epsilon) / static_cast<double>(grid.shells);
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        for (std::size_t c = 0; c < n; ++c) z[c] = t * r * dirs[d][c];
        const double ratio = dilation_ratio(w, z, r, k, grid.domain);
        if (ratio > best.ratio || std::isnan(ratio)) best = {ratio, i, d};
        if (std::isnan(ratio)) break;
      }
    }
    per_radius[j] = best;
  });

  ConditionReport rep;
  rep.weight_id = w.describe();
  rep.k = k;
  rep.r0 = r0;
  rep.grid = grid;
  rep.bound = bound;
  rep.sup_ratio = -std::numeric_limits<double>::infinity();
  rep.tail_C = 0.0;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < radii; ++j) {
    if (per_radius[j].ratio > rep.sup_ratio) {
      rep.sup_ratio = per_radius[j].ratio;
      arg = j;
    }
    if (radius[j] >= 0.9) rep.tail_C = std::max(rep.tail_C, per_radius[j].ratio);
  }
  rep.C_estimate = rep.sup_ratio;
  rep.passed = std::isfinite(rep.sup_ratio) && rep.sup_ratio <= bound;
  rep.argmax_r = radius[arg];
  const double t = static_cast<double>(per_radius[arg].shell + 1) * (1.0 - grid.epsilon) / static_cast<double>(grid.shells);
  rep.argmax_z.resize(n);
  for (std::size_t c = 0; c < n; ++c) rep.argmax_z[c] = t * rep.argmax_r * dirs[per_radius[arg].dir][c];
  return rep;
}

struct MinKResult {
  std::optional<unsigned> k_min;
  std::vector<ConditionReport> reports;  // one per k tried, in increasing k
};

// Smallest k <= k_max whose grid report passes with C_estimate <= bound.
inline MinKResult find_min_k(const Weight& w, unsigned k_max, double r0, const ConditionGrid& grid = {},
                             double bound = 1e6, Parallelism par = {}) {
  if (k_max > 64) throw invalid_argument_error("find_min_k requires k_max <= 64");
  MinKResult out;
  for (unsigned k = 0; k <= k_max; ++k) {
    out.reports.push_back(check_condition(w, k, r0, grid, bound, par));
    if (out.reports.back().passed) {
      out.k_min = k;
      break;
    }
  }
  return out;
}

// Sample grid for monotonicity of r -> r^k w(z/r) on (max(|z|, r_min), 1):
//   points z = t u with t_i = (i + 1) / (shells + 1) and seeded Euclidean unit directions u,
//   radii r_l evenly spread over the open interval, forward differences of step h.
struct MonotoneGrid {
  std::size_t shells = 10;
  std::size_t directions = 8;
  std::size_t radii = 64;
  std::uint64_t seed = 0;
  double r_min = 0.0;
  double step = 1e-4;
  double tolerance = -1e-9;  // slopes at or above this count as nondecreasing
};

struct MonotoneSample {
  Point z;
  double abs_z = 0.0;
  bool monotone = true;
  double worst_slope = std::numeric_limits<double>::infinity();
  double worst_r = 0.0;
};

struct MonotoneReport {
  std::string weight_id;
  unsigned k = 0;
  MonotoneGrid grid;
  std::vector<MonotoneSample> samples;
  double monotone_fraction = 0.0;
  double worst_slope = std::numeric_limits<double>::infinity();
  std::size_t worst_sample = 0;
  bool all_monotone = true;
};

inline MonotoneReport check_monotone(const Weight& w, unsigned k, const MonotoneGrid& grid = {}, Parallelism par = {}) {
  if (grid.shells == 0 || grid.directions == 0 || grid.radii == 0)
    throw invalid_argument_error("monotone grid counts must be positive");
  if (!(grid.step > 0.0 && grid.step < 0.5)) throw invalid_argument_error("finite-difference step must lie in (0, 0.5)");
  if (!(grid.r_min >= 0.0 && grid.r_min < 1.0 - grid.step)) throw invalid_argument_error("r_min must lie in [0, 1 - step)");
  const std::size_t n = w.dimension();
  const auto dirs = detail::sample_directions(n, grid.directions, grid.seed, Domain::ball);

  MonotoneReport rep;
  rep.weight_id = w.describe();
  rep.k = k;
  rep.grid = grid;
  rep.samples.resize(grid.shells * grid.directions);

  auto g = [&](const Point& z, double r) {
    Point scaled(z);
    for (auto& c : scaled) c /= r;
    return std::pow(r, static_cast<double>(k)) * evaluate_weight(w, scaled);
  };

  detail::parallel_for(rep.samples.size(), par, [&](std::size_t idx) {
    const std::size_t i = idx / grid.directions, d = idx % grid.directions;
    const double t = static_cast<double>(i + 1) / static_cast<double>(grid.shells + 1);
    MonotoneSample s;
    s.z.resize(n);
    for (std::size_t c = 0; c < n; ++c) s.z[c] = t * dirs[d][c];
    s.abs_z = domain_size(s.z, Domain::ball);
    const double lo = std::max(s.abs_z, grid.r_min);
    const double hi = 1.0 - grid.step;
    if (lo < hi) {
      for (std::size_t l = 0; l < grid.radii; ++l) {
        const double r = lo + (static_cast<double>(l) + 0.5) / static_cast<double>(grid.radii) * (hi - lo);
        const double slope = (g(s.z, r + grid.step) - g(s.z, r)) / grid.step;
        if (slope < s.worst_slope) {
          s.worst_slope = slope;
          s.worst_r = r;
        }
      }
    }
    s.monotone = !(s.worst_slope < grid.tolerance);
    rep.samples[idx] = std::move(s);
  });

  std::size_t good = 0;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    if (rep.samples[i].monotone) ++good;
    if (rep.samples[i].worst_slope < rep.worst_slope) {
      rep.worst_slope = rep.samples[i].worst_slope;
      rep.worst_sample = i;
    }
  }
  rep.monotone_fraction = static_cast<double>(good) / static_cast<double>(rep.samples.size());
  rep.all_monotone = good == rep.samples.size();
  return rep;
}

struct ConvergenceRow {
  double r;
  double norm_fr;
  double norm_diff;
};

struct ConvergenceOptions {
  std::size_t window = 3;         // trailing rows inspected by both checks
  double limsup_tolerance = 1e-6;  // relative slack on ||f_r|| <= ||f||
  double vanishing_fraction = 1e-2;  // last ||f_r - f|| must be <= this * ||f||
};

struct ConvergenceReport {
  std::string norm_id;
  double norm_f = 0.0;
  std::vector<ConvergenceRow> rows;
  bool limsup_check = false;
  bool vanishing_check = false;
};

// ||f_r|| and ||f_r - f|| for each radius, measured with the spec's norm.
inline ConvergenceReport dilation_convergence(const PowerSeries& f, const NormSpec& s, const std::vector<double>& radii,
                                              const ConvergenceOptions& opt = {}, Parallelism par = {}) {
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) throw invalid_argument_error("radii must lie in (0, 1)");
    if (i && !(radii[i] > radii[i - 1])) throw invalid_argument_error("radii must be strictly increasing");
  }
  ConvergenceReport rep;
  rep.norm_id = s.describe();
  rep.norm_f = norm(f, s, par).value;
  for (double r : radii) {
    const PowerSeries fr = dilate(f, r);
    rep.rows.push_back({r, norm(fr, s, par).value, norm(fr - f, s, par).value});
  }
  const std::size_t from = rep.rows.size() > opt.window ? rep.rows.size() - opt.window : 0;
  double tail_max = 0.0;
  bool nonincreasing = true;
  for (std::size_t i = from; i < rep.rows.size(); ++i) {
    tail_max = std::max(tail_max, rep.rows[i].norm_fr);
    if (i > from && rep.rows[i].norm_diff > rep.rows[i - 1].norm_diff) nonincreasing = false;
  }
  rep.limsup_check = tail_max <= rep.norm_f * (1.0 + opt.limsup_tolerance);
  rep.vanishing_check =
      !rep.rows.empty() && nonincreasing && rep.rows.back().norm_diff <= opt.vanishing_fraction * rep.norm_f;
  return rep;
}

struct DensityRow {
  unsigned degree;
  double error;  // ||truncate(f_r, degree) - f||
};

struct DensityReport {
  std::string norm_id;
  double r = 0.0;
  double dilation_error = 0.0;  // ||f_r - f||, the plateau the rows approach
  std::vector<DensityRow> rows;
};

// Two-step approximation f ~ f_r ~ Taylor polynomial of f_r.
inline DensityReport density_experiment(const PowerSeries& f, const NormSpec& s, double r,
                                        const std::vector<unsigned>& degrees, Parallelism par = {}) {
  if (!(r > 0.0 && r < 1.0)) throw invalid_argument_error("density_experiment requires 0 < r < 1");
  DensityReport rep;
  rep.norm_id = s.describe();
  rep.r = r;
  const PowerSeries fr = dilate(f, r);
  rep.dilation_error = norm(fr - f, s, par).value;
  for (unsigned d : degrees) rep.rows.push_back({d, norm(truncate(fr, d) - f, s, par).value});
  return rep;
}

}  // namespace bergman
