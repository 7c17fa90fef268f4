#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/series.hpp"

namespace bergman {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

// Gauss-Legendre rule with `count` points on [a, b], exact for polynomials of
// degree <= 2*count - 1. Nodes are returned in increasing order.
inline Rule1D gauss_legendre(std::size_t count, double a = -1.0, double b = 1.0) {
  if (count == 0) throw invalid_argument_error("Gauss-Legendre rule needs at least one point");
  Rule1D rule{std::vector<double>(count), std::vector<double>(count)};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const std::size_t roots = (count + 1) / 2;
  for (std::size_t i = 0; i < roots; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(count) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= count; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(count) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= count; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
      p0 = p1;
      p1 = p2;
    }
    dp = count == 1 ? 1.0 : static_cast<double>(count) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[count - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[count - 1 - i] = half * w;
  }
  if (count % 2) rule.nodes[count / 2] = mid;
  return rule;
}

// Uniform periodic rule on [0, 2*pi) with equal weights 2*pi/count, exact for
// trigonometric polynomials of frequency < count. Nodes sit at cell midpoints
// offset by `shift` cells, so theta = 0 is never sampled when shift = 1/2.
inline Rule1D periodic_rule(std::size_t count, double shift = 0.5) {
  if (count == 0) throw invalid_argument_error("periodic rule needs at least one point");
  Rule1D rule{std::vector<double>(count), std::vector<double>(count, 2.0 * std::numbers::pi / count)};
  for (std::size_t j = 0; j < count; ++j)
    rule.nodes[j] = 2.0 * std::numbers::pi * (static_cast<double>(j) + shift) / static_cast<double>(count);
  return rule;
}

// Product rule on the unit sphere S^{2n-1} of C^n for the normalized
// surface measure. Moduli: (|u_1|^2, ..., |u_n|^2) is uniform on the simplex,
// realized by stick-breaking with Gauss-Legendre in each Beta(1, n-j) factor.
// Phases: uniform periodic grids with seeded offsets. The same rule is reused
// for every radius of a polar integration.
struct SphereRule {
  std::vector<Point> directions;
  std::vector<double> weights;  // sum to 1
};

inline SphereRule sphere_rule(std::size_t n, std::size_t samples, std::uint64_t seed) {
  if (n == 0) throw invalid_argument_error("sphere rule dimension must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::size_t per_axis = samples;
  if (n > 1) {
    per_axis = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(samples), 1.0 / (2.0 * n - 1.0)) + 1e-9));
    per_axis = std::max<std::size_t>(per_axis, 2);
  }
  std::vector<Rule1D> phases;
  for (std::size_t j = 0; j < n; ++j) phases.push_back(periodic_rule(per_axis, unit(rng)));

  // Stick-breaking factor b_j ~ Beta(1, n-1-j) has density (n-1-j)(1-b)^(n-2-j).
  std::vector<Rule1D> sticks;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    Rule1D g = gauss_legendre(per_axis, 0.0, 1.0);
    const double a = static_cast<double>(n - 1 - j);
    for (std::size_t i = 0; i < g.size(); ++i) g.weights[i] *= a * std::pow(1.0 - g.nodes[i], a - 1.0);
    sticks.push_back(std::move(g));
  }

  SphereRule rule;
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= per_axis;
  for (std::size_t j = 0; j + 1 < n; ++j) total *= per_axis;
  rule.directions.reserve(total);
  rule.weights.reserve(total);

  std::vector<std::size_t> idx(2 * n - 1, 0);
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    for (std::size_t d = idx.size(); d-- > 0;) {
      idx[d] = rem % per_axis;
      rem /= per_axis;
    }
    Point u(n);
    double weight = 1.0 / std::pow(2.0 * std::numbers::pi, static_cast<double>(n));
    double left = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s;
      if (j + 1 < n) {
        const std::size_t k = idx[n + j];
        s = left * sticks[j].nodes[k];
        weight *= sticks[j].weights[k];
      } else {
        s = left;
      }
      left -= s;
      const double phi = phases[j].nodes[idx[j]];
      weight *= phases[j].weights[idx[j]];
      u[j] = std::polar(std::sqrt(std::max(s, 0.0)), phi);
    }
    rule.directions.push_back(std::move(u));
    rule.weights.push_back(weight);
  }
  return rule;
}

}  // namespace bergman
