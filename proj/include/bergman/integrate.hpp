#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weights.hpp"

namespace bergman {

inline constexpr double kDefaultRhoMax = 1.0 - 1.0 / 4096.0;  // 1 - 2^-12

struct QuadratureSpec {
  std::size_t radial_nodes = 64;    // Gauss-Legendre points per radial axis
  std::size_t angular_nodes = 128;  // periodic points per angle
  std::size_t sphere_samples = 4096;
  std::uint64_t seed = 0;

  void validate() const {
    if (radial_nodes < 4) throw invalid_spec_error("radial_nodes must be >= 4");
    if (angular_nodes < 8) throw invalid_spec_error("angular_nodes must be >= 8");
    if (sphere_samples < 64) throw invalid_spec_error("sphere_samples must be >= 64");
  }

  friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

namespace measure {

// dV_alpha = prod_k (1 - |z_k|^2)^alpha dx_k dy_k on the polydisk (unnormalized).
struct VAlpha {
  double alpha = 0.0;
};
// Normalized volume dv on the ball: integral of 1 is 1.
struct VolumeNormalized {};
// dv / (1 - |z|^2)^(n+1) restricted to |z| <= rho_max.
struct TauTruncated {
  double rho_max = kDefaultRhoMax;
};

}  // namespace measure

struct DomainMeasure {
  Domain domain;
  std::size_t dimension;
  std::variant<measure::VAlpha, measure::VolumeNormalized, measure::TauTruncated> measure;

  static DomainMeasure polydisk(std::size_t n, double alpha = 0.0) {
    return {Domain::polydisk, n, measure::VAlpha{alpha}};
  }
  static DomainMeasure ball(std::size_t n) { return {Domain::ball, n, measure::VolumeNormalized{}}; }
  static DomainMeasure tau(std::size_t n, double rho_max = kDefaultRhoMax) {
    return {Domain::ball, n, measure::TauTruncated{rho_max}};
  }

  void validate() const {
    if (dimension == 0) throw invalid_spec_error("domain dimension must be positive");
    if (auto* va = std::get_if<measure::VAlpha>(&measure)) {
      if (domain != Domain::polydisk) throw invalid_spec_error("dV_alpha is only defined on the polydisk");
      if (!(va->alpha >= 0.0) || !std::isfinite(va->alpha)) throw invalid_spec_error("dV_alpha requires alpha >= 0");
    } else {
      if (domain != Domain::ball) throw invalid_spec_error("dv and dtau are only defined on the ball");
      if (auto* t = std::get_if<measure::TauTruncated>(&measure))
        if (!(t->rho_max > 0.0 && t->rho_max < 1.0)) throw invalid_spec_error("tau truncation needs 0 < rho_max < 1");
    }
  }
};

namespace detail {

// Node grid of one polydisk coordinate: z = rho e^{i theta}, with the radial
// Jacobian rho (1 - rho^2)^alpha and the angular weight folded in.
struct CoordinateRule {
  std::vector<complex> nodes;
  std::vector<double> weights;
};

inline CoordinateRule disk_rule(const QuadratureSpec& q, double alpha) {
  const Rule1D radial = gauss_legendre(q.radial_nodes, 0.0, 1.0);
  const Rule1D angular = periodic_rule(q.angular_nodes);
  CoordinateRule rule;
  rule.nodes.reserve(radial.size() * angular.size());
  rule.weights.reserve(radial.size() * angular.size());
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double rho = radial.nodes[i];
    const double rw = radial.weights[i] * rho * std::pow(1.0 - rho * rho, alpha);
    for (std::size_t j = 0; j < angular.size(); ++j) {
      rule.nodes.push_back(std::polar(rho, angular.nodes[j]));
      rule.weights.push_back(rw * angular.weights[j]);
    }
  }
  return rule;
}

template <typename Integrand>
double checked_value(Integrand& g, std::span<const complex> z) {
  const double v = g(z);
  if (!std::isfinite(v)) throw integration_error("non-finite integrand value", Point(z.begin(), z.end()));
  return v;
}

}  // namespace detail

// Tensor-product rule on D^n against dV_alpha. The area convention is dx dy,
// so the integral of 1 over D is pi.
template <typename Integrand>
double integrate_polydisk(Integrand&& g, const DomainMeasure& dm, const QuadratureSpec& q, Parallelism par = {}) {
  dm.validate();
  q.validate();
  const auto* va = std::get_if<measure::VAlpha>(&dm.measure);
  if (!va) throw invalid_argument_error("integrate_polydisk needs a polydisk measure");
  const std::size_t n = dm.dimension;
  const detail::CoordinateRule rule = detail::disk_rule(q, va->alpha);
  const std::size_t per = rule.nodes.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= per;

  return deterministic_block_sum(
      total,
      [&](std::size_t lo, std::size_t hi) {
        Point z(n);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          std::size_t rem = i;
          double w = 1.0;
          for (std::size_t j = n; j-- > 0;) {
            const std::size_t k = rem % per;
            rem /= per;
            z[j] = rule.nodes[k];
            w *= rule.weights[k];
          }
          s += w * detail::checked_value(g, z);
        }
        return s;
      },
      par);
}

namespace detail {

// Polar integration over |z| <= upper in C^n against the normalized volume:
// 2n * int_0^upper rho^(2n-1) radial_factor(rho) * (sphere mean of g(rho u)) d rho.
template <typename Integrand, typename RadialFactor>
double integrate_ball_polar(Integrand& g, std::size_t n, double upper, RadialFactor&& radial_factor,
                            const QuadratureSpec& q, Parallelism par) {
  q.validate();
  const Rule1D radial = gauss_legendre(q.radial_nodes, 0.0, upper);
  const SphereRule sphere = sphere_rule(n, q.sphere_samples, q.seed);
  std::vector<double> rw(radial.size());
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double rho = radial.nodes[i];
    rw[i] = radial.weights[i] * 2.0 * static_cast<double>(n) * std::pow(rho, 2.0 * n - 1.0) * radial_factor(rho);
  }
  const std::size_t per = sphere.directions.size();
  return deterministic_block_sum(
      radial.size() * per,
      [&](std::size_t lo, std::size_t hi) {
        Point z(n);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          const std::size_t ri = i / per, si = i % per;
          const double rho = radial.nodes[ri];
          for (std::size_t j = 0; j < n; ++j) z[j] = rho * sphere.directions[si][j];
          s += rw[ri] * sphere.weights[si] * checked_value(g, z);
        }
        return s;
      },
      par);
}

}  // namespace detail

// Polar rule on B_n: Gauss-Legendre in the radius, a fixed seeded sphere rule
// shared by every radius. dv is normalized.
template <typename Integrand>
double integrate_ball(Integrand&& g, const DomainMeasure& dm, const QuadratureSpec& q, Parallelism par = {}) {
  dm.validate();
  const std::size_t n = dm.dimension;
  if (std::holds_alternative<measure::VolumeNormalized>(dm.measure))
    return detail::integrate_ball_polar(g, n, 1.0, [](double) { return 1.0; }, q, par);
  if (const auto* t = std::get_if<measure::TauTruncated>(&dm.measure)) {
    const double e = -static_cast<double>(n + 1);
    return detail::integrate_ball_polar(g, n, t->rho_max, [e](double rho) { return std::pow(1.0 - rho * rho, e); },
                                        q, par);
  }
  throw invalid_argument_error("integrate_ball needs a ball measure");
}

template <typename Integrand>
double integrate(Integrand&& g, const DomainMeasure& dm, const QuadratureSpec& q, Parallelism par = {}) {
  return dm.domain == Domain::polydisk ? integrate_polydisk(g, dm, q, par) : integrate_ball(g, dm, q, par);
}

// One refinement step: radial and angular nodes double, sphere samples x4.
inline QuadratureSpec refine(QuadratureSpec q) {
  q.radial_nodes *= 2;
  q.angular_nodes *= 2;
  q.sphere_samples *= 4;
  return q;
}

// The inverse of refine, clamped at the minimum admissible spec.
inline QuadratureSpec coarsen(QuadratureSpec q) {
  q.radial_nodes = std::max<std::size_t>(4, q.radial_nodes / 2);
  q.angular_nodes = std::max<std::size_t>(8, q.angular_nodes / 2);
  q.sphere_samples = std::max<std::size_t>(64, q.sphere_samples / 4);
  return q;
}

template <typename Integrand>
std::vector<std::pair<QuadratureSpec, double>> convergence_sweep(Integrand&& g, const DomainMeasure& dm,
                                                                 const QuadratureSpec& base, std::size_t levels,
                                                                 Parallelism par = {}) {
  if (levels < 2) throw invalid_argument_error("convergence_sweep needs at least 2 levels");
  std::vector<std::pair<QuadratureSpec, double>> out;
  QuadratureSpec q = base;
  for (std::size_t l = 0; l < levels; ++l) {
    out.emplace_back(q, integrate(g, dm, q, par));
    q = refine(q);
  }
  return out;
}

}  // namespace bergman
