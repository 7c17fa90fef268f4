#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "bergman/errors.hpp"
#include "bergman/integrate.hpp"
#include "bergman/parallel.hpp"
#include "bergman/series.hpp"
#include "bergman/weights.hpp"

namespace bergman {

enum class NormKind {
  bergman_polydisk,       // (int_{D^n} |f|^p w dV_alpha)^(1/p)
  bergman_ball,           // (int_{B_n} |f|^p w dv)^(1/p)
  besov_ball,             // origin derivatives + order-N partials against w dtau
  dirichlet_ball,         // besov_ball with p = 2
  radial_besov_polydisk,  // |f(0)|^p + int prod(1-|z_j|^2)^(p-2) |Rf|^p w dV
  angular_exact,          // p = 2 coefficient formula for angular weights
  product_exact,          // p = 2 coefficient formula for radial x angular weights
};

inline std::string_view to_string(NormKind k) {
  switch (k) {
    case NormKind::bergman_polydisk: return "bergman_polydisk";
    case NormKind::bergman_ball: return "bergman_ball";
    case NormKind::besov_ball: return "besov_ball";
    case NormKind::dirichlet_ball: return "dirichlet_ball";
    case NormKind::radial_besov_polydisk: return "radial_besov_polydisk";
    case NormKind::angular_exact: return "angular_exact";
    case NormKind::product_exact: return "product_exact";
  }
  return "?";
}

struct NormSpec {
  std::size_t dimension;
  NormKind kind;
  Weight weight;
  double p = 2.0;
  double alpha = 0.0;  // dV_alpha exponent (polydisk Bergman and exact norms)
  unsigned N = 1;      // derivative order (Besov/Dirichlet on the ball)
  QuadratureSpec quadrature{};
  double rho_max = kDefaultRhoMax;  // truncation radius of dtau
  bool seminorm = false;            // drop the origin terms
  bool estimate_error = true;       // also evaluate at the coarsened quadrature

  Domain domain() const {
    switch (kind) {
      case NormKind::bergman_ball:
      case NormKind::besov_ball:
      case NormKind::dirichlet_ball: return Domain::ball;
      default: return Domain::polydisk;
    }
  }

  void validate() const {
    if (dimension == 0) throw invalid_spec_error("norm dimension must be positive");
    if (weight.dimension() != dimension) throw invalid_spec_error("weight dimension differs from norm dimension");
    if (!(p > 0.0) || !std::isfinite(p)) throw invalid_spec_error("p must be positive");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw invalid_spec_error("alpha must be >= 0");
    quadrature.validate();
    switch (kind) {
      case NormKind::dirichlet_ball:
        if (p != 2.0) throw invalid_spec_error("the Dirichlet norm has p = 2");
        [[fallthrough]];
      case NormKind::besov_ball:
        if (N == 0) throw invalid_spec_error("N must be a positive integer");
        if (!(p * N > static_cast<double>(dimension)))
          throw invalid_spec_error("Besov norm requires p*N > n (p=" + expr::detail::format_number(p) +
                                   ", N=" + std::to_string(N) + ", n=" + std::to_string(dimension) + ")");
        if (!(rho_max > 0.0 && rho_max < 1.0)) throw invalid_spec_error("rho_max must lie in (0, 1)");
        break;
      case NormKind::radial_besov_polydisk:
        if (p < 2.0) throw invalid_spec_error("the radial Besov norm requires p >= 2");
        break;
      case NormKind::angular_exact:
        if (p != 2.0) throw invalid_spec_error("the exact angular norm has p = 2");
        if (!weight.is_angular()) throw invalid_spec_error("angular_exact needs an angular weight");
        break;
      case NormKind::product_exact:
        if (p != 2.0) throw invalid_spec_error("the exact product norm has p = 2");
        if (!weight.is_product()) throw invalid_spec_error("product_exact needs a radial x angular weight");
        break;
      default: break;
    }
  }

  std::string describe() const {
    std::string s(to_string(kind));
    s += "(n=" + std::to_string(dimension) + ", p=" + expr::detail::format_number(p);
    if (kind == NormKind::bergman_polydisk || kind == NormKind::angular_exact || kind == NormKind::product_exact)
      s += ", alpha=" + expr::detail::format_number(alpha);
    if (kind == NormKind::besov_ball || kind == NormKind::dirichlet_ball)
      s += ", N=" + std::to_string(N) + ", rho_max=" + expr::detail::format_number(rho_max);
    if (seminorm) s += ", seminorm";
    return s + ", w=" + weight.describe() + ")";
  }
};

struct NormResult {
  double value = 0.0;        // the norm
  double value_pow_p = 0.0;  // value^p; equals the sum of pieces
  double error_estimate = 0.0;
  std::vector<std::pair<std::string, double>> pieces;  // contributions to value^p
};

namespace detail {

inline double pow_abs(complex c, double p) { return p == 2.0 ? std::norm(c) : std::pow(std::abs(c), p); }

inline void require_dimension(const PowerSeries& f, const NormSpec& s) {
  if (f.dimension() != s.dimension)
    throw invalid_argument_error("series dimension " + std::to_string(f.dimension()) + " differs from norm dimension " +
                                 std::to_string(s.dimension));
}

inline NormResult finish(std::vector<std::pair<std::string, double>> pieces, double p) {
  NormResult r;
  for (const auto& [label, v] : pieces) r.value_pow_p += v;
  r.value = std::pow(r.value_pow_p, 1.0 / p);
  r.pieces = std::move(pieces);
  return r;
}

// Runs compute(q) and, when requested, compute(coarsen(q)); the difference of
// the two norms is the error estimate.
template <typename Compute>
NormResult with_error_estimate(const NormSpec& s, Compute&& compute) {
  NormResult fine = compute(s.quadrature);
  if (s.estimate_error) {
    const QuadratureSpec coarse = coarsen(s.quadrature);
    if (!(coarse == s.quadrature)) fine.error_estimate = std::abs(fine.value - compute(coarse).value);
  }
  return fine;
}

// B_alpha(m) = int_0^1 rho^(2m+1) (1-rho^2)^alpha d rho = Gamma(m+1) Gamma(alpha+1) / (2 Gamma(m+alpha+2)),
// via B(0) = 1/(2(alpha+1)), B(m) = B(m-1) m / (m+alpha+1).
inline double radial_beta(unsigned m, double alpha) {
  double b = 0.5 / (alpha + 1.0);
  for (unsigned k = 1; k <= m; ++k) b *= static_cast<double>(k) / (static_cast<double>(k) + alpha + 1.0);
  return b;
}

// Positive value of an expression factor at the given coordinates.
inline double factor_value(const expr::NodePtr& e, const expr::Coordinates& c, std::span<const complex> z,
                           const char* what) {
  double v;
  try {
    v = expr::evaluate(e, c);
  } catch (const expr::expr_domain_error& err) {
    throw weight_domain_error(std::string(what) + ": " + err.what(), Point(z.begin(), z.end()));
  }
  if (!std::isfinite(v) || v <= 0.0)
    throw weight_domain_error(std::string(what) + " is not positive and finite", Point(z.begin(), z.end()));
  return v;
}

// int_{T^n} nu(theta) d theta on the product periodic grid used by the polydisk rule.
inline double torus_integral(const expr::NodePtr& nu, std::size_t n, const QuadratureSpec& q, Parallelism par) {
  const Rule1D grid = periodic_rule(q.angular_nodes);
  const std::size_t per = grid.size();
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
            z[j] = std::polar(0.5, grid.nodes[k]);
            w *= grid.weights[k];
          }
          s += w * factor_value(nu, expr::Coordinates(z), z, "angular weight");
        }
        return s;
      },
      par);
}

}  // namespace detail

inline NormResult bergman_norm(const PowerSeries& f, const NormSpec& s, Parallelism par = {}) {
  s.validate();
  detail::require_dimension(f, s);
  if (s.kind != NormKind::bergman_polydisk && s.kind != NormKind::bergman_ball)
    throw invalid_argument_error("bergman_norm needs a Bergman norm spec");
  const DomainMeasure dm =
      s.kind == NormKind::bergman_polydisk ? DomainMeasure::polydisk(s.dimension, s.alpha) : DomainMeasure::ball(s.dimension);
  return detail::with_error_estimate(s, [&](const QuadratureSpec& q) {
    if (f.is_zero()) return detail::finish({{"integral", 0.0}}, s.p);
    const SeriesEvaluator fz(f);
    auto g = [&](std::span<const complex> z) { return detail::pow_abs(fz(z), s.p) * evaluate_weight(s.weight, z); };
    return detail::finish({{"integral", integrate(g, dm, q, par)}}, s.p);
  });
}

inline NormResult besov_ball_norm(const PowerSeries& f, const NormSpec& s, Parallelism par = {}) {
  s.validate();
  detail::require_dimension(f, s);
  if (s.kind != NormKind::besov_ball && s.kind != NormKind::dirichlet_ball)
    throw invalid_argument_error("besov_ball_norm needs a Besov or Dirichlet spec");
  const std::size_t n = s.dimension;
  // (1-|z|^2)^(pN) against dtau collapses to (1-|z|^2)^(pN-n-1) against dv.
  const double exponent = s.p * s.N - static_cast<double>(n) - 1.0;

  std::vector<std::pair<std::string, double>> origin;
  if (!s.seminorm) {
    const Point zero(n, complex{});
    for (unsigned d = 0; d < s.N; ++d)
      for (const auto& m : indices_of_degree(n, d))
        origin.emplace_back("origin" + m.to_string(), detail::pow_abs(evaluate(partial_derivative(f, m), zero), s.p));
  }
  std::vector<std::pair<MultiIndex, PowerSeries>> partials;
  for (const auto& m : indices_of_degree(n, s.N)) partials.emplace_back(m, partial_derivative(f, m));

  return detail::with_error_estimate(s, [&](const QuadratureSpec& q) {
    auto pieces = origin;
    for (const auto& entry : partials) {
      const PowerSeries& deriv = entry.second;
      double v = 0.0;
      if (!deriv.is_zero()) {
        const SeriesEvaluator dz(deriv);
        auto g = [&](std::span<const complex> z) {
          return detail::pow_abs(dz(z), s.p) * evaluate_weight(s.weight, z);
        };
        v = detail::integrate_ball_polar(
            g, n, s.rho_max, [exponent](double rho) { return std::pow(1.0 - rho * rho, exponent); }, q, par);
      }
      pieces.emplace_back(entry.first.to_string(), v);
    }
    return detail::finish(std::move(pieces), s.p);
  });
}

inline NormResult radial_besov_norm(const PowerSeries& f, const NormSpec& s, Parallelism par = {}) {
  s.validate();
  detail::require_dimension(f, s);
  if (s.kind != NormKind::radial_besov_polydisk) throw invalid_argument_error("radial_besov_norm needs a radial Besov spec");
  const PowerSeries rf = radial_derivative(f);
  const double origin = detail::pow_abs(evaluate(f, Point(s.dimension, complex{})), s.p);
  const double damping = s.p - 2.0;
  return detail::with_error_estimate(s, [&](const QuadratureSpec& q) {
    std::vector<std::pair<std::string, double>> pieces;
    if (!s.seminorm) pieces.emplace_back("origin", origin);
    double v = 0.0;
    if (!rf.is_zero()) {
      const SeriesEvaluator rz(rf);
      auto g = [&](std::span<const complex> z) {
        double d = 1.0;
        if (damping != 0.0)
          for (const auto& zj : z) d *= std::pow(1.0 - std::norm(zj), damping);
        return d * detail::pow_abs(rz(z), s.p) * evaluate_weight(s.weight, z);
      };
      v = integrate_polydisk(g, DomainMeasure::polydisk(s.dimension), q, par);
    }
    pieces.emplace_back("integral", v);
    return detail::finish(std::move(pieces), s.p);
  });
}

// ||f||^2 = (int_{T^n} w d theta) * sum_m |a_m|^2 prod_k B_alpha(m_k).
inline NormResult angular_exact_norm(const PowerSeries& f, const Weight& w, double alpha,
                                     const QuadratureSpec& q = {}, Parallelism par = {}) {
  if (!w.is_angular()) throw invalid_argument_error("angular_exact_norm needs an angular weight, got " + w.describe());
  if (w.dimension() != f.dimension()) throw invalid_argument_error("weight and series dimensions differ");
  if (!(alpha >= 0.0)) throw invalid_argument_error("alpha must be >= 0");
  q.validate();
  const double torus = detail::torus_integral(std::get<weight_kind::Angular>(w.kind()).angular, f.dimension(), q, par);
  std::vector<std::pair<std::string, double>> pieces;
  for (const auto& [m, a] : f.coefficients()) {
    double gamma = 1.0;
    for (std::size_t k = 0; k < m.size(); ++k) gamma *= detail::radial_beta(m[k], alpha);
    pieces.emplace_back(m.to_string(), torus * std::norm(a) * gamma);
  }
  return detail::finish(std::move(pieces), 2.0);
}

namespace detail {

// Tensor Gauss-Legendre nodes on I^n with prod_k r_k (1-r_k^2)^alpha * omega(r) folded into the weights.
struct RadialMomentRule {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

inline RadialMomentRule radial_moment_rule(const expr::NodePtr& omega, std::size_t n, double alpha,
                                           const QuadratureSpec& q) {
  const Rule1D g = gauss_legendre(q.radial_nodes, 0.0, 1.0);
  const std::size_t per = g.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < n; ++j) total *= per;
  RadialMomentRule rule;
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    std::vector<double> r(n);
    Point z(n);
    double w = 1.0;
    for (std::size_t j = n; j-- > 0;) {
      const std::size_t k = rem % per;
      rem /= per;
      r[j] = g.nodes[k];
      z[j] = r[j];
      w *= g.weights[k] * r[j] * std::pow(1.0 - r[j] * r[j], alpha);
    }
    w *= factor_value(omega, expr::Coordinates(z), z, "radial weight");
    rule.nodes.push_back(std::move(r));
    rule.weights.push_back(w);
  }
  return rule;
}

}  // namespace detail

// gamma_m = int_{I^n} prod_k r_k^(2 m_k) (1-r_k^2)^alpha r_k omega(r) dr.
inline double radial_moment(const MultiIndex& m, const Weight& w, double alpha, const QuadratureSpec& q = {}) {
  if (!w.is_product()) throw invalid_argument_error("radial_moment needs a radial x angular weight");
  const auto rule =
      detail::radial_moment_rule(std::get<weight_kind::RadialAngularProduct>(w.kind()).radial, w.dimension(), alpha, q);
  std::vector<double> terms(rule.weights.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double t = rule.weights[i];
    for (std::size_t k = 0; k < m.size(); ++k) t *= std::pow(rule.nodes[i][k], 2.0 * m[k]);
    terms[i] = t;
  }
  return detail::pairwise_sum(std::move(terms));
}

// ||f||^2 = (int_{T^n} nu d theta) * sum_m |a_m|^2 gamma_m.
inline NormResult product_exact_norm(const PowerSeries& f, const Weight& w, double alpha, const QuadratureSpec& q = {},
                                     Parallelism par = {}) {
  if (!w.is_product()) throw invalid_argument_error("product_exact_norm needs a radial x angular weight, got " + w.describe());
  if (w.dimension() != f.dimension()) throw invalid_argument_error("weight and series dimensions differ");
  if (!(alpha >= 0.0)) throw invalid_argument_error("alpha must be >= 0");
  q.validate();
  const auto& kind = std::get<weight_kind::RadialAngularProduct>(w.kind());
  const double torus = detail::torus_integral(kind.angular, f.dimension(), q, par);
  const auto rule = detail::radial_moment_rule(kind.radial, f.dimension(), alpha, q);
  std::vector<std::pair<std::string, double>> pieces;
  for (const auto& [m, a] : f.coefficients()) {
    std::vector<double> terms(rule.weights.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      double t = rule.weights[i];
      for (std::size_t k = 0; k < m.size(); ++k) t *= std::pow(rule.nodes[i][k], 2.0 * m[k]);
      terms[i] = t;
    }
    pieces.emplace_back(m.to_string(), torus * std::norm(a) * detail::pairwise_sum(std::move(terms)));
  }
  return detail::finish(std::move(pieces), 2.0);
}

// Dispatches on the spec's kind.
inline NormResult norm(const PowerSeries& f, const NormSpec& s, Parallelism par = {}) {
  switch (s.kind) {
    case NormKind::bergman_polydisk:
    case NormKind::bergman_ball: return bergman_norm(f, s, par);
    case NormKind::besov_ball:
    case NormKind::dirichlet_ball: return besov_ball_norm(f, s, par);
    case NormKind::radial_besov_polydisk: return radial_besov_norm(f, s, par);
    case NormKind::angular_exact:
      s.validate();
      detail::require_dimension(f, s);
      return angular_exact_norm(f, s.weight, s.alpha, s.quadrature, par);
    case NormKind::product_exact:
      s.validate();
      detail::require_dimension(f, s);
      return product_exact_norm(f, s.weight, s.alpha, s.quadrature, par);
  }
  throw invalid_argument_error("unknown norm kind");
}

// Norm of the Taylor tail f - truncate(f, k), computed coefficientwise.
inline double taylor_error(const PowerSeries& f, unsigned k, const NormSpec& s, Parallelism par = {}) {
  if (s.kind != NormKind::angular_exact && s.kind != NormKind::product_exact)
    throw invalid_argument_error("taylor_error needs an exact angular or product norm spec");
  return norm(f - truncate(f, k), s, par).value;
}

// Values of the Besov norm as the dtau truncation radius approaches 1:
// rho_max = 1 - 2^(-4(j+1)) for j = 0..levels-1.
inline std::vector<std::pair<double, NormResult>> besov_rho_sweep(const PowerSeries& f, NormSpec s, std::size_t levels,
                                                                  Parallelism par = {}) {
  if (levels < 2) throw invalid_argument_error("rho_max sweep needs at least 2 levels");
  std::vector<std::pair<double, NormResult>> out;
  for (std::size_t j = 0; j < levels; ++j) {
    s.rho_max = 1.0 - std::ldexp(1.0, -4 * static_cast<int>(j + 1));
    out.emplace_back(s.rho_max, besov_ball_norm(f, s, par));
  }
  return out;
}

}  // namespace bergman
