#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "bergman/errors.hpp"
#include "bergman/expr.hpp"
#include "bergman/series.hpp"

namespace bergman {

enum class Domain { polydisk, ball };

inline std::string_view to_string(Domain d) { return d == Domain::polydisk ? "polydisk" : "ball"; }

// max_j |z_j| on the polydisk, the Euclidean norm on the ball.
inline double domain_size(std::span<const complex> z, Domain d) {
  double s = 0.0;
  for (const auto& zj : z) s = d == Domain::polydisk ? std::max(s, std::norm(zj)) : s + std::norm(zj);
  return std::sqrt(s);
}

namespace weight_kind {

// prod_k (alpha + 1) (1 - |z_k|^2)^alpha
struct StandardAlpha {
  double alpha;
};

enum class GaussianMode { full, real_part };

// exp(-beta |z|^2), or exp(-beta sum_k x_k^2) in real-part mode.
struct Gaussian {
  double beta;
  GaussianMode mode = GaussianMode::full;
};

// exp(|z|)
struct ExpModulus {};

// Depends only on the arguments theta_1..theta_n.
struct Angular {
  expr::NodePtr angular;
};

// omega(r_1..r_n) * nu(theta_1..theta_n)
struct RadialAngularProduct {
  expr::NodePtr radial;
  expr::NodePtr angular;
};

struct Expression {
  expr::NodePtr expression;
};

}  // namespace weight_kind

using WeightKind = std::variant<weight_kind::StandardAlpha, weight_kind::Gaussian, weight_kind::ExpModulus,
                                weight_kind::Angular, weight_kind::RadialAngularProduct,
                                weight_kind::Expression>;

// Positive weight w on D^n or B_n. Immutable; evaluation is pure and thread-safe.
class Weight {
 public:
  Weight(std::size_t dimension, WeightKind kind) : dimension_(dimension), kind_(std::move(kind)) {
    if (dimension == 0) throw invalid_argument_error("weight dimension must be positive");
    std::visit([this](const auto& k) { validate(k); }, kind_);
  }

  static Weight standard_alpha(std::size_t n, double alpha) { return {n, weight_kind::StandardAlpha{alpha}}; }
  static Weight gaussian(std::size_t n, double beta,
                         weight_kind::GaussianMode mode = weight_kind::GaussianMode::full) {
    return {n, weight_kind::Gaussian{beta, mode}};
  }
  static Weight exp_modulus(std::size_t n) { return {n, weight_kind::ExpModulus{}}; }
  static Weight angular(std::size_t n, std::string_view src) {
    return {n, weight_kind::Angular{expr::parse(src, n)}};
  }
  static Weight product(std::size_t n, std::string_view radial, std::string_view angular) {
    return {n, weight_kind::RadialAngularProduct{expr::parse(radial, n), expr::parse(angular, n)}};
  }
  static Weight expression(std::size_t n, std::string_view src) {
    return {n, weight_kind::Expression{expr::parse(src, n)}};
  }
  // w == 1
  static Weight unit(std::size_t n) { return expression(n, "1"); }

  std::size_t dimension() const noexcept { return dimension_; }
  const WeightKind& kind() const noexcept { return kind_; }

  bool is_angular() const noexcept { return std::holds_alternative<weight_kind::Angular>(kind_); }
  bool is_product() const noexcept { return std::holds_alternative<weight_kind::RadialAngularProduct>(kind_); }

  // Stable textual id used in reports.
  std::string describe() const {
    using namespace weight_kind;
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, StandardAlpha>) {
            return "standard_alpha(alpha=" + expr::detail::format_number(k.alpha) + ")";
          } else if constexpr (std::is_same_v<T, Gaussian>) {
            return std::string(k.mode == GaussianMode::full ? "gaussian" : "gaussian_real") +
                   "(beta=" + expr::detail::format_number(k.beta) + ")";
          } else if constexpr (std::is_same_v<T, ExpModulus>) {
            return "exp_modulus";
          } else if constexpr (std::is_same_v<T, Angular>) {
            return "angular:" + expr::to_string(k.angular);
          } else if constexpr (std::is_same_v<T, RadialAngularProduct>) {
            return "product:" + expr::to_string(k.radial) + "|" + expr::to_string(k.angular);
          } else {
            return "expr:" + expr::to_string(k.expression);
          }
        },
        kind_);
  }

 private:
  void validate(const weight_kind::StandardAlpha& k) const {
    if (!(k.alpha >= 0.0) || !std::isfinite(k.alpha))
      throw invalid_argument_error("standard_alpha requires alpha >= 0");
  }
  void validate(const weight_kind::Gaussian& k) const {
    if (!(k.beta > 0.0) || !std::isfinite(k.beta)) throw invalid_argument_error("gaussian requires beta > 0");
  }
  void validate(const weight_kind::ExpModulus&) const {}
  void validate(const weight_kind::Angular& k) const { require_only(k.angular, expr::VarKind::theta, "angular"); }
  void validate(const weight_kind::RadialAngularProduct& k) const {
    require_only(k.radial, expr::VarKind::r, "radial factor");
    require_only(k.angular, expr::VarKind::theta, "angular factor");
  }
  void validate(const weight_kind::Expression&) const {}

  static void require_only(const expr::NodePtr& e, expr::VarKind allowed, const char* what) {
    for (auto v : expr::variables_used(e))
      if (v != allowed)
        throw invalid_argument_error(std::string(what) + " expression may only use " +
                                     (allowed == expr::VarKind::theta ? "th<k>" : "r<k>") + " variables");
  }

  std::size_t dimension_;
  WeightKind kind_;
};

namespace detail {

// Weight value without positivity or domain checks.
inline double raw_weight(const Weight& w, std::span<const complex> z) {
  using namespace weight_kind;
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, StandardAlpha>) {
          double v = 1.0;
          for (const auto& zj : z) v *= (k.alpha + 1.0) * std::pow(1.0 - std::norm(zj), k.alpha);
          return v;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          double s = 0.0;
          for (const auto& zj : z) s += k.mode == GaussianMode::full ? std::norm(zj) : zj.real() * zj.real();
          return std::exp(-k.beta * s);
        } else if constexpr (std::is_same_v<T, ExpModulus>) {
          double s = 0.0;
          for (const auto& zj : z) s += std::norm(zj);
          return std::exp(std::sqrt(s));
        } else if constexpr (std::is_same_v<T, Angular>) {
          return expr::evaluate(k.angular, expr::Coordinates(z));
        } else if constexpr (std::is_same_v<T, RadialAngularProduct>) {
          const expr::Coordinates c(z);
          return expr::evaluate(k.radial, c) * expr::evaluate(k.angular, c);
        } else {
          return expr::evaluate(k.expression, expr::Coordinates(z));
        }
      },
      w.kind());
}

}  // namespace detail

// w(z) for z in the open unit polydisk (which contains the ball). Fails on
// points outside the domain and on non-positive or non-finite values.
inline double evaluate_weight(const Weight& w, std::span<const complex> z) {
  if (z.size() != w.dimension())
    throw invalid_argument_error("weight of dimension " + std::to_string(w.dimension()) +
                                 " evaluated at a point of length " + std::to_string(z.size()));
  auto pz = [&] { return Point(z.begin(), z.end()); };
  if (domain_size(z, Domain::polydisk) >= 1.0) throw weight_domain_error("point outside the open domain", pz());
  double v;
  try {
    v = detail::raw_weight(w, z);
  } catch (const expr::expr_domain_error& e) {
    throw weight_domain_error(std::string("weight ") + w.describe() + ": " + e.what(), pz());
  }
  if (!std::isfinite(v) || v <= 0.0)
    throw weight_domain_error("weight " + w.describe() + " is not positive and finite (" +
                                  expr::detail::format_number(v) + ")",
                              pz());
  return v;
}

// r^k w(z/r) / w(z): the quantity bounded by C in the dilation condition.
inline double dilation_ratio(const Weight& w, std::span<const complex> z, double r, unsigned k,
                             Domain domain = Domain::polydisk) {
  if (!(r > 0.0 && r < 1.0)) throw invalid_argument_error("dilation_ratio requires 0 < r < 1");
  if (!(domain_size(z, domain) < r))
    throw invalid_argument_error("z/r leaves the " + std::string(to_string(domain)) + " (r = " +
                                 expr::detail::format_number(r) + ")");
  Point scaled(z.begin(), z.end());
  for (auto& s : scaled) s /= r;
  return std::pow(r, static_cast<double>(k)) * evaluate_weight(w, scaled) / evaluate_weight(w, z);
}

// Builds a weight from its CLI name: "standard_alpha", "gaussian", "gaussian_real",
// "exp_modulus", "angular:<expr>", "product:<radial expr>|<angular expr>", "expr:<expr>".
inline Weight weight_from_name(std::string_view name, std::size_t n, double alpha = 0.0, double beta = 1.0) {
  auto after = [&](std::string_view prefix) -> std::optional<std::string_view> {
    if (name.substr(0, prefix.size()) == prefix) return name.substr(prefix.size());
    return std::nullopt;
  };
  if (name == "standard_alpha") return Weight::standard_alpha(n, alpha);
  if (name == "gaussian") return Weight::gaussian(n, beta);
  if (name == "gaussian_real") return Weight::gaussian(n, beta, weight_kind::GaussianMode::real_part);
  if (name == "exp_modulus") return Weight::exp_modulus(n);
  if (auto src = after("angular:")) return Weight::angular(n, *src);
  if (auto src = after("expr:")) return Weight::expression(n, *src);
  if (auto src = after("product:")) {
    const auto bar = src->find('|');
    if (bar == std::string_view::npos)
      throw invalid_argument_error("product weight needs '<radial>|<angular>'");
    return Weight::product(n, src->substr(0, bar), src->substr(bar + 1));
  }
  throw invalid_argument_error("unknown weight '" + std::string(name) + "'");
}

}  // namespace bergman
