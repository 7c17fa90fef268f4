#pragma once

// Expression language for user-defined weights.
//
//   expr   := term (("+" | "-") term)*
//   term   := factor (("*" | "/") factor)*
//   factor := "-" factor | base ("^" factor)?
//   base   := NUMBER | VAR | FUNC "(" expr ")" | "pow" "(" expr "," expr ")" | "(" expr ")"
//
// VAR is one of x<k>, y<k>, r<k>, th<k> (1 <= k <= n), absz, or the constant pi.
// FUNC is one of exp, log, sqrt, sin, cos, abs. Whitespace is insignificant.
// "^" is right-associative and binds tighter than unary minus: -x^2 == -(x^2).

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bergman/errors.hpp"

namespace bergman::expr {

enum class VarKind { x, y, r, theta, abs_z };
enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { exp, log, sqrt, sin, cos, abs, pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
  double value;
};
struct Variable {
  VarKind kind;
  std::size_t index;  // zero-based coordinate; unused for abs_z
};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinaryOp op;
  NodePtr lhs, rhs;
};
struct Call {
  Function fn;
  std::vector<NodePtr> args;
};

struct Node {
  std::variant<Number, Variable, Negate, Binary, Call> data;
};

// Raised by evaluation when an operation leaves the real domain.
class expr_domain_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

inline bool equal(const NodePtr& a, const NodePtr& b);

namespace detail {

struct EqualVisitor {
  const Node& other;
  bool operator()(const Number& v) const {
    auto* o = std::get_if<Number>(&other.data);
    return o && o->value == v.value;
  }
  bool operator()(const Variable& v) const {
    auto* o = std::get_if<Variable>(&other.data);
    return o && o->kind == v.kind && o->index == v.index;
  }
  bool operator()(const Negate& v) const {
    auto* o = std::get_if<Negate>(&other.data);
    return o && equal(o->operand, v.operand);
  }
  bool operator()(const Binary& v) const {
    auto* o = std::get_if<Binary>(&other.data);
    return o && o->op == v.op && equal(o->lhs, v.lhs) && equal(o->rhs, v.rhs);
  }
  bool operator()(const Call& v) const {
    auto* o = std::get_if<Call>(&other.data);
    if (!o || o->fn != v.fn || o->args.size() != v.args.size()) return false;
    for (std::size_t i = 0; i < v.args.size(); ++i)
      if (!equal(o->args[i], v.args[i])) return false;
    return true;
  }
};

inline NodePtr make(auto value) { return std::make_shared<const Node>(Node{std::move(value)}); }

inline constexpr std::array<std::pair<std::string_view, Function>, 7> kFunctions{{
    {"exp", Function::exp},
    {"log", Function::log},
    {"sqrt", Function::sqrt},
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"abs", Function::abs},
    {"pow", Function::pow},
}};

inline std::string_view function_name(Function fn) {
  for (auto [name, f] : kFunctions)
    if (f == fn) return name;
  return "?";
}

class Parser {
 public:
  Parser(std::string_view src, std::size_t dimension) : src_(src), n_(dimension) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ == src_.size()) throw parse_error("empty expression", pos_);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) throw parse_error(std::string("unexpected '") + src_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ == src_.size()) throw parse_error(std::string("expected '") + c + "' but reached end of input", pos_);
      throw parse_error(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = make(Binary{BinaryOp::add, lhs, parse_term()});
      else if (accept('-')) lhs = make(Binary{BinaryOp::sub, lhs, parse_term()});
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    for (;;) {
      if (accept('*')) lhs = make(Binary{BinaryOp::mul, lhs, parse_factor()});
      else if (accept('/')) lhs = make(Binary{BinaryOp::div, lhs, parse_factor()});
      else return lhs;
    }
  }

  NodePtr parse_factor() {
    if (accept('-')) return make(Negate{parse_factor()});
    NodePtr base = parse_base();
    if (accept('^')) return make(Binary{BinaryOp::pow, base, parse_factor()});
    return base;
  }

  NodePtr parse_base() {
    skip_ws();
    if (pos_ == src_.size()) throw parse_error("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw parse_error(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t d = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++d;
      return d;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw parse_error("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw parse_error("malformed exponent", start);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc{} || ptr != src_.data() + pos_ || !std::isfinite(value))
      throw parse_error("number out of range", start);
    return make(Number{value});
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view id = src_.substr(start, pos_ - start);

    for (auto [name, fn] : kFunctions) {
      if (id != name) continue;
      if (!accept('(')) throw parse_error("function '" + std::string(id) + "' requires '('", pos_);
      std::vector<NodePtr> args{parse_expr()};
      if (fn == Function::pow) {
        expect(',');
        args.push_back(parse_expr());
      }
      expect(')');
      return make(Call{fn, std::move(args)});
    }
    if (id == "absz") return make(Variable{VarKind::abs_z, 0});
    if (id == "pi") return make(Number{std::numbers::pi});

    auto indexed = [&](std::string_view prefix, VarKind kind) -> NodePtr {
      if (id.size() <= prefix.size() || id.substr(0, prefix.size()) != prefix) return nullptr;
      const std::string_view digits = id.substr(prefix.size());
      for (char d : digits)
        if (!std::isdigit(static_cast<unsigned char>(d))) return nullptr;
      std::size_t k = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (ec != std::errc{} || k < 1 || k > n_)
        throw parse_error("variable '" + std::string(id) + "' out of range 1.." + std::to_string(n_), start);
      return make(Variable{kind, k - 1});
    };
    // "th" must be tried before the one-letter prefixes.
    for (auto [prefix, kind] : {std::pair{std::string_view("th"), VarKind::theta},
                                std::pair{std::string_view("x"), VarKind::x},
                                std::pair{std::string_view("y"), VarKind::y},
                                std::pair{std::string_view("r"), VarKind::r}}) {
      if (NodePtr v = indexed(prefix, kind)) return v;
    }
    throw parse_error("unknown identifier '" + std::string(id) + "'", start);
  }

  std::string_view src_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void collect(const NodePtr& node, std::set<VarKind>& kinds) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Variable>) kinds.insert(v.kind);
        else if constexpr (std::is_same_v<T, Negate>) collect(v.operand, kinds);
        else if constexpr (std::is_same_v<T, Binary>) {
          collect(v.lhs, kinds);
          collect(v.rhs, kinds);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : v.args) collect(a, kinds);
        }
      },
      node->data);
}

}  // namespace detail

inline bool equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return std::visit(detail::EqualVisitor{*b}, a->data);
}

inline NodePtr parse(std::string_view src, std::size_t dimension) {
  return detail::Parser(src, dimension).parse();
}

// Fully parenthesised rendering; parse(to_string(e)) reproduces e node for node.
inline std::string to_string(const NodePtr& node) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Number>) {
          return detail::format_number(v.value);
        } else if constexpr (std::is_same_v<T, Variable>) {
          const std::string k = std::to_string(v.index + 1);
          switch (v.kind) {
            case VarKind::x: return "x" + k;
            case VarKind::y: return "y" + k;
            case VarKind::r: return "r" + k;
            case VarKind::theta: return "th" + k;
            case VarKind::abs_z: return "absz";
          }
          return "?";
        } else if constexpr (std::is_same_v<T, Negate>) {
          return "(-" + to_string(v.operand) + ")";
        } else if constexpr (std::is_same_v<T, Binary>) {
          static constexpr char ops[] = {'+', '-', '*', '/', '^'};
          return "(" + to_string(v.lhs) + ops[static_cast<int>(v.op)] + to_string(v.rhs) + ")";
        } else {
          std::string s(detail::function_name(v.fn));
          s += "(";
          for (std::size_t i = 0; i < v.args.size(); ++i) s += (i ? "," : "") + to_string(v.args[i]);
          return s + ")";
        }
      },
      node->data);
}

inline std::set<VarKind> variables_used(const NodePtr& node) {
  std::set<VarKind> kinds;
  detail::collect(node, kinds);
  return kinds;
}

// Coordinates of a point in the forms the expression language can reference.
// theta_k is the principal argument mapped to [0, 2*pi), with arg(0) = 0.
// Refers to z without copying it; z must outlive the Coordinates.
struct Coordinates {
  std::span<const std::complex<double>> z;
  double abs_z = 0.0;

  explicit Coordinates(std::span<const std::complex<double>> point) : z(point) {
    double sq = 0.0;
    for (const auto& c : z) sq += std::norm(c);
    abs_z = std::sqrt(sq);
  }

  double x(std::size_t j) const { return z[j].real(); }
  double y(std::size_t j) const { return z[j].imag(); }
  double r(std::size_t j) const { return std::abs(z[j]); }
  double theta(std::size_t j) const {
    if (z[j] == std::complex<double>{}) return 0.0;
    double t = std::atan2(z[j].imag(), z[j].real());
    if (t < 0.0) t += 2.0 * std::numbers::pi;
    if (t >= 2.0 * std::numbers::pi) t = 0.0;
    return t;
  }
};

namespace detail {

inline double checked_pow(double base, double exponent) {
  if (base < 0.0 && exponent != std::floor(exponent))
    throw expr_domain_error("non-integer power " + format_number(exponent) + " of negative base " +
                            format_number(base));
  return std::pow(base, exponent);
}

}  // namespace detail

inline double evaluate(const NodePtr& node, const Coordinates& c) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Number>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          switch (v.kind) {
            case VarKind::x: return c.x(v.index);
            case VarKind::y: return c.y(v.index);
            case VarKind::r: return c.r(v.index);
            case VarKind::theta: return c.theta(v.index);
            case VarKind::abs_z: return c.abs_z;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return -evaluate(v.operand, c);
        } else if constexpr (std::is_same_v<T, Binary>) {
          const double a = evaluate(v.lhs, c);
          const double b = evaluate(v.rhs, c);
          switch (v.op) {
            case BinaryOp::add: return a + b;
            case BinaryOp::sub: return a - b;
            case BinaryOp::mul: return a * b;
            case BinaryOp::div: return a / b;
            case BinaryOp::pow: return detail::checked_pow(a, b);
          }
          return 0.0;
        } else {
          const double a = evaluate(v.args[0], c);
          switch (v.fn) {
            case Function::exp: return std::exp(a);
            case Function::log:
              if (a <= 0.0) throw expr_domain_error("log of non-positive value " + detail::format_number(a));
              return std::log(a);
            case Function::sqrt:
              if (a < 0.0) throw expr_domain_error("sqrt of negative value " + detail::format_number(a));
              return std::sqrt(a);
            case Function::sin: return std::sin(a);
            case Function::cos: return std::cos(a);
            case Function::abs: return std::abs(a);
            case Function::pow: return detail::checked_pow(a, evaluate(v.args[1], c));
          }
          return 0.0;
        }
      },
      node->data);
}

}  // namespace bergman::expr
