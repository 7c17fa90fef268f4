#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bergman/errors.hpp"

namespace bergman {

using complex = std::complex<double>;
using Point = std::vector<complex>;

// Exponent tuple m = (m_1, ..., m_n) of the monomial z^m.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<unsigned> entries) : entries_(std::move(entries)) {}
  MultiIndex(std::initializer_list<unsigned> entries) : entries_(entries) {}

  static MultiIndex zero(std::size_t n) { return MultiIndex(std::vector<unsigned>(n, 0u)); }

  std::size_t size() const noexcept { return entries_.size(); }
  unsigned operator[](std::size_t j) const { return entries_[j]; }
  unsigned& operator[](std::size_t j) { return entries_[j]; }
  std::span<const unsigned> entries() const noexcept { return entries_; }

  unsigned degree() const noexcept { return std::accumulate(entries_.begin(), entries_.end(), 0u); }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t j = 0; j < entries_.size(); ++j) {
      if (j) s += ',';
      s += std::to_string(entries_[j]);
    }
    return s + ")";
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<unsigned> entries_;
};

// Graded lexicographic order: total degree first, then entries lexicographically
// with larger leading exponents first, so (1,0) precedes (0,1).
struct GradedLex {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return std::lexicographical_compare(a.entries().begin(), a.entries().end(), b.entries().begin(),
                                        b.entries().end(), std::greater<>{});
  }
};

// All multi-indices of length n and total degree exactly d, in graded-lex order.
inline std::vector<MultiIndex> indices_of_degree(std::size_t n, unsigned d) {
  std::vector<MultiIndex> out;
  if (n == 0) return out;
  std::vector<unsigned> cur(n, 0u);
  auto rec = [&](auto&& self, std::size_t j, unsigned left) -> void {
    if (j + 1 == n) {
      cur[j] = left;
      out.emplace_back(cur);
      return;
    }
    for (unsigned v = left + 1; v-- > 0;) {
      cur[j] = v;
      self(self, j + 1, left - v);
    }
  };
  rec(rec, 0, d);
  return out;
}

// Truncated multi-index Taylor expansion f = sum_m a_m z^m with |m| <= max_degree.
// Values are immutable after construction; exact zero coefficients are not stored.
class PowerSeries {
 public:
  using Coefficients = std::map<MultiIndex, complex, GradedLex>;

  PowerSeries(std::size_t dimension, unsigned max_degree, Coefficients coefficients = {})
      : dimension_(dimension), max_degree_(max_degree) {
    if (dimension == 0) throw invalid_argument_error("power series dimension must be positive");
    for (auto& [m, a] : coefficients) {
      if (m.size() != dimension)
        throw invalid_argument_error("multi-index " + m.to_string() + " does not have length " +
                                     std::to_string(dimension));
      if (m.degree() > max_degree)
        throw invalid_argument_error("multi-index " + m.to_string() + " exceeds max_degree " +
                                     std::to_string(max_degree));
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw invalid_argument_error("non-finite coefficient at " + m.to_string());
      if (a != complex{}) coefficients_.emplace(m, a);
    }
  }

  // Series whose max_degree is the largest stored degree.
  static PowerSeries from_terms(std::size_t dimension, Coefficients coefficients) {
    unsigned deg = 0;
    for (const auto& [m, a] : coefficients) deg = std::max(deg, m.degree());
    return PowerSeries(dimension, deg, std::move(coefficients));
  }

  static PowerSeries constant(std::size_t dimension, complex c) {
    return PowerSeries(dimension, 0, {{MultiIndex::zero(dimension), c}});
  }

  static PowerSeries monomial(const MultiIndex& m, complex c = 1.0) {
    return PowerSeries(m.size(), m.degree(), {{m, c}});
  }

  std::size_t dimension() const noexcept { return dimension_; }
  unsigned max_degree() const noexcept { return max_degree_; }
  const Coefficients& coefficients() const noexcept { return coefficients_; }
  bool is_zero() const noexcept { return coefficients_.empty(); }

  complex coefficient(const MultiIndex& m) const {
    auto it = coefficients_.find(m);
    return it == coefficients_.end() ? complex{} : it->second;
  }

  // Largest degree that actually carries a nonzero coefficient.
  unsigned effective_degree() const noexcept {
    return coefficients_.empty() ? 0u : coefficients_.rbegin()->first.degree();
  }

  friend bool operator==(const PowerSeries& a, const PowerSeries& b) {
    return a.dimension_ == b.dimension_ && a.coefficients_ == b.coefficients_;
  }

 private:
  std::size_t dimension_;
  unsigned max_degree_;
  Coefficients coefficients_;
};

namespace detail {

inline void require_same_dimension(const PowerSeries& a, const PowerSeries& b) {
  if (a.dimension() != b.dimension())
    throw invalid_argument_error("power series dimensions differ: " + std::to_string(a.dimension()) +
                                 " vs " + std::to_string(b.dimension()));
}

// m! / (m - d)! as an exact integer while it fits in 64 bits.
inline double falling_factorial(unsigned m, unsigned d) {
  std::uint64_t exact = 1;
  double approx = 1.0;
  bool overflowed = false;
  for (unsigned i = 0; i < d; ++i) {
    const std::uint64_t factor = m - i;
    if (!overflowed && __builtin_mul_overflow(exact, factor, &exact)) {
      overflowed = true;
      approx = 1.0;
      for (unsigned j = 0; j < i; ++j) approx *= static_cast<double>(m - j);
    }
    if (overflowed) approx *= static_cast<double>(factor);
  }
  return overflowed ? approx : static_cast<double>(exact);
}

}  // namespace detail

inline PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
  detail::require_same_dimension(a, b);
  auto c = a.coefficients();
  for (const auto& [m, v] : b.coefficients()) c[m] += v;
  return PowerSeries(a.dimension(), std::max(a.max_degree(), b.max_degree()), std::move(c));
}

inline PowerSeries operator*(complex s, const PowerSeries& f) {
  PowerSeries::Coefficients c;
  for (const auto& [m, v] : f.coefficients()) c.emplace(m, s * v);
  return PowerSeries(f.dimension(), f.max_degree(), std::move(c));
}

inline PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
  detail::require_same_dimension(a, b);
  auto c = a.coefficients();
  for (const auto& [m, v] : b.coefficients()) c[m] -= v;
  return PowerSeries(a.dimension(), std::max(a.max_degree(), b.max_degree()), std::move(c));
}

namespace detail {

// Plain complex product without the inf/nan recovery of operator*.
inline complex mul(complex a, complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

// sum_m a_m z^m, summed term by term in graded-lex order.
inline complex evaluate(const PowerSeries& f, std::span<const complex> z) {
  if (z.size() != f.dimension())
    throw invalid_argument_error("evaluation point has length " + std::to_string(z.size()) +
                                 ", series dimension is " + std::to_string(f.dimension()));
  const std::size_t n = f.dimension();
  const unsigned deg = f.effective_degree();
  // powers[j * (deg + 1) + k] = z_j^k
  std::vector<complex> powers(n * (deg + 1));
  for (std::size_t j = 0; j < n; ++j) {
    complex p = 1.0;
    for (unsigned k = 0; k <= deg; ++k) {
      powers[j * (deg + 1) + k] = p;
      p = detail::mul(p, z[j]);
    }
  }
  complex sum{};
  for (const auto& [m, a] : f.coefficients()) {
    complex term = a;
    for (std::size_t j = 0; j < n; ++j)
      if (m[j]) term = detail::mul(term, powers[j * (deg + 1) + m[j]]);
    sum += term;
  }
  return sum;
}

// Flattened copy of a series for repeated evaluation. Same products and
// summation order as evaluate(), so the results are bit-identical.
class SeriesEvaluator {
 public:
  explicit SeriesEvaluator(const PowerSeries& f) : n_(f.dimension()), deg_(f.effective_degree()) {
    coefficients_.reserve(f.coefficients().size());
    exponents_.reserve(f.coefficients().size() * n_);
    for (const auto& [m, a] : f.coefficients()) {
      coefficients_.push_back(a);
      for (std::size_t j = 0; j < n_; ++j) exponents_.push_back(m[j]);
    }
  }

  complex operator()(std::span<const complex> z) const {
    if (z.size() != n_)
      throw invalid_argument_error("evaluation point has length " + std::to_string(z.size()) +
                                   ", series dimension is " + std::to_string(n_));
    thread_local std::vector<complex> powers;
    const std::size_t stride = deg_ + 1;
    powers.resize(n_ * stride);
    for (std::size_t j = 0; j < n_; ++j) {
      complex p = 1.0;
      for (std::size_t k = 0; k < stride; ++k) {
        powers[j * stride + k] = p;
        p = detail::mul(p, z[j]);
      }
    }
    complex sum{};
    const unsigned* e = exponents_.data();
    for (std::size_t t = 0; t < coefficients_.size(); ++t, e += n_) {
      complex term = coefficients_[t];
      for (std::size_t j = 0; j < n_; ++j)
        if (e[j]) term = detail::mul(term, powers[j * stride + e[j]]);
      sum += term;
    }
    return sum;
  }

 private:
  std::size_t n_;
  unsigned deg_;
  std::vector<complex> coefficients_;
  std::vector<unsigned> exponents_;
};

// f_r(z) = f(r z): the coefficient at m becomes r^|m| a_m.
inline PowerSeries dilate(const PowerSeries& f, double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw invalid_argument_error("dilation radius must lie in [0, 1], got " + std::to_string(r));
  PowerSeries::Coefficients c;
  for (const auto& [m, a] : f.coefficients()) c.emplace(m, a * std::pow(r, static_cast<double>(m.degree())));
  return PowerSeries(f.dimension(), f.max_degree(), std::move(c));
}

inline PowerSeries partial_derivative(const PowerSeries& f, const MultiIndex& d) {
  if (d.size() != f.dimension())
    throw invalid_argument_error("derivative multi-index " + d.to_string() + " does not match dimension " +
                                 std::to_string(f.dimension()));
  const unsigned order = d.degree();
  const unsigned new_max = f.max_degree() > order ? f.max_degree() - order : 0u;
  PowerSeries::Coefficients c;
  for (const auto& [m, a] : f.coefficients()) {
    std::vector<unsigned> shifted(m.size());
    double factor = 1.0;
    bool vanishes = false;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] < d[j]) {
        vanishes = true;
        break;
      }
      shifted[j] = m[j] - d[j];
      factor *= detail::falling_factorial(m[j], d[j]);
    }
    if (!vanishes) c.emplace(MultiIndex(std::move(shifted)), a * factor);
  }
  return PowerSeries(f.dimension(), new_max, std::move(c));
}

// Rf = sum_k z_k df/dz_k, i.e. the coefficient at m is multiplied by |m|.
inline PowerSeries radial_derivative(const PowerSeries& f) {
  PowerSeries::Coefficients c;
  for (const auto& [m, a] : f.coefficients())
    if (m.degree()) c.emplace(m, a * static_cast<double>(m.degree()));
  return PowerSeries(f.dimension(), f.max_degree(), std::move(c));
}

inline PowerSeries truncate(const PowerSeries& f, unsigned k) {
  PowerSeries::Coefficients c;
  for (const auto& [m, a] : f.coefficients())
    if (m.degree() <= k) c.emplace(m, a);
  return PowerSeries(f.dimension(), std::min(k, f.max_degree()), std::move(c));
}

inline PowerSeries homogeneous_part(const PowerSeries& f, unsigned k) {
  PowerSeries::Coefficients c;
  for (const auto& [m, a] : f.coefficients())
    if (m.degree() == k) c.emplace(m, a);
  return PowerSeries(f.dimension(), f.max_degree(), std::move(c));
}

}  // namespace bergman
