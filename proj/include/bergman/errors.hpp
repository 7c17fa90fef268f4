#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace bergman {

// Validation failures: bad arguments, malformed input, inconsistent specs.
// The CLI maps these to exit status 2.
class invalid_argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class invalid_spec_error : public invalid_argument_error {
 public:
  using invalid_argument_error::invalid_argument_error;
};

class parse_error : public invalid_argument_error {
 public:
  parse_error(const std::string& what, std::size_t offset)
      : invalid_argument_error(what + " at byte offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Numerical failures. The CLI maps these to exit status 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class weight_domain_error : public numerical_error {
 public:
  weight_domain_error(const std::string& what, std::vector<std::complex<double>> point)
      : numerical_error(what + " at z = " + format_point(point)), point_(std::move(point)) {}

  const std::vector<std::complex<double>>& point() const noexcept { return point_; }

  static std::string format_point(std::span<const std::complex<double>> z) {
    std::ostringstream os;
    os.precision(17);
    os << '(';
    for (std::size_t j = 0; j < z.size(); ++j) {
      if (j) os << ", ";
      os << z[j].real() << (z[j].imag() < 0 ? "-" : "+") << std::abs(z[j].imag()) << 'i';
    }
    os << ')';
    return os.str();
  }

 private:
  std::vector<std::complex<double>> point_;
};

class integration_error : public numerical_error {
 public:
  integration_error(const std::string& what, std::vector<std::complex<double>> node)
      : numerical_error(what + " at node " + weight_domain_error::format_point(node)),
        node_(std::move(node)) {}

  const std::vector<std::complex<double>>& node() const noexcept { return node_; }

 private:
  std::vector<std::complex<double>> node_;
};

}  // namespace bergman
