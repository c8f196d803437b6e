#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cliffdyn {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Matrix2c = Eigen::Matrix2cd;

inline constexpr Complex kI{0.0, 1.0};

// Malformed or inconsistent user input (CLI exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Documented precondition refused, e.g. proper time undefined on the window (exit code 3).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical step produced non-finite values or failed to converge (exit code 1).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cliffdyn
