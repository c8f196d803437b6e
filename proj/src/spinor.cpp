#include "cliffdyn/spinor.hpp"

#include <array>
#include <stdexcept>

namespace cliffdyn {

namespace {

std::array<Matrix2c, 4> make_sigmas() {
  std::array<Matrix2c, 4> s;
  s[0] << 1.0, 0.0, 0.0, 1.0;
  s[1] << 0.0, 1.0, 1.0, 0.0;
  s[2] << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  s[3] << 1.0, 0.0, 0.0, -1.0;
  return s;
}

const std::array<Matrix2c, 4>& sigmas() {
  static const std::array<Matrix2c, 4> s = make_sigmas();
  return s;
}

}  // namespace

const Matrix2c& sigma(int mu) {
  if (mu < 0 || mu > 3) throw std::out_of_range("sigma index out of range");
  return sigmas()[static_cast<std::size_t>(mu)];
}

const Matrix2c& epsilon() {
  static const Matrix2c eps = (Matrix2c() << 0.0, 1.0, -1.0, 0.0).finished();
  return eps;
}

Matrix2c vec_to_spinor(const FourVectorC& v) {
  Matrix2c s = Matrix2c::Zero();
  for (int mu = 0; mu < 4; ++mu) s += v(mu) * sigma(mu);
  return s;
}

Matrix2c vec_to_spinor(const FourVector& v) { return vec_to_spinor(FourVectorC(v.cast<Complex>())); }

FourVectorC spinor_to_vec(const Matrix2c& s) {
  FourVectorC v;
  for (int mu = 0; mu < 4; ++mu) v(mu) = 0.5 * (sigma(mu) * s).trace();
  return v;
}

FourVector spinor_to_vec_real(const Matrix2c& s) { return spinor_to_vec(s).real(); }

Complex minkowski_norm(const Matrix2c& s) { return s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0); }

double minkowski_dot(const FourVector& a, const FourVector& b) {
  return a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3);
}

Complex minkowski_dot(const FourVectorC& a, const FourVectorC& b) {
  return a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3);
}

FourVector lower_vector(const FourVector& v) { return FourVector(v(0), -v(1), -v(2), -v(3)); }

Spinor raise_index(const Spinor& lower) { return epsilon() * lower; }

Spinor lower_index(const Spinor& upper) { return epsilon().transpose() * upper; }

Matrix2c lower_indices(const Matrix2c& upper) { return epsilon().transpose() * upper * epsilon(); }

Matrix2c raise_indices(const Matrix2c& lower) { return epsilon() * lower * epsilon().transpose(); }

Matrix2c epsilon_raise_lower(const Matrix2c& s, SpinorIndices from, SpinorIndices to) {
  if (from == to) return s;
  return to == SpinorIndices::Lower ? lower_indices(s) : raise_indices(s);
}

double four_vector_identity_residual(const Matrix2c& upper) {
  const Matrix2c lower = lower_indices(upper);
  const Matrix2c contraction = lower * upper.transpose();
  const Complex half_trace = 0.5 * contraction.trace();
  return (contraction - half_trace * Matrix2c::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace cliffdyn
