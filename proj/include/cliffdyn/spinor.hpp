#pragma once

// Four-vector / spinor dictionary. Metric (+,-,-,-); V^{AḂ} = Σ σ_μ V^μ with
// σ_0 = 1 and σ_1..σ_3 the Pauli matrices, so det V^{AḂ} = V·V.
//
// ε_{12} = ε^{12} = +1. Raising contracts from the left, ψ^A = ε^{AB} ψ_B;
// lowering contracts from the right, ψ_B = ψ^A ε_{AB}.

#include <Eigen/Dense>

#include "cliffdyn/types.hpp"

namespace cliffdyn {

using FourVector = Eigen::Vector4d;
using FourVectorC = Eigen::Vector4cd;
using Spinor = Eigen::Vector2cd;

inline constexpr double kMetric[4] = {1.0, -1.0, -1.0, -1.0};

/// σ_μ as a matrix with upper indices (A, Ḃ).
const Matrix2c& sigma(int mu);

/// ε^{AB} = ε_{AB} as a matrix: [[0, 1], [-1, 0]].
const Matrix2c& epsilon();

Matrix2c vec_to_spinor(const FourVectorC& v);
Matrix2c vec_to_spinor(const FourVector& v);

/// V^μ = ½ tr(σ_μ S). Exact left inverse of vec_to_spinor.
FourVectorC spinor_to_vec(const Matrix2c& s);
/// Real part of spinor_to_vec; intended for Hermitian S.
FourVector spinor_to_vec_real(const Matrix2c& s);

/// det S, which equals V^μV_μ for S = vec_to_spinor(V).
Complex minkowski_norm(const Matrix2c& s);
double minkowski_dot(const FourVector& a, const FourVector& b);
Complex minkowski_dot(const FourVectorC& a, const FourVectorC& b);
FourVector lower_vector(const FourVector& v);

Spinor raise_index(const Spinor& lower);
Spinor lower_index(const Spinor& upper);

enum class SpinorIndices { Upper, Lower };

/// Move both indices of a second-rank spinor between positions.
/// Lower: S_{AḂ} = S^{CḊ} ε_{CA} ε_{ḊḂ}. Upper is the inverse map.
Matrix2c epsilon_raise_lower(const Matrix2c& s, SpinorIndices from, SpinorIndices to);
Matrix2c lower_indices(const Matrix2c& upper);
Matrix2c raise_indices(const Matrix2c& lower);

/// max |V_{AĖ}V^{BĖ} − ½δ_A^B V_{FĖ}V^{FĖ}| for V given with upper indices.
double four_vector_identity_residual(const Matrix2c& upper);

}  // namespace cliffdyn
