#pragma once

// Grade-1 elements of a complexified real Clifford algebra Cl(p,q) and the
// constructive resolution of Hermitian matrices into Gram matrices of such
// elements.
//
// Only vectors and their scalar inner product a∙b = ½{a,b} are modelled. For
// generators the product is diagonal: gen_k ∙ gen_l = ±2 δ_kl according to the
// sign class of gen_k.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cliffdyn/types.hpp"

namespace cliffdyn {

class GeneratorSpace;
using SpacePtr = std::shared_ptr<const GeneratorSpace>;

/// A contiguous range of generators owned by one entity (particle, string
/// coefficient set, ...). The first half of the range holds positive
/// generators, the second half negative ones.
struct Block {
  std::string label;
  std::size_t offset = 0;
  std::size_t length = 0;

  std::size_t n_pos() const { return length / 2; }
  std::size_t n_neg() const { return length / 2; }
  /// Number of (E_i, F_i) pairs the block supports.
  std::size_t n_pairs() const { return length / 4; }
};

struct BlockRequest {
  std::string label;
  std::size_t n_pairs = 0;
};

class GeneratorSpace {
 public:
  /// n_pos generators with g∙g = +2 followed by n_neg with h∙h = −2. The
  /// whole range is registered as block "all" when n_pos == n_neg.
  static SpacePtr allocate(std::size_t n_pos, std::size_t n_neg);

  /// Entity-disjoint layout: each request receives 2·n_pairs positive and
  /// 2·n_pairs negative generators.
  static SpacePtr allocate_blocks(const std::vector<BlockRequest>& requests);

  std::size_t dim() const { return signs_.size(); }
  std::size_t n_pos() const { return n_pos_; }
  std::size_t n_neg() const { return signs_.size() - n_pos_; }
  int sign(std::size_t k) const { return signs_.at(k); }
  const std::vector<int>& signs() const { return signs_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  const Block& block(std::string_view label) const;
  bool has_block(std::string_view label) const;

  bool same_signature(const GeneratorSpace& other) const { return signs_ == other.signs_; }

 private:
  GeneratorSpace() = default;

  std::vector<int> signs_;
  std::size_t n_pos_ = 0;
  std::vector<Block> blocks_;
};

class ClVector {
 public:
  ClVector() = default;
  ClVector(SpacePtr space, CVector coeffs);

  static ClVector zero(SpacePtr space);
  /// The k-th generator; throws std::out_of_range past dim().
  static ClVector generator(SpacePtr space, std::size_t k);

  const SpacePtr& space() const { return space_; }
  const CVector& coeffs() const { return coeffs_; }
  CVector& coeffs() { return coeffs_; }
  std::size_t size() const { return static_cast<std::size_t>(coeffs_.size()); }

  ClVector conj() const;
  double max_abs() const;

  ClVector& operator+=(const ClVector& other);
  ClVector& operator-=(const ClVector& other);
  ClVector& operator*=(Complex s);

  friend ClVector operator+(ClVector a, const ClVector& b) { return a += b; }
  friend ClVector operator-(ClVector a, const ClVector& b) { return a -= b; }
  friend ClVector operator*(Complex s, ClVector a) { return a *= s; }
  friend ClVector operator*(ClVector a, Complex s) { return a *= s; }
  friend ClVector operator*(double s, ClVector a) { return a *= Complex(s, 0.0); }

 private:
  SpacePtr space_;
  CVector coeffs_;
};

inline ClVector conj(const ClVector& v) { return v.conj(); }

/// a∙b = ½{a,b}. Complex-bilinear; no implicit conjugation.
Complex bullet(const ClVector& a, const ClVector& b);

/// Throws InputError unless a and b live on compatible generator spaces.
void require_same_space(const ClVector& a, const ClVector& b);

/// Validated Hermitian matrix.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  /// Throws InputError if entries[i][j] and conj(entries[j][i]) differ by
  /// more than tol · max(1, max|entry|).
  explicit HermitianMatrix(CMatrix entries, double tol = 1e-14);

  Eigen::Index n() const { return entries_.rows(); }
  const CMatrix& entries() const { return entries_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  CMatrix entries_;
};

struct EigenDecomposition {
  CMatrix vectors;         ///< columns are orthonormal eigenvectors
  Eigen::VectorXd values;  ///< descending; ties keep original index order
  int sweeps = 0;
};

/// Cyclic complex Jacobi rotations. H = U·diag(λ)·U†.
EigenDecomposition hermitian_eig(const HermitianMatrix& h);
EigenDecomposition hermitian_eig(const CMatrix& h);

struct StandardBasis {
  std::vector<ClVector> e;  ///< e_i∙e_j* = −δ_ij
  std::vector<ClVector> f;  ///< f_i∙f_j* = +δ_ij
};

/// E_i = (h_{2i} + i h_{2i+1})/2 over the block's negative generators,
/// F_i = (g_{2i} + i g_{2i+1})/2 over its positive ones. All same-kind
/// products E∙E, F∙F, E∙F, E∙F* vanish.
StandardBasis standard_basis(const SpacePtr& space, const Block& block);
StandardBasis standard_basis(const SpacePtr& space);

struct GramResolution {
  std::vector<ClVector> vectors;
  HermitianMatrix target;

  CMatrix gram() const;            ///< vectors[i]∙conj(vectors[j])
  CMatrix null_products() const;   ///< vectors[i]∙vectors[j]
  double residual() const;         ///< max |gram − target|
  double null_residual() const;    ///< max |null_products|
};

inline constexpr double kZeroEigenvalueRel = 1e-9;

/// c_i = Σ_k U_ik sqrt|λ_k| b_k with b_k = F_k (λ>0), E_k (λ<0), and
/// E_k + F_k (unit weight) for |λ_k| ≤ 1e-9·max|λ|.
GramResolution resolve_hermitian(const HermitianMatrix& h, const SpacePtr& space, const Block& block);
GramResolution resolve_hermitian(const HermitianMatrix& h, const SpacePtr& space);

struct PairResolution {
  std::vector<ClVector> c;      ///< c^A, A = 1,2
  std::vector<ClVector> dstar;  ///< d*_A, A = 1,2

  Matrix2c x() const;           ///< x^{AḂ} = c^A∙c*^Ḃ
  Matrix2c p() const;           ///< p_{AḂ} = d*_A∙d_Ḃ
  Matrix2c mixed() const;       ///< M^A_B = c^A∙d*_B
};

/// Resolve coordinates, momenta and the mixed products in three disjoint
/// blocks. The h-block carries c → c + F_i, d* → d* + (Mᵀ)_{Ai} F_i*, and the
/// c/d blocks resolve the remainders x − 1 and p − Mᵀ(Mᵀ)†.
PairResolution resolve_pair(const Matrix2c& x, const Matrix2c& p, const Matrix2c& mixed,
                            const SpacePtr& space, const Block& c_block, const Block& d_block,
                            const Block& h_block);

/// Convenience: allocates a fresh space with blocks "c", "d", "h".
PairResolution resolve_pair(const Matrix2c& x, const Matrix2c& p, const Matrix2c& mixed);

}  // namespace cliffdyn
