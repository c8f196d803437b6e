#pragma once

// Lattice Clifford brackets of string Noether charges and the Lie algebras
// they close into.
//
// A curve is sampled at quadrature nodes u_k with weights w_k. The variables
// c^A(u_k), d*_A(u_k) are canonical per node and δ(u′ − u″) becomes δ_kl / w_k,
// so for functionals F, G
//   {F, G} = Σ_k w_k Σ_G (δF/δc^G ∙ δG/δd*_G + δF/δc*^G ∙ δG/δd_G − (F ↔ G)).
// Quantization maps {,} to [,]/(iħ) with ħ = 1.

#include <array>
#include <string>
#include <vector>

#include "cliffdyn/string.hpp"

namespace cliffdyn {

struct CurrentSample {
  SpacePtr space;
  std::vector<double> u;
  std::vector<double> w;
  std::vector<SpinorPair> c;      ///< c^A(u_k)
  std::vector<SpinorPair> dstar;  ///< d*_A(u_k) = v^α ε_{βα} d*^β_A
  std::vector<Matrix2c> j;        ///< j_AB = c_A∙d*_B + c_B∙d*_A
  std::vector<double> unitary;    ///< i(c^A∙d*_A − c.c.)

  std::size_t size() const { return u.size(); }
  Matrix2c j_total() const;
  SpinorPair dstar_total() const;
  Matrix2c p_total() const;  ///< d*^tot_A ∙ d^tot_Ḃ
  double unitary_total() const;
};

/// Fills j and the unitary current from per-node c and d*.
CurrentSample make_current_sample(SpacePtr space, std::vector<double> u, std::vector<double> w,
                                  std::vector<SpinorPair> c, std::vector<SpinorPair> dstar);

/// Samples a string on a composite Gauss–Legendre rule with 4·panels nodes.
CurrentSample sample_currents(const StringState& s, const Curve& curve, std::size_t panels);

/// Variational derivatives of a functional at the nodes it depends on. Empty
/// ClVectors stand for zero.
struct NodeDerivative {
  std::size_t node = 0;
  SpinorPair dc;     ///< δF/δc^G
  SpinorPair dcs;    ///< δF/δc*^G
  SpinorPair ddstar; ///< δF/δd*_G
  SpinorPair dd;     ///< δF/δd_G
};
struct Functional {
  std::vector<NodeDerivative> nodes;  ///< sorted by node
};

Functional point_current(const CurrentSample& s, int a, int b, std::size_t k);       ///< j_AB(u_k)
Functional point_current_conj(const CurrentSample& s, int a, int b, std::size_t k);  ///< j_ȦḂ(u_k)
Functional point_unitary(const CurrentSample& s, std::size_t k);                     ///< I(u_k)
Functional total_current(const CurrentSample& s, int a, int b);
Functional total_current_conj(const CurrentSample& s, int a, int b);
Functional total_momentum_functional(const CurrentSample& s, int e, int f);  ///< p_{EḞ}
Functional total_unitary(const CurrentSample& s);

Complex bracket(const CurrentSample& s, const Functional& f, const Functional& g);

/// {j_AB(u_k), j_EF(u_l)} on the lattice.
Complex current_bracket(const CurrentSample& s, int a, int b, int e, int f, std::size_t k, std::size_t l);
/// ((j_AE ε_FB + A↔B) + E↔F) δ_kl / w_k.
Complex current_bracket_expected(const CurrentSample& s, int a, int b, int e, int f, std::size_t k,
                                 std::size_t l);

struct BracketReport {
  double current = 0.0;    ///< max |bracket − expected| / (1 + |expected|)
  double dotted = 0.0;     ///< max |{j_AB, j_ĖḞ}|
  std::size_t checked = 0;
};
/// Checks every index tuple on node pairs (k, l) drawn from `nodes`.
BracketReport check_current_brackets(const CurrentSample& s, const std::vector<std::size_t>& nodes);

/// Structure constants [X_a, X_b] = Σ_c f(a, b, c) X_c.
class LiePresentation {
 public:
  LiePresentation() = default;
  explicit LiePresentation(std::vector<std::string> labels);

  std::size_t dim() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  Complex& operator()(std::size_t a, std::size_t b, std::size_t c) { return f_[index(a, b, c)]; }
  Complex operator()(std::size_t a, std::size_t b, std::size_t c) const { return f_[index(a, b, c)]; }

  double antisymmetry_residual() const;
  double jacobi_residual() const;
  /// max |f − other| entrywise; labels must match.
  double distance(const LiePresentation& other) const;
  LiePresentation scaled(Complex factor) const;

  double fit_residual = 0.0;   ///< least-squares misfit of the bracket data
  double closure_residual = 0.0;  ///< for sub-presentations: misfit of the span

 private:
  std::size_t index(std::size_t a, std::size_t b, std::size_t c) const { return (a * dim() + b) * dim() + c; }
  std::vector<std::string> labels_;
  std::vector<Complex> f_;
};

/// Basis of the charge presentation: J11 J12 J22 J̄11 J̄12 J̄22 P11̇ P12̇ P21̇ P22̇.
std::vector<std::string> charge_labels();

/// Totals on one sample in charge_labels() order.
Eigen::Matrix<Complex, 10, 1> charge_values(const CurrentSample& s);

/// Fits structure constants of the quantized charges (ħ = 1) from brackets of
/// totals on several samples. Needs at least 12 samples for a determined fit.
/// Throws NumericalError when the Jacobi residual exceeds 1e-9.
LiePresentation charge_algebra(const std::vector<CurrentSample>& samples);

/// Expected quantized charge algebra, with the bracket-derived sign
/// [P_EḞ, J_AB] = −i(ε_EA P_BḞ + ε_EB P_AḞ), written in charge_labels().
LiePresentation expected_charge_algebra();

/// Least-squares global factor λ minimizing |f − λ·f_expected|.
Complex normalization_factor(const LiePresentation& fitted, const LiePresentation& expected);

/// New elements Y_i = Σ_a rows(i, a) X_a. Brackets are projected back onto
/// span(Y); the projection misfit is stored in closure_residual.
LiePresentation change_basis(const LiePresentation& pres, const CMatrix& rows, std::vector<std::string> labels);

struct NkDecomposition {
  LiePresentation su_a;  ///< N_1, N_2, N_3
  LiePresentation su_b;  ///< N_1†, N_2†, N_3†
  LiePresentation joint; ///< all six
  double cross = 0.0;    ///< max |[N_k, N_l†]|
  double su2_pattern = 0.0;  ///< max |[N_i, N_j] − i ε_ijk N_k| over both halves
  double casimir = 0.0;  ///< max |[N_k, N·N]| coefficients over both halves
  double closure = 0.0;
};
/// N_1 = (i/4)(J22 − J11), N_2 = −¼(J11 + J22), N_3 = −(i/2)J12 and conjugates.
NkDecomposition nk_decomposition(const LiePresentation& charges);

struct PoincareReport {
  double pp = 0.0;             ///< max |[P, P]| structure constants
  double pj = 0.0;             ///< [P_EḞ, J_AB] against the bracket-derived sign
  double pj_literal = 0.0;     ///< against +i(ε_EA P_ḞB + ε_EB P_ḞA) as printed
  double mm = 0.0;             ///< [M, M] against the oracle
  double mp = 0.0;             ///< [P, M] against the oracle in the aligned frame
  std::string frame;           ///< proper π-rotation applied to P_μ
  double jacobi = 0.0;
  bool pass(double tol) const { return pp <= tol && pj <= tol && mm <= tol && mp <= tol && jacobi <= tol; }
};

/// Textbook Poincaré structure constants from 5×5 matrix generators acting on
/// (x^μ, 1): basis M01 M02 M03 M12 M13 M23 P0 P1 P2 P3.
LiePresentation poincare_oracle();

/// M_ij = ε_ijk(N_k + N_k†), M_k0 = i(N_k − N_k†), P_μ from P_{AḂ} through the
/// σ dictionary, compared with the oracle.
PoincareReport poincare_check(const LiePresentation& charges);

struct UnitaryReport {
  double ii = 0.0;  ///< max |{I(u_k), I(u_l)}|
  double ij = 0.0;  ///< max |{I(u_k), j_AB(u_l)}|
  double total = 0.0;  ///< |∫ I du|
};
UnitaryReport unitary_current_check(const CurrentSample& s, const std::vector<std::size_t>& nodes);

}  // namespace cliffdyn
