#pragma once

// Flat-worldsheet Clifford string in the conformal gauge h_αβ = diag(1, −1).
// Worldsheet coordinates σ^α = (τ, σ), σ ∈ [0, π]; ε_{01} = +1.
//
// The travelling-wave solution is
//   c^A = k^A + l^A τ + Σ_n a_n^A e^{in(τ+σ)/2} + Σ_n b_n^A e^{in(τ−σ)/2}
// with all bullet products between distinct coefficients zero except
// a_n∙a_{−n}* and b_n∙b_{−n}*.

#include <array>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cliffdyn/clifford.hpp"
#include "cliffdyn/spinor.hpp"

namespace cliffdyn {

struct CoefLabel {
  enum class Kind { K, L, A, B };
  Kind kind = Kind::K;
  int n = 0;  ///< mode number for A and B

  std::string name() const;  ///< "k", "l", "a2", "b-1", ...
  static CoefLabel parse(const std::string& text);  ///< throws InputError
  bool operator==(const CoefLabel&) const = default;
};

struct ModeSpec {
  double mass = 1.0;
  std::vector<int> modes;
  /// 2×2 blocks over labels() in order k, l, a_n..., b_n...; entry (2i+A, 2j+B)
  /// is coef_i^A ∙ conj(coef_j^B).
  HermitianMatrix gram;
  int n_max = 4;

  std::vector<CoefLabel> labels() const;
  Eigen::Index index_of(const CoefLabel& label) const;  ///< throws InputError if absent
  Matrix2c block(const CoefLabel& row, const CoefLabel& col) const;
  /// Zero block when the label is not part of the spec.
  Matrix2c block_or_zero(const CoefLabel& row, const CoefLabel& col) const;

  /// Throws InputError for: non-positive mass, zero/repeated/oversized modes,
  /// wrong Gram size, forbidden nonzero blocks, or (det L)^{1/3} ≠ m².
  /// Throws PreconditionError when det L ≤ 0 (null or spacelike p).
  void validate() const;
};

/// Builds and validates a spec from per-label-pair blocks; missing pairs are
/// zero and the Hermitian partner of a given pair is filled in.
ModeSpec make_mode_spec(double mass, std::vector<int> modes,
                        const std::vector<std::pair<std::pair<CoefLabel, CoefLabel>, Matrix2c>>& blocks,
                        int n_max = 4);

/// Random on-shell spec: L = l∙l* positive definite scaled to det L = m⁶,
/// other allowed blocks of size ~amplitude.
ModeSpec random_mode_spec(std::mt19937_64& rng, double mass, const std::vector<int>& modes,
                          double amplitude = 0.1);

/// k = a = b = 0, L = m³·diag-like positive matrix built from the unit timelike
/// direction boosted by `rapidity` along x.
ModeSpec non_vibrating_spec(double mass, double rapidity = 0.0);

struct StringState {
  ModeSpec spec;
  SpacePtr space;
  std::array<ClVector, 2> k;
  std::array<ClVector, 2> l;
  std::vector<std::array<ClVector, 2>> a;  ///< aligned with spec.modes
  std::vector<std::array<ClVector, 2>> b;
  double gram_residual = 0.0;

  Matrix2c l_gram() const;  ///< L^{AḂ} = l^A∙l*^Ḃ
  double p_squared() const;  ///< (det L)^{1/3}
  Matrix2c p_upper() const;  ///< p^{AḂ} = L / p²
  Matrix2c p_lower() const;  ///< p_{AḂ}
};

/// Realizes the coefficients by resolve_hermitian on a fresh space. Throws
/// NumericalError when the realized Gram misses the spec by more than 1e-9.
StringState build_wave_state(const ModeSpec& spec);

using SpinorPair = std::array<ClVector, 2>;

SpinorPair eval_c(const StringState& s, double tau, double sigma);
/// ∂_β c^A, β = 0 (τ) or 1 (σ).
SpinorPair eval_dc(const StringState& s, double tau, double sigma, int beta);

/// x^{AḂ} from the closed form in Gram entries.
Matrix2c eval_x(const StringState& s, double tau, double sigma);
/// x^{AḂ} = c^A∙conj(c^Ḃ) from the realized coefficients.
Matrix2c eval_x_bullet(const StringState& s, double tau, double sigma);

/// Lower-index polymomenta at one point.
struct Polymomenta {
  std::array<SpinorPair, 2> d;      ///< d_{βĖ} = (p²)^{−2} L_{AĖ} ∂_β c^A
  std::array<SpinorPair, 2> dstar;  ///< d*_{βA} = conj(d_{βA})
};
Polymomenta eval_polymomenta(const StringState& s, double tau, double sigma);

/// T^{αβ} = ½(3p² − m²)η^{αβ} − p^{AḂ} d*^{(α}_A∙d^{β)}_Ḃ.
Eigen::Matrix2d energy_momentum(const StringState& s, double tau, double sigma);

struct DilatonConstants {
  double k = 0.0;
  double k_tau = 0.0;
  double k_sigma = 0.0;
};
/// φ = k + k_α σ^α + ½m²(τ² + σ²) + (1/4)(p²)^{−2} Σ_n L_{AḂ}(½n² A_n (τ+σ)²
///     + ½n² B_n (τ−σ)² + A_{n,−n} e^{in(τ+σ)} + B_{n,−n} e^{in(τ−σ)})
/// where A_n = a_n∙a_n*, A_{n,−n} = a_n∙a_{−n}*.
double dilaton(const StringState& s, double tau, double sigma, const DilatonConstants& kc = {});

/// Rectangular sample of the sheet: τ ∈ [tau_min, tau_max], σ ∈ [sigma_min, sigma_max].
struct Lattice {
  double tau_min = 0.0;
  double tau_max = 1.0;
  std::size_t n_tau = 5;
  double sigma_min = 0.0;
  double sigma_max = 3.141592653589793;
  std::size_t n_sigma = 5;

  std::size_t size() const { return n_tau * n_sigma; }
  double tau(std::size_t i) const;
  double sigma(std::size_t j) const;
};

/// Residual values on a lattice, row-major (i_tau, i_sigma).
struct GridField {
  Lattice lattice;
  std::vector<double> values;
  double max() const;
};

/// max_{A,Ḃ} |□x − 2 l∙l*| with steps h_τ = h/2, h_σ = h. Equal steps would
/// make the truncation error of travelling waves cancel identically.
GridField wave_residual(const StringState& s, const Lattice& lattice, double h);
/// The field-equation residuals below use fourth-order central differences
/// with the same steps, so their bound at h = 1e-3 reflects the equations
/// rather than the stencil.
///
/// |∂_α c − η_{αβ} p d^β|.
GridField momentum_relation_residual(const StringState& s, const Lattice& lattice, double h);
/// |∂_α d*^α|.
GridField conservation_residual(const StringState& s, const Lattice& lattice, double h);
/// |∂_α∂_β φ + m² η_{αβ} − p_{AḂ} Z^{AḂ}_{(αβ)}|, Z^{AḂ}_{αβ} = d*^A_α∙d^Ḃ_β.
GridField dilaton_residual(const StringState& s, const Lattice& lattice, double h);
/// |η_{αβ} T^{αβ}|.
GridField trace_residual(const StringState& s, const Lattice& lattice);
/// |eval_x − eval_x_bullet|.
GridField dual_path_residual(const StringState& s, const Lattice& lattice);

/// log2(r(h) / r(h/2)).
double convergence_order(const std::function<GridField(double)>& residual, double h);

/// Spacelike path σ^α(u), u ∈ [0, 1], from the σ = 0 boundary to σ = π.
struct Curve {
  std::string name;
  std::function<std::array<double, 2>(double)> point;     ///< (τ, σ)
  std::function<std::array<double, 2>(double)> velocity;  ///< dσ^α/du

  static Curve equal_time(double tau0);
  /// τ = tau0 + slope·σ; |slope| < 1.
  static Curve slanted(double tau0, double slope);
  /// τ = tau0 + amplitude·sin(waves·π·u); both endpoints stay at tau0.
  static Curve wavy(double tau0, double amplitude, int waves);
};

struct QuadratureRule {
  std::vector<double> u;
  std::vector<double> w;
};
/// Composite 4-point Gauss–Legendre on [0, 1].
QuadratureRule composite_gauss_legendre(std::size_t panels);

/// Throws InputError unless the curve runs from σ = 0 to σ = π and is
/// spacelike at every quadrature node.
void require_admissible(const Curve& curve, const QuadratureRule& rule);

/// v^α ε_{βα} d*^β_A at parameter u: v^σ d*_τ + v^τ d*_σ.
SpinorPair projected_dstar(const StringState& s, const Curve& curve, double u);

struct TotalMomentum {
  SpinorPair dstar;  ///< ∫ du v^α ε_{βα} d*^β_A
  Matrix2c p_lower;  ///< d*^tot_A ∙ d^tot_Ḃ
};
/// Path independent among curves sharing endpoints; for the non-vibrating
/// string any admissible curve gives p = π² p_{AḂ}.
TotalMomentum total_momentum(const StringState& s, const Curve& curve, std::size_t panels = 32);

struct SpacetimePoint {
  double x = 0.0, y = 0.0, z = 0.0, t = 0.0;
};
/// Closed forms for the spinning subset with a∙a* = b∙b* = a_norm and
/// k∙k* = l∙l* = k_norm.
SpacetimePoint spinning_string(double a_norm, double k_norm, double tau, double sigma);
/// Spec of the spinning subset: c^1 = kτ + a e^{i(τ+σ)/2} + b e^{i(τ−σ)/2},
/// c^2 = lτ + a e^{−i(τ+σ)/2} + b e^{−i(τ−σ)/2}, with k∙k* = m³ on shell.
ModeSpec spinning_spec(double mass, double a_norm);
/// x = ½(x^{12} + x^{21}), y = (x^{12} − x^{21})/(2i), z = ½(x^{11} − x^{22}),
/// t = ½(x^{11} + x^{22}).
SpacetimePoint spinning_projection(const Matrix2c& x);

/// One row of the field export: τ, σ, x^0..x^3, φ, T^{00}, T^{01}, T^{11}.
struct FieldSample {
  double tau = 0.0, sigma = 0.0;
  FourVector x = FourVector::Zero();
  double phi = 0.0;
  Eigen::Matrix2d t = Eigen::Matrix2d::Zero();
};
std::vector<FieldSample> sample_field(const StringState& s, const Lattice& lattice,
                                      const DilatonConstants& kc = {});

struct StringResiduals {
  double gram = 0.0;
  double dual_path = 0.0;
  double wave = 0.0;
  double wave_order = 0.0;
  double momentum_relation = 0.0;
  double momentum_relation_order = 0.0;
  double conservation = 0.0;
  double conservation_order = 0.0;
  double dilaton = 0.0;
  double dilaton_order = 0.0;
  double trace = 0.0;
  double h = 0.0;
  double h_order = 0.0;
};
/// Max-norm residuals at step h and convergence orders from (h_order, h_order/2).
StringResiduals string_residuals(const StringState& s, const Lattice& lattice, double h = 1e-3,
                                 double h_order = 0.02);

}  // namespace cliffdyn
