#pragma once

// N-particle matrix mechanics. Kets C^A and bras D_A hold one ClVector per
// particle; X^{AḂ} = C^A∙C^Ḃ and P_{AḂ} = D_Ḃ∙D_A are N×N matrices.

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "cliffdyn/particle.hpp"

namespace cliffdyn {

struct ParticleGram {
  FourVector x;      ///< x^μ
  FourVector p;      ///< p^μ
  Matrix2c mixed;    ///< c^A∙d*_B
};

/// Resolves every particle into its own c/d/h blocks of one shared space.
std::vector<ParticleState> resolve_particles(const std::vector<ParticleGram>& grams, double mass, double tau = 0.0);

struct NSystem {
  SpacePtr space;
  std::array<std::vector<ClVector>, 2> kets;  ///< C^A, entry i is c_i^A
  std::array<std::vector<ClVector>, 2> bras;  ///< D_A, entry i is d*_{iA}
  double mass = 1.0;
  double hbar = 0.0;
  Eigen::VectorXd phi;  ///< diagonal weights of the action

  std::size_t n() const { return kets[0].size(); }

  /// X^{AḂ}_{ij} = c_i^A∙c_j^{*Ḃ}
  std::array<std::array<CMatrix, 2>, 2> x_spinor() const;
  /// P_{AḂ,ij} = d_{iḂ}∙d*_{jA}
  std::array<std::array<CMatrix, 2>, 2> p_spinor_lower() const;
  /// K^A_{B,ij} = c_i^A∙d*_{jB}
  std::array<std::array<CMatrix, 2>, 2> constraint() const;

  std::array<CMatrix, 4> X() const;        ///< X^μ
  std::array<CMatrix, 4> P_upper() const;  ///< P^μ
  std::array<CMatrix, 4> P_lower() const;  ///< P_μ

  /// Re Σ_A tr K^A_A / (2N).
  double mu() const;
  /// max |K^A_B − μ δ^A_B 1|.
  double constraint_residual() const;
};

/// Throws InputError when particles do not share one space or their
/// generator supports overlap.
NSystem assemble(const std::vector<ParticleState>& particles, double hbar = 0.0);

/// Throws InputError unless U is unitary within 1e-12.
NSystem gauge_transform(const NSystem& sys, const CMatrix& u);

struct WeightedCharges {
  Matrix2c big_j;
  double small_j = 0.0;
};
/// J_AB = Tr(Φ(C_A∙D_B + C_B∙D_A)), j = i Tr(Φ C^A∙D_A − h.c.).
WeightedCharges weighted_charges(const NSystem& sys, const CMatrix& phi);

template <typename T>
struct Snapshots {
  std::vector<double> tau;
  std::vector<T> values;
};

/// dC^A/dτ̄ = ē P^{AĖ} D_Ė with ē = 1/(2mμ); bras stay fixed (free H).
/// Throws PreconditionError when the Noether constraint fails or μ = 0.
Snapshots<NSystem> evolve_matrix_classical(const NSystem& sys, double taubar_end, std::size_t steps,
                                           std::size_t stride = 1);

/// dt/dτ̄ per particle: eigenvalues of P^0/m.
Eigen::VectorXd proper_time_rate(const NSystem& sys);

using MatrixHamiltonian = std::function<CMatrix(const CMatrix& x, const CMatrix& p)>;
using Connection = std::function<CMatrix(double tau)>;

/// (P² − m²·1)/(2m) for a single time-like component.
MatrixHamiltonian free_matrix_hamiltonian(double mass);
/// P²/(2m) + ½ m ω² X².
MatrixHamiltonian oscillator_hamiltonian(double mass, double omega);

struct PhasePoint {
  CMatrix x;
  CMatrix p;
};

/// dX/dτ = [X,H]/(iħ) + i[Γ,X] and the same for P, RK4.
Snapshots<PhasePoint> covariant_evolve(const CMatrix& x0, const CMatrix& p0, const MatrixHamiltonian& h,
                                       const Connection& gamma, double hbar, double tau_end, std::size_t steps,
                                       std::size_t stride = 1);
/// Γ = 0.
Snapshots<PhasePoint> evolve_heisenberg(const CMatrix& x0, const CMatrix& p0, const MatrixHamiltonian& h,
                                        double hbar, double tau_end, std::size_t steps, std::size_t stride = 1);

/// (d/dτ − iΓ)|s⟩ = 0, RK4.
Snapshots<CVector> evolve_state(const CVector& s0, const Connection& gamma, double tau_end, std::size_t steps,
                                std::size_t stride = 1);

struct TruncatedOscillator {
  CMatrix x;
  CMatrix p;
  CMatrix h;
};
/// Ladder-operator pair on N levels; [X,P] = iħ diag(1, …, 1, −(N−1)).
TruncatedOscillator truncated_oscillator(std::size_t n, double mass, double omega, double hbar);

Complex expectation(const CVector& s, const CMatrix& m);
/// ⟨s|C^A = Σ_i conj(s_i) c_i^A.
ClVector expectation_ket(const CVector& s, const std::vector<ClVector>& kets);

/// |⟨b_i|s⟩|² for the columns of an orthonormal basis.
Eigen::VectorXd born_probabilities(const CVector& s, const CMatrix& basis);
std::size_t born_sample(const CVector& s, const CMatrix& basis, std::mt19937_64& rng);

/// U(τ)XU(τ)† style unitary exp(iτK) for Hermitian K.
CMatrix unitary_exp(const CMatrix& hermitian, double tau);

}  // namespace cliffdyn
