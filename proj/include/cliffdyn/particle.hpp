#pragma once

#include <array>
#include <functional>
#include <random>
#include <vector>

#include "cliffdyn/clifford.hpp"
#include "cliffdyn/spinor.hpp"

namespace cliffdyn {

struct ParticleState {
  std::array<ClVector, 2> c;      ///< c^A
  std::array<ClVector, 2> dstar;  ///< d*_A
  double tau = 0.0;
  double mass = 1.0;

  static ParticleState from_pair(const PairResolution& pair, double mass, double tau);

  Matrix2c x_spinor() const;        ///< x^{AḂ} = c^A∙c*^Ḃ
  Matrix2c p_spinor_lower() const;  ///< p_{AḂ} = d*_A∙d_Ḃ
  Matrix2c charges_q() const;       ///< Q_A^B = d*_A∙c^B
  FourVector x() const;             ///< x^μ
  FourVector p_upper() const;       ///< p^μ
  FourVector p_lower() const;       ///< p_μ
  double p_squared() const;         ///< p^μ p_μ
  double mu() const;                ///< ½ Re Q_A^A
};

/// Einbein e(τ) > 0 and the turning point τ0 where μ vanishes.
struct Einbein {
  enum class Kind { Constant, Linear };
  Kind kind = Kind::Constant;
  double a = 1.0;  ///< constant value, or intercept
  double b = 0.0;  ///< slope (linear only)
  double tau0 = 0.0;

  static Einbein constant(double value, double tau0);
  static Einbein linear(double intercept, double slope, double tau0);

  double operator()(double tau) const { return kind == Kind::Constant ? a : a + b * tau; }
  /// Throws InputError unless e > 0 on [lo, hi].
  void require_positive(double lo, double hi) const;
};

/// Smooth function of (x^μ, p_μ) with analytic gradients.
struct Observable {
  std::function<double(const FourVector&, const FourVector&)> value;
  std::function<FourVector(const FourVector&, const FourVector&)> grad_x;  ///< ∂/∂x^μ
  std::function<FourVector(const FourVector&, const FourVector&)> grad_p;  ///< ∂/∂p_μ
};

/// Max relative mismatch between analytic and central-difference gradients.
double gradient_check(const Observable& obs, const FourVector& x, const FourVector& p, double h = 1e-6);

/// Σ coeff · Π x^{e_μ} p^{f_μ}: a polynomial test observable.
struct PolynomialObservable {
  struct Term {
    double coeff = 0.0;
    std::array<int, 8> powers{};  ///< x^0..x^3, p_0..p_3
  };
  std::vector<Term> terms;

  double value(const FourVector& x, const FourVector& p) const;
  Observable observable() const;

  static PolynomialObservable random(std::mt19937_64& rng, int max_degree = 3, int n_terms = 4);
  static PolynomialObservable coordinate(int mu);  ///< x^μ
  static PolynomialObservable momentum(int mu);    ///< p_μ
};

/// Integrand of the quartic-root action: 4√m (det U)^{1/4} with U^{AḂ} = ċ^A∙ċ*^Ḃ.
/// Throws std::domain_error when det U < 0.
double lagrangian_c2(const std::array<ClVector, 2>& cdot, double mass);

/// Polyakov-type integrand 3 e^{-1/3} (det U)^{1/3} + m² e.
double lagrangian_c21(const std::array<ClVector, 2>& cdot, double einbein, double mass);

/// Momenta conjugate to c under the two actions.
std::array<ClVector, 2> momenta_c2(const std::array<ClVector, 2>& cdot, double mass);
std::array<ClVector, 2> momenta_c21(const std::array<ClVector, 2>& cdot, double einbein);

/// d*_A∙ċ^A + c.c. − L for the Polyakov action.
double legendre_c21(const std::array<ClVector, 2>& cdot, double einbein, double mass);

/// e (p^μ p_μ − m²).
double hamiltonian_c5(const ParticleState& state, double einbein);
Observable hamiltonian_c5_observable(double mass, double einbein);

struct ParticleRate {
  std::array<ClVector, 2> dc;
  std::array<ClVector, 2> ddstar;
};

/// dc^A/dτ = (∂H/∂p_{AĖ}) d_Ė, dd*_A/dτ = −(∂H/∂x^{AĖ}) c*^Ė.
ParticleRate canonical_rhs(const ParticleState& state, const Observable& hamiltonian);
ParticleRate canonical_rhs(const ParticleState& state, double einbein);

/// ∂N/∂x^{AḂ} = ½ Σ σ^μ_{AḂ} ∂N/∂x^μ.
Matrix2c spinor_grad_x(const FourVector& grad_x);
/// ∂M/∂p_{AḂ} = ½ Σ σ_ν^{AḂ} ∂M/∂p_ν.
Matrix2c spinor_grad_p(const FourVector& grad_p);

struct NoetherCharges {
  Matrix2c big_j;  ///< J_AB, symmetric
  double small_j = 0.0;
};
NoetherCharges noether_charges(const ParticleState& state);

/// μ(τ) = ∫_{τ0}^{τ} m² e(t) dt by adaptive Simpson quadrature.
double mu_of_tau(const Einbein& e, double mass, double tau);

struct Trajectory {
  std::vector<ParticleState> states;
  std::vector<double> taubar;  ///< proper time; empty without reparametrization
  Einbein einbein;
};

struct IntegrateOptions {
  bool reparametrize = true;
  std::size_t stride = 1;  ///< keep every stride-th state (the last one is always kept)
};

/// Classic RK4 on the coefficient flow of canonical_rhs with H = e(τ)(p·p − m²).
/// Proper time follows dτ̄/dτ = 2 m μ e. Reparametrization throws
/// PreconditionError when μ vanishes on the window.
Trajectory integrate(const ParticleState& state0, const Einbein& e, double tau_end, std::size_t steps,
                     const IntegrateOptions& options = {});

/// Bracket from the ClVector derivatives ∂N/∂c, ∂M/∂d*, ... contracted by ∙.
double clifford_bracket(const Observable& n, const Observable& m, const ParticleState& state);
/// Bracket reduced to x,p gradients weighted by the mixed products c∙d*.
double clifford_bracket_reduced(const Observable& n, const Observable& m, const ParticleState& state);
/// Ordinary Poisson bracket in (x^μ, p_μ).
double poisson_bracket(const Observable& n, const Observable& m, const FourVector& x, const FourVector& p);

}  // namespace cliffdyn
