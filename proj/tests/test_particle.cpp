#include <random>

#include "cliffdyn/particle.hpp"
#include "doctest.h"

using namespace cliffdyn;

namespace {

ParticleState make_state(const FourVector& x, const FourVector& p_up, const Matrix2c& mixed, double mass,
                         double tau = 0.0) {
  const auto pair = resolve_pair(vec_to_spinor(x), lower_indices(vec_to_spinor(p_up)), mixed);
  return ParticleState::from_pair(pair, mass, tau);
}

FourVector on_shell(double mass, double px, double py, double pz) {
  return FourVector(std::sqrt(mass * mass + px * px + py * py + pz * pz), px, py, pz);
}

// Wirtinger derivative of f along direction delta added to slot `target`:
// returns ∂f/∂z ∙ delta, holding conj(z) fixed.
Complex wirtinger(const std::function<double(const std::array<ClVector, 2>&)>& f, std::array<ClVector, 2> z,
                  int target, const ClVector& delta, double h = 1e-6) {
  auto shifted = [&](Complex step) {
    auto w = z;
    w[target] += step * delta;
    return f(w);
  };
  const double d_re = (shifted(h) - shifted(-h)) / (2 * h);
  const double d_im = (shifted(Complex(0, h)) - shifted(Complex(0, -h))) / (2 * h);
  return 0.5 * (d_re - Complex(0, 1) * d_im);
}

std::array<ClVector, 2> timelike_velocity(const FourVector& v) {
  const auto res = resolve_hermitian(HermitianMatrix(vec_to_spinor(v)), GeneratorSpace::allocate(4, 4));
  return {res.vectors[0], res.vectors[1]};
}

}  // namespace

TEST_CASE("quartic-root action") {
  const double m = 2.25;
  const auto u = timelike_velocity(FourVector(1, 0, 0, 0));
  CHECK(lagrangian_c2(u, m) == doctest::Approx(4.0 * std::sqrt(m)).epsilon(1e-14));
  // det U = v·v so the integrand scales like 4√m (v·v)^{1/4}.
  const FourVector v(2.0, 0.3, -0.4, 0.5);
  CHECK(lagrangian_c2(timelike_velocity(v), m) ==
        doctest::Approx(4.0 * std::sqrt(m) * std::pow(minkowski_dot(v, v), 0.25)).epsilon(1e-12));
  const double lambda = 1.7;
  const std::array<ClVector, 2> scaled = {Complex(0, lambda) * u[0], Complex(0, lambda) * u[1]};
  CHECK(lagrangian_c2(scaled, m) == doctest::Approx(lambda * lagrangian_c2(u, m)).epsilon(1e-13));
  CHECK_THROWS_AS(lagrangian_c2(timelike_velocity(FourVector(0, 0, 0, 1)), m), std::domain_error);
}

TEST_CASE("momenta are derivatives of the actions and satisfy the mass shell") {
  const double m = 1.3, e = 0.7;
  const auto cdot = timelike_velocity(FourVector(1.5, 0.2, -0.3, 0.4));
  const auto space = cdot[0].space();
  const auto d2 = momenta_c2(cdot, m);
  const auto d21 = momenta_c21(cdot, e);
  for (int a = 0; a < 2; ++a) {
    for (std::size_t k = 0; k < space->dim(); k += 3) {
      const auto gen = ClVector::generator(space, k);
      const Complex fd2 = wirtinger([&](const auto& w) { return lagrangian_c2(w, m); }, cdot, a, gen);
      const Complex fd21 = wirtinger([&](const auto& w) { return lagrangian_c21(w, e, m); }, cdot, a, gen);
      CHECK(std::abs(fd2 - bullet(d2[a], gen)) < 1e-7);
      CHECK(std::abs(fd21 - bullet(d21[a], gen)) < 1e-7);
    }
  }
  auto p_squared = [](const std::array<ClVector, 2>& d) {
    Matrix2c p;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) p(a, b) = bullet(d[a], d[b].conj());
    return minkowski_norm(p).real();
  };
  CHECK(p_squared(d2) == doctest::Approx(m * m).epsilon(1e-12));
  const double det_u = minkowski_dot(FourVector(1.5, 0.2, -0.3, 0.4), FourVector(1.5, 0.2, -0.3, 0.4));
  const double pp21 = std::pow(e, -4.0 / 3.0) * std::cbrt(det_u);
  CHECK(p_squared(d21) == doctest::Approx(pp21).epsilon(1e-12));
  // Legendre transform of the Polyakov form is the constrained Hamiltonian.
  CHECK(legendre_c21(cdot, e, m) == doctest::Approx(e * (pp21 - m * m)).epsilon(1e-12));
}

TEST_CASE("constrained Hamiltonian") {
  const double m = 1.5;
  const auto on = make_state(FourVector(0.5, 0, 0, 0), on_shell(m, 0.2, 0.1, -0.3), Matrix2c::Identity(), m);
  CHECK(std::abs(hamiltonian_c5(on, 0.8)) < 1e-12);
  const auto rest = make_state(FourVector(0, 0, 0, 0), FourVector(2 * m, 0, 0, 0), Matrix2c::Identity(), m);
  CHECK(hamiltonian_c5(rest, 1.0) == doctest::Approx(3 * m * m).epsilon(1e-12));
  CHECK(hamiltonian_c5(rest, 0.0) == 0.0);
}

TEST_CASE("canonical equations") {
  const double m = 1.1, e = 0.6, mu = 0.8;
  const auto s = make_state(FourVector(0.4, 0.1, 0.2, -0.1), on_shell(m, 0.3, -0.2, 0.5),
                            mu * Matrix2c::Identity(), m);
  const auto rate = canonical_rhs(s, e);

  SUBCASE("free particle keeps its momenta") {
    for (int a = 0; a < 2; ++a) CHECK(rate.ddstar[a].max_abs() == 0.0);
  }
  SUBCASE("dc/dτ is the d*-derivative of the Hamiltonian") {
    const auto space = s.c[0].space();
    for (int a = 0; a < 2; ++a) {
      for (std::size_t k = 0; k < space->dim(); ++k) {
        const auto gen = ClVector::generator(space, k);
        auto h_of_d = [&](const std::array<ClVector, 2>& d) {
          ParticleState t = s;
          t.dstar = d;
          return hamiltonian_c5(t, e);
        };
        CHECK(std::abs(wirtinger(h_of_d, s.dstar, a, gen) - bullet(rate.dc[a], gen)) < 1e-7);
      }
    }
  }
  SUBCASE("dx/dτ = 2μ ∂H/∂p") {
    Matrix2c dx;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) dx(a, b) = bullet(rate.dc[a], s.c[b].conj()) + bullet(s.c[a], rate.dc[b].conj());
    const FourVector dx_vec = spinor_to_vec_real(dx);
    const FourVector expected = 2.0 * mu * e * s.p_upper();
    CHECK((dx_vec - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("zero einbein freezes the flow") {
    const auto frozen = canonical_rhs(s, 0.0);
    for (int a = 0; a < 2; ++a) {
      CHECK(frozen.dc[a].max_abs() == 0.0);
      CHECK(frozen.ddstar[a].max_abs() == 0.0);
    }
  }
}

TEST_CASE("Noether charges") {
  const double m = 1.0;
  const FourVector x(0.2, 0.0, 0.1, 0.0);
  const FourVector p = on_shell(m, 0.1, 0.2, 0.3);
  SUBCASE("Noether-constrained pair") {
    const auto q = noether_charges(make_state(x, p, 0.9 * Matrix2c::Identity(), m));
    CHECK(q.big_j.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(q.small_j) < 1e-12);
  }
  SUBCASE("off-diagonal mixed product feeds J_12") {
    Matrix2c mixed = Matrix2c::Zero();
    mixed(0, 1) = Complex(0.4, -0.2);  // M^1_2 = Q_2^1
    const auto q = noether_charges(make_state(x, p, mixed, m));
    // J = Qε + (Qε)ᵀ with Q = Mᵀ: only J_22 = 2 Q_2^1 survives.
    CHECK(std::abs(q.big_j(1, 1) - 2.0 * mixed(0, 1)) < 1e-12);
    CHECK(std::abs(q.big_j(0, 0)) < 1e-12);
    CHECK(std::abs(q.big_j(0, 1)) < 1e-12);
  }
  SUBCASE("complex μ gives j = −4 Im μ") {
    const Complex mu(0.5, 0.3);
    const auto q = noether_charges(make_state(x, p, mu * Matrix2c::Identity(), m));
    CHECK(q.small_j == doctest::Approx(-4.0 * mu.imag()).epsilon(1e-12));
  }
}

TEST_CASE("mu(tau) quadrature") {
  const double m = 1.7;
  const auto ec = Einbein::constant(0.6, 0.5);
  CHECK(mu_of_tau(ec, m, 2.5) == doctest::Approx(m * m * 0.6 * 2.0).epsilon(1e-12));
  CHECK(mu_of_tau(ec, m, 0.5) == 0.0);
  const auto el = Einbein::linear(0.0, 1.0, 0.0);
  CHECK(mu_of_tau(el, m, 1.0) == doctest::Approx(m * m / 2.0).epsilon(1e-12));
  const auto eq = Einbein::linear(0.3, 0.7, -1.0);
  const double exact = m * m * (0.3 * 3.0 + 0.35 * (4.0 - 1.0));
  CHECK(std::abs(mu_of_tau(eq, m, 2.0) - exact) < 1e-10 * exact);
}

TEST_CASE("free-particle integration") {
  const double m = 1.2;
  const auto e = Einbein::constant(0.75, -1.0);
  const double tau_start = 0.0, tau_end = 2.0;
  const double mu0 = mu_of_tau(e, m, tau_start);
  const FourVector p = on_shell(m, 0.3, -0.4, 0.2);
  const auto s0 = make_state(FourVector(0.1, 0.2, 0.3, 0.4), p, mu0 * Matrix2c::Identity(), m, tau_start);
  const auto traj = integrate(s0, e, tau_end, 10000);
  REQUIRE(traj.states.size() == 10001);
  const auto q0 = noether_charges(s0);
  double p_drift = 0.0, shell = 0.0, line = 0.0, mu_err = 0.0, charge = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    p_drift = std::max(p_drift, (s.p_spinor_lower() - s0.p_spinor_lower()).cwiseAbs().maxCoeff());
    shell = std::max(shell, std::abs(s.p_squared() - m * m));
    const FourVector expected = s0.x() + s0.p_upper() * traj.taubar[k] / m;
    line = std::max(line, (s.x() - expected).cwiseAbs().maxCoeff());
    mu_err = std::max(mu_err, std::abs(s.mu() - mu_of_tau(e, m, s.tau)));
    const auto q = noether_charges(s);
    charge = std::max(charge, (q.big_j - q0.big_j).cwiseAbs().maxCoeff());
    charge = std::max(charge, std::abs(q.small_j - q0.small_j));
  }
  CHECK(p_drift < 1e-12);
  CHECK(shell < 1e-8);
  CHECK(line < 1e-8);
  CHECK(mu_err < 1e-8);
  CHECK(charge < 1e-9);

  SUBCASE("reparametrized flow obeys the proper-time equations") {
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.states.size(); k += 97) {
      const double dt = traj.taubar[k + 1] - traj.taubar[k - 1];
      const FourVector dx = (traj.states[k + 1].x() - traj.states[k - 1].x()) / dt;
      worst = std::max(worst, (dx - traj.states[k].p_upper() / m).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-7);
  }
}

TEST_CASE("linear einbein keeps the constraint") {
  const double m = 0.9;
  const auto e = Einbein::linear(0.5, 0.25, -0.5);
  const auto s0 = make_state(FourVector(0, 0, 0, 0), on_shell(m, 0.2, 0.2, 0.0),
                             mu_of_tau(e, m, 0.0) * Matrix2c::Identity(), m, 0.0);
  const auto traj = integrate(s0, e, 3.0, 3000);
  for (const auto& s : traj.states) {
    CHECK(std::abs(s.mu() - mu_of_tau(e, m, s.tau)) < 1e-9);
    CHECK(std::abs(s.p_squared() - m * m) < 1e-10);
  }
}

TEST_CASE("reparametrization refuses windows containing the turning point") {
  const double m = 1.0;
  const auto e = Einbein::constant(1.0, 0.5);
  const auto s0 = make_state(FourVector(0, 0, 0, 0), on_shell(m, 0, 0, 0),
                             mu_of_tau(e, m, 0.0) * Matrix2c::Identity(), m, 0.0);
  CHECK_THROWS_AS(integrate(s0, e, 1.0, 100), PreconditionError);
  IntegrateOptions plain;
  plain.reparametrize = false;
  const auto traj = integrate(s0, e, 1.0, 100, plain);
  CHECK(traj.states.back().mu() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(integrate(s0, Einbein::constant(-1.0, 0.5), 1.0, 10, plain), InputError);
  CHECK_THROWS_AS(integrate(s0, e, 1.0, 0, plain), InputError);
}

TEST_CASE("observable gradients") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto poly = PolynomialObservable::random(rng, 3, 5).observable();
    const FourVector x(0.3, -0.2, 0.5, 0.1), p(1.2, 0.1, -0.3, 0.2);
    CHECK(gradient_check(poly, x, p) < 1e-6);
  }
  CHECK(gradient_check(hamiltonian_c5_observable(1.0, 0.5), FourVector(0, 0, 0, 0), FourVector(1.5, 0.2, 0, 0)) <
        1e-6);
}

TEST_CASE("Clifford bracket reduces to the Poisson bracket") {
  const double m = 1.0;
  const auto x0 = PolynomialObservable::coordinate(0).observable();
  const auto p0 = PolynomialObservable::momentum(0).observable();
  const auto s1 = make_state(FourVector(0.3, 0.1, 0, 0), on_shell(m, 0.2, 0, 0), Matrix2c::Identity(), m);
  CHECK(clifford_bracket(x0, p0, s1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(clifford_bracket(x0, x0, s1) == 0.0);

  std::mt19937_64 rng(29);
  std::normal_distribution<double> g;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = 0.2 + std::abs(g(rng));
    const FourVector x(g(rng), g(rng), g(rng), g(rng));
    const FourVector p = on_shell(m, 0.5 * g(rng), 0.5 * g(rng), 0.5 * g(rng));
    const auto s = make_state(x, p, mu * Matrix2c::Identity(), m);
    const auto n = PolynomialObservable::random(rng).observable();
    const auto mm = PolynomialObservable::random(rng).observable();
    const double pb = poisson_bracket(n, mm, s.x(), s.p_lower());
    const double cb = clifford_bracket(n, mm, s);
    CHECK(std::abs(cb - mu * pb) < 1e-9 * (1.0 + std::abs(pb)));
    CHECK(std::abs(cb + clifford_bracket(mm, n, s)) < 1e-12 * (1.0 + std::abs(cb)));
    CHECK(std::abs(cb - clifford_bracket_reduced(n, mm, s)) < 1e-9 * (1.0 + std::abs(cb)));
    ++checked;
  }
  CHECK(checked == 100);

  SUBCASE("unconstrained pair") {
    Matrix2c mixed;
    mixed << Complex(0.7, 0.2), Complex(0.3, -0.1), Complex(-0.4, 0.5), Complex(1.1, -0.3);
    const auto s = make_state(FourVector(0.1, 0.2, 0.3, 0.4), on_shell(m, 0.1, 0.2, 0.3), mixed, m);
    const auto x1 = PolynomialObservable::coordinate(1).observable();
    const auto p2 = PolynomialObservable::momentum(2).observable();
    const double cb = clifford_bracket(x1, p2, s);
    CHECK(std::abs(cb - clifford_bracket_reduced(x1, p2, s)) < 1e-12);
    CHECK(std::abs(cb - s.mu() * poisson_bracket(x1, p2, s.x(), s.p_lower())) > 1e-3);
  }
}
