#include "cliffdyn/particle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cliffdyn {

namespace {

Matrix2c gram(const std::array<ClVector, 2>& u, const std::array<ClVector, 2>& v, bool conj_v) {
  Matrix2c m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = bullet(u[a], conj_v ? v[b].conj() : v[b]);
  return m;
}

double det_real(const Matrix2c& u) {
  const Complex d = minkowski_norm(u);
  return d.real();
}

double ipow(double base, int exponent) {
  double r = 1.0;
  for (int k = 0; k < exponent; ++k) r *= base;
  return r;
}

}  // namespace

ParticleState ParticleState::from_pair(const PairResolution& pair, double mass, double tau) {
  if (pair.c.size() != 2 || pair.dstar.size() != 2) throw InputError("from_pair: expected two spinor components");
  ParticleState s;
  s.c = {pair.c[0], pair.c[1]};
  s.dstar = {pair.dstar[0], pair.dstar[1]};
  s.mass = mass;
  s.tau = tau;
  return s;
}

Matrix2c ParticleState::x_spinor() const { return gram(c, c, true); }
Matrix2c ParticleState::p_spinor_lower() const { return gram(dstar, dstar, true); }
Matrix2c ParticleState::charges_q() const { return gram(dstar, c, false); }
FourVector ParticleState::x() const { return spinor_to_vec_real(x_spinor()); }
FourVector ParticleState::p_upper() const { return spinor_to_vec_real(raise_indices(p_spinor_lower())); }
FourVector ParticleState::p_lower() const { return lower_vector(p_upper()); }
double ParticleState::p_squared() const { return det_real(p_spinor_lower()); }
double ParticleState::mu() const { return 0.5 * charges_q().trace().real(); }

Einbein Einbein::constant(double value, double tau0) {
  if (!std::isfinite(value) || !std::isfinite(tau0)) throw InputError("einbein: non-finite parameter");
  Einbein e;
  e.kind = Kind::Constant;
  e.a = value;
  e.tau0 = tau0;
  return e;
}

Einbein Einbein::linear(double intercept, double slope, double tau0) {
  if (!std::isfinite(intercept) || !std::isfinite(slope) || !std::isfinite(tau0)) {
    throw InputError("einbein: non-finite parameter");
  }
  Einbein e;
  e.kind = Kind::Linear;
  e.a = intercept;
  e.b = slope;
  e.tau0 = tau0;
  return e;
}

void Einbein::require_positive(double lo, double hi) const {
  if (!((*this)(lo) > 0.0) || !((*this)(hi) > 0.0)) {
    std::ostringstream msg;
    msg << "einbein must be positive on [" << lo << ", " << hi << "]";
    throw InputError(msg.str());
  }
}

double gradient_check(const Observable& obs, const FourVector& x, const FourVector& p, double h) {
  const FourVector gx = obs.grad_x(x, p);
  const FourVector gp = obs.grad_p(x, p);
  double worst = 0.0;
  for (int k = 0; k < 8; ++k) {
    FourVector xp = x, xm = x, pp = p, pm = p;
    const bool is_x = k < 4;
    const int mu = k % 4;
    const double scale = std::max(1.0, std::abs(is_x ? x(mu) : p(mu)));
    const double step = h * scale;
    if (is_x) {
      xp(mu) += step;
      xm(mu) -= step;
    } else {
      pp(mu) += step;
      pm(mu) -= step;
    }
    const double fd = (obs.value(xp, pp) - obs.value(xm, pm)) / (2.0 * step);
    const double an = is_x ? gx(mu) : gp(mu);
    worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
  }
  return worst;
}

double PolynomialObservable::value(const FourVector& x, const FourVector& p) const {
  double total = 0.0;
  for (const auto& t : terms) {
    double v = t.coeff;
    for (int k = 0; k < 4; ++k) v *= ipow(x(k), t.powers[static_cast<std::size_t>(k)]);
    for (int k = 0; k < 4; ++k) v *= ipow(p(k), t.powers[static_cast<std::size_t>(k + 4)]);
    total += v;
  }
  return total;
}

Observable PolynomialObservable::observable() const {
  const auto self = std::make_shared<PolynomialObservable>(*this);
  auto grad = [self](const FourVector& x, const FourVector& p, int offset) {
    FourVector g = FourVector::Zero();
    for (const auto& t : self->terms) {
      for (int k = 0; k < 4; ++k) {
        const int power = t.powers[static_cast<std::size_t>(k + offset)];
        if (power == 0) continue;
        double v = t.coeff * power;
        for (int j = 0; j < 8; ++j) {
          const double base = j < 4 ? x(j) : p(j - 4);
          const int e = t.powers[static_cast<std::size_t>(j)] - (j == k + offset ? 1 : 0);
          v *= ipow(base, e);
        }
        g(k) += v;
      }
    }
    return g;
  };
  Observable obs;
  obs.value = [self](const FourVector& x, const FourVector& p) { return self->value(x, p); };
  obs.grad_x = [grad](const FourVector& x, const FourVector& p) { return grad(x, p, 0); };
  obs.grad_p = [grad](const FourVector& x, const FourVector& p) { return grad(x, p, 4); };
  return obs;
}

PolynomialObservable PolynomialObservable::random(std::mt19937_64& rng, int max_degree, int n_terms) {
  std::uniform_int_distribution<int> var(0, 7);
  std::uniform_int_distribution<int> degree(1, std::max(1, max_degree));
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  PolynomialObservable poly;
  for (int t = 0; t < n_terms; ++t) {
    Term term;
    term.coeff = coeff(rng);
    const int d = degree(rng);
    for (int k = 0; k < d; ++k) term.powers[static_cast<std::size_t>(var(rng))] += 1;
    poly.terms.push_back(term);
  }
  return poly;
}

PolynomialObservable PolynomialObservable::coordinate(int mu) {
  PolynomialObservable poly;
  Term t;
  t.coeff = 1.0;
  t.powers[static_cast<std::size_t>(mu)] = 1;
  poly.terms.push_back(t);
  return poly;
}

PolynomialObservable PolynomialObservable::momentum(int mu) {
  PolynomialObservable poly;
  Term t;
  t.coeff = 1.0;
  t.powers[static_cast<std::size_t>(mu + 4)] = 1;
  poly.terms.push_back(t);
  return poly;
}

double lagrangian_c2(const std::array<ClVector, 2>& cdot, double mass) {
  const double d = det_real(gram(cdot, cdot, true));
  if (d < 0.0) throw std::domain_error("lagrangian_c2: negative radicand (motion is not timelike)");
  return 4.0 * std::sqrt(mass) * std::pow(d, 0.25);
}

double lagrangian_c21(const std::array<ClVector, 2>& cdot, double einbein, double mass) {
  const double d = det_real(gram(cdot, cdot, true));
  if (d < 0.0) throw std::domain_error("lagrangian_c21: negative radicand (motion is not timelike)");
  return 3.0 * std::pow(einbein, -1.0 / 3.0) * std::cbrt(d) + mass * mass * einbein;
}

namespace {

std::array<ClVector, 2> momenta_with_power(const std::array<ClVector, 2>& cdot, double prefactor, double power) {
  const Matrix2c u = gram(cdot, cdot, true);
  const double d = det_real(u);
  if (!(d > 0.0)) throw std::domain_error("momenta: velocity Gram determinant must be positive");
  const Matrix2c u_lo = lower_indices(u);
  const double s = prefactor * std::pow(d, power);
  std::array<ClVector, 2> out;
  for (int a = 0; a < 2; ++a) {
    ClVector v = ClVector::zero(cdot[0].space());
    for (int b = 0; b < 2; ++b) v += (s * u_lo(a, b)) * cdot[b].conj();
    out[a] = std::move(v);
  }
  return out;
}

}  // namespace

std::array<ClVector, 2> momenta_c2(const std::array<ClVector, 2>& cdot, double mass) {
  return momenta_with_power(cdot, std::sqrt(mass), -0.75);
}

std::array<ClVector, 2> momenta_c21(const std::array<ClVector, 2>& cdot, double einbein) {
  return momenta_with_power(cdot, std::pow(einbein, -1.0 / 3.0), -2.0 / 3.0);
}

double legendre_c21(const std::array<ClVector, 2>& cdot, double einbein, double mass) {
  const auto dstar = momenta_c21(cdot, einbein);
  Complex pairing = 0.0;
  for (int a = 0; a < 2; ++a) pairing += bullet(dstar[a], cdot[a]);
  return 2.0 * pairing.real() - lagrangian_c21(cdot, einbein, mass);
}

double hamiltonian_c5(const ParticleState& state, double einbein) {
  return einbein * (state.p_squared() - state.mass * state.mass);
}

Observable hamiltonian_c5_observable(double mass, double einbein) {
  Observable h;
  h.value = [mass, einbein](const FourVector&, const FourVector& p) {
    return einbein * (minkowski_dot(p, p) - mass * mass);
  };
  h.grad_x = [](const FourVector&, const FourVector&) { return FourVector(FourVector::Zero()); };
  h.grad_p = [einbein](const FourVector&, const FourVector& p) {
    return FourVector(2.0 * einbein * lower_vector(p));
  };
  return h;
}

Matrix2c spinor_grad_x(const FourVector& grad_x) {
  Matrix2c m = Matrix2c::Zero();
  for (int mu = 0; mu < 4; ++mu) m += (0.5 * grad_x(mu)) * sigma(mu).transpose();
  return m;
}

Matrix2c spinor_grad_p(const FourVector& grad_p) {
  Matrix2c m = Matrix2c::Zero();
  for (int nu = 0; nu < 4; ++nu) m += (0.5 * grad_p(nu)) * sigma(nu);
  return m;
}

ParticleRate canonical_rhs(const ParticleState& state, const Observable& hamiltonian) {
  const FourVector x = state.x();
  const FourVector p = state.p_lower();
  const Matrix2c hx = spinor_grad_x(hamiltonian.grad_x(x, p));
  const Matrix2c hp = spinor_grad_p(hamiltonian.grad_p(x, p));
  const SpacePtr& space = state.c[0].space();
  ParticleRate rate;
  for (int a = 0; a < 2; ++a) {
    ClVector dc = ClVector::zero(space);
    ClVector dd = ClVector::zero(space);
    for (int e = 0; e < 2; ++e) {
      dc += hp(a, e) * state.dstar[e].conj();
      dd -= hx(a, e) * state.c[e].conj();
    }
    rate.dc[a] = std::move(dc);
    rate.ddstar[a] = std::move(dd);
  }
  return rate;
}

ParticleRate canonical_rhs(const ParticleState& state, double einbein) {
  return canonical_rhs(state, hamiltonian_c5_observable(state.mass, einbein));
}

NoetherCharges noether_charges(const ParticleState& state) {
  const Matrix2c q = state.charges_q();
  const Matrix2c qe = q * epsilon();
  NoetherCharges out;
  out.big_j = qe + qe.transpose();
  out.small_j = -2.0 * q.trace().imag();
  return out;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double mu_of_tau(const Einbein& e, double mass, double tau) {
  const double m2 = mass * mass;
  const double scale = std::max(1.0, std::abs(e(e.tau0)) + std::abs(e(tau)));
  const double tol = 1e-12 * scale * std::max(1.0, std::abs(tau - e.tau0));
  return adaptive_simpson([&](double t) { return m2 * e(t); }, e.tau0, tau, tol);
}

namespace {

// Flat layout: c^1, c^2, d*_1, d*_2, then proper time.
CVector pack(const ParticleState& s, double taubar) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.c[0].size());
  CVector y(4 * n + 1);
  y.segment(0, n) = s.c[0].coeffs();
  y.segment(n, n) = s.c[1].coeffs();
  y.segment(2 * n, n) = s.dstar[0].coeffs();
  y.segment(3 * n, n) = s.dstar[1].coeffs();
  y(4 * n) = taubar;
  return y;
}

void unpack(const CVector& y, ParticleState& s) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.c[0].size());
  s.c[0].coeffs() = y.segment(0, n);
  s.c[1].coeffs() = y.segment(n, n);
  s.dstar[0].coeffs() = y.segment(2 * n, n);
  s.dstar[1].coeffs() = y.segment(3 * n, n);
}

}  // namespace

Trajectory integrate(const ParticleState& state0, const Einbein& e, double tau_end, std::size_t steps,
                     const IntegrateOptions& options) {
  if (steps == 0) throw InputError("integrate: steps must be at least 1");
  if (!std::isfinite(tau_end)) throw InputError("integrate: non-finite end time");
  if (options.stride == 0) throw InputError("integrate: stride must be at least 1");
  const double tau_start = state0.tau;
  e.require_positive(std::min(tau_start, tau_end), std::max(tau_start, tau_end));

  const double mu0 = state0.mu();
  if (options.reparametrize) {
    const double lo = std::min(tau_start, tau_end), hi = std::max(tau_start, tau_end);
    if (e.tau0 >= lo && e.tau0 <= hi) {
      throw PreconditionError("proper time undefined: turning point lies inside the integration window");
    }
    if (mu0 == 0.0) throw PreconditionError("proper time undefined: mu vanishes at the initial state");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(state0.c[0].size());
  const double h = (tau_end - tau_start) / static_cast<double>(steps);
  const double mass = state0.mass;
  ParticleState work = state0;

  auto rhs = [&](const CVector& y, double tau) {
    unpack(y, work);
    const double ev = e(tau);
    const ParticleRate r = canonical_rhs(work, ev);
    CVector dy(y.size());
    dy.segment(0, n) = r.dc[0].coeffs();
    dy.segment(n, n) = r.dc[1].coeffs();
    dy.segment(2 * n, n) = r.ddstar[0].coeffs();
    dy.segment(3 * n, n) = r.ddstar[1].coeffs();
    dy(4 * n) = 2.0 * mass * work.mu() * ev;
    return dy;
  };

  Trajectory traj;
  traj.einbein = e;
  traj.states.push_back(state0);
  if (options.reparametrize) traj.taubar.push_back(0.0);

  CVector y = pack(state0, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tau = tau_start + h * static_cast<double>(k);
    const CVector k1 = rhs(y, tau);
    const CVector k2 = rhs(y + 0.5 * h * k1, tau + 0.5 * h);
    const CVector k3 = rhs(y + 0.5 * h * k2, tau + 0.5 * h);
    const CVector k4 = rhs(y + h * k3, tau + h);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) throw NumericalError("integrate: non-finite state at step " + std::to_string(k + 1));
    if ((k + 1) % options.stride == 0 || k + 1 == steps) {
      ParticleState s = state0;
      unpack(y, s);
      s.tau = (k + 1 == steps) ? tau_end : tau + h;
      if (options.reparametrize) {
        const double mu = s.mu();
        if (mu == 0.0 || (mu > 0.0) != (mu0 > 0.0)) {
          throw PreconditionError("proper time undefined: mu changes sign inside the integration window");
        }
        traj.taubar.push_back(y(4 * n).real());
      }
      traj.states.push_back(std::move(s));
    }
  }
  return traj;
}

namespace {

struct SpinorGradients {
  Matrix2c gx;
  Matrix2c gp;
};

SpinorGradients spinor_gradients(const Observable& obs, const FourVector& x, const FourVector& p) {
  return {spinor_grad_x(obs.grad_x(x, p)), spinor_grad_p(obs.grad_p(x, p))};
}

struct CliffordDerivatives {
  std::array<ClVector, 2> dc, dcbar, ddstar, dd;
};

CliffordDerivatives clifford_derivatives(const SpinorGradients& g, const ParticleState& s) {
  const SpacePtr& space = s.c[0].space();
  CliffordDerivatives out;
  for (int a = 0; a < 2; ++a) {
    ClVector dc = ClVector::zero(space), dcbar = ClVector::zero(space);
    ClVector ddstar = ClVector::zero(space), dd = ClVector::zero(space);
    for (int e = 0; e < 2; ++e) {
      dc += g.gx(a, e) * s.c[e].conj();        // ∂/∂c^A
      dcbar += g.gx(e, a) * s.c[e];            // ∂/∂c*^A
      ddstar += g.gp(a, e) * s.dstar[e].conj();  // ∂/∂d*_A
      dd += g.gp(e, a) * s.dstar[e];           // ∂/∂d_A
    }
    out.dc[a] = std::move(dc);
    out.dcbar[a] = std::move(dcbar);
    out.ddstar[a] = std::move(ddstar);
    out.dd[a] = std::move(dd);
  }
  return out;
}

}  // namespace

double clifford_bracket(const Observable& n, const Observable& m, const ParticleState& state) {
  const FourVector x = state.x();
  const FourVector p = state.p_lower();
  const auto dn = clifford_derivatives(spinor_gradients(n, x, p), state);
  const auto dm = clifford_derivatives(spinor_gradients(m, x, p), state);
  Complex total = 0.0;
  for (int a = 0; a < 2; ++a) {
    total += bullet(dn.dc[a], dm.ddstar[a]) + bullet(dn.dcbar[a], dm.dd[a]);
    total -= bullet(dm.dc[a], dn.ddstar[a]) + bullet(dm.dcbar[a], dn.dd[a]);
  }
  return total.real();
}

double clifford_bracket_reduced(const Observable& n, const Observable& m, const ParticleState& state) {
  const FourVector x = state.x();
  const FourVector p = state.p_lower();
  const Matrix2c mixed = state.charges_q().transpose();  // c^B∙d*_F
  Eigen::Matrix4d w;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      Complex acc = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int f = 0; f < 2; ++f) acc += sigma(mu)(b, a) * sigma(nu)(a, f) * std::conj(mixed(b, f));
      w(mu, nu) = 0.5 * acc.real();
    }
  }
  const FourVector nx = n.grad_x(x, p), np = n.grad_p(x, p);
  const FourVector mx = m.grad_x(x, p), mp = m.grad_p(x, p);
  return nx.dot(w * mp) - mx.dot(w * np);
}

double poisson_bracket(const Observable& n, const Observable& m, const FourVector& x, const FourVector& p) {
  return n.grad_x(x, p).dot(m.grad_p(x, p)) - m.grad_x(x, p).dot(n.grad_p(x, p));
}

}  // namespace cliffdyn
