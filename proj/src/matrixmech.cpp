#include "cliffdyn/matrixmech.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cliffdyn {

std::vector<ParticleState> resolve_particles(const std::vector<ParticleGram>& grams, double mass, double tau) {
  if (grams.empty()) throw InputError("resolve_particles: no particles");
  std::vector<BlockRequest> requests;
  for (std::size_t i = 0; i < grams.size(); ++i) {
    const std::string tag = std::to_string(i);
    requests.push_back({"c" + tag, 2});
    requests.push_back({"d" + tag, 2});
    requests.push_back({"h" + tag, 2});
  }
  const SpacePtr space = GeneratorSpace::allocate_blocks(requests);
  std::vector<ParticleState> out;
  for (std::size_t i = 0; i < grams.size(); ++i) {
    const std::string tag = std::to_string(i);
    const auto pair = resolve_pair(vec_to_spinor(grams[i].x), lower_indices(vec_to_spinor(grams[i].p)),
                                   grams[i].mixed, space, space->block("c" + tag), space->block("d" + tag),
                                   space->block("h" + tag));
    out.push_back(ParticleState::from_pair(pair, mass, tau));
  }
  return out;
}

namespace {

using SpinorBlock = std::array<std::array<CMatrix, 2>, 2>;

CMatrix pair_matrix(const std::vector<ClVector>& left, const std::vector<ClVector>& right, bool conj_left,
                    bool conj_right) {
  const auto n = static_cast<Eigen::Index>(left.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ClVector l = conj_left ? left[static_cast<std::size_t>(i)].conj() : left[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& r = right[static_cast<std::size_t>(j)];
      m(i, j) = bullet(l, conj_right ? r.conj() : r);
    }
  }
  return m;
}

SpinorBlock raise_block(const SpinorBlock& lo) {
  SpinorBlock up;
  up[0][0] = lo[1][1];
  up[0][1] = -lo[1][0];
  up[1][0] = -lo[0][1];
  up[1][1] = lo[0][0];
  return up;
}

std::array<CMatrix, 4> to_four_vector(const SpinorBlock& up) {
  std::array<CMatrix, 4> v;
  for (int mu = 0; mu < 4; ++mu) {
    CMatrix acc = CMatrix::Zero(up[0][0].rows(), up[0][0].cols());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) acc += (0.5 * sigma(mu)(b, a)) * up[a][b];
    v[static_cast<std::size_t>(mu)] = acc;
  }
  return v;
}

std::vector<std::size_t> support(const ParticleState& s) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < s.c[0].size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    bool used = false;
    for (int a = 0; a < 2; ++a) used = used || s.c[a].coeffs()(kk) != 0.0 || s.dstar[a].coeffs()(kk) != 0.0;
    if (used) idx.push_back(k);
  }
  return idx;
}

}  // namespace

SpinorBlock NSystem::x_spinor() const {
  SpinorBlock x;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) x[a][b] = pair_matrix(kets[a], kets[b], false, true);
  return x;
}

SpinorBlock NSystem::p_spinor_lower() const {
  SpinorBlock p;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) p[a][b] = pair_matrix(bras[b], bras[a], true, false);
  return p;
}

SpinorBlock NSystem::constraint() const {
  SpinorBlock k;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) k[a][b] = pair_matrix(kets[a], bras[b], false, false);
  return k;
}

std::array<CMatrix, 4> NSystem::X() const { return to_four_vector(x_spinor()); }

std::array<CMatrix, 4> NSystem::P_upper() const { return to_four_vector(raise_block(p_spinor_lower())); }

std::array<CMatrix, 4> NSystem::P_lower() const {
  auto p = P_upper();
  for (int mu = 1; mu < 4; ++mu) p[static_cast<std::size_t>(mu)] = -p[static_cast<std::size_t>(mu)];
  return p;
}

double NSystem::mu() const {
  const auto k = constraint();
  return (k[0][0].trace() + k[1][1].trace()).real() / (2.0 * static_cast<double>(n()));
}

double NSystem::constraint_residual() const {
  const auto k = constraint();
  const double mu_value = mu();
  const auto n_rows = static_cast<Eigen::Index>(n());
  double worst = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CMatrix target = CMatrix::Zero(n_rows, n_rows);
      if (a == b) target = mu_value * CMatrix::Identity(n_rows, n_rows);
      worst = std::max(worst, (k[a][b] - target).cwiseAbs().maxCoeff());
    }
  return worst;
}

NSystem assemble(const std::vector<ParticleState>& particles, double hbar) {
  if (particles.empty()) throw InputError("assemble: no particles");
  const SpacePtr space = particles.front().c[0].space();
  for (const auto& p : particles) {
    for (int a = 0; a < 2; ++a) {
      if (p.c[a].space() != space || p.dstar[a].space() != space) {
        throw InputError("assemble: particles must share one generator space");
      }
    }
    if (p.mass != particles.front().mass) throw InputError("assemble: particles must share one mass");
  }
  std::vector<int> owner(space->dim(), -1);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    for (std::size_t k : support(particles[i])) {
      if (owner[k] >= 0) throw InputError("assemble: particle generator blocks overlap");
      owner[k] = static_cast<int>(i);
    }
  }
  NSystem sys;
  sys.space = space;
  sys.mass = particles.front().mass;
  sys.hbar = hbar;
  sys.phi = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(particles.size()));
  for (const auto& p : particles) {
    for (int a = 0; a < 2; ++a) {
      sys.kets[a].push_back(p.c[a]);
      sys.bras[a].push_back(p.dstar[a]);
    }
  }
  return sys;
}

NSystem gauge_transform(const NSystem& sys, const CMatrix& u) {
  const auto n = static_cast<Eigen::Index>(sys.n());
  if (u.rows() != n || u.cols() != n) throw InputError("gauge_transform: U has the wrong shape");
  if ((u * u.adjoint() - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12) {
    throw InputError("gauge_transform: U is not unitary");
  }
  NSystem out = sys;
  for (int a = 0; a < 2; ++a) {
    for (Eigen::Index i = 0; i < n; ++i) {
      ClVector ket = ClVector::zero(sys.space);
      ClVector bra = ClVector::zero(sys.space);
      for (Eigen::Index k = 0; k < n; ++k) {
        ket += u(i, k) * sys.kets[a][static_cast<std::size_t>(k)];
        bra += std::conj(u(i, k)) * sys.bras[a][static_cast<std::size_t>(k)];
      }
      out.kets[a][static_cast<std::size_t>(i)] = std::move(ket);
      out.bras[a][static_cast<std::size_t>(i)] = std::move(bra);
    }
  }
  return out;
}

WeightedCharges weighted_charges(const NSystem& sys, const CMatrix& phi) {
  const auto k = sys.constraint();
  // C_A = C^C ε_{CA}: C_1 = −C^2, C_2 = C^1, so (C_A∙D_B) = Σ_C ε_{CA} K^C_B.
  std::array<std::array<CMatrix, 2>, 2> lowered;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      lowered[a][b] = CMatrix::Zero(k[0][0].rows(), k[0][0].cols());
      for (int c = 0; c < 2; ++c) lowered[a][b] += epsilon()(c, a) * k[c][b];
    }
  WeightedCharges out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.big_j(a, b) = (phi * (lowered[a][b] + lowered[b][a])).trace();
  const CMatrix trace_k = phi * (k[0][0] + k[1][1]);
  const Complex t = trace_k.trace();
  out.small_j = (Complex(0.0, 1.0) * (t - std::conj(t))).real();
  return out;
}

namespace {

void require_constraint(const NSystem& sys) {
  const double mu_value = sys.mu();
  if (mu_value == 0.0) throw PreconditionError("proper time undefined: mu vanishes");
  if (sys.constraint_residual() > 1e-9 * std::max(1.0, std::abs(mu_value))) {
    throw PreconditionError("Noether constraint C∙D = mu·1 does not hold");
  }
}

}  // namespace

Snapshots<NSystem> evolve_matrix_classical(const NSystem& sys, double taubar_end, std::size_t steps,
                                           std::size_t stride) {
  if (steps == 0 || stride == 0) throw InputError("evolve_matrix_classical: steps and stride must be positive");
  if (sys.hbar != 0.0) throw PreconditionError("evolve_matrix_classical needs a classical (hbar = 0) system");
  require_constraint(sys);
  const auto n = static_cast<Eigen::Index>(sys.n());
  const auto dim = static_cast<Eigen::Index>(sys.space->dim());
  const SpinorBlock p_up = raise_block(sys.p_spinor_lower());

  // Ket of D_E: column i is conj(d*_{iE}).
  std::array<CMatrix, 2> d_ket;
  for (int e = 0; e < 2; ++e) {
    d_ket[e].resize(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) d_ket[e].row(i) = sys.bras[e][static_cast<std::size_t>(i)].coeffs().conjugate();
  }
  // Velocity direction P^{AĖ} D_Ė, fixed for the free Hamiltonian.
  std::array<CMatrix, 2> drive;
  for (int a = 0; a < 2; ++a) drive[a] = p_up[a][0] * d_ket[0] + p_up[a][1] * d_ket[1];

  NSystem work = sys;
  auto to_rows = [&](const std::array<std::vector<ClVector>, 2>& kets) {
    CMatrix y(2 * n, dim);
    for (int a = 0; a < 2; ++a)
      for (Eigen::Index i = 0; i < n; ++i) y.row(a * n + i) = kets[a][static_cast<std::size_t>(i)].coeffs();
    return y;
  };
  auto from_rows = [&](const CMatrix& y, NSystem& s) {
    for (int a = 0; a < 2; ++a)
      for (Eigen::Index i = 0; i < n; ++i) s.kets[a][static_cast<std::size_t>(i)].coeffs() = y.row(a * n + i);
  };
  auto rhs = [&](const CMatrix& y) {
    from_rows(y, work);
    const double ebar = 1.0 / (2.0 * sys.mass * work.mu());
    CMatrix dy(2 * n, dim);
    for (int a = 0; a < 2; ++a) dy.middleRows(a * n, n) = ebar * drive[a];
    return dy;
  };

  Snapshots<NSystem> out;
  out.tau.push_back(0.0);
  out.values.push_back(sys);
  const double h = taubar_end / static_cast<double>(steps);
  CMatrix y = to_rows(sys.kets);
  for (std::size_t k = 0; k < steps; ++k) {
    const CMatrix k1 = rhs(y);
    const CMatrix k2 = rhs(y + 0.5 * h * k1);
    const CMatrix k3 = rhs(y + 0.5 * h * k2);
    const CMatrix k4 = rhs(y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) throw NumericalError("evolve_matrix_classical: non-finite state");
    if ((k + 1) % stride == 0 || k + 1 == steps) {
      NSystem snap = sys;
      from_rows(y, snap);
      out.tau.push_back(h * static_cast<double>(k + 1));
      out.values.push_back(std::move(snap));
    }
  }
  return out;
}

Eigen::VectorXd proper_time_rate(const NSystem& sys) {
  const CMatrix p0 = sys.P_upper()[0];
  return hermitian_eig(HermitianMatrix(p0, 1e-10)).values / sys.mass;
}

MatrixHamiltonian free_matrix_hamiltonian(double mass) {
  return [mass](const CMatrix&, const CMatrix& p) {
    const auto n = p.rows();
    return CMatrix((p * p - mass * mass * CMatrix::Identity(n, n)) / (2.0 * mass));
  };
}

MatrixHamiltonian oscillator_hamiltonian(double mass, double omega) {
  return [mass, omega](const CMatrix& x, const CMatrix& p) {
    return CMatrix(p * p / (2.0 * mass) + 0.5 * mass * omega * omega * x * x);
  };
}

Snapshots<PhasePoint> covariant_evolve(const CMatrix& x0, const CMatrix& p0, const MatrixHamiltonian& h,
                                       const Connection& gamma, double hbar, double tau_end, std::size_t steps,
                                       std::size_t stride) {
  if (!(hbar > 0.0)) throw InputError("covariant_evolve: hbar must be positive");
  if (steps == 0 || stride == 0) throw InputError("covariant_evolve: steps and stride must be positive");
  if (x0.rows() != x0.cols() || p0.rows() != p0.cols() || x0.rows() != p0.rows()) {
    throw InputError("covariant_evolve: X and P must be square and of equal size");
  }
  const Complex i_unit(0.0, 1.0);
  const Complex inv_ihbar = 1.0 / (i_unit * hbar);
  auto rhs = [&](const PhasePoint& z, double tau) {
    const CMatrix hm = h(z.x, z.p);
    PhasePoint dz{inv_ihbar * (z.x * hm - hm * z.x), inv_ihbar * (z.p * hm - hm * z.p)};
    if (gamma) {
      const CMatrix g = gamma(tau);
      dz.x += i_unit * (g * z.x - z.x * g);
      dz.p += i_unit * (g * z.p - z.p * g);
    }
    return dz;
  };
  auto axpy = [](const PhasePoint& z, double s, const PhasePoint& dz) {
    return PhasePoint{z.x + s * dz.x, z.p + s * dz.p};
  };

  Snapshots<PhasePoint> out;
  PhasePoint z{x0, p0};
  out.tau.push_back(0.0);
  out.values.push_back(z);
  const double dt = tau_end / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tau = dt * static_cast<double>(k);
    const PhasePoint k1 = rhs(z, tau);
    const PhasePoint k2 = rhs(axpy(z, 0.5 * dt, k1), tau + 0.5 * dt);
    const PhasePoint k3 = rhs(axpy(z, 0.5 * dt, k2), tau + 0.5 * dt);
    const PhasePoint k4 = rhs(axpy(z, dt, k3), tau + dt);
    z.x += (dt / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    z.p += (dt / 6.0) * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    if (!z.x.allFinite() || !z.p.allFinite()) throw NumericalError("covariant_evolve: non-finite state");
    if ((k + 1) % stride == 0 || k + 1 == steps) {
      out.tau.push_back(dt * static_cast<double>(k + 1));
      out.values.push_back(z);
    }
  }
  return out;
}

Snapshots<PhasePoint> evolve_heisenberg(const CMatrix& x0, const CMatrix& p0, const MatrixHamiltonian& h,
                                        double hbar, double tau_end, std::size_t steps, std::size_t stride) {
  return covariant_evolve(x0, p0, h, Connection{}, hbar, tau_end, steps, stride);
}

Snapshots<CVector> evolve_state(const CVector& s0, const Connection& gamma, double tau_end, std::size_t steps,
                                std::size_t stride) {
  if (steps == 0 || stride == 0) throw InputError("evolve_state: steps and stride must be positive");
  const Complex i_unit(0.0, 1.0);
  auto rhs = [&](const CVector& s, double tau) -> CVector {
    if (!gamma) return CVector::Zero(s.size());
    return i_unit * (gamma(tau) * s);
  };
  Snapshots<CVector> out;
  CVector s = s0;
  out.tau.push_back(0.0);
  out.values.push_back(s);
  const double dt = tau_end / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tau = dt * static_cast<double>(k);
    const CVector k1 = rhs(s, tau);
    const CVector k2 = rhs(s + 0.5 * dt * k1, tau + 0.5 * dt);
    const CVector k3 = rhs(s + 0.5 * dt * k2, tau + 0.5 * dt);
    const CVector k4 = rhs(s + dt * k3, tau + dt);
    s += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!s.allFinite()) throw NumericalError("evolve_state: non-finite amplitudes");
    if ((k + 1) % stride == 0 || k + 1 == steps) {
      out.tau.push_back(dt * static_cast<double>(k + 1));
      out.values.push_back(s);
    }
  }
  return out;
}

TruncatedOscillator truncated_oscillator(std::size_t n, double mass, double omega, double hbar) {
  if (n < 2) throw InputError("truncated_oscillator: need at least two levels");
  if (!(mass > 0.0) || !(omega > 0.0) || !(hbar > 0.0)) {
    throw InputError("truncated_oscillator: mass, omega and hbar must be positive");
  }
  const auto size = static_cast<Eigen::Index>(n);
  CMatrix lower = CMatrix::Zero(size, size);
  for (Eigen::Index k = 0; k + 1 < size; ++k) lower(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  const CMatrix raise = lower.adjoint();
  TruncatedOscillator osc;
  osc.x = std::sqrt(hbar / (2.0 * mass * omega)) * (lower + raise);
  osc.p = Complex(0.0, std::sqrt(hbar * mass * omega / 2.0)) * (raise - lower);
  osc.h = oscillator_hamiltonian(mass, omega)(osc.x, osc.p);
  return osc;
}

Complex expectation(const CVector& s, const CMatrix& m) { return s.dot(m * s); }

ClVector expectation_ket(const CVector& s, const std::vector<ClVector>& kets) {
  if (static_cast<std::size_t>(s.size()) != kets.size() || kets.empty()) {
    throw InputError("expectation_ket: state and ket sizes differ");
  }
  ClVector out = ClVector::zero(kets.front().space());
  for (std::size_t i = 0; i < kets.size(); ++i) out += std::conj(s(static_cast<Eigen::Index>(i))) * kets[i];
  return out;
}

Eigen::VectorXd born_probabilities(const CVector& s, const CMatrix& basis) {
  if (basis.rows() != s.size()) throw InputError("born_probabilities: basis and state sizes differ");
  const double norm = s.squaredNorm();
  if (!(norm > 0.0)) throw InputError("born_probabilities: zero state");
  return (basis.adjoint() * s).cwiseAbs2() / norm;
}

std::size_t born_sample(const CVector& s, const CMatrix& basis, std::mt19937_64& rng) {
  const Eigen::VectorXd prob = born_probabilities(s, basis);
  std::uniform_real_distribution<double> u(0.0, prob.sum());
  const double r = u(rng);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < prob.size(); ++i) {
    acc += prob(i);
    if (r < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(prob.size() - 1);
}

CMatrix unitary_exp(const CMatrix& hermitian, double tau) {
  const auto eig = hermitian_eig(HermitianMatrix(hermitian, 1e-10));
  CVector phases(eig.values.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, tau * eig.values(k));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace cliffdyn
