#include "cliffdyn/acceptance.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cliffdyn/clifford.hpp"
#include "cliffdyn/lie.hpp"
#include "cliffdyn/matrixmech.hpp"
#include "cliffdyn/parallel.hpp"
#include "cliffdyn/particle.hpp"
#include "cliffdyn/spinor.hpp"
#include "cliffdyn/string.hpp"
#include "json.hpp"

namespace cliffdyn {

namespace {

constexpr double kPi = std::numbers::pi;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

AcceptanceCheck below(std::string name, double value, double bound) {
  return {std::move(name), value, "< " + sci(bound), std::isfinite(value) && value < bound};
}

AcceptanceCheck exactly_zero(std::string name, double value) { return {std::move(name), value, "== 0", value == 0.0}; }

AcceptanceCheck within(std::string name, double value, double centre, double band) {
  return {std::move(name), value, sci(centre) + " +- " + sci(band),
          std::isfinite(value) && std::abs(value - centre) <= band};
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

using Checks = std::vector<AcceptanceCheck>;

CMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return Eigen::HouseholderQR<CMatrix>(a).householderQ() * CMatrix::Identity(n, n);
}

FourVector on_shell(double m, double px, double py, double pz) {
  return FourVector(std::sqrt(m * m + px * px + py * py + pz * pz), px, py, pz);
}

ParticleState make_state(const FourVector& x, const FourVector& p_up, const Matrix2c& mixed, double mass,
                         double tau) {
  const auto pair = resolve_pair(vec_to_spinor(x), lower_indices(vec_to_spinor(p_up)), mixed);
  return ParticleState::from_pair(pair, mass, tau);
}

// ---- 1: Gram resolution ----------------------------------------------------

Checks proposition_suite(std::mt19937_64& rng, const Tolerances& tol) {
  std::uniform_int_distribution<int> size(1, 8), kind(0, 2);
  std::normal_distribution<double> g;
  double residual = 0.0, null = 0.0;
  int with_zero = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    Eigen::VectorXd lambda(n);
    bool zero = false;
    for (int i = 0; i < n; ++i) {
      const int k = kind(rng);
      lambda(i) = k == 0 ? 0.0 : (k == 1 ? 1.0 : -1.0) * (0.1 + std::abs(g(rng)));
      zero = zero || k == 0;
    }
    with_zero += zero;
    const CMatrix u = random_unitary(rng, n);
    CMatrix h = u * lambda.cast<Complex>().asDiagonal() * u.adjoint();
    h = 0.5 * (h + h.adjoint());
    const auto res = resolve_hermitian(HermitianMatrix(h), GeneratorSpace::allocate(2 * n, 2 * n));
    residual = std::max(residual, res.residual());
    null = std::max(null, res.null_residual());
  }
  return {below("max |c_i.c_j* - H_ij|", residual, tol.gram_residual),
          below("max |c_i.c_j|", null, tol.null_residual),
          {"matrices with zero eigenvalues", double(with_zero), "> 0", with_zero > 0}};
}

// ---- 2: four-vector identity ----------------------------------------------

Checks four_vector_suite(std::mt19937_64& rng, const Tolerances& tol) {
  std::normal_distribution<double> g;
  double identity = 0.0, norm = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const FourVector v(g(rng), g(rng), g(rng), g(rng));
    const Matrix2c s = vec_to_spinor(v);
    const double scale = std::max(1.0, v.squaredNorm());
    identity = std::max(identity, four_vector_identity_residual(s) / scale);
    const Matrix2c contraction = lower_indices(s) * s.transpose();
    norm = std::max(norm, std::abs(contraction(0, 0) - minkowski_dot(v, v)) / scale);
  }
  return {below("max relative identity residual", identity, tol.four_vector),
          below("max relative |x.x - det x|", norm, tol.four_vector)};
}

// ---- 3: bracket reduction --------------------------------------------------

Checks bracket_suite(std::mt19937_64& rng, const Tolerances& tol) {
  std::normal_distribution<double> g;
  const double m = 1.0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = 0.2 + std::abs(g(rng));
    const FourVector x(g(rng), g(rng), g(rng), g(rng));
    const FourVector p = on_shell(m, 0.5 * g(rng), 0.5 * g(rng), 0.5 * g(rng));
    const auto s = make_state(x, p, mu * Matrix2c::Identity(), m, 0.0);
    const auto n = PolynomialObservable::random(rng).observable();
    const auto k = PolynomialObservable::random(rng).observable();
    const double pb = poisson_bracket(n, k, s.x(), s.p_lower());
    const double cb = clifford_bracket(n, k, s);
    worst = std::max(worst, std::abs(cb - mu * pb) / (1.0 + std::abs(pb)));
  }
  return {below("max |CB - mu PB| / (1 + |PB|)", worst, tol.bracket_reduction)};
}

// ---- 4: particle dynamics --------------------------------------------------

Checks particle_suite(std::mt19937_64& rng, const Tolerances& tol) {
  std::normal_distribution<double> g;
  const double m = 1.2;
  const auto e = Einbein::constant(0.75, -1.0);
  const double tau_start = 0.0, tau_end = 2.0;
  const FourVector x0(g(rng), g(rng), g(rng), g(rng));
  const FourVector p = on_shell(m, 0.4 * g(rng), 0.4 * g(rng), 0.4 * g(rng));
  const auto s0 = make_state(x0, p, mu_of_tau(e, m, tau_start) * Matrix2c::Identity(), m, tau_start);
  const auto traj = integrate(s0, e, tau_end, 10000);
  double line = 0.0, shell = 0.0, mu_err = 0.0;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    line = std::max(line, (s.x() - (x0 + p * traj.taubar[k] / m)).cwiseAbs().maxCoeff());
    shell = std::max(shell, std::abs(s.p_squared() - m * m));
    mu_err = std::max(mu_err, std::abs(s.mu() - mu_of_tau(e, m, s.tau)));
  }
  return {below("max |x - x0 - p taubar / m|", line, tol.trajectory),
          below("max |p.p - m^2|", shell, tol.trajectory),
          below("max |mu - integral m^2 e|", mu_err, tol.trajectory),
          {"steps", double(traj.states.size() - 1), "== 10000", traj.states.size() == 10001}};
}

// ---- 5: U(N) covariance ----------------------------------------------------

Checks gauge_suite(std::mt19937_64& rng, const Tolerances& tol) {
  std::normal_distribution<double> g;
  const double m = 1.0, mu = 0.6;
  std::vector<ParticleGram> grams;
  for (int i = 0; i < 4; ++i)
    grams.push_back({FourVector(g(rng), g(rng), g(rng), g(rng)),
                     on_shell(m, 0.4 * g(rng), 0.4 * g(rng), 0.4 * g(rng)), mu * Matrix2c::Identity()});
  const NSystem sys = assemble(resolve_particles(grams, m));
  const CMatrix u = random_unitary(rng, 4);
  const double taubar = 1.0;
  const NSystem a = evolve_matrix_classical(gauge_transform(sys, u), taubar, 1000, 1000).values.back();
  const NSystem b = gauge_transform(evolve_matrix_classical(sys, taubar, 1000, 1000).values.back(), u);
  double evolve = 0.0;
  for (int k = 0; k < 4; ++k)
    evolve = std::max({evolve, max_abs(a.X()[k] - b.X()[k]), max_abs(a.P_lower()[k] - b.P_lower()[k])});
  const NSystem moved = gauge_transform(sys, u);
  const double constraint = std::max({moved.constraint_residual(), a.constraint_residual(),
                                      std::abs(moved.mu() - sys.mu())});
  return {below("max |evolve(gauge) - gauge(evolve)|", evolve, tol.gauge_evolution),
          below("max |U K U^dag - mu 1|", constraint, tol.gauge_constraint)};
}

// ---- 6: picture equivalence ------------------------------------------------

Checks picture_suite(std::mt19937_64& rng, const Tolerances& tol) {
  std::normal_distribution<double> g;
  const double hbar = 0.5, m = 1.3, w = 0.8, t_end = 2.0;
  const std::size_t n = 20, interior = n - 2, steps = 10000, stride = 2500;
  const auto osc = truncated_oscillator(n, m, w, hbar);
  const CMatrix gbar = -osc.h / hbar;
  const Connection schrodinger = [&](double) { return gbar; };
  const auto heis = evolve_heisenberg(osc.x, osc.p, oscillator_hamiltonian(m, w), hbar, t_end, steps, stride);

  // Matrix elements between evolved basis states of the interior block.
  std::vector<Snapshots<CVector>> basis(interior);
  parallel_for(interior, [&](std::size_t i) {
    basis[i] = evolve_state(CVector::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)), schrodinger,
                            t_end, steps, stride);
  });
  double elements = 0.0;
  for (std::size_t k = 0; k < heis.values.size(); ++k)
    for (std::size_t i = 0; i < interior; ++i)
      for (std::size_t j = 0; j < interior; ++j) {
        const auto& si = basis[i].values[k];
        const auto& sj = basis[j].values[k];
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        elements = std::max({elements, std::abs(si.dot(osc.x * sj) - heis.values[k].x(ii, jj)),
                             std::abs(si.dot(osc.p * sj) - heis.values[k].p(ii, jj))});
      }

  // A random superposition of interior levels.
  CVector s0 = CVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < interior; ++i) s0(static_cast<Eigen::Index>(i)) = Complex(g(rng), g(rng));
  s0.normalize();
  const auto states = evolve_state(s0, schrodinger, t_end, steps, stride);
  double expect = 0.0;
  for (std::size_t k = 0; k < states.values.size(); ++k)
    expect = std::max({expect, std::abs(expectation(states.values[k], osc.x) - expectation(s0, heis.values[k].x)),
                       std::abs(expectation(states.values[k], osc.p) - expectation(s0, heis.values[k].p))});

  const auto frozen = covariant_evolve(osc.x, osc.p, oscillator_hamiltonian(m, w), schrodinger, hbar, t_end, 1000,
                                       1000);
  const double stationary = std::max(max_abs(frozen.values.back().x - osc.x), max_abs(frozen.values.back().p - osc.p));
  return {below("max interior matrix-element mismatch", elements, tol.picture),
          below("max expectation mismatch", expect, tol.picture),
          below("max |X, P drift| with Gamma = -H/hbar", stationary, tol.stationary)};
}

// ---- 7: string -------------------------------------------------------------

Checks string_suite(std::mt19937_64& rng, const Tolerances& tol) {
  const StringState vib = build_wave_state(random_mode_spec(rng, 1.3, {1, -1, 2, -2}));
  const Lattice lattice{0.2, 1.4, 4, 0.1, 3.0, 4};
  const StringResiduals r = string_residuals(vib, lattice, 1e-3, 0.02);

  const double t0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double path = max_abs(total_momentum(vib, Curve::equal_time(t0)).p_lower -
                              total_momentum(vib, Curve::wavy(t0, 0.2, 2)).p_lower);

  const double rapidity = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  const StringState still = build_wave_state(non_vibrating_spec(1.3, rapidity));
  const Matrix2c target = kPi * kPi * still.p_lower();
  double pi2p = 0.0;
  for (const Curve& c : {Curve::equal_time(t0), Curve::slanted(0.1, 0.6), Curve::wavy(0.7, 0.2, 3)})
    pi2p = std::max(pi2p, max_abs(total_momentum(still, c).p_lower - target));

  const double m = 1.2, a_norm = 0.35;
  const StringState spin = build_wave_state(spinning_spec(m, a_norm));
  std::uniform_real_distribution<double> tau(-3.0, 3.0), sigma(0.0, kPi);
  double spinning = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double t = tau(rng), sg = sigma(rng);
    const SpacetimePoint closed = spinning_string(a_norm, std::pow(m, 3), t, sg);
    for (const Matrix2c& x : {eval_x(spin, t, sg), eval_x_bullet(spin, t, sg)}) {
      const SpacetimePoint generic = spinning_projection(x);
      spinning = std::max({spinning, std::abs(generic.x - closed.x), std::abs(generic.y - closed.y),
                           std::abs(generic.z - closed.z), std::abs(generic.t - closed.t) / (1.0 + t * t)});
    }
  }
  return {within("wave equation convergence order", r.wave_order, tol.wave_order, tol.wave_order_band),
          below("momentum relation residual", r.momentum_relation, tol.string_residual),
          below("polymomentum conservation residual", r.conservation, tol.string_residual),
          below("dilaton equation residual", r.dilaton, tol.string_residual),
          below("on-shell trace of T", r.trace, tol.trace),
          below("|d_tot.d_tot - pi^2 p| (non-vibrating)", pi2p, tol.total_momentum),
          below("total momentum path dependence", path, tol.total_momentum),
          below("spinning closed form vs generic", spinning, tol.spinning)};
}

// ---- 8: algebra ------------------------------------------------------------

Checks algebra_suite(std::mt19937_64& rng, const Tolerances& tol) {
  auto random_state = [&] { return build_wave_state(random_mode_spec(rng, 1.1, {1, -1, 2, -2}, 0.2)); };
  const CurrentSample lattice = sample_currents(random_state(), Curve::slanted(0.1, 0.3), 16);
  const BracketReport currents = check_current_brackets(lattice, {0, 7, 23, 40, 63});

  std::vector<CurrentSample> samples;
  for (int i = 0; i < 12; ++i) samples.push_back(sample_currents(random_state(), Curve::wavy(0.3, 0.2, 2), 8));
  const LiePresentation pres = charge_algebra(samples);
  double jj_dagger = currents.dotted;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 3; b < 6; ++b)
      for (std::size_t c = 0; c < pres.dim(); ++c) jj_dagger = std::max(jj_dagger, std::abs(pres(a, b, c)));
  const double charges = std::max(pres.distance(expected_charge_algebra()), pres.fit_residual);

  const NkDecomposition nk = nk_decomposition(pres);
  const double su2 = std::max({nk.closure, nk.cross, nk.su2_pattern, nk.casimir});
  const PoincareReport poincare = poincare_check(pres);
  const double poincare_err = std::max({poincare.pj, poincare.mm, poincare.mp, poincare.jacobi});

  const UnitaryReport unitary = unitary_current_check(lattice, {0, 5, 17, 31, 63});

  return {below("discretized current bracket residual", currents.current, tol.current_bracket),
          below("charge structure constants vs expected", charges, tol.current_bracket),
          below("max |[J, J^dag]|", jj_dagger, tol.su2),
          below("su(2) + su(2) closure", su2, tol.su2),
          below("Poincare vs matrix oracle (" + poincare.frame + ")", poincare_err, tol.poincare),
          exactly_zero("[P, P] structure constants", poincare.pp),
          below("unitary current brackets", std::max(unitary.ii, unitary.ij), tol.unitary)};
}

using Suite = Checks (*)(std::mt19937_64&, const Tolerances&);
constexpr Suite kSuites[] = {proposition_suite, four_vector_suite, bracket_suite, particle_suite,
                             gauge_suite,       picture_suite,     string_suite,  algebra_suite};
constexpr const char* kNames[] = {"Gram resolution of random Hermitian matrices",
                                   "four-vector identity",
                                   "Clifford bracket reduces to mu x Poisson bracket",
                                   "free particle over 1e4 RK4 steps",
                                   "U(N) gauge covariance",
                                   "Heisenberg and Schroedinger pictures of a 20-level oscillator",
                                   "string field equations, momentum and spinning solution",
                                   "current and charge algebra"};
constexpr int kCount = 8;

}  // namespace

bool CriterionResult::pass() const {
  if (!error.empty() || checks.empty()) return false;
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

bool AcceptanceReport::pass() const { return failures().empty() && criteria.size() == kCount; }

std::vector<int> AcceptanceReport::failures() const {
  std::vector<int> out;
  for (const auto& c : criteria)
    if (!c.pass()) out.push_back(c.id);
  return out;
}

std::mt19937_64 criterion_rng(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

CriterionResult run_criterion(int id, std::uint64_t seed, const Tolerances& tol) {
  if (id < 1 || id > kCount) throw InputError("acceptance criterion must be 1..8");
  auto rng = criterion_rng(seed, id);
  try {
    return {id, kNames[id - 1], kSuites[id - 1](rng, tol), {}};
  } catch (const std::exception& e) {
    return {id, kNames[id - 1], {}, e.what()};
  }
}

AcceptanceReport run_acceptance(std::uint64_t seed, const Tolerances& tol) {
  AcceptanceReport report;
  report.seed = seed;
  report.tolerances = tol;
  report.criteria.resize(kCount);
  parallel_for(kCount, [&](std::size_t i) { report.criteria[i] = run_criterion(int(i) + 1, seed, tol); });
  return report;
}

std::string acceptance_table(const AcceptanceReport& report) {
  std::ostringstream out;
  out << "seed " << report.seed << "\n";
  for (const auto& c : report.criteria) {
    out << (c.pass() ? "PASS " : "FAIL ") << c.id << ' ' << c.name << ':';
    if (!c.error.empty()) out << " error: " << c.error;
    for (std::size_t k = 0; k < c.checks.size(); ++k) {
      const auto& chk = c.checks[k];
      out << (k ? "; " : " ") << chk.name << " = " << sci(chk.value) << " (" << chk.bound << ')';
      if (!chk.pass) out << " FAILED";
    }
    out << '\n';
  }
  const auto failed = report.failures();
  if (failed.empty()) {
    out << "all " << report.criteria.size() << " criteria passed\n";
  } else {
    out << "failed criteria:";
    for (int id : failed) out << ' ' << id;
    out << '\n';
  }
  return out.str();
}

std::string acceptance_json(const AcceptanceReport& report) {
  using Json = nlohmann::ordered_json;
  Json doc;
  doc["seed"] = report.seed;
  Json tol = Json::object();
  for (const auto& name : Tolerances::names()) tol[name] = report.tolerances.get(name);
  doc["tolerances"] = std::move(tol);
  Json criteria = Json::array();
  for (const auto& c : report.criteria) {
    Json checks = Json::array();
    for (const auto& chk : c.checks)
      checks.push_back({{"name", chk.name}, {"value", chk.value}, {"bound", chk.bound}, {"pass", chk.pass}});
    Json entry{{"id", c.id}, {"name", c.name}, {"pass", c.pass()}, {"checks", std::move(checks)}};
    if (!c.error.empty()) entry["error"] = c.error;
    criteria.push_back(std::move(entry));
  }
  doc["criteria"] = std::move(criteria);
  doc["failures"] = report.failures();
  doc["pass"] = report.pass();
  return doc.dump(2) + "\n";
}

}  // namespace cliffdyn
