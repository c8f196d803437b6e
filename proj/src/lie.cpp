#include "cliffdyn/lie.hpp"

#include <algorithm>
#include <cmath>

#include "cliffdyn/parallel.hpp"

namespace cliffdyn {

namespace {

constexpr std::size_t kCharges = 10;

double eps(int a, int b) { return epsilon()(a, b).real(); }

SpinorPair lower_pair(const SpinorPair& upper) {
  // ψ_A = ψ^X ε_{XA}
  return {eps(0, 0) * upper[0] + eps(1, 0) * upper[1], eps(0, 1) * upper[0] + eps(1, 1) * upper[1]};
}

Complex dot(const ClVector& a, const ClVector& b) {
  if (a.size() == 0 || b.size() == 0) return 0.0;
  return bullet(a, b);
}

/// Index of J_AB among J11 J12 J22 (0-based spinor indices).
std::size_t j_index(int a, int b) { return static_cast<std::size_t>(std::min(a, b) + std::max(a, b)); }
std::size_t jbar_index(int a, int b) { return 3 + j_index(a, b); }
std::size_t p_index(int e, int f) { return static_cast<std::size_t>(6 + 2 * e + f); }

constexpr int kSymPairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};

NodeDerivative current_derivative(const CurrentSample& s, int a, int b, std::size_t k, double scale) {
  const SpinorPair c_low = lower_pair(s.c[k]);
  const SpinorPair& ds = s.dstar[k];
  NodeDerivative nd;
  nd.node = k;
  for (int g = 0; g < 2; ++g) {
    nd.dc[g] = scale * (eps(g, a) * ds[b] + eps(g, b) * ds[a]);
    nd.ddstar[g] = ClVector::zero(s.space);
    if (g == b) nd.ddstar[g] += scale * c_low[a];
    if (g == a) nd.ddstar[g] += scale * c_low[b];
  }
  return nd;
}

NodeDerivative conj_derivative(const NodeDerivative& nd) {
  NodeDerivative out;
  out.node = nd.node;
  for (int g = 0; g < 2; ++g) {
    if (nd.dc[g].size()) out.dcs[g] = nd.dc[g].conj();
    if (nd.dcs[g].size()) out.dc[g] = nd.dcs[g].conj();
    if (nd.ddstar[g].size()) out.dd[g] = nd.ddstar[g].conj();
    if (nd.dd[g].size()) out.ddstar[g] = nd.dd[g].conj();
  }
  return out;
}

NodeDerivative unitary_derivative(const CurrentSample& s, std::size_t k, double scale) {
  NodeDerivative nd;
  nd.node = k;
  const Complex i_s = kI * scale;
  for (int g = 0; g < 2; ++g) {
    nd.dc[g] = i_s * s.dstar[k][g];
    nd.ddstar[g] = i_s * s.c[k][g];
    nd.dcs[g] = -i_s * s.dstar[k][g].conj();
    nd.dd[g] = -i_s * s.c[k][g].conj();
  }
  return nd;
}

Complex node_bracket(const NodeDerivative& f, const NodeDerivative& g) {
  Complex sum = 0.0;
  for (int x = 0; x < 2; ++x) {
    sum += dot(f.dc[x], g.ddstar[x]) + dot(f.dcs[x], g.dd[x]);
    sum -= dot(g.dc[x], f.ddstar[x]) + dot(g.dcs[x], f.dd[x]);
  }
  return sum;
}

template <typename Derivative>
Functional over_all_nodes(const CurrentSample& s, Derivative&& make) {
  Functional fn;
  fn.nodes.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) fn.nodes.push_back(make(k));
  return fn;
}

std::vector<Functional> charge_functionals(const CurrentSample& s) {
  std::vector<Functional> out;
  for (const auto& p : kSymPairs) out.push_back(total_current(s, p[0], p[1]));
  for (const auto& p : kSymPairs) out.push_back(total_current_conj(s, p[0], p[1]));
  for (int e = 0; e < 2; ++e)
    for (int f = 0; f < 2; ++f) out.push_back(total_momentum_functional(s, e, f));
  return out;
}

double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) ? 1.0 : -1.0;
}

}  // namespace

Matrix2c CurrentSample::j_total() const {
  Matrix2c t = Matrix2c::Zero();
  for (std::size_t k = 0; k < size(); ++k) t += w[k] * j[k];
  return t;
}

SpinorPair CurrentSample::dstar_total() const {
  SpinorPair t{ClVector::zero(space), ClVector::zero(space)};
  for (std::size_t k = 0; k < size(); ++k)
    for (int a = 0; a < 2; ++a) t[a] += w[k] * dstar[k][a];
  return t;
}

Matrix2c CurrentSample::p_total() const {
  const SpinorPair t = dstar_total();
  Matrix2c p;
  for (int e = 0; e < 2; ++e)
    for (int f = 0; f < 2; ++f) p(e, f) = bullet(t[e], t[f].conj());
  return p;
}

double CurrentSample::unitary_total() const {
  double t = 0.0;
  for (std::size_t k = 0; k < size(); ++k) t += w[k] * unitary[k];
  return t;
}

CurrentSample make_current_sample(SpacePtr space, std::vector<double> u, std::vector<double> w,
                                  std::vector<SpinorPair> c, std::vector<SpinorPair> dstar) {
  if (u.size() != w.size() || u.size() != c.size() || u.size() != dstar.size())
    throw InputError("current sample: node arrays differ in length");
  CurrentSample s{std::move(space), std::move(u), std::move(w), std::move(c), std::move(dstar), {}, {}};
  for (std::size_t k = 0; k < s.size(); ++k) {
    const SpinorPair c_low = lower_pair(s.c[k]);
    Matrix2c j;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) j(a, b) = bullet(c_low[a], s.dstar[k][b]) + bullet(c_low[b], s.dstar[k][a]);
    s.j.push_back(j);
    const Complex trace = bullet(s.c[k][0], s.dstar[k][0]) + bullet(s.c[k][1], s.dstar[k][1]);
    s.unitary.push_back((kI * (trace - std::conj(trace))).real());
  }
  return s;
}

CurrentSample sample_currents(const StringState& s, const Curve& curve, std::size_t panels) {
  const QuadratureRule rule = composite_gauss_legendre(panels);
  require_admissible(curve, rule);
  const std::size_t n = rule.u.size();
  std::vector<SpinorPair> c(n), dstar(n);
  std::vector<double> w(n);
  parallel_for(n, [&](std::size_t k) {
    const auto pt = curve.point(rule.u[k]);
    c[k] = eval_c(s, pt[0], pt[1]);
    dstar[k] = projected_dstar(s, curve, rule.u[k]);
  });
  return make_current_sample(s.space, rule.u, rule.w, std::move(c), std::move(dstar));
}

Functional point_current(const CurrentSample& s, int a, int b, std::size_t k) {
  return Functional{{current_derivative(s, a, b, k, 1.0 / s.w.at(k))}};
}

Functional point_current_conj(const CurrentSample& s, int a, int b, std::size_t k) {
  return Functional{{conj_derivative(current_derivative(s, a, b, k, 1.0 / s.w.at(k)))}};
}

Functional point_unitary(const CurrentSample& s, std::size_t k) {
  return Functional{{unitary_derivative(s, k, 1.0 / s.w.at(k))}};
}

Functional total_current(const CurrentSample& s, int a, int b) {
  return over_all_nodes(s, [&](std::size_t k) { return current_derivative(s, a, b, k, 1.0); });
}

Functional total_current_conj(const CurrentSample& s, int a, int b) {
  return over_all_nodes(s, [&](std::size_t k) { return conj_derivative(current_derivative(s, a, b, k, 1.0)); });
}

Functional total_momentum_functional(const CurrentSample& s, int e, int f) {
  const SpinorPair t = s.dstar_total();
  return over_all_nodes(s, [&](std::size_t k) {
    NodeDerivative nd;
    nd.node = k;
    nd.ddstar[e] = t[f].conj();
    nd.dd[f] = t[e];
    return nd;
  });
}

Functional total_unitary(const CurrentSample& s) {
  return over_all_nodes(s, [&](std::size_t k) { return unitary_derivative(s, k, 1.0); });
}

Complex bracket(const CurrentSample& s, const Functional& f, const Functional& g) {
  Complex sum = 0.0;
  auto it_f = f.nodes.begin();
  auto it_g = g.nodes.begin();
  while (it_f != f.nodes.end() && it_g != g.nodes.end()) {
    if (it_f->node < it_g->node) {
      ++it_f;
    } else if (it_g->node < it_f->node) {
      ++it_g;
    } else {
      sum += s.w[it_f->node] * node_bracket(*it_f, *it_g);
      ++it_f;
      ++it_g;
    }
  }
  return sum;
}

Complex current_bracket(const CurrentSample& s, int a, int b, int e, int f, std::size_t k, std::size_t l) {
  return bracket(s, point_current(s, a, b, k), point_current(s, e, f, l));
}

Complex current_bracket_expected(const CurrentSample& s, int a, int b, int e, int f, std::size_t k,
                                 std::size_t l) {
  if (k != l) return 0.0;
  const Matrix2c& j = s.j[k];
  const Complex pattern = j(a, e) * eps(f, b) + j(b, e) * eps(f, a) + j(a, f) * eps(e, b) + j(b, f) * eps(e, a);
  return pattern / s.w[k];
}

BracketReport check_current_brackets(const CurrentSample& s, const std::vector<std::size_t>& nodes) {
  BracketReport r;
  for (std::size_t k : nodes)
    for (std::size_t l : nodes)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int e = 0; e < 2; ++e)
            for (int f = 0; f < 2; ++f) {
              const Complex got = current_bracket(s, a, b, e, f, k, l);
              const Complex want = current_bracket_expected(s, a, b, e, f, k, l);
              r.current = std::max(r.current, std::abs(got - want) / (1.0 + std::abs(want)));
              const Complex dotted = bracket(s, point_current(s, a, b, k), point_current_conj(s, e, f, l));
              r.dotted = std::max(r.dotted, std::abs(dotted));
              ++r.checked;
            }
  return r;
}

LiePresentation::LiePresentation(std::vector<std::string> labels)
    : labels_(std::move(labels)), f_(labels_.size() * labels_.size() * labels_.size(), 0.0) {}

double LiePresentation::antisymmetry_residual() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < dim(); ++a)
    for (std::size_t b = 0; b < dim(); ++b)
      for (std::size_t c = 0; c < dim(); ++c) worst = std::max(worst, std::abs((*this)(a, b, c) + (*this)(b, a, c)));
  return worst;
}

double LiePresentation::jacobi_residual() const {
  const std::size_t n = dim();
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t e = 0; e < n; ++e) {
          Complex sum = 0.0;
          for (std::size_t d = 0; d < n; ++d)
            sum += (*this)(a, b, d) * (*this)(d, c, e) + (*this)(b, c, d) * (*this)(d, a, e) +
                   (*this)(c, a, d) * (*this)(d, b, e);
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

double LiePresentation::distance(const LiePresentation& other) const {
  if (labels_ != other.labels_) throw InputError("presentations have different bases");
  double worst = 0.0;
  for (std::size_t i = 0; i < f_.size(); ++i) worst = std::max(worst, std::abs(f_[i] - other.f_[i]));
  return worst;
}

LiePresentation LiePresentation::scaled(Complex factor) const {
  LiePresentation out = *this;
  for (auto& v : out.f_) v *= factor;
  return out;
}

std::vector<std::string> charge_labels() {
  return {"J11", "J12", "J22", "Jbar11", "Jbar12", "Jbar22", "P11", "P12", "P21", "P22"};
}

Eigen::Matrix<Complex, 10, 1> charge_values(const CurrentSample& s) {
  Eigen::Matrix<Complex, 10, 1> v;
  const Matrix2c j = s.j_total();
  const Matrix2c p = s.p_total();
  for (int i = 0; i < 3; ++i) {
    v(i) = j(kSymPairs[i][0], kSymPairs[i][1]);
    v(3 + i) = std::conj(v(i));
  }
  for (int e = 0; e < 2; ++e)
    for (int f = 0; f < 2; ++f) v(p_index(e, f)) = p(e, f);
  return v;
}

LiePresentation charge_algebra(const std::vector<CurrentSample>& samples) {
  const std::size_t n_samples = samples.size();
  if (n_samples < 12) throw InputError("charge_algebra needs at least 12 samples");
  CMatrix values(static_cast<Eigen::Index>(n_samples), kCharges);
  // brackets[s](a, b) = i{X_a, X_b}
  std::vector<CMatrix> brackets(n_samples, CMatrix::Zero(kCharges, kCharges));
  parallel_for(n_samples, [&](std::size_t si) {
    const CurrentSample& s = samples[si];
    const auto fns = charge_functionals(s);
    for (std::size_t a = 0; a < kCharges; ++a)
      for (std::size_t b = 0; b < kCharges; ++b) brackets[si](a, b) = kI * bracket(s, fns[a], fns[b]);
  });
  for (std::size_t si = 0; si < n_samples; ++si) values.row(si) = charge_values(samples[si]).transpose();

  LiePresentation pres(charge_labels());
  const auto solver = values.colPivHouseholderQr();
  if (solver.rank() < static_cast<Eigen::Index>(kCharges))
    throw NumericalError("charge_algebra: samples do not span the charge space");
  double misfit = 0.0;
  for (std::size_t a = 0; a < kCharges; ++a)
    for (std::size_t b = 0; b < kCharges; ++b) {
      CVector rhs(static_cast<Eigen::Index>(n_samples));
      for (std::size_t si = 0; si < n_samples; ++si) rhs(si) = brackets[si](a, b);
      const CVector f = solver.solve(rhs);
      const CVector fitted = values * f;
      for (std::size_t si = 0; si < n_samples; ++si)
        misfit = std::max(misfit, std::abs(fitted(si) - rhs(si)) / (1.0 + std::abs(rhs(si))));
      for (std::size_t c = 0; c < kCharges; ++c) pres(a, b, c) = f(c);
    }
  pres.fit_residual = misfit;
  const double jac = pres.jacobi_residual();
  if (jac > 1e-9) throw NumericalError("charge_algebra: Jacobi residual " + std::to_string(jac));
  return pres;
}

LiePresentation expected_charge_algebra() {
  LiePresentation pres(charge_labels());
  // Quantum constants are i times the classical ones.
  for (const auto& ab : kSymPairs)
    for (const auto& ef : kSymPairs) {
      const int a = ab[0], b = ab[1], e = ef[0], f = ef[1];
      const std::size_t x = j_index(a, b), y = j_index(e, f);
      const std::pair<std::size_t, double> terms[4] = {{j_index(a, e), eps(f, b)},
                                                       {j_index(b, e), eps(f, a)},
                                                       {j_index(a, f), eps(e, b)},
                                                       {j_index(b, f), eps(e, a)}};
      for (const auto& [idx, coef] : terms) {
        pres(x, y, idx) += kI * coef;
        pres(x + 3, y + 3, idx + 3) += kI * coef;
      }
    }
  for (int e = 0; e < 2; ++e)
    for (int f = 0; f < 2; ++f)
      for (const auto& ab : kSymPairs) {
        const int a = ab[0], b = ab[1];
        const std::size_t p = p_index(e, f);
        // {p_EḞ, j_AB} = −(ε_EA p_BḞ + ε_EB p_AḞ)
        const std::pair<std::size_t, double> undotted[2] = {{p_index(b, f), -eps(e, a)}, {p_index(a, f), -eps(e, b)}};
        for (const auto& [idx, coef] : undotted) {
          pres(p, j_index(a, b), idx) += kI * coef;
          pres(j_index(a, b), p, idx) -= kI * coef;
        }
        // {p_EḞ, j_ȦḂ} = −(ε_FA p_EḂ + ε_FB p_EȦ)
        const std::pair<std::size_t, double> dotted[2] = {{p_index(e, b), -eps(f, a)}, {p_index(e, a), -eps(f, b)}};
        for (const auto& [idx, coef] : dotted) {
          pres(p, jbar_index(a, b), idx) += kI * coef;
          pres(jbar_index(a, b), p, idx) -= kI * coef;
        }
      }
  return pres;
}

Complex normalization_factor(const LiePresentation& fitted, const LiePresentation& expected) {
  const std::size_t n = fitted.dim();
  Complex num = 0.0;
  double den = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c) {
        num += std::conj(expected(a, b, c)) * fitted(a, b, c);
        den += std::norm(expected(a, b, c));
      }
  return den > 0.0 ? num / den : Complex(0.0);
}

LiePresentation change_basis(const LiePresentation& pres, const CMatrix& rows, std::vector<std::string> labels) {
  const auto m = rows.rows();
  const auto n = static_cast<Eigen::Index>(pres.dim());
  if (rows.cols() != n || static_cast<Eigen::Index>(labels.size()) != m)
    throw InputError("change_basis: shape mismatch");
  LiePresentation out(std::move(labels));
  const CMatrix basis = rows.transpose();  // columns are the new elements in old coordinates
  const auto solver = basis.colPivHouseholderQr();
  double misfit = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      CVector v = CVector::Zero(n);
      for (Eigen::Index a = 0; a < n; ++a) {
        if (rows(i, a) == 0.0) continue;
        for (Eigen::Index b = 0; b < n; ++b) {
          if (rows(j, b) == 0.0) continue;
          for (Eigen::Index c = 0; c < n; ++c) v(c) += rows(i, a) * rows(j, b) * pres(a, b, c);
        }
      }
      const CVector g = solver.solve(v);
      misfit = std::max(misfit, (basis * g - v).cwiseAbs().maxCoeff());
      for (Eigen::Index k = 0; k < m; ++k) out(i, j, k) = g(k);
    }
  out.closure_residual = misfit;
  out.fit_residual = pres.fit_residual;
  return out;
}

namespace {

CMatrix nk_rows() {
  CMatrix r = CMatrix::Zero(6, kCharges);
  r(0, 2) = 0.25 * kI;
  r(0, 0) = -0.25 * kI;
  r(1, 0) = r(1, 2) = -0.25;
  r(2, 1) = -0.5 * kI;
  // Conjugates
  r(3, 5) = -0.25 * kI;
  r(3, 3) = 0.25 * kI;
  r(4, 3) = r(4, 5) = -0.25;
  r(5, 4) = 0.5 * kI;
  return r;
}

LiePresentation sub_block(const LiePresentation& joint, std::size_t offset, std::vector<std::string> labels) {
  LiePresentation out(std::move(labels));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) out(i, j, k) = joint(offset + i, offset + j, offset + k);
  return out;
}

}  // namespace

NkDecomposition nk_decomposition(const LiePresentation& charges) {
  NkDecomposition out;
  out.joint = change_basis(charges, nk_rows(), {"N1", "N2", "N3", "N1dag", "N2dag", "N3dag"});
  out.closure = out.joint.closure_residual;
  out.su_a = sub_block(out.joint, 0, {"N1", "N2", "N3"});
  out.su_b = sub_block(out.joint, 3, {"N1dag", "N2dag", "N3dag"});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t c = 0; c < 6; ++c) {
        out.cross = std::max(out.cross, std::abs(out.joint(i, j + 3, c)));
        out.cross = std::max(out.cross, std::abs(out.joint(j + 3, i, c)));
      }
  for (std::size_t half : {0u, 3u})
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t c = 0; c < 6; ++c) {
          const bool same_half = (c >= half && c < half + 3);
          const Complex want =
              same_half ? kI * levi_civita(int(i), int(j), int(c - half)) : Complex(0.0);
          out.su2_pattern = std::max(out.su2_pattern, std::abs(out.joint(half + i, half + j, c) - want));
          // [N_k, Σ N_j N_j] = Σ_{j,l} f_kjl (N_l N_j + N_j N_l)
          if (same_half)
            out.casimir = std::max(out.casimir, std::abs(out.joint(half + i, half + j, c) +
                                                         out.joint(half + i, c, half + j)));
        }
  return out;
}

LiePresentation poincare_oracle() {
  constexpr double eta[4] = {1.0, -1.0, -1.0, -1.0};
  using M5 = Eigen::Matrix<Complex, 5, 5>;
  std::vector<M5> gens;
  const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  for (const auto& pr : pairs) {
    M5 g = M5::Zero();
    const int mu = pr[0], nu = pr[1];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        g(r, c) = kI * ((r == mu ? eta[nu] * (nu == c) : 0.0) - (r == nu ? eta[mu] * (mu == c) : 0.0));
    gens.push_back(g);
  }
  for (int mu = 0; mu < 4; ++mu) {
    M5 g = M5::Zero();
    g(mu, 4) = kI;
    gens.push_back(g);
  }
  CMatrix basis(25, 10);
  for (int a = 0; a < 10; ++a) basis.col(a) = Eigen::Map<const CVector>(gens[a].data(), 25);
  const auto solver = basis.colPivHouseholderQr();
  LiePresentation out({"M01", "M02", "M03", "M12", "M13", "M23", "P0", "P1", "P2", "P3"});
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      const M5 comm = gens[a] * gens[b] - gens[b] * gens[a];
      const CVector v = Eigen::Map<const CVector>(comm.data(), 25);
      const CVector f = solver.solve(v);
      out.closure_residual = std::max(out.closure_residual, (basis * f - v).cwiseAbs().maxCoeff());
      for (int c = 0; c < 10; ++c) out(a, b, c) = f(c);
    }
  return out;
}

PoincareReport poincare_check(const LiePresentation& charges) {
  PoincareReport rep;
  const LiePresentation expected = expected_charge_algebra();
  // Bracket-derived and literal [P, J] patterns on the charge basis.
  for (std::size_t p = 6; p < kCharges; ++p)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t c = 0; c < kCharges; ++c) {
        rep.pj = std::max(rep.pj, std::abs(charges(p, j, c) - expected(p, j, c)));
        rep.pj_literal = std::max(rep.pj_literal, std::abs(charges(p, j, c) + expected(p, j, c)));
      }
  for (std::size_t a = 6; a < kCharges; ++a)
    for (std::size_t b = 6; b < kCharges; ++b)
      for (std::size_t c = 0; c < kCharges; ++c) rep.pp = std::max(rep.pp, std::abs(charges(a, b, c)));

  const CMatrix nk = nk_rows();
  CMatrix rows = CMatrix::Zero(10, kCharges);
  // M0k = −M_k0 = −i(N_k − N_k†)
  for (int k = 0; k < 3; ++k) rows.row(k) = -kI * (nk.row(k) - nk.row(k + 3));
  rows.row(3) = nk.row(2) + nk.row(5);     // M12 = N3 + N3†
  rows.row(4) = -(nk.row(1) + nk.row(4));  // M13 = −(N2 + N2†)
  rows.row(5) = nk.row(0) + nk.row(3);     // M23 = N1 + N1†
  // P_μ = η_μμ ½ tr(σ_μ P^{up}), P^{CḊ} = ε^{CA} ε^{ḊḂ} P_{AḂ}
  CMatrix p_rows = CMatrix::Zero(4, kCharges);
  constexpr double eta[4] = {1.0, -1.0, -1.0, -1.0};
  for (int mu = 0; mu < 4; ++mu)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        Complex coef = 0.0;
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) coef += 0.5 * sigma(mu)(d, c) * eps(c, a) * eps(d, b);
        p_rows(mu, p_index(a, b)) = eta[mu] * coef;
      }
  const LiePresentation oracle = poincare_oracle();
  const struct {
    const char* name;
    double r[4];
  } frames[4] = {{"identity", {1, 1, 1, 1}}, {"Rx(pi)", {1, 1, -1, -1}}, {"Ry(pi)", {1, -1, 1, -1}},
                 {"Rz(pi)", {1, -1, -1, 1}}};
  rep.mp = rep.mm = rep.jacobi = std::numeric_limits<double>::infinity();
  for (const auto& fr : frames) {
    for (int mu = 0; mu < 4; ++mu) rows.row(6 + mu) = fr.r[mu] * p_rows.row(mu);
    const LiePresentation pres = change_basis(charges, rows, oracle.labels());
    double mm = 0.0, mp = 0.0;
    for (std::size_t a = 0; a < 10; ++a)
      for (std::size_t b = 0; b < 10; ++b)
        for (std::size_t c = 0; c < 10; ++c) {
          const double diff = std::abs(pres(a, b, c) - oracle(a, b, c));
          if (a < 6 && b < 6)
            mm = std::max(mm, diff);
          else if (a < 6 || b < 6)
            mp = std::max(mp, diff);
        }
    mp = std::max(mp, pres.closure_residual);
    if (mp < rep.mp) {
      rep.mp = mp;
      rep.mm = mm;
      rep.frame = fr.name;
      rep.jacobi = pres.jacobi_residual();
    }
  }
  return rep;
}

UnitaryReport unitary_current_check(const CurrentSample& s, const std::vector<std::size_t>& nodes) {
  UnitaryReport r;
  for (std::size_t k : nodes)
    for (std::size_t l : nodes) {
      const Functional ik = point_unitary(s, k);
      r.ii = std::max(r.ii, std::abs(bracket(s, ik, point_unitary(s, l))));
      for (const auto& ab : kSymPairs)
        r.ij = std::max(r.ij, std::abs(bracket(s, ik, point_current(s, ab[0], ab[1], l))));
    }
  r.total = std::abs(s.unitary_total());
  return r;
}

}  // namespace cliffdyn
