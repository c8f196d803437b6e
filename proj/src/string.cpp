#include "cliffdyn/string.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "cliffdyn/parallel.hpp"

namespace cliffdyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEta[2] = {1.0, -1.0};

using Kind = CoefLabel::Kind;

CoefLabel lab_k() { return {Kind::K, 0}; }
CoefLabel lab_l() { return {Kind::L, 0}; }
CoefLabel lab_a(int n) { return {Kind::A, n}; }
CoefLabel lab_b(int n) { return {Kind::B, n}; }

double max_abs(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }

Matrix2c bullet_matrix(const SpinorPair& u, const SpinorPair& v) {
  Matrix2c m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = bullet(u[a], v[b]);
  return m;
}

SpinorPair conj_pair(const SpinorPair& u) { return {u[0].conj(), u[1].conj()}; }

/// ψ^A = ε^{AB} ψ_B on a pair of ClVectors.
SpinorPair raise_pair(const SpinorPair& lower) {
  const Matrix2c& e = epsilon();
  return {e(0, 0) * lower[0] + e(0, 1) * lower[1], e(1, 0) * lower[0] + e(1, 1) * lower[1]};
}

/// Σ_A m(A, E) v^A for E = 0, 1.
SpinorPair contract_first(const Matrix2c& m, const SpinorPair& v) {
  return {m(0, 0) * v[0] + m(1, 0) * v[1], m(0, 1) * v[0] + m(1, 1) * v[1]};
}

/// Σ_E m(A, E) v_E for A = 0, 1.
SpinorPair contract_second(const Matrix2c& m, const SpinorPair& v) {
  return {m(0, 0) * v[0] + m(0, 1) * v[1], m(1, 0) * v[0] + m(1, 1) * v[1]};
}

bool allowed_pair(const CoefLabel& r, const CoefLabel& c) {
  if (r == c) return true;
  if (r.kind == c.kind && (r.kind == Kind::A || r.kind == Kind::B)) return r.n == -c.n;
  return false;
}

template <typename F>
GridField grid_eval(const Lattice& lattice, F&& f) {
  GridField out{lattice, std::vector<double>(lattice.size(), 0.0)};
  parallel_for(lattice.size(), [&](std::size_t idx) {
    const std::size_t i = idx / lattice.n_sigma;
    const std::size_t j = idx % lattice.n_sigma;
    out.values[idx] = f(lattice.tau(i), lattice.sigma(j));
  });
  return out;
}

// Steps of the residual stencils: h_τ = h/2, h_σ = h.
double step(int alpha, double h) { return alpha == 0 ? 0.5 * h : h; }

}  // namespace

std::string CoefLabel::name() const {
  switch (kind) {
    case Kind::K: return "k";
    case Kind::L: return "l";
    case Kind::A: return "a" + std::to_string(n);
    case Kind::B: return "b" + std::to_string(n);
  }
  return "?";
}

CoefLabel CoefLabel::parse(const std::string& text) {
  if (text == "k") return lab_k();
  if (text == "l") return lab_l();
  if (text.size() >= 2 && (text[0] == 'a' || text[0] == 'b')) {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(text.substr(1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == text.size() - 1 && n != 0) return text[0] == 'a' ? lab_a(n) : lab_b(n);
  }
  throw InputError("unknown coefficient label '" + text + "'");
}

std::vector<CoefLabel> ModeSpec::labels() const {
  std::vector<CoefLabel> out{lab_k(), lab_l()};
  for (int n : modes) out.push_back(lab_a(n));
  for (int n : modes) out.push_back(lab_b(n));
  return out;
}

Eigen::Index ModeSpec::index_of(const CoefLabel& label) const {
  const auto all = labels();
  const auto it = std::find(all.begin(), all.end(), label);
  if (it == all.end()) throw InputError("coefficient '" + label.name() + "' is not in the mode set");
  return static_cast<Eigen::Index>(it - all.begin());
}

Matrix2c ModeSpec::block(const CoefLabel& row, const CoefLabel& col) const {
  return gram.entries().block<2, 2>(2 * index_of(row), 2 * index_of(col));
}

Matrix2c ModeSpec::block_or_zero(const CoefLabel& row, const CoefLabel& col) const {
  const auto all = labels();
  if (std::find(all.begin(), all.end(), row) == all.end() || std::find(all.begin(), all.end(), col) == all.end())
    return Matrix2c::Zero();
  return block(row, col);
}

void ModeSpec::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InputError("mode spec: mass must be positive");
  std::set<int> seen;
  for (int n : modes) {
    if (n == 0) throw InputError("mode spec: mode number 0 is not a travelling wave");
    if (std::abs(n) > n_max) throw InputError("mode spec: |n| exceeds n_max = " + std::to_string(n_max));
    if (!seen.insert(n).second) throw InputError("mode spec: repeated mode " + std::to_string(n));
  }
  const auto all = labels();
  if (gram.n() != static_cast<Eigen::Index>(2 * all.size()))
    throw InputError("mode spec: gram must be " + std::to_string(2 * all.size()) + " x " +
                     std::to_string(2 * all.size()));
  if (!gram.entries().allFinite()) throw InputError("mode spec: gram has non-finite entries");
  const double scale = std::max(1.0, gram.entries().cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j) {
      if (allowed_pair(all[i], all[j])) continue;
      if (max_abs(gram.entries().block<2, 2>(2 * i, 2 * j)) > 1e-12 * scale)
        throw InputError("mode spec: product " + all[i].name() + "." + all[j].name() + "* must vanish");
    }
  const double det_l = block(lab_l(), lab_l()).determinant().real();
  if (!(det_l > 0.0))
    throw PreconditionError("mode spec: det(l.l*) <= 0; only timelike p with p.p > 0 is supported");
  const double p2 = std::cbrt(det_l);
  if (std::abs(p2 - mass * mass) > 1e-9 * mass * mass)
    throw InputError("mode spec: (det l.l*)^(1/3) = " + std::to_string(p2) + " differs from m^2 = " +
                     std::to_string(mass * mass));
}

ModeSpec make_mode_spec(double mass, std::vector<int> modes,
                        const std::vector<std::pair<std::pair<CoefLabel, CoefLabel>, Matrix2c>>& blocks,
                        int n_max) {
  ModeSpec spec;
  spec.mass = mass;
  spec.modes = std::move(modes);
  spec.n_max = n_max;
  const auto all = spec.labels();
  const auto n = static_cast<Eigen::Index>(2 * all.size());
  CMatrix g = CMatrix::Zero(n, n);
  std::set<std::pair<Eigen::Index, Eigen::Index>> given;
  auto locate = [&](const CoefLabel& lab) {
    const auto it = std::find(all.begin(), all.end(), lab);
    if (it == all.end()) throw InputError("coefficient '" + lab.name() + "' is not in the mode set");
    return static_cast<Eigen::Index>(it - all.begin());
  };
  for (const auto& [pair, value] : blocks) {
    const auto r = locate(pair.first), c = locate(pair.second);
    if (!given.insert({r, c}).second) throw InputError("mode spec: duplicate block " + pair.first.name() + "," +
                                                       pair.second.name());
    g.block<2, 2>(2 * r, 2 * c) = value;
  }
  for (const auto& [r, c] : given)
    if (r != c && !given.count({c, r})) g.block<2, 2>(2 * c, 2 * r) = g.block<2, 2>(2 * r, 2 * c).adjoint();
  spec.gram = HermitianMatrix(g, 1e-12);
  spec.validate();
  return spec;
}

ModeSpec random_mode_spec(std::mt19937_64& rng, double mass, const std::vector<int>& modes, double amplitude) {
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_complex = [&] {
    Matrix2c m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) = Complex(normal(rng), normal(rng));
    return m;
  };
  auto hermitian = [&](double s) {
    const Matrix2c m = random_complex();
    return Matrix2c(0.5 * s * (m + m.adjoint()));
  };
  std::vector<std::pair<std::pair<CoefLabel, CoefLabel>, Matrix2c>> blocks;
  blocks.push_back({{lab_k(), lab_k()}, hermitian(amplitude)});
  const Matrix2c g = random_complex();
  Matrix2c l = g * g.adjoint() + 0.5 * Matrix2c::Identity();
  l *= std::sqrt(std::pow(mass, 6) / l.determinant().real());
  blocks.push_back({{lab_l(), lab_l()}, l});
  for (const Kind kind : {Kind::A, Kind::B})
    for (int n : modes) {
      const CoefLabel self{kind, n};
      blocks.push_back({{self, self}, hermitian(amplitude)});
      const bool has_partner = std::find(modes.begin(), modes.end(), -n) != modes.end();
      if (n > 0 && has_partner) blocks.push_back({{self, CoefLabel{kind, -n}}, amplitude * random_complex()});
    }
  return make_mode_spec(mass, modes, blocks);
}

ModeSpec non_vibrating_spec(double mass, double rapidity) {
  const FourVector dir(std::cosh(rapidity), std::sinh(rapidity), 0.0, 0.0);
  const Matrix2c l = std::pow(mass, 3) * vec_to_spinor(dir);
  return make_mode_spec(mass, {}, {{{lab_l(), lab_l()}, l}});
}

Matrix2c StringState::l_gram() const { return bullet_matrix(l, conj_pair(l)); }

double StringState::p_squared() const {
  return std::cbrt(spec.block(lab_l(), lab_l()).determinant().real());
}

Matrix2c StringState::p_upper() const { return spec.block(lab_l(), lab_l()) / p_squared(); }

Matrix2c StringState::p_lower() const { return lower_indices(p_upper()); }

StringState build_wave_state(const ModeSpec& spec) {
  spec.validate();
  StringState s;
  s.spec = spec;
  const auto n = static_cast<std::size_t>(spec.gram.n());
  s.space = GeneratorSpace::allocate(2 * n, 2 * n);
  const GramResolution res = resolve_hermitian(spec.gram, s.space);
  s.gram_residual = std::max(res.residual(), res.null_residual());
  if (s.gram_residual > 1e-9)
    throw NumericalError("build_wave_state: realized Gram residual " + std::to_string(s.gram_residual));
  auto pair_at = [&](std::size_t label_index) {
    return SpinorPair{res.vectors[2 * label_index], res.vectors[2 * label_index + 1]};
  };
  s.k = pair_at(0);
  s.l = pair_at(1);
  const std::size_t nm = spec.modes.size();
  for (std::size_t i = 0; i < nm; ++i) {
    s.a.push_back(pair_at(2 + i));
    s.b.push_back(pair_at(2 + nm + i));
  }
  return s;
}

SpinorPair eval_c(const StringState& s, double tau, double sigma) {
  SpinorPair c = s.k;
  for (int A = 0; A < 2; ++A) {
    c[A] += tau * s.l[A];
    for (std::size_t i = 0; i < s.spec.modes.size(); ++i) {
      const double n = s.spec.modes[i];
      c[A] += std::exp(0.5 * kI * n * (tau + sigma)) * s.a[i][A];
      c[A] += std::exp(0.5 * kI * n * (tau - sigma)) * s.b[i][A];
    }
  }
  return c;
}

SpinorPair eval_dc(const StringState& s, double tau, double sigma, int beta) {
  SpinorPair dc = {ClVector::zero(s.space), ClVector::zero(s.space)};
  const double side = beta == 0 ? 1.0 : -1.0;  // ∂_σ of (τ − σ)
  for (int A = 0; A < 2; ++A) {
    if (beta == 0) dc[A] += s.l[A];
    for (std::size_t i = 0; i < s.spec.modes.size(); ++i) {
      const double n = s.spec.modes[i];
      const Complex rate = 0.5 * kI * n;
      dc[A] += rate * std::exp(rate * (tau + sigma)) * s.a[i][A];
      dc[A] += side * rate * std::exp(rate * (tau - sigma)) * s.b[i][A];
    }
  }
  return dc;
}

Matrix2c eval_x(const StringState& s, double tau, double sigma) {
  const ModeSpec& sp = s.spec;
  Matrix2c x = sp.block(lab_k(), lab_k()) + tau * tau * sp.block(lab_l(), lab_l());
  for (int n : sp.modes) {
    x += sp.block(lab_a(n), lab_a(n)) + sp.block(lab_b(n), lab_b(n));
    x += sp.block_or_zero(lab_a(n), lab_a(-n)) * std::exp(kI * double(n) * (tau + sigma));
    x += sp.block_or_zero(lab_b(n), lab_b(-n)) * std::exp(kI * double(n) * (tau - sigma));
  }
  return x;
}

Matrix2c eval_x_bullet(const StringState& s, double tau, double sigma) {
  const SpinorPair c = eval_c(s, tau, sigma);
  return bullet_matrix(c, conj_pair(c));
}

Polymomenta eval_polymomenta(const StringState& s, double tau, double sigma) {
  const double p2 = s.p_squared();
  const Matrix2c l_lower = lower_indices(s.spec.block(lab_l(), lab_l())) / (p2 * p2);
  Polymomenta out;
  for (int beta = 0; beta < 2; ++beta) {
    out.d[beta] = contract_first(l_lower, eval_dc(s, tau, sigma, beta));
    out.dstar[beta] = conj_pair(out.d[beta]);
  }
  return out;
}

Eigen::Matrix2d energy_momentum(const StringState& s, double tau, double sigma) {
  const Polymomenta pm = eval_polymomenta(s, tau, sigma);
  const Matrix2c p_up = s.p_upper();
  const double p2 = s.p_squared(), m2 = s.spec.mass * s.spec.mass;
  Eigen::Matrix2d t;
  for (int al = 0; al < 2; ++al)
    for (int be = 0; be < 2; ++be) {
      const Matrix2c sym =
          0.5 * (bullet_matrix(pm.dstar[al], pm.d[be]) + bullet_matrix(pm.dstar[be], pm.d[al]));
      // Raising both worldsheet indices multiplies by η^{αα}η^{ββ}.
      const double contraction = kEta[al] * kEta[be] * (p_up.cwiseProduct(sym)).sum().real();
      t(al, be) = (al == be ? 0.5 * (3.0 * p2 - m2) * kEta[al] : 0.0) - contraction;
    }
  return t;
}

double dilaton(const StringState& s, double tau, double sigma, const DilatonConstants& kc) {
  const ModeSpec& sp = s.spec;
  const double p2 = s.p_squared();
  const Matrix2c l_lower = lower_indices(sp.block(lab_l(), lab_l()));
  auto contract = [&](const Matrix2c& g) { return l_lower.cwiseProduct(g).sum(); };
  Complex modes = 0.0;
  const double u = tau + sigma, v = tau - sigma;
  for (int n : sp.modes) {
    const double n2 = double(n) * n;
    modes += 0.5 * n2 * contract(sp.block(lab_a(n), lab_a(n))) * u * u;
    modes += 0.5 * n2 * contract(sp.block(lab_b(n), lab_b(n))) * v * v;
    modes += contract(sp.block_or_zero(lab_a(n), lab_a(-n))) * std::exp(kI * double(n) * u);
    modes += contract(sp.block_or_zero(lab_b(n), lab_b(-n))) * std::exp(kI * double(n) * v);
  }
  const double m2 = sp.mass * sp.mass;
  return kc.k + kc.k_tau * tau + kc.k_sigma * sigma + 0.5 * m2 * (tau * tau + sigma * sigma) +
         0.25 / (p2 * p2) * modes.real();
}

double Lattice::tau(std::size_t i) const {
  return n_tau <= 1 ? tau_min : tau_min + (tau_max - tau_min) * double(i) / double(n_tau - 1);
}

double Lattice::sigma(std::size_t j) const {
  return n_sigma <= 1 ? sigma_min : sigma_min + (sigma_max - sigma_min) * double(j) / double(n_sigma - 1);
}

double GridField::max() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

GridField wave_residual(const StringState& s, const Lattice& lattice, double h) {
  const Matrix2c source = 2.0 * s.spec.block(lab_l(), lab_l());
  const double ht = step(0, h), hs = step(1, h);
  return grid_eval(lattice, [&](double t, double sg) {
    const Matrix2c x0 = eval_x_bullet(s, t, sg);
    const Matrix2c xtt = (eval_x_bullet(s, t + ht, sg) - 2.0 * x0 + eval_x_bullet(s, t - ht, sg)) / (ht * ht);
    const Matrix2c xss = (eval_x_bullet(s, t, sg + hs) - 2.0 * x0 + eval_x_bullet(s, t, sg - hs)) / (hs * hs);
    return max_abs(xtt - xss - source);
  });
}

namespace {

// Fourth-order central differences at offsets −2, −1, +1, +2 (first derivative)
// and −2..+2 (second derivative).
constexpr std::array<int, 4> kFirstOffsets{-2, -1, 1, 2};
constexpr std::array<double, 4> kFirstWeights{1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
constexpr std::array<int, 5> kSecondOffsets{-2, -1, 0, 1, 2};
constexpr std::array<double, 5> kSecondWeights{-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0};

template <typename F>
SpinorPair first_derivative(const F& pair_at, double h) {
  SpinorPair out;
  for (std::size_t k = 0; k < kFirstOffsets.size(); ++k) {
    const SpinorPair v = pair_at(kFirstOffsets[k] * h);
    for (int A = 0; A < 2; ++A) {
      const ClVector term = (kFirstWeights[k] / h) * v[A];
      out[A] = k == 0 ? term : out[A] + term;
    }
  }
  return out;
}

}  // namespace

GridField momentum_relation_residual(const StringState& s, const Lattice& lattice, double h) {
  const Matrix2c p_up = s.p_upper();
  return grid_eval(lattice, [&](double t, double sg) {
    const Polymomenta pm = eval_polymomenta(s, t, sg);
    double worst = 0.0;
    for (int al = 0; al < 2; ++al) {
      const SpinorPair dc = first_derivative(
          [&](double d) { return al == 0 ? eval_c(s, t + d, sg) : eval_c(s, t, sg + d); }, step(al, h));
      const SpinorPair rhs = contract_second(p_up, pm.d[al]);  // η_{αβ} d^β = d_α
      for (int A = 0; A < 2; ++A) worst = std::max(worst, (dc[A] - rhs[A]).max_abs());
    }
    return worst;
  });
}

GridField conservation_residual(const StringState& s, const Lattice& lattice, double h) {
  const double ht = step(0, h), hs = step(1, h);
  return grid_eval(lattice, [&](double t, double sg) {
    const SpinorPair dt = first_derivative([&](double d) { return eval_polymomenta(s, t + d, sg).dstar[0]; }, ht);
    const SpinorPair ds = first_derivative([&](double d) { return eval_polymomenta(s, t, sg + d).dstar[1]; }, hs);
    double worst = 0.0;
    // d*^τ = d*_τ, d*^σ = −d*_σ
    for (int A = 0; A < 2; ++A) worst = std::max(worst, (dt[A] - ds[A]).max_abs());
    return worst;
  });
}

GridField dilaton_residual(const StringState& s, const Lattice& lattice, double h) {
  const Matrix2c p_lo = s.p_lower();
  const double m2 = s.spec.mass * s.spec.mass;
  const double ht = step(0, h), hs = step(1, h);
  return grid_eval(lattice, [&](double t, double sg) {
    auto phi = [&](double a, double b) { return dilaton(s, a, b); };
    double hess[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (std::size_t k = 0; k < kSecondOffsets.size(); ++k) {
      hess[0][0] += kSecondWeights[k] * phi(t + kSecondOffsets[k] * ht, sg) / (ht * ht);
      hess[1][1] += kSecondWeights[k] * phi(t, sg + kSecondOffsets[k] * hs) / (hs * hs);
    }
    for (std::size_t i = 0; i < kFirstOffsets.size(); ++i)
      for (std::size_t j = 0; j < kFirstOffsets.size(); ++j)
        hess[0][1] += kFirstWeights[i] * kFirstWeights[j] *
                      phi(t + kFirstOffsets[i] * ht, sg + kFirstOffsets[j] * hs) / (ht * hs);
    hess[1][0] = hess[0][1];
    const Polymomenta pm = eval_polymomenta(s, t, sg);
    std::array<SpinorPair, 2> ds_up, d_up;
    for (int al = 0; al < 2; ++al) {
      ds_up[al] = raise_pair(pm.dstar[al]);
      d_up[al] = raise_pair(pm.d[al]);
    }
    double worst = 0.0;
    for (int al = 0; al < 2; ++al)
      for (int be = al; be < 2; ++be) {
        const Matrix2c z = 0.5 * (bullet_matrix(ds_up[al], d_up[be]) + bullet_matrix(ds_up[be], d_up[al]));
        const double source = (al == be ? -m2 * kEta[al] : 0.0) + p_lo.cwiseProduct(z).sum().real();
        worst = std::max(worst, std::abs(hess[al][be] - source));
      }
    return worst;
  });
}

GridField trace_residual(const StringState& s, const Lattice& lattice) {
  return grid_eval(lattice, [&](double t, double sg) {
    const Eigen::Matrix2d tm = energy_momentum(s, t, sg);
    return std::abs(tm(0, 0) - tm(1, 1));
  });
}

GridField dual_path_residual(const StringState& s, const Lattice& lattice) {
  return grid_eval(lattice,
                   [&](double t, double sg) { return max_abs(eval_x(s, t, sg) - eval_x_bullet(s, t, sg)); });
}

double convergence_order(const std::function<GridField(double)>& residual, double h) {
  return std::log2(residual(h).max() / residual(0.5 * h).max());
}

Curve Curve::equal_time(double tau0) {
  return {"equal_time", [tau0](double u) { return std::array<double, 2>{tau0, kPi * u}; },
          [](double) { return std::array<double, 2>{0.0, kPi}; }};
}

Curve Curve::slanted(double tau0, double slope) {
  return {"slanted", [=](double u) { return std::array<double, 2>{tau0 + slope * kPi * u, kPi * u}; },
          [=](double) { return std::array<double, 2>{slope * kPi, kPi}; }};
}

Curve Curve::wavy(double tau0, double amplitude, int waves) {
  const double k = waves * kPi;
  return {"wavy", [=](double u) { return std::array<double, 2>{tau0 + amplitude * std::sin(k * u), kPi * u}; },
          [=](double u) { return std::array<double, 2>{amplitude * k * std::cos(k * u), kPi}; }};
}

QuadratureRule composite_gauss_legendre(std::size_t panels) {
  if (panels == 0) throw InputError("quadrature needs at least one panel");
  static constexpr double nodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                      0.8611363115940526};
  static constexpr double weights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                        0.3478548451374538};
  QuadratureRule rule;
  const double width = 1.0 / double(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = (double(p) + 0.5) * width;
    for (int q = 0; q < 4; ++q) {
      rule.u.push_back(mid + 0.5 * width * nodes[q]);
      rule.w.push_back(0.5 * width * weights[q]);
    }
  }
  return rule;
}

void require_admissible(const Curve& curve, const QuadratureRule& rule) {
  if (std::abs(curve.point(0.0)[1]) > 1e-12 || std::abs(curve.point(1.0)[1] - kPi) > 1e-12)
    throw InputError("curve '" + curve.name + "' must run from sigma = 0 to sigma = pi");
  for (double u : rule.u) {
    const auto v = curve.velocity(u);
    if (!(v[0] * v[0] < v[1] * v[1])) throw InputError("curve '" + curve.name + "' is not spacelike");
  }
}

SpinorPair projected_dstar(const StringState& s, const Curve& curve, double u) {
  const auto pt = curve.point(u);
  const auto v = curve.velocity(u);
  const Polymomenta pm = eval_polymomenta(s, pt[0], pt[1]);
  return {v[1] * pm.dstar[0][0] + v[0] * pm.dstar[1][0], v[1] * pm.dstar[0][1] + v[0] * pm.dstar[1][1]};
}

TotalMomentum total_momentum(const StringState& s, const Curve& curve, std::size_t panels) {
  const QuadratureRule rule = composite_gauss_legendre(panels);
  require_admissible(curve, rule);
  std::vector<SpinorPair> values(rule.u.size());
  parallel_for(rule.u.size(), [&](std::size_t q) { values[q] = projected_dstar(s, curve, rule.u[q]); });
  TotalMomentum out{{ClVector::zero(s.space), ClVector::zero(s.space)}, Matrix2c::Zero()};
  for (std::size_t q = 0; q < values.size(); ++q)
    for (int A = 0; A < 2; ++A) out.dstar[A] += rule.w[q] * values[q][A];
  out.p_lower = bullet_matrix(out.dstar, conj_pair(out.dstar));
  return out;
}

SpacetimePoint spinning_string(double a_norm, double k_norm, double tau, double sigma) {
  return {2.0 * a_norm * std::cos(tau) * std::cos(sigma), 2.0 * a_norm * std::sin(tau) * std::cos(sigma), 0.0,
          2.0 * a_norm + k_norm * tau * tau};
}

ModeSpec spinning_spec(double mass, double a_norm) {
  const double k_norm = std::pow(mass, 3);
  Matrix2c upper_left = Matrix2c::Zero(), lower_right = Matrix2c::Zero(), corner = Matrix2c::Zero();
  upper_left(0, 0) = a_norm;
  lower_right(1, 1) = a_norm;
  corner(0, 1) = a_norm;
  return make_mode_spec(mass, {1, -1},
                        {{{lab_l(), lab_l()}, k_norm * Matrix2c::Identity()},
                         {{lab_a(1), lab_a(1)}, upper_left},
                         {{lab_a(-1), lab_a(-1)}, lower_right},
                         {{lab_a(1), lab_a(-1)}, corner},
                         {{lab_b(1), lab_b(1)}, upper_left},
                         {{lab_b(-1), lab_b(-1)}, lower_right},
                         {{lab_b(1), lab_b(-1)}, corner}});
}

SpacetimePoint spinning_projection(const Matrix2c& x) {
  return {0.5 * (x(0, 1) + x(1, 0)).real(), ((x(0, 1) - x(1, 0)) / (2.0 * kI)).real(),
          0.5 * (x(0, 0) - x(1, 1)).real(), 0.5 * (x(0, 0) + x(1, 1)).real()};
}

std::vector<FieldSample> sample_field(const StringState& s, const Lattice& lattice, const DilatonConstants& kc) {
  std::vector<FieldSample> rows(lattice.size());
  parallel_for(lattice.size(), [&](std::size_t idx) {
    FieldSample& r = rows[idx];
    r.tau = lattice.tau(idx / lattice.n_sigma);
    r.sigma = lattice.sigma(idx % lattice.n_sigma);
    r.x = spinor_to_vec_real(eval_x(s, r.tau, r.sigma));
    r.phi = dilaton(s, r.tau, r.sigma, kc);
    r.t = energy_momentum(s, r.tau, r.sigma);
  });
  return rows;
}

StringResiduals string_residuals(const StringState& s, const Lattice& lattice, double h, double h_order) {
  StringResiduals r;
  r.h = h;
  r.h_order = h_order;
  r.gram = s.gram_residual;
  r.dual_path = dual_path_residual(s, lattice).max();
  r.trace = trace_residual(s, lattice).max();
  r.wave = wave_residual(s, lattice, h).max();
  r.momentum_relation = momentum_relation_residual(s, lattice, h).max();
  r.conservation = conservation_residual(s, lattice, h).max();
  r.dilaton = dilaton_residual(s, lattice, h).max();
  r.wave_order = convergence_order([&](double hh) { return wave_residual(s, lattice, hh); }, h_order);
  r.momentum_relation_order = convergence_order([&](double hh) { return momentum_relation_residual(s, lattice, hh); }, h_order);
  r.conservation_order = convergence_order([&](double hh) { return conservation_residual(s, lattice, hh); }, h_order);
  r.dilaton_order = convergence_order([&](double hh) { return dilaton_residual(s, lattice, hh); }, h_order);
  return r;
}

}  // namespace cliffdyn
