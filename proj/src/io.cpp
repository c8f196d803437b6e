#include "cliffdyn/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace cliffdyn::io {

using Json = nlohmann::ordered_json;

namespace {

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

const Json& member(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw InputError(std::string("missing field: ") + key);
  return obj.at(key);
}

double number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw InputError(what + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InputError(what + ": non-finite value");
  return x;
}

double number_or(const Json& obj, const char* key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), key) : fallback;
}

std::int64_t integer(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) throw InputError(what + ": expected an integer");
  return v.get<std::int64_t>();
}

std::size_t count(const Json& v, const std::string& what, std::size_t min_value) {
  const auto n = integer(v, what);
  if (n < static_cast<std::int64_t>(min_value)) throw InputError(what + ": must be at least " + std::to_string(min_value));
  return static_cast<std::size_t>(n);
}

Eigen::MatrixXd real_matrix(const Json& v, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) throw InputError(what + ": wrong number of rows");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError(what + ": wrong number of columns");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = number(row[static_cast<std::size_t>(j)], what);
  }
  return m;
}

CMatrix complex_matrix(const Json& v, Eigen::Index n, const std::string& what) {
  CMatrix m = real_matrix(member(v, "re"), n, n, what + ".re").cast<Complex>();
  if (v.contains("im")) m += kI * real_matrix(v.at("im"), n, n, what + ".im").cast<Complex>();
  return m;
}

FourVector four_vector(const Json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 4) throw InputError(what + ": expected 4 components");
  FourVector out;
  for (int mu = 0; mu < 4; ++mu) out(mu) = number(v[static_cast<std::size_t>(mu)], what);
  return out;
}

Json real_rows(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json complex_json(const CMatrix& m) {
  return Json{{"re", real_rows(m.real())}, {"im", real_rows(m.imag())}};
}

Json complex_vector_json(const CVector& v) {
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return Json{{"re", re}, {"im", im}};
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

double max_abs(const Matrix2c& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

std::string format_number(double value) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(17) << value;
  return out.str();
}

// ---- Hermitian matrices ---------------------------------------------------

HermitianMatrix parse_hermitian(const std::string& json_text) {
  const Json doc = parse_json(json_text);
  const auto n = static_cast<Eigen::Index>(count(member(doc, "n"), "n", 1));
  // Relative tolerance admits decimal round-off in hand-written files.
  return HermitianMatrix(complex_matrix(doc, n, "matrix"), 1e-12);
}

std::string hermitian_json(const HermitianMatrix& h) {
  Json doc{{"n", h.n()}};
  const Json c = complex_json(h.entries());
  doc["re"] = c["re"];
  doc["im"] = c["im"];
  return dump(doc);
}

std::string resolution_json(const GramResolution& res) {
  Json vectors = Json::array();
  for (const auto& v : res.vectors) vectors.push_back(complex_vector_json(v.coeffs()));
  const auto& space = res.vectors.empty() ? SpacePtr{} : res.vectors.front().space();
  Json doc;
  doc["n"] = res.target.n();
  doc["generators"] = {{"positive", space ? space->n_pos() : 0}, {"negative", space ? space->n_neg() : 0}};
  doc["vectors"] = std::move(vectors);
  doc["residual"] = res.residual();
  doc["null_residual"] = res.null_residual();
  doc["residual_matrix"] = complex_json(res.gram() - res.target.entries());
  doc["null_products"] = complex_json(res.null_products());
  return dump(doc);
}

// ---- Particle --------------------------------------------------------------

ParticleState ParticleConfig::initial_state() const {
  const Matrix2c m = mixed ? *mixed : Matrix2c(mu_of_tau(einbein, mass, tau_start) * Matrix2c::Identity());
  const auto pair = resolve_pair(vec_to_spinor(x), lower_indices(vec_to_spinor(p_upper)), m);
  return ParticleState::from_pair(pair, mass, tau_start);
}

ParticleConfig parse_particle_config(const std::string& json_text) {
  const Json doc = parse_json(json_text);
  ParticleConfig c;
  c.mass = number(member(doc, "mass"), "mass");
  if (c.mass <= 0.0) throw InputError("mass must be positive");

  const Json& e = member(doc, "einbein");
  const double tau0 = number(member(doc, "tau0"), "tau0");
  const std::string type = member(e, "type").is_string() ? member(e, "type").get<std::string>() : "";
  const Json& params = member(e, "params");
  if (!params.is_array()) throw InputError("einbein.params must be an array");
  if (type == "const") {
    if (params.size() != 1) throw InputError("const einbein takes one parameter");
    c.einbein = Einbein::constant(number(params[0], "einbein.params"), tau0);
  } else if (type == "linear") {
    if (params.size() != 2) throw InputError("linear einbein takes two parameters");
    c.einbein = Einbein::linear(number(params[0], "einbein.params"), number(params[1], "einbein.params"), tau0);
  } else {
    throw InputError("einbein.type must be \"const\" or \"linear\"");
  }

  c.tau_start = number_or(doc, "tau_start", 0.0);
  c.tau_end = number(member(doc, "tau_end"), "tau_end");
  c.steps = count(member(doc, "steps"), "steps", 1);
  c.stride = doc.contains("stride") ? count(doc.at("stride"), "stride", 1) : 1;

  const Json& gram = member(doc, "gram");
  c.x = four_vector(member(gram, "x"), "gram.x");
  c.p_upper = four_vector(member(gram, "p"), "gram.p");
  const double shell = minkowski_dot(c.p_upper, c.p_upper) - c.mass * c.mass;
  if (std::abs(shell) > 1e-9 * std::max(1.0, c.mass * c.mass))
    throw InputError("gram.p is off the mass shell: p.p - m^2 = " + format_number(shell));
  if (gram.contains("M")) c.mixed = Matrix2c(complex_matrix(gram.at("M"), 2, "gram.M"));
  return c;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "tau,taubar,x0,x1,x2,x3,p_0,p_1,p_2,p_3,J11_re,J11_im,J12_re,J12_im,J22_re,J22_im,j,mu\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    const FourVector x = s.x(), p = s.p_lower();
    const auto q = noether_charges(s);
    out << format_number(s.tau) << ',';
    if (k < traj.taubar.size()) out << format_number(traj.taubar[k]);
    for (int mu = 0; mu < 4; ++mu) out << ',' << format_number(x(mu));
    for (int mu = 0; mu < 4; ++mu) out << ',' << format_number(p(mu));
    for (const Complex& v : {q.big_j(0, 0), q.big_j(0, 1), q.big_j(1, 1)})
      out << ',' << format_number(v.real()) << ',' << format_number(v.imag());
    out << ',' << format_number(q.small_j) << ',' << format_number(s.mu()) << '\n';
  }
  return out.str();
}

bool ConservationReport::pass(const Tolerances& tol) const {
  return shell_drift <= tol.trajectory && line_residual <= tol.trajectory && mu_error <= tol.trajectory &&
         constraint_drift <= tol.trajectory && charge_drift <= tol.trajectory;
}

ConservationReport conservation_report(const Trajectory& traj) {
  ConservationReport r;
  r.samples = traj.states.size();
  if (traj.states.empty()) return r;
  const ParticleState& s0 = traj.states.front();
  const auto q0 = noether_charges(s0);
  const double m = s0.mass;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    r.shell_drift = std::max(r.shell_drift, std::abs(s.p_squared() - m * m));
    if (k < traj.taubar.size()) {
      const FourVector line = s0.x() + s0.p_upper() * traj.taubar[k] / m;
      r.line_residual = std::max(r.line_residual, (s.x() - line).cwiseAbs().maxCoeff());
    }
    const double mu = s.mu();
    r.mu_error = std::max(r.mu_error, std::abs(mu - mu_of_tau(traj.einbein, m, s.tau)));
    r.constraint_drift = std::max(r.constraint_drift, max_abs(s.charges_q() - mu * Matrix2c::Identity()));
    const auto q = noether_charges(s);
    r.charge_drift = std::max({r.charge_drift, max_abs(q.big_j - q0.big_j), std::abs(q.small_j - q0.small_j)});
  }
  return r;
}

std::string conservation_json(const ConservationReport& report, const ParticleConfig& config,
                              const Tolerances& tol) {
  Json doc;
  doc["mass"] = config.mass;
  doc["tau_start"] = config.tau_start;
  doc["tau_end"] = config.tau_end;
  doc["steps"] = config.steps;
  doc["samples"] = report.samples;
  doc["shell_drift"] = report.shell_drift;
  doc["line_residual"] = report.line_residual;
  doc["mu_error"] = report.mu_error;
  doc["constraint_drift"] = report.constraint_drift;
  doc["charge_drift"] = report.charge_drift;
  doc["tolerance"] = tol.trajectory;
  doc["pass"] = report.pass(tol);
  return dump(doc);
}

// ---- Matrix mechanics ------------------------------------------------------

MatrixConfig parse_matrix_config(const std::string& json_text) {
  const Json doc = parse_json(json_text);
  MatrixConfig c;
  c.mass = number(member(doc, "mass"), "mass");
  if (c.mass <= 0.0) throw InputError("mass must be positive");
  if (doc.contains("hbar") && number(doc.at("hbar"), "hbar") != 0.0)
    throw InputError("only the classical system (hbar = 0) is read from configs");
  c.taubar_end = number(member(doc, "taubar_end"), "taubar_end");
  c.steps = count(member(doc, "steps"), "steps", 1);
  c.stride = doc.contains("stride") ? count(doc.at("stride"), "stride", 1) : 1;
  const double mu = number_or(doc, "mu", 1.0);
  const Json& list = member(doc, "particles");
  if (!list.is_array() || list.empty()) throw InputError("particles must be a non-empty array");
  for (const Json& p : list) {
    ParticleGram g;
    g.x = four_vector(member(p, "x"), "particles.x");
    g.p = four_vector(member(p, "p"), "particles.p");
    g.mixed = p.contains("M") ? Matrix2c(complex_matrix(p.at("M"), 2, "particles.M"))
                              : Matrix2c(mu * Matrix2c::Identity());
    c.particles.push_back(g);
  }
  if (doc.contains("gauge"))
    c.gauge = complex_matrix(doc.at("gauge"), static_cast<Eigen::Index>(c.particles.size()), "gauge");
  return c;
}

std::string matrix_csv(const Snapshots<NSystem>& traj, const MatrixConfig& config) {
  const auto n = static_cast<Eigen::Index>(config.particles.size());
  const CMatrix u = config.gauge ? *config.gauge : CMatrix::Identity(n, n);
  std::ostringstream out;
  out << "taubar";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int mu = 0; mu < 4; ++mu) out << ",x" << i << '_' << mu;
    out << ",rate" << i;
  }
  out << ",constraint\n";
  for (std::size_t k = 0; k < traj.values.size(); ++k) {
    const NSystem& sys = traj.values[k];
    const auto x = sys.X();
    const CMatrix p0 = u.adjoint() * sys.P_upper()[0] * u;
    std::array<CMatrix, 4> xd;
    for (int mu = 0; mu < 4; ++mu) xd[mu] = u.adjoint() * x[mu] * u;
    out << format_number(traj.tau[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int mu = 0; mu < 4; ++mu) out << ',' << format_number(xd[mu](i, i).real());
      out << ',' << format_number(p0(i, i).real() / sys.mass);
    }
    out << ',' << format_number(sys.constraint_residual()) << '\n';
  }
  return out.str();
}

// ---- String ----------------------------------------------------------------

namespace {

Matrix2c mode_block(const Json& v, const std::string& key) {
  if (v.is_number()) return number(v, key) * Matrix2c::Identity();
  if (!v.is_object()) throw InputError("gram[" + key + "]: expected a number or {re, im}");
  const Json& re = member(v, "re");
  if (re.is_array()) return complex_matrix(v, 2, "gram[" + key + "]");
  const Complex z(number(re, key), number_or(v, "im", 0.0));
  return z * Matrix2c::Identity();
}

std::pair<CoefLabel, CoefLabel> label_pair(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos || key.find(',', comma + 1) != std::string::npos)
    throw InputError("gram key must look like \"row,col\": " + key);
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(' ');
    const auto e = s.find_last_not_of(' ');
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  return {CoefLabel::parse(trim(key.substr(0, comma))), CoefLabel::parse(trim(key.substr(comma + 1)))};
}

ModeSpec mode_spec_from(const Json& doc) {
  const double mass = number(member(doc, "mass"), "mass");
  std::vector<int> modes;
  if (doc.contains("modes")) {
    const Json& list = doc.at("modes");
    if (!list.is_array()) throw InputError("modes must be an array");
    for (const Json& n : list) {
      const auto v = integer(n, "modes");
      if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw InputError("mode number out of range");
      modes.push_back(static_cast<int>(v));
    }
  }
  int n_max = 4;
  if (doc.contains("n_max")) n_max = static_cast<int>(count(doc.at("n_max"), "n_max", 1));
  const Json& gram = member(doc, "gram");
  if (!gram.is_object()) throw InputError("gram must be an object");
  std::vector<std::pair<std::pair<CoefLabel, CoefLabel>, Matrix2c>> blocks;
  for (const auto& [key, value] : gram.items()) blocks.emplace_back(label_pair(key), mode_block(value, key));
  return make_mode_spec(mass, std::move(modes), blocks, n_max);
}

}  // namespace

ModeSpec parse_mode_spec(const std::string& json_text) { return mode_spec_from(parse_json(json_text)); }

std::string mode_spec_json(const ModeSpec& spec) {
  Json doc;
  doc["mass"] = spec.mass;
  doc["modes"] = spec.modes;
  doc["n_max"] = spec.n_max;
  Json gram = Json::object();
  const auto labels = spec.labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i; j < labels.size(); ++j) {
      const Matrix2c b = spec.block(labels[i], labels[j]);
      if (b.cwiseAbs().maxCoeff() == 0.0) continue;
      gram[labels[i].name() + "," + labels[j].name()] = complex_json(b);
    }
  doc["gram"] = std::move(gram);
  return dump(doc);
}

StringConfig parse_string_config(const std::string& json_text) {
  const Json doc = parse_json(json_text);
  StringConfig c;
  c.spec = mode_spec_from(doc);
  if (doc.contains("lattice")) {
    const Json& l = doc.at("lattice");
    c.lattice.tau_min = number_or(l, "tau_min", c.lattice.tau_min);
    c.lattice.tau_max = number_or(l, "tau_max", c.lattice.tau_max);
    c.lattice.sigma_min = number_or(l, "sigma_min", c.lattice.sigma_min);
    c.lattice.sigma_max = number_or(l, "sigma_max", c.lattice.sigma_max);
    if (l.contains("n_tau")) c.lattice.n_tau = count(l.at("n_tau"), "lattice.n_tau", 1);
    if (l.contains("n_sigma")) c.lattice.n_sigma = count(l.at("n_sigma"), "lattice.n_sigma", 1);
  }
  if (doc.contains("dilaton")) {
    const Json& d = doc.at("dilaton");
    c.dilaton = {number_or(d, "k", 0.0), number_or(d, "k_tau", 0.0), number_or(d, "k_sigma", 0.0)};
  }
  c.h = number_or(doc, "h", c.h);
  c.h_order = number_or(doc, "h_order", c.h_order);
  if (c.h <= 0.0 || c.h_order <= 0.0) throw InputError("finite-difference steps must be positive");
  if (doc.contains("panels")) c.panels = count(doc.at("panels"), "panels", 1);
  return c;
}

std::string field_csv(const std::vector<FieldSample>& samples) {
  std::ostringstream out;
  out << "tau,sigma,x0,x1,x2,x3,phi,T00,T01,T11\n";
  for (const auto& s : samples) {
    out << format_number(s.tau) << ',' << format_number(s.sigma);
    for (int mu = 0; mu < 4; ++mu) out << ',' << format_number(s.x(mu));
    out << ',' << format_number(s.phi) << ',' << format_number(s.t(0, 0)) << ',' << format_number(s.t(0, 1))
        << ',' << format_number(s.t(1, 1)) << '\n';
  }
  return out.str();
}

namespace {

struct ResidualFlags {
  bool wave_order = true, momentum_relation = true, conservation = true, dilaton = true, trace = true;
  bool all() const { return wave_order && momentum_relation && conservation && dilaton && trace; }
};

ResidualFlags residual_flags(const StringResiduals& r, bool vibrating, const Tolerances& tol) {
  ResidualFlags f;
  // Without modes every stencil is exact up to rounding, so no order is measurable.
  if (vibrating) f.wave_order = std::abs(r.wave_order - tol.wave_order) <= tol.wave_order_band;
  f.momentum_relation = r.momentum_relation <= tol.string_residual;
  f.conservation = r.conservation <= tol.string_residual;
  f.dilaton = r.dilaton <= tol.string_residual;
  f.trace = r.trace <= tol.trace;
  return f;
}

}  // namespace

bool StringReport::pass(const Tolerances& tol) const {
  if (path_independence > tol.total_momentum) return false;
  if (pi2p && *pi2p > tol.total_momentum) return false;
  return !residuals || residual_flags(*residuals, vibrating, tol).all();
}

StringReport string_report(const StringState& s, const StringConfig& config, bool with_residuals) {
  StringReport r;
  r.p_squared = s.p_squared();
  r.p_lower = s.p_lower();
  r.gram = s.gram_residual;
  r.vibrating = !s.spec.modes.empty();
  const double t0 = config.lattice.tau_min;
  const auto flat = total_momentum(s, Curve::equal_time(t0), config.panels);
  const auto wavy = total_momentum(s, Curve::wavy(t0, 0.2, 2), config.panels);
  r.total_equal_time = flat.p_lower;
  r.path_independence = max_abs(flat.p_lower - wavy.p_lower);
  if (s.spec.modes.empty()) {
    constexpr double pi = std::numbers::pi;
    r.pi2p = max_abs(flat.p_lower - pi * pi * s.p_lower());
  }
  if (with_residuals) r.residuals = string_residuals(s, config.lattice, config.h, config.h_order);
  return r;
}

std::string string_report_json(const StringReport& report, const StringConfig& config, const Tolerances& tol) {
  Json doc;
  doc["mass"] = config.spec.mass;
  doc["modes"] = config.spec.modes;
  doc["p_squared"] = report.p_squared;
  doc["p_lower"] = complex_json(report.p_lower);
  doc["gram_residual"] = report.gram;
  doc["total_momentum"] = {
      {"panels", config.panels},
      {"equal_time", complex_json(report.total_equal_time)},
      {"path_independence", report.path_independence},
      {"pi2_p_residual", optional_number(report.pi2p)},
      {"tolerance", tol.total_momentum},
  };
  if (report.residuals) {
    const StringResiduals& r = *report.residuals;
    const ResidualFlags f = residual_flags(r, report.vibrating, tol);
    auto order = [&](double v) { return report.vibrating ? Json(v) : Json(nullptr); };
    const Lattice& l = config.lattice;
    doc["residuals"] = {
        {"lattice",
         {{"tau_min", l.tau_min}, {"tau_max", l.tau_max}, {"n_tau", l.n_tau},
          {"sigma_min", l.sigma_min}, {"sigma_max", l.sigma_max}, {"n_sigma", l.n_sigma}}},
        {"h", r.h},
        {"h_order", r.h_order},
        {"dual_path", r.dual_path},
        {"wave", {{"max", r.wave}, {"order", order(r.wave_order)}, {"pass", f.wave_order}}},
        {"momentum_relation", {{"max", r.momentum_relation}, {"order", order(r.momentum_relation_order)}, {"pass", f.momentum_relation}}},
        {"conservation", {{"max", r.conservation}, {"order", order(r.conservation_order)}, {"pass", f.conservation}}},
        {"dilaton", {{"max", r.dilaton}, {"order", order(r.dilaton_order)}, {"pass", f.dilaton}}},
        {"trace", {{"max", r.trace}, {"pass", f.trace}}},
    };
  }
  doc["pass"] = report.pass(tol);
  return dump(doc);
}

}  // namespace cliffdyn::io
