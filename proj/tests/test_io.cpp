#include <random>
#include <sstream>

#include "cliffdyn/io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cliffdyn;
using Json = nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<double> row_values(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell.empty() ? 0.0 : std::stod(cell));
  return out;
}

const char* kParticle = R"({
  "mass": 1.2,
  "einbein": {"type": "const", "params": [0.75]},
  "tau0": -1.0,
  "tau_end": 1.0,
  "steps": 2000,
  "stride": 100,
  "gram": {"x": [0.1, 0.2, 0.3, 0.4], "p": [1.3152946437965904, 0.3, -0.4, 0.2]}
})";

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 1e-300, 0.0})
    CHECK(std::stod(io::format_number(v)) == v);
  CHECK(io::format_number(0.5) == "0.5");
}

TEST_CASE("Hermitian matrix JSON") {
  const auto h = io::parse_hermitian(R"({"n": 2, "re": [[1, 0], [0, -1]]})");
  CHECK(h.n() == 2);
  CHECK(h(1, 1) == Complex(-1.0, 0.0));

  SUBCASE("round trip is exact") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    CMatrix a(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) a(i, j) = Complex(g(rng), g(rng));
    const HermitianMatrix original(CMatrix(a + a.adjoint()));
    const auto back = io::parse_hermitian(io::hermitian_json(original));
    CHECK(back.entries() == original.entries());
  }
  SUBCASE("malformed input is rejected") {
    CHECK_THROWS_AS(io::parse_hermitian(R"({"n": 2, "re": [[1, 2], [0, 1]]})"), InputError);
    CHECK_THROWS_AS(io::parse_hermitian(R"({"n": 2, "re": [[1, 0], [0, 1]], "im": [[0, 1], [1, 0]]})"),
                    InputError);
    CHECK_THROWS_AS(io::parse_hermitian(R"({"n": 3, "re": [[1, 0], [0, 1]]})"), InputError);
    CHECK_THROWS_AS(io::parse_hermitian(R"({"n": 0, "re": []})"), InputError);
    CHECK_THROWS_AS(io::parse_hermitian(R"({"re": [[1]]})"), InputError);
    CHECK_THROWS_AS(io::parse_hermitian(R"({"n": 1, "re": [["x"]]})"), InputError);
    CHECK_THROWS_AS(io::parse_hermitian("{not json"), InputError);
  }
}

TEST_CASE("resolution export rebuilds the Gram matrix from its coefficients") {
  CMatrix m(3, 3);
  m << 2.0, Complex(0.5, 0.3), 0.0, Complex(0.5, -0.3), -1.0, 0.2, 0.0, 0.2, 0.0;
  const HermitianMatrix h(m);
  const auto res = resolve_hermitian(h, GeneratorSpace::allocate(6, 6));
  const Json doc = Json::parse(io::resolution_json(res));
  const std::size_t n_pos = doc["generators"]["positive"];
  const auto& vecs = doc["vectors"];
  REQUIRE(vecs.size() == 3);
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      // a∙b* = Σ_k 2 s_k a_k conj(b_k) with s_k = +1 on the first n_pos generators.
      Complex sum = 0.0;
      for (std::size_t k = 0; k < vecs[i]["re"].size(); ++k) {
        const Complex a(vecs[i]["re"][k].get<double>(), vecs[i]["im"][k].get<double>());
        const Complex b(vecs[j]["re"][k].get<double>(), vecs[j]["im"][k].get<double>());
        sum += (k < n_pos ? 2.0 : -2.0) * a * std::conj(b);
      }
      worst = std::max(worst, std::abs(sum - m(i, j)));
    }
  CHECK(worst < 1e-12);
  CHECK(doc["residual"].get<double>() < 1e-12);
  CHECK(doc["residual_matrix"]["re"].size() == 3);
}

TEST_CASE("particle config and trajectory export") {
  const auto cfg = io::parse_particle_config(kParticle);
  CHECK(cfg.mass == 1.2);
  CHECK(cfg.einbein.kind == Einbein::Kind::Constant);
  CHECK(cfg.stride == 100);
  CHECK_FALSE(cfg.mixed.has_value());
  const ParticleState s0 = cfg.initial_state();
  CHECK(s0.mu() == doctest::Approx(mu_of_tau(cfg.einbein, 1.2, 0.0)).epsilon(1e-12));
  CHECK((s0.x() - cfg.x).cwiseAbs().maxCoeff() < 1e-12);

  IntegrateOptions opts;
  opts.stride = cfg.stride;
  const auto traj = integrate(s0, cfg.einbein, cfg.tau_end, cfg.steps, opts);
  const auto rows = lines(io::trajectory_csv(traj));
  REQUIRE(rows.size() == traj.states.size() + 1);
  CHECK(rows[0] == "tau,taubar,x0,x1,x2,x3,p_0,p_1,p_2,p_3,J11_re,J11_im,J12_re,J12_im,J22_re,J22_im,j,mu");
  const auto first = row_values(rows[1]);
  REQUIRE(first.size() == 18);
  CHECK(first[2] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(first[7] == doctest::Approx(-0.3).epsilon(1e-12));  // p_1 = −p^1
  CHECK(first[17] == doctest::Approx(s0.mu()).epsilon(1e-12));

  const auto report = io::conservation_report(traj);
  const Tolerances tol;
  CHECK(report.line_residual < 1e-8);
  CHECK(report.shell_drift < 1e-8);
  CHECK(report.mu_error < 1e-8);
  CHECK(report.constraint_drift < 1e-8);
  CHECK(report.pass(tol));
  const Json j = Json::parse(io::conservation_json(report, cfg, tol));
  CHECK(j["pass"].get<bool>());
  CHECK(j.contains("constraint_drift"));

  SUBCASE("config errors") {
    Json doc = Json::parse(kParticle);
    doc["gram"]["p"] = {1.0, 0.3, 0.0, 0.0};
    CHECK_THROWS_AS(io::parse_particle_config(doc.dump()), InputError);
    doc = Json::parse(kParticle);
    doc["einbein"]["type"] = "cubic";
    CHECK_THROWS_AS(io::parse_particle_config(doc.dump()), InputError);
    doc = Json::parse(kParticle);
    doc["einbein"]["params"] = {1.0, 2.0};
    CHECK_THROWS_AS(io::parse_particle_config(doc.dump()), InputError);
    doc = Json::parse(kParticle);
    doc["steps"] = 0;
    CHECK_THROWS_AS(io::parse_particle_config(doc.dump()), InputError);
    doc = Json::parse(kParticle);
    doc.erase("tau0");
    CHECK_THROWS_AS(io::parse_particle_config(doc.dump()), InputError);
  }
  SUBCASE("a window through the turning point is refused") {
    Json doc = Json::parse(kParticle);
    doc["tau0"] = 0.5;
    const auto c = io::parse_particle_config(doc.dump());
    CHECK_THROWS_AS(integrate(c.initial_state(), c.einbein, c.tau_end, c.steps), PreconditionError);
  }
  SUBCASE("explicit mixed products") {
    Json doc = Json::parse(kParticle);
    doc["gram"]["M"] = {{"re", {{0.75, 0.0}, {0.0, 0.75}}}};
    const auto c = io::parse_particle_config(doc.dump());
    REQUIRE(c.mixed.has_value());
    CHECK(c.initial_state().mu() == doctest::Approx(0.75).epsilon(1e-12));
  }
}

TEST_CASE("matrix system config") {
  const char* text = R"({
    "mass": 1.0, "taubar_end": 1.0, "steps": 400, "stride": 200, "mu": 0.7,
    "particles": [
      {"x": [0.1, 0.2, -0.3, 0.4], "p": [1.0677078252031311, 0.3, 0.1, -0.2]},
      {"x": [-0.5, 0.1, 0.0, 0.2], "p": [1.0816653826391969, -0.1, 0.4, 0.0]}
    ],
    "gauge": {"re": [[0.6, 0.8], [-0.8, 0.6]]}
  })";
  const auto cfg = io::parse_matrix_config(text);
  REQUIRE(cfg.particles.size() == 2);
  CHECK(cfg.particles[1].mixed == 0.7 * Matrix2c::Identity());
  NSystem sys = assemble(resolve_particles(cfg.particles, cfg.mass));
  sys = gauge_transform(sys, *cfg.gauge);
  const auto traj = evolve_matrix_classical(sys, cfg.taubar_end, cfg.steps, cfg.stride);
  const auto rows = lines(io::matrix_csv(traj, cfg));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "taubar,x0_0,x0_1,x0_2,x0_3,rate0,x1_0,x1_1,x1_2,x1_3,rate1,constraint");
  const auto last = row_values(rows.back());
  // Undoing the gauge returns each particle's own straight line.
  const FourVector& p = cfg.particles[1].p;
  CHECK(last[6] == doctest::Approx(-0.5 + p(0)).epsilon(1e-9));
  CHECK(last[8] == doctest::Approx(0.0 + p(2)).epsilon(1e-9));
  CHECK(last[10] == doctest::Approx(p(0)).epsilon(1e-9));
  CHECK(last[11] < 1e-10);

  SUBCASE("rejections") {
    Json doc = Json::parse(text);
    doc["hbar"] = 0.5;
    CHECK_THROWS_AS(io::parse_matrix_config(doc.dump()), InputError);
    doc = Json::parse(text);
    doc["particles"] = Json::array();
    CHECK_THROWS_AS(io::parse_matrix_config(doc.dump()), InputError);
    doc = Json::parse(text);
    doc["gauge"] = {{"re", {{1.0, 0.1}, {0.0, 1.0}}}};
    const auto bad = io::parse_matrix_config(doc.dump());
    CHECK_THROWS_AS(gauge_transform(sys, *bad.gauge), InputError);
  }
}

TEST_CASE("mode spec JSON") {
  SUBCASE("non-vibrating string in the scalar block form") {
    const auto spec = io::parse_mode_spec(R"({"mass": 1.5, "modes": [], "gram": {"l,l": {"re": 3.375}}})");
    CHECK(spec.gram.entries() == non_vibrating_spec(1.5).gram.entries());
  }
  SUBCASE("full blocks round trip exactly") {
    std::mt19937_64 rng(9);
    const ModeSpec spec = random_mode_spec(rng, 1.1, {1, -1, 2});
    const ModeSpec back = io::parse_mode_spec(io::mode_spec_json(spec));
    CHECK(back.modes == spec.modes);
    CHECK(back.mass == spec.mass);
    CHECK((back.gram.entries() - spec.gram.entries()).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("plain numbers and spaces in keys") {
    const auto spec = io::parse_mode_spec(R"({"mass": 1.0, "gram": {" l , l ": 1, "k,k": 0.5}})");
    CHECK(spec.block(CoefLabel::parse("k"), CoefLabel::parse("k")) == 0.5 * Matrix2c::Identity());
  }
  SUBCASE("rejections") {
    CHECK_THROWS_AS(io::parse_mode_spec(R"({"mass": 1.0, "gram": {"l;l": 1}})"), InputError);
    CHECK_THROWS_AS(io::parse_mode_spec(R"({"mass": 1.0, "gram": {"l,q": 1}})"), InputError);
    CHECK_THROWS_AS(io::parse_mode_spec(R"({"mass": 1.0, "gram": {"l,l": 2}})"), InputError);
    CHECK_THROWS_AS(io::parse_mode_spec(R"({"mass": 1.0, "modes": [1], "gram": {"l,l": 1, "a1,l": 0.1}})"),
                    InputError);
    CHECK_THROWS_AS(io::parse_mode_spec(R"({"mass": 1.0, "modes": [0], "gram": {"l,l": 1}})"), InputError);
    CHECK_THROWS_AS(io::parse_mode_spec(R"({"mass": 1.0, "modes": [1.5], "gram": {"l,l": 1}})"), InputError);
    CHECK_THROWS_AS(io::parse_mode_spec(R"({"mass": 1.0, "gram": {"l,l": {"re": [[0, 1], [1, 0]]}}})"),
                    PreconditionError);
  }
}

TEST_CASE("string config, field export and report") {
  const char* text = R"({
    "mass": 1.3, "modes": [], "gram": {"l,l": {"re": 2.197}},
    "lattice": {"tau_min": 0.1, "tau_max": 0.9, "n_tau": 3, "n_sigma": 4},
    "dilaton": {"k": 0.5}
  })";
  const auto cfg = io::parse_string_config(text);
  CHECK(cfg.lattice.n_tau == 3);
  CHECK(cfg.lattice.sigma_max == doctest::Approx(3.141592653589793));
  CHECK(cfg.dilaton.k == 0.5);
  const StringState s = build_wave_state(cfg.spec);

  const auto rows = lines(io::field_csv(sample_field(s, cfg.lattice, cfg.dilaton)));
  REQUIRE(rows.size() == 13);
  CHECK(rows[0] == "tau,sigma,x0,x1,x2,x3,phi,T00,T01,T11");
  const auto r = row_values(rows[1]);
  // No-mode string at rest: T = −m²·1 and φ = k + ½m²(τ² + σ²).
  CHECK(r[7] == doctest::Approx(-1.69).epsilon(1e-12));
  CHECK(std::abs(r[8]) < 1e-12);
  CHECK(r[6] == doctest::Approx(0.5 + 0.5 * 1.69 * 0.01).epsilon(1e-12));

  const auto report = io::string_report(s, cfg, true);
  const Tolerances tol;
  REQUIRE(report.pi2p.has_value());
  CHECK(*report.pi2p < 1e-8);
  CHECK(report.pass(tol));
  const Json j = Json::parse(io::string_report_json(report, cfg, tol));
  CHECK(j["pass"].get<bool>());
  CHECK(j["residuals"]["wave"]["order"].is_null());
  CHECK(j["residuals"]["trace"]["max"].get<double>() < 1e-9);

  SUBCASE("vibrating strings report orders and no pi^2 check") {
    std::mt19937_64 rng(3);
    io::StringConfig vib = cfg;
    vib.spec = random_mode_spec(rng, 1.3, {1, -1, 2});
    const auto rep = io::string_report(build_wave_state(vib.spec), vib, true);
    CHECK_FALSE(rep.pi2p.has_value());
    CHECK(rep.residuals->wave_order == doctest::Approx(2.0).epsilon(0.1));
    CHECK(rep.pass(tol));
    const Json jv = Json::parse(io::string_report_json(rep, vib, tol));
    CHECK(jv["residuals"]["wave"]["order"].is_number());
  }
  SUBCASE("bad steps") {
    Json doc = Json::parse(text);
    doc["h"] = -1.0;
    CHECK_THROWS_AS(io::parse_string_config(doc.dump()), InputError);
  }
}

TEST_CASE("tolerance surface") {
  Tolerances tol;
  CHECK(tol.get("trajectory") == 1e-8);
  tol.set("trajectory", 1e-6);
  CHECK(tol.trajectory == 1e-6);
  CHECK_THROWS_AS(tol.set("nope", 1.0), InputError);
  CHECK_THROWS_AS(tol.set("trace", -1.0), InputError);
  CHECK(Tolerances::names().size() == 19);
}
