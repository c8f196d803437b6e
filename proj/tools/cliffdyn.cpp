// Command-line front end. Exit codes: 0 pass, 1 numerical failure, 2 input
// error, 3 precondition refusal.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cliffdyn/acceptance.hpp"
#include "cliffdyn/io.hpp"

namespace fs = std::filesystem;
using namespace cliffdyn;

namespace {

enum Exit : int { kPass = 0, kNumerical = 1, kInput = 2, kPrecondition = 3 };

const char* kDefaultOut = "cliffdyn-out";

Tolerances tolerances_from(const std::vector<std::string>& overrides) {
  Tolerances tol;
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--tol expects name=value, got " + item);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error&) {
      throw InputError("--tol value is not a number: " + item);
    }
    tol.set(item.substr(0, eq), value);
  }
  return tol;
}

HermitianMatrix random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return HermitianMatrix(CMatrix(0.5 * (a + a.adjoint())));
}

int cmd_resolve(const std::string& input, int random_n, std::uint64_t seed, const fs::path& out,
                const Tolerances& tol) {
  HermitianMatrix h;
  if (!input.empty()) {
    h = io::parse_hermitian(io::read_text(input));
  } else {
    if (random_n < 1) throw InputError("resolve needs --input or --random N");
    h = random_hermitian(random_n, seed);
    io::write_text(out / "input.json", io::hermitian_json(h));
  }
  const auto n = static_cast<std::size_t>(h.n());
  const GramResolution res = resolve_hermitian(h, GeneratorSpace::allocate(2 * n, 2 * n));
  io::write_text(out / "resolution.json", io::resolution_json(res));
  const double residual = res.residual(), null = res.null_residual();
  const bool pass = residual < tol.gram_residual && null < tol.null_residual;
  std::cout << (pass ? "PASS" : "FAIL") << " resolve n=" << n << " residual=" << io::format_number(residual)
            << " null_residual=" << io::format_number(null) << '\n';
  return pass ? kPass : kNumerical;
}

int cmd_particle(const std::string& config, const fs::path& out, const Tolerances& tol) {
  const auto cfg = io::parse_particle_config(io::read_text(config));
  IntegrateOptions opts;
  opts.stride = cfg.stride;
  const Trajectory traj = integrate(cfg.initial_state(), cfg.einbein, cfg.tau_end, cfg.steps, opts);
  const auto report = io::conservation_report(traj);
  io::write_text(out / "trajectory.csv", io::trajectory_csv(traj));
  io::write_text(out / "conservation.json", io::conservation_json(report, cfg, tol));
  const bool pass = report.pass(tol);
  std::cout << (pass ? "PASS" : "FAIL") << " particle line=" << io::format_number(report.line_residual)
            << " shell=" << io::format_number(report.shell_drift) << " mu=" << io::format_number(report.mu_error)
            << " constraint=" << io::format_number(report.constraint_drift) << '\n';
  return pass ? kPass : kNumerical;
}

int cmd_matrix(const std::string& config, const fs::path& out, const Tolerances& tol) {
  const auto cfg = io::parse_matrix_config(io::read_text(config));
  NSystem sys = assemble(resolve_particles(cfg.particles, cfg.mass));
  if (cfg.gauge) sys = gauge_transform(sys, *cfg.gauge);
  const auto traj = evolve_matrix_classical(sys, cfg.taubar_end, cfg.steps, cfg.stride);
  io::write_text(out / "matrix.csv", io::matrix_csv(traj, cfg));
  double constraint = 0.0;
  for (const auto& s : traj.values) constraint = std::max(constraint, s.constraint_residual());
  const bool pass = constraint < tol.gauge_constraint;
  std::cout << (pass ? "PASS" : "FAIL") << " matrix n=" << cfg.particles.size()
            << " constraint=" << io::format_number(constraint) << '\n';
  return pass ? kPass : kNumerical;
}

int cmd_string(const std::string& config, bool residuals, const fs::path& out, const Tolerances& tol) {
  const auto cfg = io::parse_string_config(io::read_text(config));
  const StringState s = build_wave_state(cfg.spec);
  io::write_text(out / "field.csv", io::field_csv(sample_field(s, cfg.lattice, cfg.dilaton)));
  const auto report = io::string_report(s, cfg, residuals);
  io::write_text(out / "report.json", io::string_report_json(report, cfg, tol));
  const bool pass = report.pass(tol);
  std::cout << (pass ? "PASS" : "FAIL") << " string path_independence=" << io::format_number(report.path_independence);
  if (report.pi2p) std::cout << " pi2p=" << io::format_number(*report.pi2p);
  std::cout << '\n';
  return pass ? kPass : kNumerical;
}

int cmd_verify_all(std::uint64_t seed, bool json, const Tolerances& tol) {
  const auto report = run_acceptance(seed, tol);
  std::cout << (json ? acceptance_json(report) : acceptance_table(report));
  if (report.pass()) return kPass;
  std::cerr << "failed criteria:";
  for (int id : report.failures()) std::cerr << ' ' << id;
  std::cerr << '\n';
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clifford-space particle, matrix and string dynamics"};
  app.require_subcommand(1);
  app.fallthrough();
  std::vector<std::string> tol_overrides;
  app.add_option("--tol", tol_overrides, "Override a tolerance, name=value (repeatable)");

  std::string input, config;
  std::string out = kDefaultOut;
  int random_n = 0;
  std::uint64_t seed = 20240601;
  bool residuals = false, json = false;

  auto* resolve = app.add_subcommand("resolve", "Resolve a Hermitian matrix into a Gram matrix");
  auto* in_opt = resolve->add_option("--input", input, "HermitianMatrix JSON")->check(CLI::ExistingFile);
  resolve->add_option("--random", random_n, "Resolve a seeded random n x n matrix instead")->excludes(in_opt);
  resolve->add_option("--seed", seed, "Seed for --random");
  resolve->add_option("--out", out, "Output directory");

  auto* particle = app.add_subcommand("particle", "Integrate a free particle and report conserved quantities");
  particle->add_option("--config", config, "Particle JSON config")->required()->check(CLI::ExistingFile);
  particle->add_option("--out", out, "Output directory");

  auto* matrix = app.add_subcommand("matrix", "Evolve an N-particle classical matrix system");
  matrix->add_option("--config", config, "Matrix system JSON config")->required()->check(CLI::ExistingFile);
  matrix->add_option("--out", out, "Output directory");

  auto* string_cmd = app.add_subcommand("string", "Sample a travelling-wave string and check its equations");
  string_cmd->add_option("--config", config, "ModeSpec JSON config")->required()->check(CLI::ExistingFile);
  string_cmd->add_flag("--residuals", residuals, "Add finite-difference residuals and convergence orders");
  string_cmd->add_option("--out", out, "Output directory");

  auto* verify = app.add_subcommand("verify-all", "Run every acceptance criterion");
  verify->add_option("--seed", seed, "Seed of the random suites");
  verify->add_flag("--json", json, "Print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    const Tolerances tol = tolerances_from(tol_overrides);
    if (*resolve) return cmd_resolve(input, random_n, seed, out, tol);
    if (*particle) return cmd_particle(config, out, tol);
    if (*matrix) return cmd_matrix(config, out, tol);
    if (*string_cmd) return cmd_string(config, residuals, out, tol);
    return cmd_verify_all(seed, json, tol);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const PreconditionError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kPrecondition;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
