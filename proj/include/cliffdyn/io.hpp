#pragma once

// File formats of the command-line tool. Parsers throw InputError on malformed
// input. CSV numbers carry 17 significant digits; JSON numbers round-trip.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cliffdyn/matrixmech.hpp"
#include "cliffdyn/particle.hpp"
#include "cliffdyn/string.hpp"
#include "cliffdyn/tolerances.hpp"

namespace cliffdyn::io {

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, const std::string& text);

std::string format_number(double value);

// ---- Hermitian matrices ---------------------------------------------------

/// {"n": int, "re": [[...]], "im": [[...]]}; "im" may be omitted.
HermitianMatrix parse_hermitian(const std::string& json_text);
std::string hermitian_json(const HermitianMatrix& h);

/// Coefficients of every vector over the generators plus the residual matrix
/// gram − target and the null products.
std::string resolution_json(const GramResolution& res);

// ---- Particle --------------------------------------------------------------

struct ParticleConfig {
  double mass = 1.0;
  Einbein einbein;
  double tau_start = 0.0;
  double tau_end = 1.0;
  std::size_t steps = 1000;
  std::size_t stride = 1;
  FourVector x = FourVector::Zero();
  FourVector p_upper = FourVector::Zero();
  /// Mixed products c^A∙d*_B; defaults to μ(tau_start)·1.
  std::optional<Matrix2c> mixed;

  ParticleState initial_state() const;
};

/// {mass, einbein: {type: "const"|"linear", params: [a] | [a, b]}, tau0,
///  tau_start?, tau_end, steps, stride?, gram: {x: [4], p: [4], M?: {re, im}}}.
/// p is contravariant and must satisfy p·p = m² to 1e-9 relative.
ParticleConfig parse_particle_config(const std::string& json_text);

/// τ, τ̄, x^0..x^3, p_0..p_3, J_11 J_12 J_22 (re, im), j, μ.
std::string trajectory_csv(const Trajectory& traj);

struct ConservationReport {
  double shell_drift = 0.0;       ///< max |p·p − m²|
  double line_residual = 0.0;     ///< max |x − x(0) − p τ̄ / m|
  double mu_error = 0.0;          ///< max |μ − ∫ m² e dt|
  double constraint_drift = 0.0;  ///< max |Q_A^B − μ δ_A^B|
  double charge_drift = 0.0;      ///< max |J − J(0)|, |j − j(0)|
  std::size_t samples = 0;

  bool pass(const Tolerances& tol) const;
};
ConservationReport conservation_report(const Trajectory& traj);
std::string conservation_json(const ConservationReport& report, const ParticleConfig& config,
                              const Tolerances& tol);

// ---- Matrix mechanics ------------------------------------------------------

struct MatrixConfig {
  double mass = 1.0;
  double taubar_end = 1.0;
  std::size_t steps = 1000;
  std::size_t stride = 1;
  std::vector<ParticleGram> particles;
  /// Constant gauge U applied before evolving; identity when absent.
  std::optional<CMatrix> gauge;
};

/// {mass, taubar_end, steps, stride?, mu?, particles: [{x, p, M?}], gauge?: {re, im}}.
/// Particles without M use mu·1. Only the classical (ħ = 0) system is read.
MatrixConfig parse_matrix_config(const std::string& json_text);

/// τ̄, then per particle i: x_i^0..x_i^3 (eigenvalues in the undone gauge) and
/// dt_i/dτ̄, then the constraint residual.
std::string matrix_csv(const Snapshots<NSystem>& traj, const MatrixConfig& config);

// ---- String ----------------------------------------------------------------

/// {mass, modes: [n...], n_max?, gram: {"k,l": block, ...}} where a block is
/// {re: [[2]], im: [[2]]}, a scalar {re, im} standing for a multiple of the
/// identity, or a plain number. Missing pairs are zero.
ModeSpec parse_mode_spec(const std::string& json_text);
std::string mode_spec_json(const ModeSpec& spec);

struct StringConfig {
  ModeSpec spec;
  Lattice lattice;
  DilatonConstants dilaton;
  double h = 1e-3;
  double h_order = 0.02;
  std::size_t panels = 32;
};

/// A ModeSpec document with optional "lattice" {tau_min, tau_max, n_tau,
/// sigma_min, sigma_max, n_sigma}, "dilaton" {k, k_tau, k_sigma}, "h",
/// "h_order" and "panels".
StringConfig parse_string_config(const std::string& json_text);

/// τ, σ, x^0..x^3, φ, T^00, T^01, T^11.
std::string field_csv(const std::vector<FieldSample>& samples);

struct StringReport {
  double p_squared = 0.0;
  Matrix2c p_lower = Matrix2c::Zero();
  double gram = 0.0;
  Matrix2c total_equal_time = Matrix2c::Zero();
  double path_independence = 0.0;  ///< equal-time vs wavy curve with shared endpoints
  std::optional<double> pi2p;      ///< |p_tot − π² p|, non-vibrating strings only
  std::optional<StringResiduals> residuals;
  bool vibrating = false;  ///< convergence orders are only measurable with modes

  bool pass(const Tolerances& tol) const;
};
StringReport string_report(const StringState& s, const StringConfig& config, bool with_residuals);
std::string string_report_json(const StringReport& report, const StringConfig& config, const Tolerances& tol);

}  // namespace cliffdyn::io
