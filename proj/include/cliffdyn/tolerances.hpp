#pragma once

// Pass/fail thresholds shared by the acceptance suite and the CLI reports.

#include <string>
#include <vector>

namespace cliffdyn {

struct Tolerances {
  double gram_residual = 1e-10;      ///< |c_i∙c_j* − H_ij|
  double null_residual = 1e-12;      ///< |c_i∙c_j|
  double four_vector = 1e-12;        ///< relative, x^μ x_μ = det x
  double bracket_reduction = 1e-9;   ///< |CB − μ PB| / (1 + |PB|)
  double trajectory = 1e-8;          ///< straight line, mass shell, μ(τ)
  double gauge_evolution = 1e-10;    ///< gauge then evolve vs evolve then gauge
  double gauge_constraint = 1e-11;   ///< K → U K U† keeps μ·1
  double picture = 1e-8;             ///< Heisenberg vs Schrödinger expectations
  double stationary = 1e-9;          ///< X, P under Γ̄ = −H/ħ
  double wave_order = 2.0;           ///< expected finite-difference order
  double wave_order_band = 0.2;
  double string_residual = 1e-6;     ///< field equations at h = 1e-3
  double trace = 1e-9;               ///< η_αβ T^αβ on shell
  double total_momentum = 1e-8;      ///< d_tot∙d_tot = π² p, path independence
  double spinning = 1e-10;           ///< closed forms vs generic evaluation
  double current_bracket = 1e-9;     ///< discretized current algebra
  double su2 = 1e-10;
  double poincare = 1e-10;
  double unitary = 1e-10;

  /// Throws InputError for an unknown name or a non-finite/negative value.
  void set(const std::string& name, double value);
  double get(const std::string& name) const;
  static std::vector<std::string> names();
};

}  // namespace cliffdyn
