#pragma once

// The eight acceptance criteria as runnable suites. Every random input is
// derived from one 64-bit seed so a report is reproducible bit for bit.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cliffdyn/tolerances.hpp"

namespace cliffdyn {

struct AcceptanceCheck {
  std::string name;
  double value = 0.0;
  std::string bound;  ///< human-readable threshold, e.g. "< 1e-10"
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<AcceptanceCheck> checks;
  std::string error;  ///< set when the suite threw instead of finishing

  bool pass() const;
};

struct AcceptanceReport {
  std::uint64_t seed = 0;
  Tolerances tolerances;
  std::vector<CriterionResult> criteria;

  bool pass() const;
  std::vector<int> failures() const;
};

/// Independent stream for criterion `id` under `seed`.
std::mt19937_64 criterion_rng(std::uint64_t seed, int id);

/// Runs criterion 1..8; throws InputError for other ids. Exceptions raised by
/// the suite are caught and reported as a failure.
CriterionResult run_criterion(int id, std::uint64_t seed, const Tolerances& tol = {});

/// All criteria, in parallel where CLIFFDYN_THREADS allows; ordered by id.
AcceptanceReport run_acceptance(std::uint64_t seed, const Tolerances& tol = {});

/// One line per criterion: "PASS 1 <name>: check=value (bound); ...".
std::string acceptance_table(const AcceptanceReport& report);
std::string acceptance_json(const AcceptanceReport& report);

}  // namespace cliffdyn
