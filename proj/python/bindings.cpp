#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cliffdyn/acceptance.hpp"
#include "cliffdyn/io.hpp"
#include "cliffdyn/parallel.hpp"

namespace py = pybind11;
using namespace cliffdyn;

namespace {

py::dict resolve(const CMatrix& h) {
  const HermitianMatrix target(h, 1e-12);
  const auto n = static_cast<std::size_t>(target.n());
  const GramResolution res = resolve_hermitian(target, GeneratorSpace::allocate(2 * n, 2 * n));
  const SpacePtr& space = res.vectors.front().space();
  CMatrix coeffs(target.n(), static_cast<Eigen::Index>(space->dim()));
  for (std::size_t i = 0; i < n; ++i) coeffs.row(static_cast<Eigen::Index>(i)) = res.vectors[i].coeffs().transpose();
  py::dict out;
  out["coefficients"] = coeffs;
  out["signs"] = space->signs();
  out["gram"] = CMatrix(res.gram());
  out["residual"] = res.residual();
  out["null_residual"] = res.null_residual();
  return out;
}

py::dict run_particle(const std::string& config_json) {
  const auto cfg = io::parse_particle_config(config_json);
  IntegrateOptions opts;
  opts.stride = cfg.stride;
  const Trajectory traj = integrate(cfg.initial_state(), cfg.einbein, cfg.tau_end, cfg.steps, opts);
  const auto rows = static_cast<Eigen::Index>(traj.states.size());
  Eigen::VectorXd tau(rows), mu(rows);
  Eigen::MatrixXd x(rows, 4), p(rows, 4);
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto& s = traj.states[static_cast<std::size_t>(k)];
    tau(k) = s.tau;
    mu(k) = s.mu();
    x.row(k) = s.x().transpose();
    p.row(k) = s.p_lower().transpose();
  }
  const auto report = io::conservation_report(traj);
  py::dict out;
  out["tau"] = tau;
  out["taubar"] = traj.taubar;
  out["x"] = x;
  out["p_lower"] = p;
  out["mu"] = mu;
  out["report"] = io::conservation_json(report, cfg, Tolerances{});
  return out;
}

std::string run_string(const std::string& config_json, bool residuals) {
  const auto cfg = io::parse_string_config(config_json);
  const StringState s = build_wave_state(cfg.spec);
  return io::string_report_json(io::string_report(s, cfg, residuals), cfg, Tolerances{});
}

std::string field_csv(const std::string& config_json) {
  const auto cfg = io::parse_string_config(config_json);
  return io::field_csv(sample_field(build_wave_state(cfg.spec), cfg.lattice, cfg.dilaton));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Clifford-space particle, matrix and string dynamics";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<PreconditionError> precondition_error(m, "PreconditionError", PyExc_ArithmeticError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const PreconditionError& e) {
      py::set_error(precondition_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    }
  });

  m.def("resolve_hermitian", &resolve, py::arg("h"),
        "Realize a Hermitian matrix as c_i.c_j* over a fresh generator space.");
  m.def("vec_to_spinor", py::overload_cast<const FourVector&>(&vec_to_spinor), py::arg("v"));
  m.def("spinor_to_vec", &spinor_to_vec, py::arg("s"));
  m.def("lower_indices", &lower_indices, py::arg("upper"));
  m.def("four_vector_identity_residual", &four_vector_identity_residual, py::arg("upper"));
  m.def("run_particle", &run_particle, py::arg("config_json"), "Integrate a particle config.");
  m.def("string_report", &run_string, py::arg("config_json"), py::arg("residuals") = false,
        "Report JSON of a string config.");
  m.def("field_csv", &field_csv, py::arg("config_json"));
  m.def("verify_all", [](std::uint64_t seed) { return acceptance_json(run_acceptance(seed)); },
        py::arg("seed") = 20240601, "Acceptance report JSON.");
  m.def("thread_budget", &thread_budget);
}
