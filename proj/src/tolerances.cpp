#include "cliffdyn/tolerances.hpp"

#include <cmath>
#include <utility>

#include "cliffdyn/types.hpp"

namespace cliffdyn {

namespace {

template <typename T>
auto fields(T& t) {
  return std::vector<std::pair<std::string, decltype(&t.trace)>>{
      {"gram_residual", &t.gram_residual},
      {"null_residual", &t.null_residual},
      {"four_vector", &t.four_vector},
      {"bracket_reduction", &t.bracket_reduction},
      {"trajectory", &t.trajectory},
      {"gauge_evolution", &t.gauge_evolution},
      {"gauge_constraint", &t.gauge_constraint},
      {"picture", &t.picture},
      {"stationary", &t.stationary},
      {"wave_order", &t.wave_order},
      {"wave_order_band", &t.wave_order_band},
      {"string_residual", &t.string_residual},
      {"trace", &t.trace},
      {"total_momentum", &t.total_momentum},
      {"spinning", &t.spinning},
      {"current_bracket", &t.current_bracket},
      {"su2", &t.su2},
      {"poincare", &t.poincare},
      {"unitary", &t.unitary},
  };
}

}  // namespace

void Tolerances::set(const std::string& name, double value) {
  if (!std::isfinite(value) || value < 0.0) throw InputError("tolerance " + name + " must be finite and >= 0");
  for (auto& [key, ptr] : fields(*this))
    if (key == name) {
      *ptr = value;
      return;
    }
  throw InputError("unknown tolerance: " + name);
}

double Tolerances::get(const std::string& name) const {
  for (const auto& [key, ptr] : fields(*this))
    if (key == name) return *ptr;
  throw InputError("unknown tolerance: " + name);
}

std::vector<std::string> Tolerances::names() {
  Tolerances t;
  std::vector<std::string> out;
  for (const auto& f : fields(t)) out.push_back(f.first);
  return out;
}

}  // namespace cliffdyn
