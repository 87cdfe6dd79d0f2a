#pragma once

#include <json.hpp>

#include <cmath>
#include <string>

#include "kpi/evolve.hpp"
#include "kpi/linop.hpp"

namespace kpi {

using json = nlohmann::ordered_json;

/// Version tag carried by every emitted report.
inline constexpr int report_schema = 1;

inline json schema_header(const std::string& kind) { return json{{"schema", report_schema}, {"kind", kind}}; }

/// Non-finite doubles become null (JSON has no inf/nan).
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Grid& g) { return json{{"nx", g.nx}, {"lx", g.lx}, {"ny", g.ny}}; }

inline json to_json(const SolitonParams& p) {
  return json{{"a1", p.a1}, {"a2", p.a2}, {"gamma", p.gamma}, {"rho", p.rho}};
}

inline json to_json(const FunctionalReport& r) {
  json j = schema_header("functionals");
  j["mass"] = number(r.mass);
  j["energy"] = number(r.energy);
  j["action"] = number(r.action);
  j["speed_used"] = number(r.speed_used);
  j["energy_parts"] = {{"gradient", number(r.parts.gradient)},
                       {"nonlocal", number(r.parts.nonlocal)},
                       {"cubic", number(r.parts.cubic)}};
  return j;
}

inline json to_json(const SpectrumReport& r) {
  json j = schema_header("spectrum");
  j["operator"] = r.op;
  j["mode"] = r.n;
  j["speed"] = r.c;
  j["size"] = r.size;
  j["eigenvalues"] = r.eigenvalues;
  j["negative_count"] = r.negative_count;
  j["negative_threshold"] = r.negative_threshold;
  j["norm"] = r.norm;
  j["essential_edge"] = r.essential_edge;
  j["continuum_from_index"] = r.continuum_from;
  json nz = json::array();
  for (const auto& z : r.near_zero) nz.push_back({{"eigenvalue", z.eigenvalue}, {"overlap", z.overlap}});
  j["near_zero"] = nz;
  return j;
}

inline json to_json(const ModulationState& s) {
  json j = schema_header("modulation");
  j["params"] = to_json(s.params);
  j["ortho_residuals"] = s.ortho_residuals;
  j["tolerance"] = s.tolerance;
  j["newton_iterations"] = s.newton_iterations;
  j["residual_history"] = s.residual_history;
  const ProjectedZ1 z = z1_norm_projected(s.eta);
  j["eta"] = {{"l2", l2_norm(s.eta)}, {"z1", z.norm}, {"z1_transverse_mean_part", z.dropped}, {"max_abs", max_abs(s.eta)}};
  return j;
}

inline json to_json(const TrajectoryReport& r) {
  json j = schema_header("trajectory");
  j["dt"] = r.dt;
  j["steps"] = r.steps;
  j["cfl"] = r.cfl;
  j["max_dist"] = number(r.max_dist);
  j["times"] = r.times;
  j["mass"] = r.mass_series;
  j["energy"] = r.energy_series;
  j["dist"] = r.dist_series;
  j["x0"] = r.x0_series;
  j["y0"] = r.y0_series;
  j["tail_mass_fraction"] = r.tail_mass_series;
  if (!r.modulation_series.empty()) {
    json m = json::array();
    for (const auto& s : r.modulation_series) {
      m.push_back({{"t", s.t}, {"params", to_json(s.params)}, {"eta_z1", s.eta_z1}, {"newton_iterations", s.newton_iterations}});
    }
    j["modulation"] = m;
  }
  if (r.times.size() >= 2) {
    j["mass_drift"] = relative_drift(r.mass_series);
    j["energy_drift"] = relative_drift(r.energy_series);
    j["fitted_speed"] = fitted_speed(r);
  }
  return j;
}

inline json to_json(const StabilityRun& r) {
  return json{{"delta", r.delta}, {"max_dist", number(r.max_dist)}, {"ratio", number(r.ratio)},
              {"mass_drift", r.mass_drift}, {"max_tail_mass_fraction", r.max_tail_mass}};
}

inline json to_json(const StabilityReport& r) {
  json j = schema_header("stability");
  j["a"] = r.a;
  j["t_end"] = r.t_end;
  j["seed"] = r.seed;
  j["delta"] = to_json(r.full);
  j["delta_half"] = to_json(r.half);
  j["ratio_controlled"] = r.ratio_controlled;
  return j;
}

}  // namespace kpi
