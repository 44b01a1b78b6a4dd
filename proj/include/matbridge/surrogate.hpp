#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "matbridge/dataset.hpp"
#include "matbridge/errors.hpp"
#include "matbridge/rng.hpp"
#include "matbridge/schema.hpp"
#include "matbridge/text.hpp"

namespace matbridge {

// Analytic stand-in for the foundry/CFD/FEA data chain: thick-walled cylinder
// stress with a calibrated concentration factor, linear elasticity, and a
// power-law fatigue life. Every functional form is synthetic, calibrated only
// at the reported anchor values; none of it claims to re-derive the FEA.

struct ValveGeometry {
  double inner_diameter = 0.087;  // m
  double thickness = 0.021;       // m
  // Ratio of peak local stress to nominal Lame stress, frozen so that
  // 350 bar at 21 mm wall reproduces the 4.3302e8 Pa reference maximum.
  double stress_concentration = 4.6361;

  double inner_radius() const noexcept { return inner_diameter / 2.0; }
};

struct FluidCase {
  std::string name;
  double density = 0.0;         // kg/m^3
  double viscosity_cp = 0.0;    // cP
  double inlet_pressure = 0.0;  // Pa
  double temperature_c = 0.0;
};

// The three inlet boundary-condition cases (water, lubricant, diesel).
inline std::vector<FluidCase> standard_fluid_cases() {
  return {
      {"water", 951.0, 1.0, 3.5e7, 110.0},
      {"lubricant", 875.0, 22.2, 2.8e7, 100.0},
      {"diesel", 834.0, 4.0, 1.8e7, 15.6},
  };
}

struct MaterialModel {
  double elastic_modulus = 2.0e11;  // Pa; the reported stress/strain ratio

  // composition -> tensile strength (MPa): ts = base + sum(coef * mass%)
  double ts_base = 250.0;
  double ts_c = 800.0;
  double ts_mn = 80.0;
  double ts_cr = 120.0;
  double ts_mo = 100.0;
  double ts_ni = 50.0;
  double ts_si = 40.0;
  double ys_over_ts = 0.75;
  double ei_base = 35.0;  // ei = ei_base - ei_c * C (%)
  double ei_c = 50.0;
  double ra_over_ei = 1.9;

  // life = n0 * (sigma_ref / sigma)^exponent
  double life_n0 = 2116.1;       // cycles
  double life_sigma_ref = 4.3302e8;  // Pa
  double life_exponent = 8.0;
  double char_length = 0.02734;  // m; the reported deformation/strain ratio
  double cycles_per_year = 365.0;
};

struct SurrogateParams {
  std::size_t sample_count = 146;
  std::uint64_t seed = 1;
  double noise_sigma = 0.01;  // relative, multiplicative, outputs only
  ValveGeometry geometry;
  MaterialModel material;
  std::vector<double> thickness_grid_mm = {15.0, 17.0, 19.0, 21.0};
  // One load per dataset keeps the 16-input -> 5-output map a function; the
  // schema has no pressure column to carry a per-row load.
  double inlet_pressure = 3.5e7;  // Pa; the governing water case
  bool sample_pressure = false;   // optional exploration mode
  double pressure_min = 1.8e7;    // Pa
  double pressure_max = 3.5e7;    // Pa
};

struct MechanicalProperties {
  double ts_mpa;
  double ys_mpa;
  double ei_pct;
  double ra_pct;
};

// Linear strength model over the alloying elements, anchored to plausible
// values for the sampled composition window.
inline MechanicalProperties composition_to_properties(std::span<const double> comp,
                                                      const MaterialModel& mat = {}) {
  const Schema schema = default_schema();
  if (comp.size() != 11) {
    throw ShapeError("composition_to_properties: expected 11 elements, got " +
                     std::to_string(comp.size()));
  }
  for (std::size_t i = 0; i < comp.size(); ++i) {
    const ColumnSpec& col = schema.inputs[i];
    if (!(comp[i] >= col.min && comp[i] <= col.max)) {
      throw ValidationError("composition_to_properties: " + col.name + "=" +
                            fmt_double(comp[i]) + " outside [" + fmt_double(col.min) + ", " +
                            fmt_double(col.max) + "]");
    }
  }
  MechanicalProperties props;
  props.ts_mpa = mat.ts_base + mat.ts_c * comp[0] + mat.ts_mn * comp[2] + mat.ts_cr * comp[5] +
                 mat.ts_mo * comp[7] + mat.ts_ni * comp[6] + mat.ts_si * comp[1];
  props.ys_mpa = mat.ys_over_ts * props.ts_mpa;
  props.ei_pct = mat.ei_base - mat.ei_c * comp[0];
  props.ra_pct = mat.ra_over_ei * props.ei_pct;
  return props;
}

// Inner-wall hoop stress of a pressurized thick-walled cylinder, scaled by the
// calibrated concentration factor: sigma = K_t * P * (ro^2 + ri^2)/(ro^2 - ri^2).
inline double lame_stress(const ValveGeometry& geom, double pressure) {
  if (!(geom.thickness > 0.0)) {
    throw ConfigError("lame_stress: thickness must be positive");
  }
  if (!(geom.inner_diameter > 0.0)) {
    throw ConfigError("lame_stress: inner diameter must be positive");
  }
  if (!(pressure > 0.0)) throw DomainError("lame_stress: pressure must be positive");
  const double ri = geom.inner_radius();
  const double ro = ri + geom.thickness;
  return geom.stress_concentration * pressure * (ro * ro + ri * ri) / (ro * ro - ri * ri);
}

struct DerivedOutputs {
  double strain;         // m/m
  double deformation;    // m
  double life;           // cycles
  double service_years;  // years
};

// Geometry and strength enter only through sigma in this version; both stay
// in the signature as the calibration interface.
inline DerivedOutputs derived_outputs(double sigma, const ValveGeometry& /*geom*/,
                                      const MaterialModel& mat, double /*ts_mpa*/) {
  if (!(sigma > 0.0)) throw DomainError("derived_outputs: sigma must be positive");
  DerivedOutputs out;
  out.strain = sigma / mat.elastic_modulus;
  out.deformation = out.strain * mat.char_length;
  out.life = mat.life_n0 * std::pow(mat.life_sigma_ref / sigma, mat.life_exponent);
  out.service_years = out.life / mat.cycles_per_year;
  return out;
}

inline std::string surrogate_provenance(const SurrogateParams& p) {
  std::ostringstream out;
  out << "generator=matbridge-surrogate/1"
      << " sample_count=" << p.sample_count << " seed=" << p.seed
      << " noise_sigma=" << fmt_double(p.noise_sigma)
      << " inner_diameter=" << fmt_double(p.geometry.inner_diameter)
      << " stress_concentration=" << fmt_double(p.geometry.stress_concentration)
      << " thickness_grid_mm=";
  for (std::size_t i = 0; i < p.thickness_grid_mm.size(); ++i) {
    out << (i ? "|" : "") << fmt_double(p.thickness_grid_mm[i]);
  }
  out << " inlet_pressure=" << fmt_double(p.inlet_pressure)
      << " sample_pressure=" << (p.sample_pressure ? "true" : "false");
  if (p.sample_pressure) {
    out << " pressure_min=" << fmt_double(p.pressure_min)
        << " pressure_max=" << fmt_double(p.pressure_max);
  }
  const MaterialModel& m = p.material;
  out << " elastic_modulus=" << fmt_double(m.elastic_modulus)
      << " life_n0=" << fmt_double(m.life_n0)
      << " life_sigma_ref=" << fmt_double(m.life_sigma_ref)
      << " life_exponent=" << fmt_double(m.life_exponent)
      << " char_length=" << fmt_double(m.char_length)
      << " cycles_per_year=" << fmt_double(m.cycles_per_year);
  return out.str();
}

// Uniform compositions over the specification window, thickness from the grid,
// exact outputs through the models above, then multiplicative Gaussian noise.
// Each row draws from its own (seed, row) stream, so output is order-independent
// and bit-stable for a given seed.
inline Dataset generate_dataset(const SurrogateParams& params) {
  if (params.sample_count == 0) throw ConfigError("generate_dataset: sample_count is zero");
  if (params.noise_sigma < 0.0) throw ConfigError("generate_dataset: negative noise_sigma");
  if (params.thickness_grid_mm.empty()) {
    throw ConfigError("generate_dataset: empty thickness grid");
  }
  if (params.sample_pressure && !(params.pressure_min > 0.0) ) {
    throw ConfigError("generate_dataset: pressure range must be positive");
  }

  const Schema schema = default_schema();
  Dataset ds;
  ds.schema = schema;
  ds.inputs = Matrix(params.sample_count, schema.input_width());
  ds.outputs = Matrix(params.sample_count, schema.output_width());

  for (std::size_t r = 0; r < params.sample_count; ++r) {
    Rng rng(mix_seed(params.seed, r));

    std::array<double, 11> comp;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      comp[i] = rng.uniform(schema.inputs[i].min, schema.inputs[i].max);
    }
    const double thickness_mm =
        params.thickness_grid_mm[rng.index(params.thickness_grid_mm.size())];
    const double pressure = params.sample_pressure
                                ? rng.uniform(params.pressure_min, params.pressure_max)
                                : params.inlet_pressure;

    const MechanicalProperties props = composition_to_properties(comp, params.material);

    ValveGeometry geom = params.geometry;
    geom.thickness = thickness_mm / 1000.0;
    const double sigma = lame_stress(geom, pressure);
    const DerivedOutputs derived =
        derived_outputs(sigma, geom, params.material, props.ts_mpa);

    for (std::size_t i = 0; i < comp.size(); ++i) ds.inputs(r, i) = comp[i];
    ds.inputs(r, 11) = props.ts_mpa;
    ds.inputs(r, 12) = props.ys_mpa;
    ds.inputs(r, 13) = props.ei_pct;
    ds.inputs(r, 14) = props.ra_pct;
    ds.inputs(r, 15) = thickness_mm;

    const std::array<double, 5> exact = {sigma, derived.strain, derived.deformation,
                                         derived.life, derived.service_years};
    for (std::size_t c = 0; c < exact.size(); ++c) {
      ds.outputs(r, c) = exact[c] * (1.0 + params.noise_sigma * rng.gaussian());
    }
  }
  return ds;
}

}  // namespace matbridge
