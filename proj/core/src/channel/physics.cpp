#include "mctcp/channel/physics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mctcp/error.hpp"

namespace mctcp::channel {

std::string_view to_string(Species s) { return s == Species::S ? "S" : "R"; }

Species species_from_string(std::string_view s) {
  if (s == "S") return Species::S;
  if (s == "R") return Species::R;
  throw InvalidParameter("unknown species '" + std::string(s) + "'");
}

void MediumParams::validate() const {
  if (!(temperature_k > 0.0)) throw InvalidParameter("temperature must be > 0");
  if (!(viscosity_pa_s > 0.0)) throw InvalidParameter("viscosity must be > 0");
  if (!(timestep_s > 0.0)) throw InvalidParameter("timestep must be > 0");
}

void SpeciesSpec::validate() const {
  if (!(molecule_radius_m > 0.0)) throw InvalidParameter("molecule radius must be > 0");
}

void NodeGeometry::validate() const {
  if (!(receptor_radius_m > 0.0)) throw InvalidParameter("receptor radius must be > 0");
  if (!(node_radius_m > receptor_radius_m)) {
    throw InvalidParameter("node radius must exceed receptor radius");
  }
  if (receptor_count < 0) throw InvalidParameter("receptor count must be >= 0");
  if (!(trafficking_time_s >= 0.0)) throw InvalidParameter("trafficking time must be >= 0");
}

void GammaFit::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw InvalidParameter("gamma fit needs c1 > 0 and c2 > 0");
}

double diffusion_coefficient(const MediumParams& medium, const SpeciesSpec& species) {
  medium.validate();
  species.validate();
  return MediumParams::kBoltzmann * medium.temperature_k /
         (6.0 * std::numbers::pi * medium.viscosity_pa_s * species.molecule_radius_m);
}

namespace {

void check_point(double t, double d, double diffusivity) {
  if (!(t > 0.0)) throw InvalidParameter("time must be > 0");
  if (!(d >= 0.0)) throw InvalidParameter("distance must be >= 0");
  if (!(diffusivity > 0.0)) throw InvalidParameter("diffusion coefficient must be > 0");
}

}  // namespace

double concentration(double q, double t, double d, double diffusivity) {
  check_point(t, d, diffusivity);
  const double spread = 4.0 * std::numbers::pi * diffusivity * t;
  return q / (spread * std::sqrt(spread)) * std::exp(-d * d / (4.0 * diffusivity * t));
}

double flux(double q, double t, double d, double diffusivity) {
  // dc/dd = -c d / (2 D t), so -D dc/dd = c d / (2 t).
  return concentration(q, t, d, diffusivity) * d / (2.0 * t);
}

double gamma(double receptors, const GammaFit& fit) {
  if (!(receptors >= 0.0)) throw InvalidParameter("receptor count must be >= 0");
  return fit.c1 * receptors / (fit.c2 + receptors);
}

namespace {

double geometric_factor(double d, const NodeGeometry& node) {
  if (!(d >= 2.0 * node.node_radius_m)) {
    throw InvalidGeometry("distance " + std::to_string(d) +
                          " m is below one node diameter; nodes overlap");
  }
  const double ratio = node.node_radius_m / d;
  return ratio * ratio;
}

}  // namespace

double assimilation_count(double receptors, double d, double q, const NodeGeometry& node,
                          const GammaFit& fit) {
  if (!(q >= 0.0)) throw InvalidParameter("burst size must be >= 0");
  return gamma(receptors, fit) * q * geometric_factor(d, node);
}

double p_assim(double receptors, double d, const NodeGeometry& node, const GammaFit& fit) {
  const double p = gamma(receptors, fit) * geometric_factor(d, node);
  if (p > 1.0) {
    throw ModelOutOfRange("assimilation probability " + std::to_string(p) +
                          " exceeds 1; the linear regime does not hold at this distance");
  }
  return p;
}

}  // namespace mctcp::channel
