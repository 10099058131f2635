#pragma once

#include <string_view>

namespace mctcp::channel {

/// Molecule label: S carries payload TX -> RX, R carries control RX -> TX.
enum class Species { S, R };

std::string_view to_string(Species s);
Species species_from_string(std::string_view s);

struct MediumParams {
  static constexpr double kBoltzmann = 1.380649e-23;  // J/K

  double temperature_k = 310.0;
  double viscosity_pa_s = 0.0011;
  double timestep_s = 20e-6;

  void validate() const;
};

struct SpeciesSpec {
  Species label = Species::S;
  double molecule_radius_m = 1.75e-9;

  void validate() const;
};

/// A spherical bio-nanomachine with `receptor_count` binding sites.
struct NodeGeometry {
  double node_radius_m = 2.5e-6;
  int receptor_count = 10000;
  double receptor_radius_m = 8e-9;
  double trafficking_time_s = 200e-6;

  void validate() const;
};

/// Michaelis-Menten-like receptor correction, gamma(R) = c1 R / (c2 + R).
struct GammaFit {
  double c1 = 5.344;
  double c2 = 8000.0;

  void validate() const;
};

/// Stokes-Einstein coefficient K_b T / (6 pi eta r), in m^2/s.
double diffusion_coefficient(const MediumParams& medium, const SpeciesSpec& species);

/// Free-space concentration at distance `d` and time `t` after an impulsive
/// release of `q` molecules at the origin (molecules / m^3).
double concentration(double q, double t, double d, double diffusivity);

/// Radial component of -D grad c; positive when pointing away from the source.
double flux(double q, double t, double d, double diffusivity);

double gamma(double receptors, const GammaFit& fit);

/// Expected number of molecules assimilated by `node` out of a burst of `q`
/// released at centre distance `d`: gamma(R) q (r/d)^2.
///
/// The inverse-square law assumes d >> node radius (roughly d >= 10 r); the
/// function only rejects d below one node diameter, where the nodes overlap.
double assimilation_count(double receptors, double d, double q, const NodeGeometry& node,
                          const GammaFit& fit);

/// Per-molecule assimilation probability gamma(R) (r/d)^2.
/// Throws ModelOutOfRange when the value exceeds 1.
double p_assim(double receptors, double d, const NodeGeometry& node, const GammaFit& fit);

}  // namespace mctcp::channel
