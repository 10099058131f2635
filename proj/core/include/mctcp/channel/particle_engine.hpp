#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mctcp/channel/channel_model.hpp"
#include "mctcp/channel/channel_stats.hpp"
#include "mctcp/channel/first_passage.hpp"
#include "mctcp/channel/physics.hpp"
#include "mctcp/rng.hpp"

namespace mctcp::channel {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
  double norm() const;
};

Vec3 random_unit_vector(Rng& rng);

struct ParticleState {
  Vec3 position;
  Species species = Species::S;
  double emitted_at = 0.0;
  /// Time up to which this particle has been propagated.
  double clock = 0.0;
  bool absorbed = false;
  bool culled = false;

  bool active() const { return !absorbed && !culled; }
};

/// A spherical node that assimilates one species.
struct Absorber {
  Vec3 centre;
  NodeGeometry geometry;
  Species absorbs = Species::S;
  /// Chance that a molecule touching the surface binds to a receptor.
  double p_capture = 1.0;
};

/// Receptors of one node. A hit picks a receptor uniformly; a receptor that
/// bound within the trafficking time is busy and the molecule bounces off.
class ReceptorPool {
 public:
  ReceptorPool(int receptor_count, double trafficking_time_s);

  bool try_bind(double t, Rng& rng);
  std::uint64_t bound() const { return bound_; }

 private:
  double trafficking_time_s_;
  std::vector<double> last_bind_;
  std::uint64_t bound_ = 0;
};

/// Absorbers, their receptors and the culling sphere.
class World {
 public:
  World(const MediumParams& medium, const SpeciesSpec& s, const SpeciesSpec& r,
        std::vector<Absorber> absorbers, Vec3 cull_centre, double cull_radius_m);

  double diffusivity(Species species) const {
    return species == Species::S ? diffusivity_s_ : diffusivity_r_;
  }
  const MediumParams& medium() const { return medium_; }
  std::span<const Absorber> absorbers() const { return absorbers_; }
  ReceptorPool& receptors(std::size_t i) { return pools_[i]; }
  const Vec3& cull_centre() const { return cull_centre_; }
  double cull_radius() const { return cull_radius_; }

 private:
  MediumParams medium_;
  double diffusivity_s_;
  double diffusivity_r_;
  std::vector<Absorber> absorbers_;
  std::vector<ReceptorPool> pools_;
  Vec3 cull_centre_;
  double cull_radius_;
};

struct AbsorptionEvent {
  std::size_t particle;
  std::size_t absorber;
  double time;
};

/// Advances every active particle by one Gaussian step of length `dt` from
/// time `t` (per-axis variance 2 D dt). A particle ending inside a compliant
/// absorber binds with probability p_capture if its receptor is free, and is
/// otherwise reflected through the surface. Particles beyond the culling
/// sphere are marked culled. Events are returned in particle order.
std::vector<AbsorptionEvent> step_particles(std::span<ParticleState> particles, World& world,
                                            double t, double dt, Rng& rng);

enum class Fate { Absorbed, Culled, InFlight };

struct Outcome {
  Fate fate = Fate::InFlight;
  double time = 0.0;
  std::size_t absorber = 0;
};

/// Propagates one particle at a time to its fate.
///
/// Within `near_shell` of a compliant absorber the particle takes Gaussian
/// steps of the medium timestep, with the same capture rule as
/// step_particles. Farther out it jumps to a uniform point on the largest
/// sphere that avoids every absorber, after an exit time drawn from the exact
/// law; such jumps leave absorption statistics unchanged.
class Propagator {
 public:
  /// `near_shell_m` <= 0 selects 10 standard deviations of a single step.
  Propagator(World& world, double near_shell_m = 0.0);

  Outcome propagate(ParticleState& p, double horizon_s, Rng& rng);
  double near_shell(Species species) const {
    return species == Species::S ? shell_s_ : shell_r_;
  }

 private:
  World& world_;
  SphereExitSampler exit_sampler_;
  double shell_s_;
  double shell_r_;
};

/// Molecules released from an emitter at distance d of one receiver.
struct BurstSetup {
  MediumParams medium;
  SpeciesSpec species{Species::S, 1.75e-9};
  NodeGeometry receiver;
  double p_capture = 1.0;
  double distance_m = 26.5e-6;
  double cull_factor = 20.0;
  double near_shell_m = 0.0;
};

struct BurstResult {
  std::vector<double> arrival_times;  // relative to release, sorted
  std::uint64_t culled = 0;
  std::uint64_t in_flight = 0;
};

/// Releases `count` molecules at t = 0 and follows them to `horizon_s`.
/// Work is split into `shards` blocks seeded by derive_seed(seed, shard) and
/// merged in shard order, so the result does not depend on `threads`.
BurstResult simulate_burst(const BurstSetup& setup, std::uint64_t count, double horizon_s,
                           std::uint64_t seed, int shards = 16, int threads = 1);

struct CalibrationRequest {
  BurstSetup setup;
  std::vector<double> distances_m;
  std::uint64_t samples = 200000;  // molecules released per distance
  double symbol_time_s = 10.0;
  int bins = ChannelStats::kDefaultBins;
  double horizon_s = 0.0;  // 0: 20 symbol times
  std::uint64_t min_absorptions = 1000;
  std::uint64_t seed = 1;
  int shards = 16;
  int threads = 1;
};

/// Monte Carlo estimate of ChannelStats at each distance. Throws
/// CalibrationFailed when any distance collects fewer than min_absorptions.
std::vector<ChannelStats> calibrate(const CalibrationRequest& request);

struct CaptureFit {
  double p_capture;
  double achieved_p_assim;
};

/// Bisects p_capture in log space until the simulated assimilation
/// probability at setup.distance_m matches `target_p_assim`. All evaluations
/// share one seed. Throws CalibrationFailed if even p_capture = 1 falls short.
CaptureFit calibrate_capture_probability(const BurstSetup& setup, double target_p_assim,
                                         std::uint64_t samples, double horizon_s,
                                         std::uint64_t seed, int iterations = 24,
                                         int threads = 1);

/// Both nodes on the x axis: RX at the origin assimilating S, TX at (d, 0, 0)
/// assimilating R. Emitters release from their own centre.
struct ParticleChannelParams {
  MediumParams medium;
  SpeciesSpec s_species{Species::S, 1.75e-9};
  SpeciesSpec r_species{Species::R, 3.5e-9};
  NodeGeometry tx;
  NodeGeometry rx;
  double p_capture_tx = 1.0;  // R at TX
  double p_capture_rx = 1.0;  // S at RX
  double distance_m = 26.5e-6;
  double cull_factor = 20.0;
  double near_shell_m = 0.0;
};

class ParticleChannel : public ChannelModel {
 public:
  ParticleChannel(const ParticleChannelParams& params, std::uint64_t seed);

  Delivery transmit(Species species, std::int64_t count, double t_emit,
                    double horizon_s) override;

 private:
  ParticleChannelParams params_;
  World world_;
  Propagator propagator_;
  Rng rng_;
};

}  // namespace mctcp::channel
