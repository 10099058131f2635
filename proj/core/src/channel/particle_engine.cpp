#include "mctcp/channel/particle_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "mctcp/error.hpp"

namespace mctcp::channel {

double Vec3::norm() const { return std::sqrt(x * x + y * y + z * z); }

Vec3 random_unit_vector(Rng& rng) {
  // Archimedes: z uniform on [-1, 1], azimuth uniform.
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * 3.14159265358979323846 * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

ReceptorPool::ReceptorPool(int receptor_count, double trafficking_time_s)
    : trafficking_time_s_(trafficking_time_s),
      last_bind_(static_cast<std::size_t>(std::max(receptor_count, 0)),
                 -std::numeric_limits<double>::infinity()) {}

bool ReceptorPool::try_bind(double t, Rng& rng) {
  if (last_bind_.empty()) return false;
  double& last = last_bind_[rng.below(last_bind_.size())];
  if (std::abs(t - last) < trafficking_time_s_) return false;
  last = t;
  ++bound_;
  return true;
}

World::World(const MediumParams& medium, const SpeciesSpec& s, const SpeciesSpec& r,
             std::vector<Absorber> absorbers, Vec3 cull_centre, double cull_radius_m)
    : medium_(medium),
      diffusivity_s_(diffusion_coefficient(medium, s)),
      diffusivity_r_(diffusion_coefficient(medium, r)),
      absorbers_(std::move(absorbers)),
      cull_centre_(cull_centre),
      cull_radius_(cull_radius_m) {
  if (!(cull_radius_m > 0.0)) throw InvalidParameter("cull radius must be > 0");
  for (const auto& a : absorbers_) {
    a.geometry.validate();
    if (!(a.p_capture >= 0.0 && a.p_capture <= 1.0)) {
      throw InvalidParameter("p_capture must lie in [0, 1]");
    }
    pools_.emplace_back(a.geometry.receptor_count, a.geometry.trafficking_time_s);
  }
}

namespace {

// Returns the absorber index that assimilated the particle, or -1. Particles
// that touched a surface without binding are reflected through it.
int resolve_contacts(ParticleState& p, World& world, double t, Rng& rng) {
  const auto absorbers = world.absorbers();
  for (std::size_t i = 0; i < absorbers.size(); ++i) {
    const Absorber& a = absorbers[i];
    if (a.absorbs != p.species) continue;
    const Vec3 rel = p.position - a.centre;
    const double r = rel.norm();
    const double radius = a.geometry.node_radius_m;
    if (r >= radius) continue;
    const double u = rng.uniform();
    if (u < a.p_capture && world.receptors(i).try_bind(t, rng)) {
      p.absorbed = true;
      return static_cast<int>(i);
    }
    if (r > 0.0) p.position = a.centre + ((2.0 * radius - r) / r) * rel;
  }
  return -1;
}

bool outside_cull(const ParticleState& p, const World& world) {
  return (p.position - world.cull_centre()).norm() > world.cull_radius();
}

}  // namespace

std::vector<AbsorptionEvent> step_particles(std::span<ParticleState> particles, World& world,
                                            double t, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw InvalidParameter("step_particles: dt must be > 0");
  std::vector<AbsorptionEvent> events;
  const double t_end = t + dt;
  for (std::size_t k = 0; k < particles.size(); ++k) {
    ParticleState& p = particles[k];
    if (!p.active()) continue;
    const double sigma = std::sqrt(2.0 * world.diffusivity(p.species) * dt);
    p.position += Vec3{sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal()};
    p.clock = t_end;
    if (outside_cull(p, world)) {
      p.culled = true;
      continue;
    }
    const int hit = resolve_contacts(p, world, t_end, rng);
    if (hit >= 0) events.push_back({k, static_cast<std::size_t>(hit), t_end});
  }
  return events;
}

Propagator::Propagator(World& world, double near_shell_m) : world_(world) {
  const double dt = world.medium().timestep_s;
  shell_s_ = near_shell_m > 0.0 ? near_shell_m
                                 : 10.0 * std::sqrt(2.0 * world.diffusivity(Species::S) * dt);
  shell_r_ = near_shell_m > 0.0 ? near_shell_m
                                 : 10.0 * std::sqrt(2.0 * world.diffusivity(Species::R) * dt);
}

Outcome Propagator::propagate(ParticleState& p, double horizon_s, Rng& rng) {
  const double diff = world_.diffusivity(p.species);
  const double dt = world_.medium().timestep_s;
  const double sigma = std::sqrt(2.0 * diff * dt);
  const double shell = near_shell(p.species);
  const auto absorbers = world_.absorbers();

  while (p.active()) {
    const double gap = world_.cull_radius() - (p.position - world_.cull_centre()).norm();
    double nearest = std::numeric_limits<double>::infinity();
    for (const Absorber& a : absorbers) {
      if (a.absorbs != p.species) continue;
      nearest = std::min(nearest, (p.position - a.centre).norm() - a.geometry.node_radius_m);
    }
    if (gap <= 0.0 || (gap < shell && gap <= nearest)) {
      p.culled = true;
      return {Fate::Culled, p.clock, 0};
    }

    if (nearest > shell) {
      const double rho = std::min(nearest, gap);
      const double tau = exit_sampler_.sample(rho, diff, rng);
      if (p.clock + tau > horizon_s) break;
      p.position += rho * random_unit_vector(rng);
      p.clock += tau;
      continue;
    }

    if (p.clock + dt > horizon_s) break;
    p.position += Vec3{sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal()};
    p.clock += dt;
    const int hit = resolve_contacts(p, world_, p.clock, rng);
    if (hit >= 0) return {Fate::Absorbed, p.clock, static_cast<std::size_t>(hit)};
  }
  return {Fate::InFlight, horizon_s, 0};
}

namespace {

template <class Fn>
void run_shards(int shards, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, shards);
  if (threads == 1) {
    for (int s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int s = next++; s < shards; s = next++) {
        try {
          fn(s);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void validate_setup(const BurstSetup& setup) {
  setup.medium.validate();
  setup.species.validate();
  setup.receiver.validate();
  if (!(setup.distance_m >= 2.0 * setup.receiver.node_radius_m)) {
    throw InvalidGeometry("emitter lies inside the receiver");
  }
  if (!(setup.cull_factor > 1.0)) throw InvalidParameter("cull factor must be > 1");
  if (!(setup.p_capture >= 0.0 && setup.p_capture <= 1.0)) {
    throw InvalidParameter("p_capture must lie in [0, 1]");
  }
}

}  // namespace

BurstResult simulate_burst(const BurstSetup& setup, std::uint64_t count, double horizon_s,
                           std::uint64_t seed, int shards, int threads) {
  validate_setup(setup);
  if (!(horizon_s > 0.0)) throw InvalidParameter("horizon must be > 0");
  if (shards < 1) throw InvalidParameter("shards must be >= 1");

  const double d = setup.distance_m;
  const Vec3 emitter{d, 0.0, 0.0};
  std::vector<BurstResult> parts(static_cast<std::size_t>(shards));

  run_shards(shards, threads, [&](int s) {
    const auto shard = static_cast<std::uint64_t>(s);
    const std::uint64_t n = count / static_cast<std::uint64_t>(shards) +
                            (shard < count % static_cast<std::uint64_t>(shards) ? 1 : 0);
    Absorber receiver{{0.0, 0.0, 0.0}, setup.receiver, setup.species.label, setup.p_capture};
    World world(setup.medium, SpeciesSpec{Species::S, setup.species.molecule_radius_m},
                SpeciesSpec{Species::R, setup.species.molecule_radius_m}, {receiver},
                Vec3{d / 2.0, 0.0, 0.0}, setup.cull_factor * d);
    Propagator prop(world, setup.near_shell_m);
    Rng rng(derive_seed(seed, shard));
    BurstResult& out = parts[shard];
    for (std::uint64_t k = 0; k < n; ++k) {
      ParticleState p{emitter, setup.species.label, 0.0, 0.0};
      const Outcome o = prop.propagate(p, horizon_s, rng);
      switch (o.fate) {
        case Fate::Absorbed: out.arrival_times.push_back(o.time); break;
        case Fate::Culled: ++out.culled; break;
        case Fate::InFlight: ++out.in_flight; break;
      }
    }
  });

  BurstResult merged;
  for (auto& part : parts) {
    merged.arrival_times.insert(merged.arrival_times.end(), part.arrival_times.begin(),
                                part.arrival_times.end());
    merged.culled += part.culled;
    merged.in_flight += part.in_flight;
  }
  std::sort(merged.arrival_times.begin(), merged.arrival_times.end());
  return merged;
}

std::vector<ChannelStats> calibrate(const CalibrationRequest& request) {
  if (request.samples == 0) throw InvalidParameter("calibration needs samples > 0");
  if (request.distances_m.empty()) throw InvalidParameter("calibration needs distances");
  if (request.bins < 1) throw InvalidParameter("calibration needs bins >= 1");
  if (!(request.symbol_time_s > 0.0)) throw InvalidParameter("symbol time must be > 0");
  const double horizon =
      request.horizon_s > 0.0 ? request.horizon_s : 20.0 * request.symbol_time_s;
  const double bin_width = horizon / request.bins;

  std::vector<ChannelStats> out;
  for (std::size_t i = 0; i < request.distances_m.size(); ++i) {
    BurstSetup setup = request.setup;
    setup.distance_m = request.distances_m[i];
    const BurstResult burst = simulate_burst(setup, request.samples, horizon,
                                             derive_seed(request.seed, i), request.shards,
                                             request.threads);
    const auto hits = static_cast<std::uint64_t>(burst.arrival_times.size());
    if (hits < request.min_absorptions) {
      throw CalibrationFailed("only " + std::to_string(hits) + " absorptions at d = " +
                                  std::to_string(setup.distance_m * 1e6) + " um (need " +
                                  std::to_string(request.min_absorptions) +
                                  "); raise --samples",
                              static_cast<long long>(hits));
    }
    ChannelStats s;
    s.species = setup.species.label;
    s.distance_m = setup.distance_m;
    s.p_assim = static_cast<double>(hits) / static_cast<double>(request.samples);
    s.bin_width_s = bin_width;
    s.pdf_counts.assign(static_cast<std::size_t>(request.bins), 0);
    for (double t : burst.arrival_times) {
      const auto b = std::min(static_cast<std::size_t>(t / bin_width), s.pdf_counts.size() - 1);
      ++s.pdf_counts[b];
    }
    s.window_mass = sliding_window_mass(s.pdf_counts, bin_width, request.symbol_time_s);
    s.source = "particle";
    s.samples = request.samples;
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

CaptureFit calibrate_capture_probability(const BurstSetup& setup, double target_p_assim,
                                         std::uint64_t samples, double horizon_s,
                                         std::uint64_t seed, int iterations, int threads) {
  if (!(target_p_assim > 0.0 && target_p_assim < 1.0)) {
    throw InvalidParameter("target assimilation probability must lie in (0, 1)");
  }
  if (samples == 0) throw InvalidParameter("capture fit needs samples > 0");
  auto evaluate = [&](double p) {
    BurstSetup trial = setup;
    trial.p_capture = p;
    const auto r = simulate_burst(trial, samples, horizon_s, seed, 16, threads);
    return static_cast<double>(r.arrival_times.size()) / static_cast<double>(samples);
  };

  const double ceiling = evaluate(1.0);
  if (ceiling < target_p_assim) {
    throw CalibrationFailed("a fully absorbing receiver reaches only p_assim = " +
                                std::to_string(ceiling),
                            static_cast<long long>(ceiling * static_cast<double>(samples)));
  }
  double lo = std::log(1e-6);
  double hi = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (evaluate(std::exp(mid)) < target_p_assim) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double p = std::exp(0.5 * (lo + hi));
  return {p, evaluate(p)};
}

namespace {

World make_pair_world(const ParticleChannelParams& p) {
  std::vector<Absorber> absorbers{
      {{0.0, 0.0, 0.0}, p.rx, Species::S, p.p_capture_rx},
      {{p.distance_m, 0.0, 0.0}, p.tx, Species::R, p.p_capture_tx},
  };
  return World(p.medium, p.s_species, p.r_species, std::move(absorbers),
               Vec3{p.distance_m / 2.0, 0.0, 0.0}, p.cull_factor * p.distance_m);
}

}  // namespace

ParticleChannel::ParticleChannel(const ParticleChannelParams& params, std::uint64_t seed)
    : params_(params),
      world_(make_pair_world(params)),
      propagator_(world_, params.near_shell_m),
      rng_(seed) {
  if (!(params.distance_m >= params.tx.node_radius_m + params.rx.node_radius_m)) {
    throw InvalidGeometry("nodes overlap");
  }
}

Delivery ParticleChannel::transmit(Species species, std::int64_t count, double t_emit,
                                   double horizon_s) {
  if (count < 0) throw InvalidParameter("burst size must be >= 0");
  Delivery out;
  const Vec3 emitter =
      species == Species::S ? Vec3{params_.distance_m, 0.0, 0.0} : Vec3{0.0, 0.0, 0.0};
  for (std::int64_t k = 0; k < count; ++k) {
    ParticleState p{emitter, species, t_emit, t_emit};
    const Outcome o = propagator_.propagate(p, horizon_s, rng_);
    switch (o.fate) {
      case Fate::Absorbed: out.arrival_times.push_back(o.time); break;
      case Fate::Culled: ++out.lost; break;
      case Fate::InFlight: ++out.stranded; break;
    }
  }
  return out;
}

}  // namespace mctcp::channel
