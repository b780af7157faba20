#include "mubcert/photonics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "mubcert/error.hpp"
#include "mubcert/mub.hpp"
#include "mubcert/qrac.hpp"

namespace mubcert {

namespace {

constexpr std::uint64_t kShardRounds = 1ULL << 18;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void config_error(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

Rng shard_rng(std::uint64_t seed, std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32), 0x6d756263u};
  return Rng(seq);
}

// The phase noise seen by the preparation stage, already combined with the
// compensation phases chosen by the stabilization loop.
class NoiseProcess {
 public:
  NoiseProcess(const InterferometerConfig& config, Rng& rng) : config_(config), rng_(rng) {
    if (config.phase_noise.model == PhaseNoiseModel::None) return;
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    for (auto& w : walk_) w = uniform(rng_);
    relock();
    next_relock_ = config.phase_noise.relock_interval;
  }

  // phi^n + phi^c at pulse t; t must not decrease between calls.
  ArmValues at(std::uint64_t t) {
    ArmValues out{};
    switch (config_.phase_noise.model) {
      case PhaseNoiseModel::None:
        return out;
      case PhaseNoiseModel::GaussianDrift:
        for (int k = 0; k < kArms; ++k) out[k] = walk_[k] + config_.phase_noise.sigma * normal_(rng_) + phi_c_[k];
        return out;
      case PhaseNoiseModel::RandomWalk:
        while (next_relock_ <= t) {
          advance(next_relock_);
          relock();
          next_relock_ += config_.phase_noise.relock_interval;
        }
        advance(t);
        for (int k = 0; k < kArms; ++k) out[k] = walk_[k] + phi_c_[k];
        return out;
    }
    return out;
  }

 private:
  void advance(std::uint64_t t) {
    if (t <= time_) return;
    const double scale = config_.phase_noise.sigma * std::sqrt(static_cast<double>(t - time_));
    for (auto& w : walk_) w += scale * normal_(rng_);
    time_ = t;
  }

  void relock() {
    PhaseState state;
    state.phi_n = walk_;
    state.phi_c = phi_c_;
    phi_c_ = stabilize_phases(config_, state, rng_).phi_c;
  }

  const InterferometerConfig& config_;
  Rng& rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  ArmValues walk_{};
  ArmValues phi_c_{};
  std::uint64_t time_ = 0;
  std::uint64_t next_relock_ = 0;
};

struct RoundSetup {
  ArmValues tau{};
  ArmValues phi_s{};
  double survival = 0.0;  // fraction of source photons leaving the preparation stage
};

std::vector<RoundSetup> round_setups(const InterferometerConfig& config) {
  const auto states = optimal_states(paper_mub_pair_d4());
  std::vector<RoundSetup> setups;
  for (const auto& psi : states.states) {
    const auto s = settings_for_state(psi);
    RoundSetup r;
    r.phi_s = s.phi_s;
    double intensity = 0.0;
    for (int k = 0; k < kArms; ++k) {
      r.tau[k] = s.tau[k] * config.tau[k];
      intensity += r.tau[k] * r.tau[k];
    }
    r.survival = intensity / kArms;
    setups.push_back(r);
  }
  return setups;
}

CountsTable simulate_shard(const InterferometerConfig& config, const std::vector<RoundSetup>& setups,
                           std::uint64_t rounds, std::uint64_t seed, std::uint64_t shard) {
  const int d = config.d;
  CountsTable counts(d);
  Rng rng = shard_rng(seed, shard);
  NoiseProcess noise(config, rng);
  std::uniform_int_distribution<int> pick_input(0, 2 * d * d - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution dark(config.dark_count_prob);
  const ArmValues phi_b[2] = {measurement_phase_for_input(1), measurement_phase_for_input(2)};

  for (std::uint64_t t = 0; t < rounds; ++t) {
    const int input = pick_input(rng);
    const int setting = input / 2;
    const int y = input % 2;
    const int i = setting / d;
    const int j = setting % d;
    const auto& setup = setups[setting];

    const auto photons = sample_source(config.mu, rng);
    std::uint64_t detected = 0;
    if (photons > 0) {
      std::binomial_distribution<std::uint64_t> thin(photons, setup.survival * config.det_efficiency);
      detected = thin(rng);
    }
    if (detected > 0) {
      const ArmValues drift = noise.at(t);
      ArmValues phi_a{};
      for (int k = 0; k < kArms; ++k) phi_a[k] = drift[k] + setup.phi_s[k];
      const auto probs = detection_probabilities(prepare_state(setup.tau, phi_a), phi_b[y]);
      for (std::uint64_t n = 0; n < detected; ++n) {
        const double u = unit(rng);
        int b = 0;
        double acc = probs[0];
        while (b + 1 < kArms && u >= acc) acc += probs[++b];
        ++counts.at(i, j, y, b);
      }
    }
    if (config.dark_count_prob > 0.0) {
      for (int b = 0; b < kArms; ++b) {
        if (dark(rng)) ++counts.at(i, j, y, b);
      }
    }
  }
  return counts;
}

}  // namespace

std::string to_string(PhaseNoiseModel m) {
  switch (m) {
    case PhaseNoiseModel::None: return "none";
    case PhaseNoiseModel::GaussianDrift: return "gaussian_drift";
    case PhaseNoiseModel::RandomWalk: return "random_walk";
  }
  return "none";
}

PhaseNoiseModel phase_noise_model_from_string(const std::string& s) {
  if (s == "none") return PhaseNoiseModel::None;
  if (s == "gaussian_drift") return PhaseNoiseModel::GaussianDrift;
  if (s == "random_walk") return PhaseNoiseModel::RandomWalk;
  throw Error(ErrorKind::InvalidConfig, "unknown phase noise model '" + s + "'");
}

void InterferometerConfig::validate() const {
  if (d != kArms) config_error("d must be 4 (one logical level per fiber core)");
  if (!(mu > 0.0) || !std::isfinite(mu)) config_error("mu must be positive");
  if (!is_probability(det_efficiency)) config_error("det_efficiency must lie in [0, 1]");
  if (!is_probability(dark_count_prob)) config_error("dark_count_prob must lie in [0, 1]");
  if (!(rep_rate > 0.0)) config_error("rep_rate must be positive");
  if (!(integration_time > 0.0)) config_error("integration_time must be positive");
  if (!(phase_noise.sigma >= 0.0) || !std::isfinite(phase_noise.sigma)) config_error("phase_noise.sigma must be >= 0");
  if (phase_noise.relock_interval == 0) config_error("phase_noise.relock_interval must be positive");
  for (double t : tau) {
    if (!is_probability(t)) config_error("tau entries must lie in [0, 1]");
  }
  if (std::all_of(tau.begin(), tau.end(), [](double t) { return t == 0.0; })) config_error("all arms blocked");
  if (!(stabilization_threshold > 0.0 && stabilization_threshold <= 1.0)) {
    config_error("stabilization_threshold must lie in (0, 1]");
  }
  if (stabilization_max_iterations < 1) config_error("stabilization_max_iterations must be positive");
}

nlohmann::json to_json(const InterferometerConfig& c) {
  return {{"d", c.d},
          {"mu", c.mu},
          {"det_efficiency", c.det_efficiency},
          {"rep_rate", c.rep_rate},
          {"integration_time", c.integration_time},
          {"phase_noise",
           {{"model", to_string(c.phase_noise.model)},
            {"sigma", c.phase_noise.sigma},
            {"relock_interval", c.phase_noise.relock_interval}}},
          {"tau", c.tau},
          {"dark_count_prob", c.dark_count_prob},
          {"stabilization_threshold", c.stabilization_threshold},
          {"stabilization_max_iterations", c.stabilization_max_iterations}};
}

InterferometerConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  InterferometerConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "d") c.d = value.get<int>();
      else if (key == "mu") c.mu = value.get<double>();
      else if (key == "det_efficiency") c.det_efficiency = value.get<double>();
      else if (key == "rep_rate") c.rep_rate = value.get<double>();
      else if (key == "integration_time") c.integration_time = value.get<double>();
      else if (key == "dark_count_prob") c.dark_count_prob = value.get<double>();
      else if (key == "stabilization_threshold") c.stabilization_threshold = value.get<double>();
      else if (key == "stabilization_max_iterations") c.stabilization_max_iterations = value.get<int>();
      else if (key == "tau") {
        if (!value.is_array() || value.size() != kArms) config_error("tau must be an array of 4 numbers");
        for (int k = 0; k < kArms; ++k) c.tau[k] = value[k].get<double>();
      } else if (key == "phase_noise") {
        if (!value.is_object()) config_error("phase_noise must be an object");
        for (const auto& [pk, pv] : value.items()) {
          if (pk == "model") c.phase_noise.model = phase_noise_model_from_string(pv.get<std::string>());
          else if (pk == "sigma") c.phase_noise.sigma = pv.get<double>();
          else if (pk == "relock_interval") c.phase_noise.relock_interval = pv.get<std::uint64_t>();
          else config_error("unknown phase_noise key '" + pk + "'");
        }
      } else {
        config_error("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("config type error: ") + e.what());
  }
  c.validate();
  return c;
}

ArmValues PhaseState::preparation_phases() const {
  ArmValues out{};
  for (int k = 0; k < kArms; ++k) out[k] = phi_n[k] + phi_c[k] + phi_s[k];
  return out;
}

CMatrix mbs_matrix() { return paper_basis_a(); }

CVector prepare_state(const ArmValues& tau, const ArmValues& phi_a) {
  double norm2 = 0.0;
  for (double t : tau) norm2 += t * t;
  if (!(norm2 > 0.0)) throw Error(ErrorKind::AllArmsBlocked, "prepare_state: every arm is blocked");
  const double scale = 1.0 / std::sqrt(norm2);
  CVector state(kArms);
  for (int k = 0; k < kArms; ++k) state(k) = std::polar(scale * tau[k], phi_a[k]);
  return state;
}

CMatrix measurement_unitary(const ArmValues& phi_b) {
  CMatrix u = mbs_matrix();
  for (int k = 0; k < kArms; ++k) u.row(k) *= std::polar(1.0, phi_b[k]);
  return u;
}

ArmValues detection_probabilities(const CVector& state, const ArmValues& phi_b) {
  if (state.size() != kArms) throw Error(ErrorKind::DimensionMismatch, "detection_probabilities: need d = 4");
  const CVector amplitudes = measurement_unitary(phi_b).adjoint() * state;
  ArmValues probs{};
  for (int k = 0; k < kArms; ++k) probs[k] = std::norm(amplitudes(k));
  return probs;
}

StateSettings settings_for_state(const CVector& target) {
  if (target.size() != kArms) throw Error(ErrorKind::DimensionMismatch, "settings_for_state: need d = 4");
  StateSettings s;
  double largest = 0.0;
  for (int k = 0; k < kArms; ++k) largest = std::max(largest, std::abs(target(k)));
  if (!(largest > 0.0)) throw Error(ErrorKind::AllArmsBlocked, "settings_for_state: zero target");
  for (int k = 0; k < kArms; ++k) {
    const double magnitude = std::abs(target(k));
    s.tau[k] = magnitude / largest;
    s.phi_s[k] = magnitude > 0.0 ? std::arg(target(k)) : 0.0;
  }
  return s;
}

ArmValues measurement_phase_for_input(int y) {
  if (y == 1) return {0.0, 0.0, 0.0, 0.0};
  if (y == 2) return {std::numbers::pi, 0.0, 0.0, 0.0};
  throw Error(ErrorKind::InvalidArgument, "measurement input y must be 1 or 2");
}

std::uint64_t sample_source(double mu, Rng& rng) {
  if (!(mu > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample_source: mu must be positive");
  std::poisson_distribution<std::uint64_t> poisson(mu);
  return poisson(rng);
}

double spd1_probability(const PhaseState& state) {
  Complex amplitude{0.0, 0.0};
  for (int k = 0; k < kArms; ++k) amplitude += std::polar(1.0, state.phi_n[k] + state.phi_c[k]);
  // <alpha_1| chi> with |chi> = (1/2) sum exp(i phi_k)|k>, |alpha_1> = (1/2) sum |k>.
  return std::norm(amplitude) / 16.0;
}

PhaseState stabilize_phases(const InterferometerConfig& config, PhaseState state, Rng& rng) {
  double best = spd1_probability(state);
  double step = 0.5;
  std::bernoulli_distribution coin(0.5);
  for (int iter = 0; iter < config.stabilization_max_iterations; ++iter) {
    if (best >= config.stabilization_threshold) return state;
    bool improved = false;
    for (int k = 0; k < kArms; ++k) {
      const double first = coin(rng) ? step : -step;
      for (double delta : {first, -first}) {
        state.phi_c[k] += delta;
        const double trial = spd1_probability(state);
        if (trial > best) {
          best = trial;
          improved = true;
          break;
        }
        state.phi_c[k] -= delta;
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-12) break;
    }
  }
  if (best >= config.stabilization_threshold) return state;
  throw Error(ErrorKind::StabilizationFailed,
              "SPD1 probability " + std::to_string(best) + " below threshold at the iteration cap");
}

double expected_detections_per_round(const InterferometerConfig& config) {
  config.validate();
  const auto setups = round_setups(config);
  double survival = 0.0;
  for (const auto& s : setups) survival += s.survival;
  survival /= static_cast<double>(setups.size());
  return config.mu * config.det_efficiency * survival + kArms * config.dark_count_prob;
}

std::uint64_t rounds_for_detections(const InterferometerConfig& config, std::uint64_t detections) {
  const double rate = expected_detections_per_round(config);
  if (!(rate > 0.0)) throw Error(ErrorKind::InvalidConfig, "configuration never produces detections");
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(detections) / rate));
}

CountsTable simulate_rounds(const InterferometerConfig& config, std::uint64_t total_rounds, std::uint64_t seed,
                            unsigned threads) {
  config.validate();
  const auto setups = round_setups(config);
  const std::uint64_t shards = (total_rounds + kShardRounds - 1) / kShardRounds;
  std::vector<CountsTable> results(shards);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t s = next++; s < shards; s = next++) {
      const std::uint64_t begin = s * kShardRounds;
      const std::uint64_t n = std::min(kShardRounds, total_rounds - begin);
      results[s] = simulate_shard(config, setups, n, seed, s);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(shards, 1)));
  std::vector<std::jthread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  pool.clear();

  CountsTable merged(config.d);
  for (const auto& r : results) merged += r;
  merged.seed = seed;
  merged.config_json = to_json(config).dump();
  return merged;
}

CountsTable simulate_counts(const InterferometerConfig& config, std::uint64_t rounds_per_setting,
                            std::uint64_t seed, unsigned threads) {
  const auto settings = static_cast<std::uint64_t>(2 * config.d * config.d);
  return simulate_rounds(config, rounds_per_setting * settings, seed, threads);
}

CountsTable ideal_counts(std::uint64_t total_detections) {
  const int d = kArms;
  const auto states = optimal_states(paper_mub_pair_d4());
  std::vector<ArmValues> probs;
  for (int s = 0; s < d * d; ++s) {
    for (int y = 1; y <= 2; ++y) probs.push_back(detection_probabilities(states.states[s], measurement_phase_for_input(y)));
  }
  auto integral = [&](std::uint64_t n) {
    for (const auto& row : probs)
      for (double p : row) {
        const double c = p * static_cast<double>(n);
        if (std::abs(c - std::round(c)) > 1e-6) return false;
      }
    return true;
  };
  const std::uint64_t settings = 2ULL * d * d;
  const std::uint64_t requested = std::max<std::uint64_t>(1, (total_detections + settings - 1) / settings);
  std::uint64_t grain = 1;
  while (grain <= 10000 && !integral(grain)) ++grain;
  const std::uint64_t per_setting = grain <= 10000 ? (requested + grain - 1) / grain * grain : requested;

  CountsTable counts(d);
  std::size_t row = 0;
  for (int s = 0; s < d * d; ++s) {
    for (int y = 0; y < 2; ++y, ++row) {
      for (int b = 0; b < d; ++b) {
        counts.at(s / d, s % d, y, b) =
            static_cast<std::uint64_t>(std::llround(probs[row][b] * static_cast<double>(per_setting)));
      }
    }
  }
  return counts;
}

namespace {

// Relative phase noise between two arms, sampled once per fringe measurement
// and reused at every scan point (common random numbers keep the calibration
// monotone in sigma).
std::vector<double> relative_noise_samples(const PhaseNoise& noise, std::uint64_t seed, int k, int l) {
  constexpr int kSamples = 4096;
  std::vector<double> out(kSamples, 0.0);
  if (noise.model == PhaseNoiseModel::None || noise.sigma == 0.0) return out;
  Rng rng = shard_rng(seed, 0x7669730000ULL + static_cast<std::uint64_t>(k * kArms + l));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& x : out) {
    const double dz = normal(rng) - normal(rng);
    double scale = noise.sigma;
    if (noise.model == PhaseNoiseModel::RandomWalk) {
      // Accumulated walk at a uniformly random time since the last relock.
      scale *= std::sqrt(unit(rng) * static_cast<double>(noise.relock_interval));
    }
    x = scale * dz;
  }
  return out;
}

}  // namespace

double fringe_visibility(const InterferometerConfig& config, std::pair<int, int> arms, std::uint64_t seed) {
  const auto [k, l] = arms;
  if (k < 0 || l < 0 || k >= kArms || l >= kArms || k == l) {
    throw Error(ErrorKind::InvalidArgument, "fringe_visibility: need two distinct arms in 0..3");
  }
  const double a = config.tau[k];
  const double b = config.tau[l];
  if (!(a > 0.0 && b > 0.0)) return 0.0;
  const auto noise = relative_noise_samples(config.phase_noise, seed, std::min(k, l), std::max(k, l));

  constexpr int kScanPoints = 64;
  double mean = 0.0;
  double cos_part = 0.0;
  double sin_part = 0.0;
  for (int s = 0; s < kScanPoints; ++s) {
    const double theta = kTwoPi * s / kScanPoints;
    double intensity = 0.0;
    for (double n : noise) {
      // Only arms k and l open; SPD1 projects onto the uniform superposition.
      intensity += std::norm(std::polar(a, theta + n) + Complex(b, 0.0)) / 16.0;
    }
    intensity /= static_cast<double>(noise.size());
    mean += intensity;
    cos_part += intensity * std::cos(theta);
    sin_part += intensity * std::sin(theta);
  }
  mean /= kScanPoints;
  const double amplitude = 2.0 * std::hypot(cos_part, sin_part) / kScanPoints;
  // Fitted fringe: mean +- amplitude.
  return amplitude / mean;
}

double mean_fringe_visibility(const InterferometerConfig& config, std::uint64_t seed) {
  double sum = 0.0;
  int pairs = 0;
  for (int k = 0; k < kArms; ++k) {
    for (int l = k + 1; l < kArms; ++l, ++pairs) sum += fringe_visibility(config, {k, l}, seed);
  }
  return sum / pairs;
}

double calibrate_noise_sigma(const InterferometerConfig& config, double target_visibility, std::uint64_t seed) {
  if (!(target_visibility > 0.0 && target_visibility <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "target visibility must lie in (0, 1]");
  }
  InterferometerConfig trial = config;
  if (trial.phase_noise.model == PhaseNoiseModel::None) trial.phase_noise.model = PhaseNoiseModel::GaussianDrift;
  auto visibility_at = [&](double sigma) {
    trial.phase_noise.sigma = sigma;
    return mean_fringe_visibility(trial, seed);
  };
  if (visibility_at(0.0) <= target_visibility) return 0.0;
  double lo = 0.0;
  double hi = 0.01;
  while (visibility_at(hi) > target_visibility) {
    lo = hi;
    hi *= 2.0;
    if (hi > 100.0) throw Error(ErrorKind::InvalidArgument, "target visibility unreachable");
  }
  for (int iter = 0; iter < 60 && hi - lo > 1e-12 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (visibility_at(mid) > target_visibility) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace mubcert
