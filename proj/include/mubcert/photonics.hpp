#pragma once

// Monte Carlo model of the four-core Mach-Zehnder interferometer used to run
// the 2^4 -> 1 QRAC: weak-coherent source, amplitude/phase modulation on the
// preparation side, a phase-selected Hadamard measurement, lossy detectors,
// phase drift and the SPD1 stabilization loop.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "mubcert/counts.hpp"
#include "mubcert/qla.hpp"

namespace mubcert {

inline constexpr int kArms = 4;

using ArmValues = std::array<double, kArms>;
using Rng = std::mt19937_64;

enum class PhaseNoiseModel { None, GaussianDrift, RandomWalk };

std::string to_string(PhaseNoiseModel m);
PhaseNoiseModel phase_noise_model_from_string(const std::string& s);

struct PhaseNoise {
  PhaseNoiseModel model = PhaseNoiseModel::None;
  double sigma = 0.0;                     // radians per pulse interval
  std::uint64_t relock_interval = 2000;   // pulses between stabilizations (random walk only)
};

struct InterferometerConfig {
  int d = kArms;
  double mu = 0.2;
  double det_efficiency = 0.10;
  double rep_rate = 2e6;
  double integration_time = 1.0;
  PhaseNoise phase_noise;
  ArmValues tau{1.0, 1.0, 1.0, 1.0};
  double dark_count_prob = 0.0;
  double stabilization_threshold = 0.999;
  int stabilization_max_iterations = 10000;

  /// Throws InvalidConfig on any out-of-range field.
  void validate() const;
};

nlohmann::json to_json(const InterferometerConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
InterferometerConfig config_from_json(const nlohmann::json& j);

struct PhaseState {
  ArmValues phi_n{};  // noise
  ArmValues phi_c{};  // slow compensation
  ArmValues phi_s{};  // state setting
  ArmValues phi_b{};  // measurement side

  /// phi^A_k = phi^n_k + phi^c_k + phi^s_k
  ArmValues preparation_phases() const;
};

/// The 4x4 multiport beam splitter (a real Hadamard matrix scaled by 1/2).
CMatrix mbs_matrix();

/// (1/sqrt N) sum_k tau_k exp(i phi_k) |k>, N = sum tau_k^2.
CVector prepare_state(const ArmValues& tau, const ArmValues& phi_a);

/// U_M = diag(exp(i phi^B)) MBS. Its k-th column is the analysis vector
/// |alpha_k>, so detection in path k has probability |<alpha_k|psi>|^2.
CMatrix measurement_unitary(const ArmValues& phi_b);

ArmValues detection_probabilities(const CVector& state, const ArmValues& phi_b);

struct StateSettings {
  ArmValues tau{};
  ArmValues phi_s{};
};

/// Modulator settings reproducing `target` up to a global phase.
StateSettings settings_for_state(const CVector& target);

/// Measurement phases for Bob's input y (1 or 2): y = 2 flips arm 1 by pi.
ArmValues measurement_phase_for_input(int y);

/// Photon number of one weak-coherent pulse.
std::uint64_t sample_source(double mu, Rng& rng);

/// Probability of a click at SPD1 with all arms open, phi_s = 0 and phi^B = 0.
double spd1_probability(const PhaseState& state);

/// Coordinate-wise hill climbing on phi_c until P(SPD1) reaches the
/// configured threshold. Throws StabilizationFailed at the iteration cap.
PhaseState stabilize_phases(const InterferometerConfig& config, PhaseState state, Rng& rng);

/// Expected detector clicks per protocol round, averaged over inputs.
double expected_detections_per_round(const InterferometerConfig& config);
std::uint64_t rounds_for_detections(const InterferometerConfig& config, std::uint64_t detections);

/// Pulse-by-pulse simulation of `total_rounds` protocol rounds. Rounds are
/// split into fixed-size shards with seeds derived from `seed`, so the
/// result does not depend on `threads`.
CountsTable simulate_rounds(const InterferometerConfig& config, std::uint64_t total_rounds, std::uint64_t seed,
                            unsigned threads = 0);

/// simulate_rounds with rounds_per_setting * 2 d^2 rounds.
CountsTable simulate_counts(const InterferometerConfig& config, std::uint64_t rounds_per_setting,
                            std::uint64_t seed, unsigned threads = 0);

/// Exact expected counts with no source, detector or noise model. The
/// per-setting total is rounded up until every expected count is an integer
/// (when such a total exists below 10^4 times the request).
CountsTable ideal_counts(std::uint64_t total_detections);

/// Two-arm fringe visibility (max - min)/(max + min) at SPD1 with the other
/// arms blocked, from a sinusoid fit to a phase scan averaged over the
/// configured phase noise. Arms are 0-based.
double fringe_visibility(const InterferometerConfig& config, std::pair<int, int> arms, std::uint64_t seed);

/// Average of fringe_visibility over the six arm pairs.
double mean_fringe_visibility(const InterferometerConfig& config, std::uint64_t seed);

/// Noise sigma that brings the mean fringe visibility to `target`. Uses the
/// configured model, or Gaussian drift when the model is None.
double calibrate_noise_sigma(const InterferometerConfig& config, double target_visibility, std::uint64_t seed);

}  // namespace mubcert
