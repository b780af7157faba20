#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mubcert/counts.hpp"
#include "mubcert/mub.hpp"

namespace mubcert {

/// One pure encoding state per input pair (i, j), stored row-major.
struct EncodingTable {
  int dim = 0;
  std::vector<CVector> states;

  const CVector& at(int i, int j) const { return states.at(static_cast<std::size_t>(i) * dim + j); }
};

/// ASP with its one-sigma uncertainty. per_input holds the conditional
/// success probabilities indexed ((i * d) + j) * 2 + y; it is empty when the
/// estimate was supplied directly instead of derived from counts.
struct AspEstimate {
  double value = 0.0;
  double sigma = 0.0;
  std::vector<double> per_input;
  std::uint64_t n_rounds = 0;
  int dim = 0;

  double at(int i, int j, int y) const { return per_input.at((static_cast<std::size_t>(i) * dim + j) * 2 + y); }
};

/// Optimal encoding for a rank-1 MUB pair:
///   psi_ij ∝ |a_i> + exp(-i arg<a_i|b_j>) |b_j>.
EncodingTable optimal_states(const MubPair& pair);

/// Average success probability (1 / 2d^2) sum_ij tr[rho_ij (A_i + B_j)].
double asp(const EncodingTable& enc, const MubPair& pair);
/// Same, for arbitrary density matrices rho_ij stored row-major.
double asp(std::span<const CMatrix> rhos, const MubPair& pair);

/// 1/2 (1 + 1/sqrt(d)).
double quantum_optimum(int d);

struct OptimalAsp {
  double value = 0.0;
  EncodingTable states;
};

/// Exact optimum over encodings for fixed measurements: the top eigenvector
/// of A_i + B_j for every (i, j). Valid for any measurement pair.
OptimalAsp brute_force_optimal_asp(const MubPair& pair);

/// ASP from raw counts, with first-order Poissonian error propagation over
/// every cell. Throws EmptyCell if some (i, j, y) saw no detections.
AspEstimate estimate_asp(const CountsTable& counts);

/// Outcome distribution tr(rho E_b) for each outcome of `m`.
std::vector<double> outcome_probabilities(const CVector& state, const Measurement& m);

}  // namespace mubcert
