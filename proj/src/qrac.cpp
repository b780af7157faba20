#include "mubcert/qrac.hpp"

#include <cmath>

#include "mubcert/error.hpp"

namespace mubcert {

namespace {

void require_same_dim(const MubPair& pair, int dim) {
  if (pair.first.dim != dim || pair.second.dim != dim ||
      static_cast<int>(pair.first.outcomes()) != dim || static_cast<int>(pair.second.outcomes()) != dim) {
    throw Error(ErrorKind::DimensionMismatch, "encoding and measurement dimensions disagree");
  }
}

}  // namespace

EncodingTable optimal_states(const MubPair& pair) {
  bool unbiased = false;
  try {
    unbiased = is_mutually_unbiased(pair);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotProjective) throw;
  }
  if (!unbiased) throw Error(ErrorKind::NotMub, "optimal_states requires a rank-1 MUB pair");

  const int d = pair.dim();
  const auto a = rank1_vectors(pair.first);
  const auto b = rank1_vectors(pair.second);
  EncodingTable table{d, {}};
  table.states.reserve(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Complex overlap = a[i].dot(b[j]);  // <a_i|b_j>, conjugate-linear in a_i
      const Complex phase = std::polar(1.0, -std::arg(overlap));
      CVector psi = a[i] + phase * b[j];
      psi /= psi.norm();
      table.states.push_back(std::move(psi));
    }
  }
  return table;
}

double asp(std::span<const CMatrix> rhos, const MubPair& pair) {
  const int d = pair.dim();
  if (rhos.size() != static_cast<std::size_t>(d) * d) {
    throw Error(ErrorKind::DimensionMismatch, "asp: expected d*d encoding states");
  }
  require_same_dim(pair, d);
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const auto& rho = rhos[static_cast<std::size_t>(i) * d + j];
      if (rho.rows() != d || rho.cols() != d) {
        throw Error(ErrorKind::DimensionMismatch, "asp: encoding state has the wrong dimension");
      }
      sum += (rho * (pair.first.effects[i] + pair.second.effects[j])).trace().real();
    }
  }
  return sum / (2.0 * d * d);
}

double asp(const EncodingTable& enc, const MubPair& pair) {
  require_same_dim(pair, enc.dim);
  if (enc.states.size() != static_cast<std::size_t>(enc.dim) * enc.dim) {
    throw Error(ErrorKind::DimensionMismatch, "asp: encoding table is incomplete");
  }
  std::vector<CMatrix> rhos;
  rhos.reserve(enc.states.size());
  for (const auto& psi : enc.states) {
    if (psi.size() != enc.dim) throw Error(ErrorKind::DimensionMismatch, "asp: state has the wrong dimension");
    rhos.push_back(projector(psi));
  }
  return asp(rhos, pair);
}

double quantum_optimum(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "quantum_optimum: d must be >= 2");
  return 0.5 * (1.0 + 1.0 / std::sqrt(static_cast<double>(d)));
}

OptimalAsp brute_force_optimal_asp(const MubPair& pair) {
  const int d = pair.dim();
  require_same_dim(pair, d);
  OptimalAsp out{0.0, {d, {}}};
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const auto sys = eig_hermitian(pair.first.effects[i] + pair.second.effects[j]);
      sum += sys.values.front();
      out.states.states.push_back(sys.vectors.front());
    }
  }
  out.value = sum / (2.0 * d * d);
  return out;
}

AspEstimate estimate_asp(const CountsTable& counts) {
  const int d = counts.dim();
  if (d < 1) throw Error(ErrorKind::EmptyCell, "estimate_asp: empty counts table");
  AspEstimate est;
  est.dim = d;
  est.per_input.resize(static_cast<std::size_t>(d) * d * 2);
  const double weight = 1.0 / (2.0 * d * d);
  double value = 0.0;
  double variance = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int y = 0; y < 2; ++y) {
        const auto n = counts.setting_total(i, j, y);
        if (n == 0) {
          throw Error(ErrorKind::EmptyCell, "estimate_asp: no detections for (i,j,y) = (" +
                                                std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                                                std::to_string(y + 1) + ")");
        }
        const int target = (y == 0) ? i : j;
        const double hits = static_cast<double>(counts.at(i, j, y, target));
        const double total = static_cast<double>(n);
        const double ratio = hits / total;
        est.per_input[(static_cast<std::size_t>(i) * d + j) * 2 + y] = ratio;
        value += weight * ratio;
        // d(ratio)/d(hits) = (n - c)/n^2, d(ratio)/d(miss) = -c/n^2, Var(cell) = cell.
        variance += weight * weight * hits * (total - hits) / (total * total * total);
        est.n_rounds += n;
      }
    }
  }
  est.value = value;
  est.sigma = std::sqrt(variance);
  return est;
}

std::vector<double> outcome_probabilities(const CVector& state, const Measurement& m) {
  std::vector<double> probs;
  probs.reserve(m.outcomes());
  for (const auto& e : m.effects) {
    if (e.rows() != state.size()) throw Error(ErrorKind::DimensionMismatch, "outcome_probabilities: dimension");
    probs.push_back(state.dot(e * state).real());
  }
  return probs;
}

}  // namespace mubcert
