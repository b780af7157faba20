#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mubcert/qla.hpp"

namespace mubcert {

/// A d-outcome POVM. Outcome b (0-based here, 1-based in files) maps to
/// effects[b]. Measurements built from an orthonormal basis keep the basis
/// vectors so downstream code can use them without re-diagonalizing.
struct Measurement {
  int dim = 0;
  std::vector<CMatrix> effects;
  std::optional<std::vector<CVector>> basis;

  /// Rank-1 projective measurement onto the columns of `columns`.
  static Measurement from_basis(const CMatrix& columns);
  /// Applies v*E + (1-v)*tr(E)/d * I to every effect.
  Measurement depolarized(double visibility) const;

  std::size_t outcomes() const noexcept { return effects.size(); }
};

enum class Construction { PaperD4, Fourier, Custom };

std::string to_string(Construction c);
Construction construction_from_string(const std::string& s);

struct MubPair {
  Measurement first;
  Measurement second;
  Construction construction = Construction::Custom;

  int dim() const noexcept { return first.dim; }
};

// The two 4x4 basis matrices whose columns define the certified pair. The
// first equals the multiport beam splitter matrix.
CMatrix paper_basis_a();
CMatrix paper_basis_b();

MubPair paper_mub_pair_d4();
MubPair fourier_mub_pair(int d);

/// Rank-1 projective check: every effect has unit norm and unit trace.
bool is_rank1_projective(const Measurement& m, double tol = kDefaultTol);

/// Unit vectors spanning each rank-1 effect, taken from the stored basis
/// when present. Throws NotProjective otherwise.
std::vector<CVector> rank1_vectors(const Measurement& m, double tol = kDefaultTol);

bool is_mutually_unbiased(const MubPair& pair, double tol = kDefaultTol);

/// Overlap distribution p_ij = tr(A_i B_j) / d, row-major in (i, j).
std::vector<double> overlap_distribution(const MubPair& pair);

/// Half-Renyi entropy of the overlap distribution, in bits.
double overlap_entropy(const MubPair& pair);

double norm_sum(const Measurement& m);

/// max_ij || sqrt(A_i) sqrt(B_j) ||
double s_max(const MubPair& pair);

}  // namespace mubcert
