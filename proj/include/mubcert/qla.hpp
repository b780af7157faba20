#pragma once

// Small dense complex linear algebra. Everything here is sized for the
// d <= 16 operators that show up in the protocol; nothing is tuned for
// large or sparse problems.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mubcert {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;

struct EigenSystem {
  std::vector<double> values;    // descending
  std::vector<CVector> vectors;  // vectors[k] pairs with values[k]
};

bool is_square(const CMatrix& m) noexcept;
bool is_hermitian(const CMatrix& m, double tol = kDefaultTol);
bool is_unitary(const CMatrix& m, double tol = kDefaultTol);
bool is_psd(const CMatrix& m, double tol = kDefaultTol);
bool is_normalized(const CVector& v, double tol = kDefaultTol);

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues come back in descending order. Within a degenerate eigenspace
/// the choice of basis is arbitrary; callers should only rely on eigenvalues
/// or on spectral projectors built from a whole eigenspace.
EigenSystem eig_hermitian(const CMatrix& m, double tol = kDefaultTol);

/// Largest singular value.
double operator_norm(const CMatrix& m);

/// Principal square root of a PSD matrix. Eigenvalues in (-tol, 0) are
/// clamped to zero; anything more negative raises NotPSD.
CMatrix psd_sqrt(const CMatrix& m, double tol = kDefaultTol);

/// True iff every operator is PSD and the operators sum to the identity,
/// both within `tol`. Throws DimensionMismatch on mixed dimensions.
bool validate_povm(std::span<const CMatrix> ops, double tol = kDefaultTol);

CMatrix projector(const CVector& v);

// Largest absolute entrywise difference.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

}  // namespace mubcert
