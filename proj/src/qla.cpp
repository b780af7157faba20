#include "mubcert/qla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mubcert/error.hpp"

namespace mubcert {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotProjective: return "NotProjective";
    case ErrorKind::NotMub: return "NotMub";
    case ErrorKind::EmptyCell: return "EmptyCell";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::BelowThreshold: return "BelowThreshold";
    case ErrorKind::DenominatorNonpositive: return "DenominatorNonpositive";
    case ErrorKind::BoundInapplicableInWindow: return "BoundInapplicableInWindow";
    case ErrorKind::AllArmsBlocked: return "AllArmsBlocked";
    case ErrorKind::StabilizationFailed: return "StabilizationFailed";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_square(const CMatrix& m) noexcept { return m.rows() == m.cols() && m.rows() > 0; }

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "max_abs_diff: shapes differ");
  }
  return (a - b).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& m, double tol) {
  return is_square(m) && max_abs_diff(m, m.adjoint()) <= tol;
}

bool is_unitary(const CMatrix& m, double tol) {
  if (!is_square(m)) return false;
  const CMatrix id = CMatrix::Identity(m.rows(), m.cols());
  return max_abs_diff(m.adjoint() * m, id) <= tol;
}

bool is_psd(const CMatrix& m, double tol) {
  if (!is_hermitian(m, tol)) return false;
  const auto sys = eig_hermitian(m, tol);
  return sys.values.back() >= -tol;
}

bool is_normalized(const CVector& v, double tol) {
  return v.size() > 0 && std::abs(v.norm() - 1.0) <= tol;
}

EigenSystem eig_hermitian(const CMatrix& m, double tol) {
  if (!is_square(m)) {
    throw Error(ErrorKind::DimensionMismatch, "eig_hermitian: matrix is not square");
  }
  if (max_abs_diff(m, m.adjoint()) > tol) {
    throw Error(ErrorKind::NotHermitian, "eig_hermitian: input deviates from its adjoint");
  }
  // Symmetrize so round-off in the strict upper triangle cannot leak in.
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "eig_hermitian: solver exceeded its iteration cap");
  }
  const auto n = h.rows();
  EigenSystem out;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    out.values.push_back(solver.eigenvalues()(k));
    out.vectors.emplace_back(solver.eigenvectors().col(k));
  }
  return out;
}

double operator_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

CMatrix psd_sqrt(const CMatrix& m, double tol) {
  const auto sys = eig_hermitian(m, tol);
  const auto n = m.rows();
  CMatrix out = CMatrix::Zero(n, n);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                      (sys.values.empty() ? 0.0 : std::abs(sys.values.front()));
  for (std::size_t k = 0; k < sys.values.size(); ++k) {
    double lambda = sys.values[k];
    if (lambda < -tol) {
      throw Error(ErrorKind::NotPSD,
                  "psd_sqrt: eigenvalue " + std::to_string(lambda) + " below -tol");
    }
    if (lambda <= floor) continue;
    out += std::sqrt(lambda) * (sys.vectors[k] * sys.vectors[k].adjoint());
  }
  return out;
}

bool validate_povm(std::span<const CMatrix> ops, double tol) {
  if (ops.empty()) return false;
  const auto n = ops.front().rows();
  for (const auto& op : ops) {
    if (op.rows() != n || op.cols() != n) {
      throw Error(ErrorKind::DimensionMismatch, "validate_povm: operators differ in dimension");
    }
  }
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& op : ops) {
    if (!is_psd(op, tol)) return false;
    sum += op;
  }
  return max_abs_diff(sum, CMatrix::Identity(n, n)) <= tol;
}

CMatrix projector(const CVector& v) { return v * v.adjoint(); }

}  // namespace mubcert
