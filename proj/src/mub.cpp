#include "mubcert/mub.hpp"

#include <cmath>
#include <numbers>

#include "mubcert/error.hpp"

namespace mubcert {

Measurement Measurement::from_basis(const CMatrix& columns) {
  if (!is_square(columns)) {
    throw Error(ErrorKind::DimensionMismatch, "from_basis: basis matrix must be square");
  }
  Measurement m;
  m.dim = static_cast<int>(columns.rows());
  std::vector<CVector> vectors;
  for (Eigen::Index k = 0; k < columns.cols(); ++k) {
    vectors.emplace_back(columns.col(k));
    m.effects.push_back(projector(vectors.back()));
  }
  m.basis = std::move(vectors);
  return m;
}

Measurement Measurement::depolarized(double visibility) const {
  Measurement out;
  out.dim = dim;
  const CMatrix id = CMatrix::Identity(dim, dim);
  for (const auto& e : effects) {
    out.effects.push_back(visibility * e + (1.0 - visibility) * e.trace().real() / dim * id);
  }
  return out;
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::PaperD4: return "paper-d4";
    case Construction::Fourier: return "fourier";
    case Construction::Custom: return "custom";
  }
  return "custom";
}

Construction construction_from_string(const std::string& s) {
  if (s == "paper-d4") return Construction::PaperD4;
  if (s == "fourier") return Construction::Fourier;
  if (s == "custom") return Construction::Custom;
  throw Error(ErrorKind::InvalidArgument, "unknown construction '" + s + "'");
}

CMatrix paper_basis_a() {
  CMatrix a(4, 4);
  a << 1, 1, 1, 1,
       1, 1, -1, -1,
       1, -1, 1, -1,
       1, -1, -1, 1;
  return 0.5 * a;
}

CMatrix paper_basis_b() {
  CMatrix b = paper_basis_a();
  b.row(0) *= -1.0;
  return b;
}

MubPair paper_mub_pair_d4() {
  return {Measurement::from_basis(paper_basis_a()), Measurement::from_basis(paper_basis_b()),
          Construction::PaperD4};
}

MubPair fourier_mub_pair(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "fourier_mub_pair: d must be >= 2");
  CMatrix f(d, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j < d; ++j) {
      // Reduce the exponent first so large d keeps full phase accuracy.
      const double angle = 2.0 * std::numbers::pi * ((j * k) % d) / d;
      f(k, j) = std::polar(scale, angle);
    }
  }
  return {Measurement::from_basis(CMatrix::Identity(d, d)), Measurement::from_basis(f),
          Construction::Fourier};
}

bool is_rank1_projective(const Measurement& m, double tol) {
  for (const auto& e : m.effects) {
    if (std::abs(operator_norm(e) - 1.0) > tol) return false;
    if (std::abs(e.trace() - Complex(1.0, 0.0)) > tol) return false;
  }
  return !m.effects.empty();
}

std::vector<CVector> rank1_vectors(const Measurement& m, double tol) {
  if (m.basis) return *m.basis;
  if (!is_rank1_projective(m, tol)) {
    throw Error(ErrorKind::NotProjective, "measurement is not rank-1 projective");
  }
  std::vector<CVector> out;
  for (const auto& e : m.effects) out.push_back(eig_hermitian(e, tol).vectors.front());
  return out;
}

bool is_mutually_unbiased(const MubPair& pair, double tol) {
  if (pair.first.dim != pair.second.dim) {
    throw Error(ErrorKind::DimensionMismatch, "is_mutually_unbiased: dimensions differ");
  }
  if (!is_rank1_projective(pair.first, tol) || !is_rank1_projective(pair.second, tol)) {
    throw Error(ErrorKind::NotProjective, "is_mutually_unbiased needs rank-1 projective inputs");
  }
  const double target = 1.0 / pair.dim();
  for (const auto& a : pair.first.effects) {
    for (const auto& b : pair.second.effects) {
      if (std::abs((a * b).trace().real() - target) > tol) return false;
    }
  }
  return true;
}

std::vector<double> overlap_distribution(const MubPair& pair) {
  if (pair.first.dim != pair.second.dim) {
    throw Error(ErrorKind::DimensionMismatch, "overlap_distribution: dimensions differ");
  }
  std::vector<double> p;
  p.reserve(pair.first.outcomes() * pair.second.outcomes());
  for (const auto& a : pair.first.effects) {
    for (const auto& b : pair.second.effects) {
      p.push_back((a * b).trace().real() / pair.dim());
    }
  }
  return p;
}

double overlap_entropy(const MubPair& pair) {
  double root_sum = 0.0;
  for (double p : overlap_distribution(pair)) {
    if (p > 0.0) root_sum += std::sqrt(p);
  }
  return 2.0 * std::log2(root_sum);
}

double norm_sum(const Measurement& m) {
  double total = 0.0;
  for (const auto& e : m.effects) total += operator_norm(e);
  return total;
}

double s_max(const MubPair& pair) {
  std::vector<CMatrix> roots_b;
  for (const auto& b : pair.second.effects) roots_b.push_back(psd_sqrt(b));
  double best = 0.0;
  for (const auto& a : pair.first.effects) {
    const CMatrix root_a = psd_sqrt(a);
    for (const auto& root_b : roots_b) best = std::max(best, operator_norm(root_a * root_b));
  }
  return best;
}

}  // namespace mubcert
