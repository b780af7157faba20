#include "mubcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "mubcert/error.hpp"

namespace mubcert {

namespace {

constexpr double kBracketTol = 1e-12;
// Residues this small are round-off in p itself; sqrt would inflate them to ~1e-8.
constexpr double kSnap = 64.0 * std::numeric_limits<double>::epsilon();

void require_dim(int d) {
  if (d < 2) throw Error(ErrorKind::InvalidArgument, "certificates need d >= 2");
}

void require_probability_above_half(double p) {
  if (!(p > 0.5) || p > 1.0) {
    throw Error(ErrorKind::OutOfRange, "ASP must lie in (1/2, 1], got " + std::to_string(p));
  }
}

// 1 - d (2p - 1)^2, with round-off at p_Q snapped to zero.
double uncertainty_bracket(double p, int d) {
  require_dim(d);
  require_probability_above_half(p);
  const double x = 2.0 * p - 1.0;
  const double bracket = 1.0 - d * x * x;
  if (bracket < -kBracketTol) {
    throw Error(ErrorKind::OutOfRange, "ASP exceeds the quantum optimum for this dimension");
  }
  return bracket <= kSnap ? 0.0 : bracket;
}

double raw_overlap_entropy(double p, int d) {
  require_dim(d);
  require_probability_above_half(p);
  const double dd = d;
  return 2.0 * std::log2(dd * std::sqrt(dd) * (2.0 * p - 1.0));
}

double raw_smax(double p, int d) {
  const double bracket = uncertainty_bracket(p, d);
  const double dd = d;
  return (2.0 * p - 1.0) + std::sqrt(dd * (dd * dd - 1.0) * bracket) / dd;
}

double norm_discriminant(double p, int d) {
  const double dd = d;
  const double x = 2.0 * p - 1.0;
  return dd * dd * dd * x * x - (dd * dd - 1.0);
}

double raw_norm_sum(double p, int d) {
  require_dim(d);
  require_probability_above_half(p);
  double disc = norm_discriminant(p, d);
  if (std::abs(disc) <= kSnap * d * d) disc = 0.0;
  if (disc < 0.0) {
    throw Error(ErrorKind::BelowThreshold, "norm-sum bound needs p >= " + std::to_string(norm_sum_threshold(d)));
  }
  const double dd = d;
  return dd - (2.0 + std::sqrt(2.0)) / dd * (1.0 - std::sqrt(disc));
}

bool in_physical_range(double p, int d) {
  return p > 0.5 && p <= quantum_optimum(d) + kBracketTol;
}

}  // namespace

std::string bound_key(BoundId id) {
  switch (id) {
    case BoundId::OverlapEntropy: return "hs_lower";
    case BoundId::NormSum: return "norm_sum_lower";
    case BoundId::Smax: return "smax_upper";
    case BoundId::Incompatibility: return "incompat_upper";
    case BoundId::Entropic: return "entropic_lower";
  }
  return "unknown";
}

double bound_overlap_entropy(double p, int d) {
  const double dd = d;
  return std::clamp(raw_overlap_entropy(p, d), 0.0, std::log2(dd * dd));
}

double norm_sum_threshold(int d) {
  require_dim(d);
  const double dd = d;
  return 0.5 * (1.0 + std::sqrt((dd * dd - 1.0) / (dd * dd * dd)));
}

double bound_norm_sum(double p, int d) { return std::min(raw_norm_sum(p, d), static_cast<double>(d)); }

double bound_smax(double p, int d) { return std::min(raw_smax(p, d), 1.0); }

double incompatibility_expression(double norm_lower, double smax_upper, int d) {
  require_dim(d);
  const double dd = d;
  const double n = norm_lower;
  const double denominator = n * n - dd - (dd - n) * (dd - n + 1.0);
  if (!(denominator > 0.0)) {
    throw Error(ErrorKind::DenominatorNonpositive, "incompatibility bound denominator is not positive");
  }
  const double numerator = 0.5 * dd * dd * (1.0 + smax_upper) - n * n / dd;
  return numerator / denominator;
}

double bound_incompatibility(double norm_lower, double smax_upper, int d) {
  return std::min(incompatibility_expression(norm_lower, smax_upper, d), 1.0);
}

double bound_entropic(double p, int d) {
  return std::clamp(-2.0 * std::log2(raw_smax(p, d)), 0.0, std::log2(static_cast<double>(d)));
}

double mub_incompat_value(int d) {
  require_dim(d);
  return 0.5 * (1.0 + 1.0 / (std::sqrt(static_cast<double>(d)) + 1.0));
}

double evaluate_bound(BoundId id, double p, int d) {
  switch (id) {
    case BoundId::OverlapEntropy: return bound_overlap_entropy(p, d);
    case BoundId::NormSum: return bound_norm_sum(p, d);
    case BoundId::Smax: return bound_smax(p, d);
    case BoundId::Incompatibility: return bound_incompatibility(bound_norm_sum(p, d), bound_smax(p, d), d);
    case BoundId::Entropic: return bound_entropic(p, d);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown bound");
}

bool bound_applicable(BoundId id, double p, int d) {
  try {
    (void)evaluate_bound(id, p, d);
    return true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw;
    return false;
  }
}

double propagate_error(BoundId id, double p, double sigma, int d) {
  if (sigma < 0.0) throw Error(ErrorKind::InvalidArgument, "sigma must be nonnegative");
  if (!bound_applicable(id, p, d)) {
    throw Error(ErrorKind::BoundInapplicableInWindow, bound_key(id) + " is not applicable at p");
  }
  if (sigma == 0.0) return 0.0;
  const double lo = p - 3.0 * sigma;
  const double hi = p + 3.0 * sigma;
  if (!in_physical_range(lo, d) || !in_physical_range(hi, d) || !bound_applicable(id, lo, d) ||
      !bound_applicable(id, hi, d)) {
    throw Error(ErrorKind::BoundInapplicableInWindow,
                bound_key(id) + " is not applicable throughout p +- 3 sigma");
  }
  const double h = std::min(sigma, 1e-6);
  const double slope = (evaluate_bound(id, p + h, d) - evaluate_bound(id, p - h, d)) / (2.0 * h);
  return std::abs(slope) * sigma;
}

double propagate_error_clipped(BoundId id, double p, double sigma, int d) {
  if (!bound_applicable(id, p, d)) {
    throw Error(ErrorKind::BoundInapplicableInWindow, bound_key(id) + " is not applicable at p");
  }
  if (sigma <= 0.0) return 0.0;
  // Pull each window edge toward p until the bound is defined there.
  auto edge = [&](double target) {
    if (in_physical_range(target, d) && bound_applicable(id, target, d)) return target;
    double good = p;
    double bad = target;
    for (int k = 0; k < 80; ++k) {
      const double mid = 0.5 * (good + bad);
      if (in_physical_range(mid, d) && bound_applicable(id, mid, d)) good = mid; else bad = mid;
    }
    return good;
  };
  const double f0 = evaluate_bound(id, p, d);
  const double up = std::abs(evaluate_bound(id, edge(p + sigma), d) - f0);
  const double down = std::abs(f0 - evaluate_bound(id, edge(p - sigma), d));
  return std::max(up, down);
}

double min_asp_for_nontrivial_eta(int d) {
  require_dim(d);
  auto nontrivial = [d](double p) {
    try {
      return incompatibility_expression(bound_norm_sum(p, d), bound_smax(p, d), d) < 1.0;
    } catch (const Error&) {
      return false;
    }
  };
  double hi = quantum_optimum(d);
  double lo = norm_sum_threshold(d);
  if (nontrivial(lo)) return lo;
  if (!nontrivial(hi)) return std::numeric_limits<double>::quiet_NaN();
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (nontrivial(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

const CertifiedValue& CertificateReport::get(BoundId id) const {
  switch (id) {
    case BoundId::OverlapEntropy: return hs_lower;
    case BoundId::NormSum: return norm_sum_lower;
    case BoundId::Smax: return smax_upper;
    case BoundId::Incompatibility: return incompat_upper;
    case BoundId::Entropic: return entropic_lower;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown bound");
}

CertifiedValue& CertificateReport::get(BoundId id) {
  return const_cast<CertifiedValue&>(static_cast<const CertificateReport&>(*this).get(id));
}

IdealRefs ideal_refs(int d) {
  require_dim(d);
  const double dd = d;
  return {std::log2(dd * dd), dd, mub_incompat_value(d), std::log2(dd)};
}

namespace {

// Records in the report whenever a bound's raw formula left its range.
void note_clamps(CertificateReport& report, double p) {
  const int d = report.d;
  const double dd = d;
  auto note = [&](const std::string& what) { report.notes.push_back(what); };
  if (report.hs_lower.applicable) {
    const double raw = raw_overlap_entropy(p, d);
    if (raw < 0.0) note("hs_lower clamped to 0 from " + std::to_string(raw));
    if (raw > std::log2(dd * dd)) note("hs_lower clamped to log2(d^2)");
  }
  if (report.norm_sum_lower.applicable && raw_norm_sum(p, d) > dd) note("norm_sum_lower clamped to d");
  if (report.smax_upper.applicable && raw_smax(p, d) > 1.0) {
    note("smax_upper clamped to 1 from " + std::to_string(raw_smax(p, d)));
  }
  if (report.incompat_upper.applicable &&
      incompatibility_expression(bound_norm_sum(p, d), bound_smax(p, d), d) > 1.0) {
    note("incompat_upper capped at 1 (no incompatibility certified)");
  }
  if (report.entropic_lower.applicable) {
    const double raw = -2.0 * std::log2(raw_smax(p, d));
    if (raw < 0.0) note("entropic_lower clamped to 0");
    if (raw > std::log2(dd)) note("entropic_lower clamped to log2(d)");
  }
}

}  // namespace

CertificateReport full_certificate(const AspEstimate& asp, int d) {
  require_dim(d);
  CertificateReport report;
  report.d = d;
  report.asp = asp;
  report.ideal_refs = ideal_refs(d);

  double p = asp.value;
  const double sigma = std::max(asp.sigma, 0.0);
  const double p_q = quantum_optimum(d);
  std::string blocked;
  if (!(p > 0.5)) {
    blocked = "ASP does not exceed 1/2";
  } else if (p > 1.0) {
    blocked = "ASP exceeds 1";
  } else if (p > p_q) {
    if (p - p_q <= 3.0 * sigma + kBracketTol) {
      report.notes.push_back("ASP " + std::to_string(p) + " above the quantum optimum; clamped to " +
                             std::to_string(p_q));
      p = p_q;
    } else {
      blocked = "ASP exceeds the quantum optimum by more than 3 sigma";
    }
  }

  for (BoundId id : kAllBounds) {
    auto& slot = report.get(id);
    if (!blocked.empty()) {
      slot.reason = blocked;
      continue;
    }
    try {
      slot.value = evaluate_bound(id, p, d);
    } catch (const Error& e) {
      slot.reason = e.what();
      continue;
    }
    slot.applicable = true;
    try {
      slot.sigma = propagate_error(id, p, sigma, d);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BoundInapplicableInWindow) throw;
      slot.sigma = propagate_error_clipped(id, p, sigma, d);
      report.notes.push_back(bound_key(id) + " error from the clipped +-1 sigma interval (domain edge within 3 sigma)");
    }
  }
  if (blocked.empty()) note_clamps(report, p);
  return report;
}

nlohmann::json to_json(const CertificateReport& report) {
  using nlohmann::json;
  json asp_json = {{"value", report.asp.value},
                   {"sigma", report.asp.sigma},
                   {"n_rounds", report.asp.n_rounds},
                   {"per_input", json::array()}};
  const int ad = report.asp.dim;
  if (!report.asp.per_input.empty()) {
    for (int i = 0; i < ad; ++i) {
      json row = json::array();
      for (int j = 0; j < ad; ++j) row.push_back({report.asp.at(i, j, 0), report.asp.at(i, j, 1)});
      asp_json["per_input"].push_back(std::move(row));
    }
  }
  json out = {{"d", report.d}, {"asp", std::move(asp_json)}};
  json applicability = json::object();
  for (BoundId id : kAllBounds) {
    const auto& v = report.get(id);
    out[bound_key(id)] = v.applicable ? json{{"value", v.value}, {"sigma", v.sigma}} : json(nullptr);
    applicability[bound_key(id)] = v.applicable ? "ok" : v.reason;
  }
  out["ideal_refs"] = {{"hs", report.ideal_refs.hs},
                       {"norm", report.ideal_refs.norm},
                       {"eta", report.ideal_refs.eta},
                       {"entropy", report.ideal_refs.entropy}};
  out["applicability"] = std::move(applicability);
  out["notes"] = report.notes;
  return out;
}

std::string format_report_table(const CertificateReport& report) {
  struct Row {
    BoundId id;
    const char* label;
    double ideal;
  };
  const Row rows[] = {
      {BoundId::OverlapEntropy, "H_S(A,B) >=", report.ideal_refs.hs},
      {BoundId::NormSum, "N(A) >=", report.ideal_refs.norm},
      {BoundId::Smax, "s_max <=", 1.0 / std::sqrt(static_cast<double>(report.d))},
      {BoundId::Incompatibility, "eta* <=", report.ideal_refs.eta},
      {BoundId::Entropic, "H(A)+H(B) >=", report.ideal_refs.entropy},
  };
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "d = %d   ASP = %.6f +- %.6f   (quantum optimum %.6f)\n", report.d,
                report.asp.value, report.asp.sigma, quantum_optimum(report.d));
  os << buf;
  std::snprintf(buf, sizeof buf, "%-14s %12s %12s %12s\n", "quantity", "certified", "sigma", "ideal MUB");
  os << buf;
  for (const auto& row : rows) {
    const auto& v = report.get(row.id);
    if (v.applicable) {
      std::snprintf(buf, sizeof buf, "%-14s %12.6f %12.6f %12.6f\n", row.label, v.value, v.sigma, row.ideal);
    } else {
      std::snprintf(buf, sizeof buf, "%-14s %12s %12s %12.6f  (%s)\n", row.label, "n/a", "-", row.ideal,
                    v.reason.c_str());
    }
    os << buf;
  }
  for (const auto& n : report.notes) os << "note: " << n << '\n';
  return os.str();
}

}  // namespace mubcert
