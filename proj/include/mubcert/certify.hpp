#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mubcert/qrac.hpp"

namespace mubcert {

// Certificates derived from an observed QRAC average success probability p
// in dimension d. All entropies are in bits.

enum class BoundId { OverlapEntropy, NormSum, Smax, Incompatibility, Entropic };

inline constexpr std::array<BoundId, 5> kAllBounds = {BoundId::OverlapEntropy, BoundId::NormSum, BoundId::Smax,
                                                      BoundId::Incompatibility, BoundId::Entropic};

std::string bound_key(BoundId id);

/// H_S(A,B) >= 2 log2[d sqrt(d) (2p - 1)], clamped to [0, log2 d^2].
double bound_overlap_entropy(double p, int d);

/// Smallest p at which the norm-sum bound is defined:
/// 1/2 (1 + sqrt((d^2 - 1) / d^3)).
double norm_sum_threshold(int d);

/// N(A) >= d - (2 + sqrt 2)/d (1 - sqrt(d^3 (2p-1)^2 - (d^2 - 1))), capped at d.
double bound_norm_sum(double p, int d);

/// s_max <= (2p-1) + (1/d) sqrt(d (d^2-1) [1 - d (2p-1)^2]), capped at 1.
double bound_smax(double p, int d);

/// Upper bound on the incompatibility robustness given a lower bound on the
/// norm sum and an upper bound on s_max; capped at 1.
double bound_incompatibility(double norm_lower, double smax_upper, int d);

/// Uncapped value of the expression above; throws like bound_incompatibility.
double incompatibility_expression(double norm_lower, double smax_upper, int d);

/// H(A) + H(B) >= -2 log2(s_max bound), clamped to [0, log2 d].
double bound_entropic(double p, int d);

/// 1/2 (1 + 1/(sqrt d + 1)), the robustness of a MUB pair.
double mub_incompat_value(int d);

/// Evaluates one bound as a function of p alone (the incompatibility bound
/// is chained through the norm-sum and s_max bounds).
double evaluate_bound(BoundId id, double p, int d);
bool bound_applicable(BoundId id, double p, int d);

/// |df/dp| * sigma by central differences with step min(sigma, 1e-6).
/// Throws BoundInapplicableInWindow unless p +- 3 sigma stays inside the
/// bound's domain and inside (1/2, p_Q].
double propagate_error(BoundId id, double p, double sigma, int d);

/// Fallback used near the edges of a bound's domain: the largest deviation of
/// f over [p - sigma, p + sigma] intersected with the applicable range.
double propagate_error_clipped(BoundId id, double p, double sigma, int d);

/// Smallest p for which the chained incompatibility bound is applicable and
/// strictly below 1 (bisection to 1e-10).
double min_asp_for_nontrivial_eta(int d);

struct CertifiedValue {
  bool applicable = false;
  double value = 0.0;
  double sigma = 0.0;
  std::string reason = "ok";
};

struct IdealRefs {
  double hs = 0.0;
  double norm = 0.0;
  double eta = 0.0;
  double entropy = 0.0;
};

struct CertificateReport {
  int d = 0;
  AspEstimate asp;
  CertifiedValue hs_lower;
  CertifiedValue norm_sum_lower;
  CertifiedValue smax_upper;
  CertifiedValue incompat_upper;
  CertifiedValue entropic_lower;
  IdealRefs ideal_refs;
  std::vector<std::string> notes;  // clamps and error-method fallbacks

  const CertifiedValue& get(BoundId id) const;
  CertifiedValue& get(BoundId id);
};

IdealRefs ideal_refs(int d);

/// Populates every bound with its value and propagated error. Inapplicable
/// bounds are flagged in-band rather than thrown.
CertificateReport full_certificate(const AspEstimate& asp, int d);

nlohmann::json to_json(const CertificateReport& report);

/// Fixed-width text table comparing every bound to its ideal MUB value.
std::string format_report_table(const CertificateReport& report);

}  // namespace mubcert
