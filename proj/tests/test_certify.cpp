#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mubcert/certify.hpp"
#include "mubcert/error.hpp"

namespace mubcert {
namespace {

template <typename F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::InvalidArgument;
}

AspEstimate direct(double value, double sigma, int d = 4) {
  AspEstimate e;
  e.value = value;
  e.sigma = sigma;
  e.dim = d;
  return e;
}

TEST(OverlapEntropyBound, Values) {
  EXPECT_NEAR(bound_overlap_entropy(0.74924, 4), 3.99122, 5e-6);
  EXPECT_NEAR(bound_overlap_entropy(0.75, 4), 4.0, 1e-12);
  EXPECT_NEAR(bound_overlap_entropy(0.6, 4), 2.0 * std::log2(1.6), 1e-12);
  EXPECT_EQ(bound_overlap_entropy(0.501, 4), 0.0);  // clamped
  EXPECT_EQ(kind_of([] { bound_overlap_entropy(0.5, 4); }), ErrorKind::OutOfRange);
  EXPECT_EQ(kind_of([] { bound_overlap_entropy(1.2, 4); }), ErrorKind::OutOfRange);
}

TEST(NormSumBound, Values) {
  EXPECT_NEAR(norm_sum_threshold(4), 0.742061459, 1e-9);
  EXPECT_NEAR(bound_norm_sum(0.74924, 4), 3.95749, 5e-5);
  EXPECT_NEAR(bound_norm_sum(0.75, 4), 4.0, 1e-12);
  EXPECT_NEAR(bound_norm_sum(norm_sum_threshold(4), 4), 4.0 - (2.0 + std::sqrt(2.0)) / 4.0, 1e-6);
  EXPECT_EQ(kind_of([] { bound_norm_sum(0.742, 4); }), ErrorKind::BelowThreshold);
  EXPECT_EQ(kind_of([] { bound_norm_sum(0.70, 4); }), ErrorKind::BelowThreshold);
}

TEST(SmaxBound, Values) {
  EXPECT_NEAR(bound_smax(0.75, 4), 0.5, 1e-12);
  // Back-solve the reported robustness bound 0.798757 through the
  // incompatibility formula at the reported N(A) = 3.95749.
  const double n = 3.95749;
  const double eta = 0.798757;
  const double denominator = n * n - 4.0 - (4.0 - n) * (5.0 - n);
  const double s_backsolved = (eta * denominator + n * n / 4.0) / 8.0 - 1.0;
  EXPECT_NEAR(bound_smax(0.74924, 4), s_backsolved, 1e-4);
  EXPECT_NEAR(bound_entropic(0.74924, 4), -2.0 * std::log2(bound_smax(0.74924, 4)), 1e-12);
  EXPECT_EQ(kind_of([] { bound_smax(0.76, 4); }), ErrorKind::OutOfRange);
  EXPECT_EQ(bound_smax(0.52, 4), 1.0);  // capped
}

TEST(IncompatibilityBound, Values) {
  EXPECT_NEAR(bound_incompatibility(4.0, 0.5, 4), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(mub_incompat_value(4), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(bound_incompatibility(bound_norm_sum(0.74924, 4), bound_smax(0.74924, 4), 4), 0.798757, 1e-3);
  EXPECT_NEAR(bound_incompatibility(4.0, 1.0, 4), 1.0, 1e-12);
  EXPECT_EQ(bound_incompatibility(3.2, 1.0, 4), 1.0);  // capped
  EXPECT_EQ(kind_of([] { bound_incompatibility(1.0, 0.5, 4); }), ErrorKind::DenominatorNonpositive);
}

TEST(EntropicBound, Values) {
  EXPECT_NEAR(bound_entropic(0.74924, 4), 1.24581, 1e-3);
  EXPECT_NEAR(bound_entropic(0.75, 4), 2.0, 1e-12);
  for (int d = 2; d <= 8; ++d) {
    const double p = 0.5 + 0.5 / std::sqrt(static_cast<double>(d));
    EXPECT_NEAR(bound_entropic(p, d), std::log2(static_cast<double>(d)), 1e-12) << d;
  }
}

TEST(MubIncompatValue, DecreasesTowardHalf) {
  EXPECT_NEAR(mub_incompat_value(2), 0.7071067811865476, 1e-15);
  double previous = 1.0;
  for (int d = 2; d <= 4096; d *= 2) {
    const double v = mub_incompat_value(d);
    EXPECT_LT(v, previous);
    EXPECT_GT(v, 0.5);
    previous = v;
  }
  EXPECT_LT(mub_incompat_value(1 << 20) - 0.5, 1e-3);
}

TEST(PropagateError, Values) {
  const double hs = propagate_error(BoundId::OverlapEntropy, 0.74924, 0.00011, 4);
  EXPECT_GE(hs, 0.00127);
  EXPECT_LE(hs, 0.00131);
  EXPECT_NEAR(hs, 4.0 / (std::numbers::ln2 * (2.0 * 0.74924 - 1.0)) * 0.00011, 1e-9);
  EXPECT_NEAR(propagate_error(BoundId::NormSum, 0.74924, 0.00011, 4), 0.0065, 3e-4);
  for (BoundId id : kAllBounds) EXPECT_EQ(propagate_error(id, 0.74924, 0.0, 4), 0.0);
  EXPECT_EQ(kind_of([] { propagate_error(BoundId::Smax, 0.7499, 0.001, 4); }),
            ErrorKind::BoundInapplicableInWindow);
  EXPECT_EQ(kind_of([] { propagate_error(BoundId::NormSum, 0.7425, 0.001, 4); }),
            ErrorKind::BoundInapplicableInWindow);
}

TEST(FullCertificate, IdealFixedPoint) {
  const auto r = full_certificate(direct(0.75, 0.0), 4);
  EXPECT_NEAR(r.hs_lower.value, 4.0, 1e-10);
  EXPECT_NEAR(r.norm_sum_lower.value, 4.0, 1e-10);
  EXPECT_NEAR(r.smax_upper.value, 0.5, 1e-10);
  EXPECT_NEAR(r.incompat_upper.value, 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(r.entropic_lower.value, 2.0, 1e-10);
  for (BoundId id : kAllBounds) {
    EXPECT_TRUE(r.get(id).applicable);
    EXPECT_EQ(r.get(id).sigma, 0.0);
  }
}

TEST(FullCertificate, BelowNormThresholdFlagsTwoBounds) {
  const auto r = full_certificate(direct(0.70, 0.001), 4);
  EXPECT_TRUE(r.hs_lower.applicable);
  EXPECT_TRUE(r.entropic_lower.applicable);
  EXPECT_TRUE(r.smax_upper.applicable);
  EXPECT_FALSE(r.norm_sum_lower.applicable);
  EXPECT_FALSE(r.incompat_upper.applicable);
  EXPECT_NE(r.norm_sum_lower.reason.find("BelowThreshold"), std::string::npos);
  const auto j = to_json(r);
  EXPECT_EQ(j["applicability"]["hs_lower"], "ok");
  EXPECT_NE(j["applicability"]["norm_sum_lower"], "ok");
  EXPECT_TRUE(j["norm_sum_lower"].is_null());
}

TEST(FullCertificate, SlightlyAboveOptimumIsClamped) {
  const auto r = full_certificate(direct(0.7502, 0.0001), 4);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NEAR(r.hs_lower.value, 4.0, 1e-12);
  EXPECT_NEAR(r.smax_upper.value, 0.5, 1e-12);
  EXPECT_GT(r.smax_upper.sigma, 0.0);
  const auto far = full_certificate(direct(0.80, 0.0001), 4);
  for (BoundId id : kAllBounds) EXPECT_FALSE(far.get(id).applicable);
}

TEST(FullCertificate, JsonShape) {
  const auto j = to_json(full_certificate(direct(0.74924, 0.00011), 4));
  for (const char* key : {"d", "asp", "hs_lower", "norm_sum_lower", "smax_upper", "incompat_upper",
                          "entropic_lower", "ideal_refs", "applicability"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_DOUBLE_EQ(j["ideal_refs"]["hs"].get<double>(), 4.0);
  EXPECT_DOUBLE_EQ(j["ideal_refs"]["norm"].get<double>(), 4.0);
  EXPECT_NEAR(j["ideal_refs"]["eta"].get<double>(), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(j["ideal_refs"]["entropy"].get<double>(), 2.0);
}

TEST(MinAspForNontrivialEta, Bisection) {
  const double p4 = min_asp_for_nontrivial_eta(4);
  EXPECT_GT(p4, norm_sum_threshold(4));
  EXPECT_LT(p4, 0.75);
  auto eta_raw = [](double p, int d) { return incompatibility_expression(bound_norm_sum(p, d), bound_smax(p, d), d); };
  EXPECT_LT(eta_raw(p4 + 1e-6, 4), 1.0);
  bool trivial_below = false;
  try {
    trivial_below = eta_raw(p4 - 1e-6, 4) >= 1.0;
  } catch (const Error&) {
    trivial_below = true;
  }
  EXPECT_TRUE(trivial_below);
  const double p2 = min_asp_for_nontrivial_eta(2);
  EXPECT_TRUE(std::isfinite(p2));
  EXPECT_LT(p2, quantum_optimum(2));
}

}  // namespace
}  // namespace mubcert
