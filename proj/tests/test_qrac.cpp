#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mubcert/error.hpp"
#include "mubcert/photonics.hpp"
#include "mubcert/qrac.hpp"
#include "test_util.hpp"

namespace mubcert {
namespace {

TEST(OptimalStates, D4PairFirstState) {
  const auto table = optimal_states(paper_mub_pair_d4());
  const double r = 1.0 / std::sqrt(3.0);
  const CVector expect = (CVector(4) << 0.0, r, r, r).finished();
  EXPECT_LT((table.at(0, 0) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OptimalStates, D4PairAmplitudePattern) {
  const auto table = optimal_states(paper_mub_pair_d4());
  const double r = 1.0 / std::sqrt(3.0);
  for (const auto& psi : table.states) {
    EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
    int zeros = 0;
    int thirds = 0;
    for (int k = 0; k < 4; ++k) {
      const double m = std::abs(psi(k));
      if (m < 1e-12) ++zeros;
      else if (std::abs(m - r) < 1e-12) ++thirds;
    }
    EXPECT_EQ(zeros, 1);
    EXPECT_EQ(thirds, 3);
  }
}

TEST(OptimalStates, RejectsNonMubPair) {
  const auto a = paper_mub_pair_d4().first;
  try {
    optimal_states({a, a, Construction::Custom});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotMub);
  }
}

TEST(Asp, D4PairReachesThreeQuarters) {
  const auto pair = paper_mub_pair_d4();
  EXPECT_NEAR(asp(optimal_states(pair), pair), 0.75, 1e-12);
}

TEST(Asp, MaximallyMixedGivesOneOverD) {
  const auto pair = paper_mub_pair_d4();
  const std::vector<CMatrix> rhos(16, 0.25 * CMatrix::Identity(4, 4));
  EXPECT_NEAR(asp(rhos, pair), 0.25, 1e-15);
}

TEST(Asp, DimensionMismatchThrows) {
  const auto pair = paper_mub_pair_d4();
  const std::vector<CMatrix> rhos(4, 0.5 * CMatrix::Identity(2, 2));
  EXPECT_THROW(asp(rhos, pair), Error);
}

TEST(QuantumOptimum, Values) {
  EXPECT_DOUBLE_EQ(quantum_optimum(4), 0.75);
  EXPECT_NEAR(quantum_optimum(2), 0.8535533905932737, 1e-15);
  EXPECT_NEAR(quantum_optimum(9), 2.0 / 3.0, 1e-15);
}

TEST(BruteForce, MatchesAnalyticOptimum) {
  const auto d4 = paper_mub_pair_d4();
  const auto bf = brute_force_optimal_asp(d4);
  EXPECT_NEAR(bf.value, 0.75, 1e-10);
  EXPECT_NEAR(asp(bf.states, d4), bf.value, 1e-10);
  for (int d = 2; d <= 6; ++d) {
    const auto pair = fourier_mub_pair(d);
    const double analytic = asp(optimal_states(pair), pair);
    EXPECT_NEAR(brute_force_optimal_asp(pair).value, analytic, 1e-10) << d;
    EXPECT_NEAR(analytic, quantum_optimum(d), 1e-10) << d;
  }
  EXPECT_NEAR(brute_force_optimal_asp(fourier_mub_pair(2)).value, 0.853553390593, 1e-12);
}

TEST(BruteForce, IdenticalBases) {
  // lambda_max(A_i + A_j) = 2 on the diagonal and 1 elsewhere -> (d*2 + (d^2-d)*1)/(2 d^2).
  const auto a = paper_mub_pair_d4().first;
  EXPECT_NEAR(brute_force_optimal_asp({a, a, Construction::Custom}).value, 0.625, 1e-12);
}

TEST(BruteForce, EveryTopEigenvalueIsOnePlusInverseRootD) {
  for (int d = 2; d <= 8; ++d) {
    const auto pair = fourier_mub_pair(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const auto sys = eig_hermitian(pair.first.effects[i] + pair.second.effects[j]);
        EXPECT_NEAR(sys.values.front(), 1.0 + 1.0 / std::sqrt(static_cast<double>(d)), 1e-10);
      }
  }
}

TEST(Asp, LinearUnderStateDepolarization) {
  const auto pair = fourier_mub_pair(3);
  const auto table = optimal_states(pair);
  const double ideal = asp(table, pair);
  for (double eta : {0.0, 0.25, 0.6, 0.99, 1.0}) {
    std::vector<CMatrix> rhos;
    for (const auto& psi : table.states) {
      rhos.push_back(eta * projector(psi) + (1.0 - eta) / 3.0 * CMatrix::Identity(3, 3));
    }
    EXPECT_NEAR(asp(rhos, pair), eta * ideal + (1.0 - eta) / 3.0, 1e-14);
  }
}

CountsTable scaled_counts(const std::vector<double>& probs, int d, double per_setting) {
  CountsTable counts(d);
  std::size_t k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int y = 0; y < 2; ++y)
        for (int b = 0; b < d; ++b) counts.at(i, j, y, b) = std::llround(probs[k++] * per_setting);
  return counts;
}

std::vector<double> ideal_probabilities() {
  const auto pair = paper_mub_pair_d4();
  const auto table = optimal_states(pair);
  std::vector<double> probs;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (const auto* m : {&pair.first, &pair.second})
        for (double p : outcome_probabilities(table.at(i, j), *m)) probs.push_back(p);
  return probs;
}

TEST(EstimateAsp, IdealCountsGiveThreeQuarters) {
  const auto counts = scaled_counts(ideal_probabilities(), 4, 1e6);
  const auto est = estimate_asp(counts);
  EXPECT_LT(std::abs(est.value - 0.75), 2.0 * est.sigma + 1e-12);
  EXPECT_EQ(est.n_rounds, counts.total());
  EXPECT_NEAR(static_cast<double>(est.n_rounds), 32e6, 100.0);  // per-cell rounding of p*1e6
  // Binomial sigma: sqrt(p(1-p)/n) averaged over 32 settings of 1e6 each.
  EXPECT_NEAR(est.sigma, std::sqrt(0.75 * 0.25 / 1e6) / std::sqrt(32.0), 1e-9);
}

TEST(EstimateAsp, SingleCorrectRound) {
  CountsTable counts(1);
  counts.at(0, 0, 0, 0) = 1;
  counts.at(0, 0, 1, 0) = 1;
  const auto est = estimate_asp(counts);
  EXPECT_DOUBLE_EQ(est.value, 1.0);
  EXPECT_DOUBLE_EQ(est.at(0, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(est.sigma, 0.0);
}

TEST(EstimateAsp, UniformCountsGiveOneOverD) {
  CountsTable counts(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 4; ++b) counts.at(i, j, y, b) = 250;
  EXPECT_DOUBLE_EQ(estimate_asp(counts).value, 0.25);
}

TEST(EstimateAsp, EmptyCellThrows) {
  CountsTable counts(2);
  counts.at(0, 0, 0, 0) = 3;
  try {
    estimate_asp(counts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCell);
  }
}

TEST(EstimateAsp, FourSigmaCoverageOnSyntheticCounts) {
  const auto probs = ideal_probabilities();
  std::mt19937_64 rng(2718);
  const int trials = 2000;
  int inside = 0;
  for (int t = 0; t < trials; ++t) {
    CountsTable counts(4);
    std::size_t k = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int y = 0; y < 2; ++y) {
          std::discrete_distribution<int> outcome(probs.begin() + k, probs.begin() + k + 4);
          for (int n = 0; n < 400; ++n) ++counts.at(i, j, y, outcome(rng));
          k += 4;
        }
    const auto est = estimate_asp(counts);
    if (std::abs(est.value - 0.75) < 4.0 * est.sigma) ++inside;
  }
  EXPECT_GE(inside, static_cast<int>(std::ceil(0.999 * trials)));
}

TEST(CountsCsv, RoundTripAndValidation) {
  CountsTable counts(4);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 4; ++b) counts.at(i, j, y, b) = rng() % 1000;
  const auto text = counts_to_csv(counts);
  EXPECT_EQ(text.substr(0, 20), "i,j,y,outcome,count\n");
  EXPECT_EQ(parse_counts_csv(text), counts);

  EXPECT_THROW(parse_counts_csv("i,j,y,outcome,count\n1,1,1,1,5\n1,1,1,1,6\n"), Error);
  EXPECT_THROW(parse_counts_csv("a,b\n1,1\n"), Error);
  EXPECT_THROW(parse_counts_csv("i,j,y,outcome,count\n1,1,3,1,5\n"), Error);
  EXPECT_THROW(parse_counts_csv("i,j,y,outcome,count\n1,1,1,1,-5\n"), Error);
  EXPECT_THROW(parse_counts_csv("i,j,y,outcome,count\n1,1,1,x,5\n"), Error);
  EXPECT_THROW(parse_counts_csv(""), Error);
}

}  // namespace
}  // namespace mubcert
