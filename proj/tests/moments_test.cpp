#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "nuttall/moments.hpp"
#include "nuttall/quadrature.hpp"
#include "oracles.hpp"

using nuttall::MomentQuery;
using nuttall::consistency_deviation;
using nuttall::marcum_q;
using nuttall::nuttall_q_homogeneous;
using nuttall::nuttall_q_ladder;
using nuttall::nuttall_q_series;

namespace {

double series(double eta, double mu, double x, double y) {
  const auto s = nuttall_q_series({eta, mu, x, y});
  EXPECT_TRUE(s.converged);
  return s.value;
}

}  // namespace

TEST(Series, TableOneSamples) {
  EXPECT_LE(oracle::rel(series(1, 1, 0.1, 1.5), 0.6644091427683566), 5e-14);
  EXPECT_LE(oracle::rel(series(50, 30, 5, 10), 1.1734657613338925e89), 5e-14);
}

TEST(Series, AnalyticReductions) {
  EXPECT_EQ(series(0, 2, 3, 0), 1.0);
  EXPECT_NEAR(series(2, 1, 0, 1), 5.0 * std::exp(-1.0), 4e-16);
  // y = 0 with eta > 0: e^{-x} sum x^n/n! (mu)_eta-ratio; eta = 1 gives mu + x.
  EXPECT_NEAR(series(1, 2.5, 3.0, 0.0), 5.5, 1e-14);
}

TEST(Series, OutcomeMetadata) {
  const auto s = nuttall_q_series({5, 10, 5, 10}, 1e-12, 10000);
  EXPECT_TRUE(s.converged);
  EXPECT_LE(s.est_error, 1e-12);
  EXPECT_GT(s.terms_used, 5u);
  EXPECT_NEAR(s.scaled.value(), s.value, 0.0);

  const auto capped = nuttall_q_series({5, 10, 5, 10}, 1e-15, 4);
  EXPECT_FALSE(capped.converged);
  EXPECT_EQ(capped.terms_used, 4u);
}

TEST(Series, RejectsInvalidArguments) {
  EXPECT_THROW(nuttall_q_series({-1, 1, 1, 1}), std::domain_error);
  EXPECT_THROW(nuttall_q_series({1, 0, 1, 1}), std::domain_error);
  EXPECT_THROW(nuttall_q_series({1, 1, -1, 1}), std::domain_error);
  EXPECT_THROW(nuttall_q_series({1, 1, 1, -1}), std::domain_error);
  EXPECT_THROW(nuttall_q_series({1, 1, 1, 1}, 1e-3), std::domain_error);
  EXPECT_THROW(nuttall_q_series({1, 1, 1, 1}, 1e-12, 0), std::domain_error);
}

TEST(Series, LimitAtSmallX) {
  for (double eta : {1.0, 4.0, 2.5}) {
    for (double mu : {1.0, 3.5}) {
      const double y = 2.0;
      const double closed = nuttall::gamma_shape_ratio(eta, mu).value() * nuttall::gamma_ratio_q(eta + mu, y);
      EXPECT_LE(oracle::rel(series(eta, mu, 1e-8, y), closed), 1e-6);
    }
  }
}

TEST(Series, RealEtaAgainstQuadrature) {
  for (double eta : {0.5, 2.25}) {
    const MomentQuery q{eta, 3.5, 2.0, 4.0};
    const auto quad = nuttall::nuttall_q_quadrature(q);
    ASSERT_TRUE(quad.converged);
    EXPECT_LE(oracle::rel(series(q.eta, q.mu, q.x, q.y), quad.value), 1e-10);
  }
}

TEST(Marcum, Examples) {
  EXPECT_EQ(marcum_q(4, 7, 0), 1.0);
  EXPECT_NEAR(marcum_q(1, 0, 2), 0.1353352832366127, 2e-16);
  const auto quad = nuttall::nuttall_q_quadrature({0, 10, 1.2, 5});
  EXPECT_LE(oracle::rel(marcum_q(10, 1.2, 5), quad.value), 1e-10);
  EXPECT_NEAR(nuttall::marcum_p(10, 1.2, 5) + marcum_q(10, 1.2, 5), 1.0, 0.0);
}

TEST(Marcum, ReductionOfSeries) {
  for (double mu : {0.5, 1.0, 7.3, 40.0}) {
    for (double x : {0.0, 0.4, 9.0, 30.0}) {
      EXPECT_NEAR(marcum_q(mu, x, 0.0), 1.0, 1e-14);
      for (double y : {0.3, 5.0, 25.0}) {
        const double q = marcum_q(mu, x, y);
        EXPECT_EQ(q, nuttall_q_series({0.0, mu, x, y}).value);
        EXPECT_GE(q, 0.0);
        EXPECT_LE(q, 1.0);
      }
    }
  }
}

TEST(Ladder, ZeroLowerLimitGivesOnes) {
  const auto t = nuttall_q_ladder(0, 1.0, 12, 4.0, 0.0);
  for (double v : t.values) EXPECT_EQ(v, 1.0);
}

TEST(Ladder, TableTwoPoint) {
  const auto t = nuttall_q_ladder(2, 1.0, 10, 2.0, 3.0);
  EXPECT_LE(oracle::rel(t.at(2, 9), series(2, 10, 2, 3)), 1e-14);
}

TEST(Ladder, MatchesSeriesEverywhere) {
  const auto t = nuttall_q_ladder(3, 1.0, 25, 1.2, 5.0);
  ASSERT_EQ(t.values.size(), 4u * 25u);
  EXPECT_EQ(t.seed_method, nuttall::SeedMethod::marcum_row_series_column);
  for (std::size_t e = 0; e <= 3; ++e) {
    for (std::size_t m = 0; m < 25; ++m) {
      const double v = t.at(e, m);
      ASSERT_TRUE(std::isfinite(v));
      ASSERT_GE(v, 0.0);
      if (e == 0) {
        ASSERT_LE(v, 1.0);
      }
      EXPECT_LE(oracle::rel(v, series(e, 1.0 + m, 1.2, 5.0)), 1e-12) << e << " " << m;
    }
  }
}

TEST(Ladder, RealMuStart) {
  const auto t = nuttall_q_ladder(2, 0.5, 8, 3.0, 2.0);
  EXPECT_LE(oracle::rel(t.at(2, 7), series(2, 7.5, 3.0, 2.0)), 1e-12);
}

TEST(Ladder, RejectsZeroX) {
  EXPECT_THROW(nuttall_q_ladder(2, 1.0, 5, 0.0, 3.0), std::domain_error);
  EXPECT_THROW(nuttall_q_ladder(2, 1.0, 0, 1.0, 3.0), std::domain_error);
}

TEST(Homogeneous, TableTwoRows) {
  const auto t = nuttall::nuttall_q_homogeneous_table(2, 1.0, 60, 2.0, 3.0);
  for (int n : {10, 60}) {
    const double rec = t.at(2, n - 1);
    EXPECT_LE(std::abs(1.0 - series(2, n, 2, 3) / rec), 1e-13) << n;
  }
}

TEST(Homogeneous, DegeneratesAtZeroLowerLimit) {
  const double x = 3.0;
  std::vector<double> prev;
  for (int m = 1; m <= 10; ++m) prev.push_back(marcum_q(m, x, 0.0));
  const auto row = nuttall_q_homogeneous(1, prev, series(1, 1, x, 0), series(1, 2, x, 0), x, 0.0, 1.0, 10);
  ASSERT_EQ(row.size(), 10u);
  for (int m = 1; m <= 10; ++m) {
    EXPECT_LE(oracle::rel(row[m - 1], series(1, m, x, 0)), 1e-12) << m;
    if (m >= 3) {
      EXPECT_EQ(row[m - 1], row[m - 2] + prev[m - 1]);
    }
  }
}

TEST(Homogeneous, RejectsBadInput) {
  const std::vector<double> prev(5, 1.0);
  EXPECT_THROW(nuttall_q_homogeneous(1, prev, 1, 1, 0.0, 1.0, 1.0, 5), std::domain_error);
  EXPECT_THROW(nuttall_q_homogeneous(0, prev, 1, 1, 1.0, 1.0, 1.0, 5), std::domain_error);
  EXPECT_THROW(nuttall_q_homogeneous(1, prev, 1, 1, 1.0, 1.0, 1.0, 6), std::domain_error);
}

TEST(Consistency, Examples) {
  EXPECT_LE(consistency_deviation({1, 1, 0.1, 1.5}), 1e-12);
  EXPECT_LE(consistency_deviation({5, 10, 5, 10}), 1e-12);
  EXPECT_LE(consistency_deviation({1, 2, 2, 0}), 1e-14);
  EXPECT_THROW(consistency_deviation({1.5, 2, 2, 1}), std::domain_error);
  EXPECT_THROW(consistency_deviation({0, 2, 2, 1}), std::domain_error);
}

TEST(Consistency, LimitFormAtZeroX) {
  for (double y : {0.5, 3.0, 12.0}) EXPECT_LE(consistency_deviation({3, 2.5, 0.0, y}), 1e-13);
}

TEST(Properties, PositiveDecreasingInYNonDecreasingInX) {
  for (double eta : {1.0, 7.0, 30.0}) {
    for (double mu : {1.0, 12.5, 45.0}) {
      for (double x = 0.1; x <= 20.0; x += 2.5) {
        double prev = series(eta, mu, x, 0.1);
        long double prev_density = oracle::nuttall_integrand(eta, mu, x, 0.1L);
        for (double y = 0.9; y <= 20.0; y += 0.8) {
          const double v = series(eta, mu, x, y);
          const long double density = oracle::nuttall_integrand(eta, mu, x, y);
          ASSERT_GT(v, 0.0);
          // The integrand is unimodal, so its smaller end value bounds the drop.
          ASSERT_TRUE(oracle::falls(prev, v, 0.8L * std::min(prev_density, density)))
              << eta << " " << mu << " " << x << " " << y;
          prev = v;
          prev_density = density;
        }
      }
      for (double y = 0.1; y <= 20.0; y += 2.5) {
        double prev = 0.0;
        for (double x = 0.1; x <= 20.0; x += 0.8) {
          const double v = series(eta, mu, x, y);
          ASSERT_GE(v, prev) << eta << " " << mu << " " << x << " " << y;
          prev = v;
        }
      }
    }
  }
}

TEST(Properties, MethodsAgreeOnRegionGrid) {
  // eta, mu in {1, 6, ..., 46}; x, y in 5 points of [0.1, 20].
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double x = 0.1 + (20.0 - 0.1) * i / 4.0;
    for (int j = 0; j < 5; ++j) {
      const double y = 0.1 + (20.0 - 0.1) * j / 4.0;
      const auto ladder = nuttall_q_ladder(46, 1.0, 46, x, y);
      const auto homog = nuttall::nuttall_q_homogeneous_table(46, 1.0, 46, x, y);
      for (int e = 1; e <= 46; e += 5) {
        for (int m = 1; m <= 46; m += 5) {
          const double s = series(e, m, x, y);
          const double l = ladder.at(e, m - 1);
          const double h = homog.at(e, m - 1);
          worst = std::max({worst, oracle::rel(l, s), oracle::rel(h, s), oracle::rel(h, l)});
        }
      }
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Properties, ConsistencyOverRegion) {
  double worst = 0.0;
  for (int e = 1; e <= 50; e += 7)
    for (double mu = 1.0; mu <= 50.0; mu += 7.1)
      for (double x = 0.1; x <= 20.0; x += 3.3)
        for (double y = 0.1; y <= 20.0; y += 3.3) worst = std::max(worst, consistency_deviation({double(e), mu, x, y}));
  EXPECT_LE(worst, 1e-12);
}
