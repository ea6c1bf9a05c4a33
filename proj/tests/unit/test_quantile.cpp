#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <stdexcept>

#include "nebv/quantile.hpp"
#include "nebv/types.hpp"

using namespace nebv;

namespace {

double boost_normal_upper(double q) {
  return boost::math::quantile(boost::math::complement(boost::math::normal(), q));
}

double boost_t_upper(double q, double df) {
  return boost::math::quantile(boost::math::complement(boost::math::students_t(df), q));
}

}  // namespace

TEST(NormalQuantile, FrozenValues) {
  EXPECT_EQ(normal_quantile(0.5), 0.0);
  EXPECT_NEAR(normal_quantile(0.025), 1.959963984540054, 1e-9);
  EXPECT_NEAR(normal_quantile(0.05), 1.6448536269514722, 1e-9);
}

TEST(NormalQuantile, MatchesBoostAcrossTails) {
  for (double q : {1e-300, 1e-100, 1e-20, 1e-10, 8.3e-6, 1e-3, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1 - 1e-10}) {
    EXPECT_NEAR(normal_quantile(q), boost_normal_upper(q), 1e-9 * std::max(1.0, std::abs(boost_normal_upper(q))))
        << "q=" << q;
  }
}

TEST(NormalQuantile, AntisymmetricAndDecreasing) {
  double prev = INFINITY;
  for (int i = 1; i < 1000; ++i) {
    const double q = i / 1000.0;
    const double z = normal_quantile(q);
    EXPECT_NEAR(z + normal_quantile(1.0 - q), 0.0, 1e-9);
    EXPECT_LT(z, prev);
    prev = z;
  }
}

TEST(NormalQuantile, RejectsOutsideUnitInterval) {
  EXPECT_THROW(normal_quantile(0.0), std::invalid_argument);
  EXPECT_THROW(normal_quantile(1.0), std::invalid_argument);
  EXPECT_THROW(normal_quantile(-0.1), std::invalid_argument);
  EXPECT_THROW(normal_quantile(NAN), std::invalid_argument);
}

TEST(NormalUpperTail, MatchesBoost) {
  for (double z : {-8.0, -2.0, 0.0, 0.5, 1.96, 5.0, 10.0, 30.0}) {
    const double expected = boost::math::cdf(boost::math::complement(boost::math::normal(), z));
    EXPECT_NEAR(normal_upper_tail(z) / expected, 1.0, 1e-12) << z;
  }
}

TEST(IncompleteBeta, MatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0, 200.0}) {
    for (double b : {0.5, 1.0, 3.0, 50.0}) {
      for (double x : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999}) {
        const double expected = boost::math::ibeta(a, b, x);
        EXPECT_NEAR(incomplete_beta(a, b, x), expected, 1e-12 + 1e-10 * expected)
            << "a=" << a << " b=" << b << " x=" << x;
      }
    }
  }
  EXPECT_EQ(incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(2.0, 3.0, 1.0), 1.0);
}

TEST(StudentTQuantile, FrozenValues) {
  EXPECT_EQ(student_t_quantile(0.5, DegreesOfFreedom(7)), 0.0);
  EXPECT_NEAR(student_t_quantile(0.025, DegreesOfFreedom(1)), 12.706204736174698, 1e-7);
  EXPECT_NEAR(student_t_quantile(0.025, DegreesOfFreedom(4)), 2.7764451051977934, 1e-8);
  EXPECT_NEAR(student_t_quantile(0.025, DegreesOfFreedom(1000000)), 1.95996, 1e-4);
}

TEST(StudentTQuantile, MatchesBoostRelative1e8) {
  for (int k : {1, 2, 3, 4, 5, 8, 10, 30, 100, 1000}) {
    for (double q : {1e-12, 0.05 / 6000, 1e-4, 0.001, 0.025, 0.1, 0.4, 0.5, 0.6, 0.9, 0.975}) {
      const double expected = boost_t_upper(q, k);
      const double got = student_t_quantile(q, DegreesOfFreedom(k));
      if (expected == 0.0) {
        EXPECT_NEAR(got, 0.0, 1e-12);
      } else {
        EXPECT_NEAR(got / expected, 1.0, 1e-8) << "k=" << k << " q=" << q;
      }
    }
  }
}

TEST(StudentTQuantile, RoundTripsThroughUpperTail) {
  for (double df : {1.0, 2.0, 3.5, 9.0, 60.0}) {
    for (double q : {1e-8, 1e-3, 0.2, 0.5, 0.8}) {
      const double t = student_t_quantile(q, df);
      EXPECT_NEAR(student_t_upper_tail(t, df) / q, 1.0, 1e-9) << df << " " << q;
    }
  }
}

TEST(StudentTQuantile, StrictlyDecreasing) {
  double prev = INFINITY;
  for (int i = 1; i < 200; ++i) {
    const double t = student_t_quantile(i / 200.0, DegreesOfFreedom(5));
    EXPECT_LT(t, prev);
    prev = t;
  }
}

TEST(StudentTQuantile, RejectsBadArguments) {
  EXPECT_THROW(student_t_quantile(0.0, DegreesOfFreedom(3)), std::invalid_argument);
  EXPECT_THROW(student_t_quantile(1.0, DegreesOfFreedom(3)), std::invalid_argument);
  EXPECT_THROW(DegreesOfFreedom(0), std::invalid_argument);
}
