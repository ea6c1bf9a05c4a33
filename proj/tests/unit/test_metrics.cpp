#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nebv/metrics.hpp"

using namespace nebv;

TEST(Loss, ZeroAtTruth) {
  for (Loss l : {Loss::kL1, Loss::kL2, Loss::kL3}) EXPECT_EQ(loss_term(0.3, 0.3, l), 0.0);
}

TEST(Loss, DirectArithmetic) {
  EXPECT_DOUBLE_EQ(loss_term(0.05, 0.1, Loss::kL1), 1.0);
  EXPECT_DOUBLE_EQ(loss_term(0.05, 0.1, Loss::kL2), 0.25);
  EXPECT_NEAR(loss_term(std::exp(1.0), 1.0, Loss::kL3), std::exp(1.0) - 2.0, 1e-15);
}

TEST(Loss, ZeroEstimateIsInfiniteNotNan) {
  EXPECT_TRUE(std::isinf(loss_term(0.0, 1.0, Loss::kL1)));
  EXPECT_TRUE(std::isinf(loss_term(0.0, 1.0, Loss::kL3)));
  EXPECT_EQ(loss_term(0.0, 1.0, Loss::kL2), 1.0);
}

TEST(Loss, SumsOverSelection) {
  const std::vector<double> est{1, 0.05, 2}, truth{1, 0.1, 1};
  const std::vector<std::size_t> sel{1, 2};
  EXPECT_DOUBLE_EQ(loss_metrics(est, truth, sel, Loss::kL2), 0.25 + 1.0);
  EXPECT_THROW(loss_metrics(est, truth, std::vector<std::size_t>{5}, Loss::kL1), std::out_of_range);
  EXPECT_THROW(loss_metrics(est, std::vector<double>{1}, sel, Loss::kL1), std::invalid_argument);
}

TEST(Loss, ParsesNames) {
  EXPECT_EQ(parse_loss("L3"), Loss::kL3);
  EXPECT_EQ(to_string(Loss::kL1), "L1");
  EXPECT_THROW(parse_loss("L4"), std::invalid_argument);
}
