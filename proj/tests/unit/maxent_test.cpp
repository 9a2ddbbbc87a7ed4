#include <cmath>

#include <gtest/gtest.h>

#include "arealaw/errors.hpp"
#include "arealaw/maxent.hpp"

using namespace arealaw;

namespace {

MaxEntInputs chain_inputs(double size) {
  MaxEntInputs in;
  in.constants.c1 = 1.0;
  in.constants.xi = 1.0;
  in.constants.nu = 2.0;
  in.constants.gamma = 0.5;
  in.constants.eta = 0.1;
  in.size_R = size;
  in.boundary_R = 2.0;
  return in;
}

}  // namespace

TEST(MaxEntTheta, Substitution) {
  auto in = chain_inputs(std::exp(1.0));
  EXPECT_NEAR(maxent_theta(in, 3), 1.0, 1e-14);
  EXPECT_NEAR(maxent_theta(in, 5), 0.25, 1e-14);
  EXPECT_THROW(maxent_theta(in, 1), DomainError);
}

TEST(MaxEntTheta, LogThetaArbitraryShape) {
  auto in = chain_inputs(100.0);
  const double w = 50.0;
  const double expected = 2.0 * 2.0 * (0.5 * 6.0 + 0.1) * std::log(100.0 * w) + 2.0 * w * std::log(2.0);
  EXPECT_NEAR(maxent_log_Theta(in, 10), expected, 1e-10);
}

TEST(MaxEntTheta, LogThetaCubicShape) {
  auto in = chain_inputs(100.0);
  in.shape = RegionShape::cubic;
  in.side = 100.0;
  const double f = 1.4;
  const double expected = 2.0 * 3.1 * std::log(100.0 * f) + 2.0 * 20.0 * std::log(2.0);
  EXPECT_NEAR(maxent_log_Theta(in, 10), expected, 1e-10);
  in.side = 0.0;
  EXPECT_THROW(maxent_log_Theta(in, 10), ParameterError);
}

TEST(MaxEntBlocks, StartAndEnd) {
  const auto b = maxent_blocks(chain_inputs(100.0));
  EXPECT_EQ(b.l0, 10);
  EXPECT_EQ(b.l_max, 10 + 47);
  EXPECT_EQ(b.blocks.size(), 48u);
  const auto small = maxent_blocks(chain_inputs(3.0));
  EXPECT_EQ(small.l0, 5);
}

TEST(MaxEntBlocks, MassesFormAFeasibleDistribution) {
  for (auto shape : {RegionShape::arbitrary, RegionShape::cubic}) {
    auto in = chain_inputs(200.0);
    in.shape = shape;
    in.side = 200.0;
    const auto b = maxent_blocks(in);
    std::vector<double> masses;
    double total = 0.0;
    for (const auto& blk : b.blocks) {
      masses.push_back(blk.mass);
      total += blk.mass;
      EXPECT_GE(blk.mass, 0.0);
      EXPECT_LE(blk.log_size, blk.log_Theta + 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_GE(b.constraint_margin, -1e-12);
    EXPECT_TRUE(maxent_feasible(b, masses));
    EXPECT_LE(b.entropy, b.derivation_bound + 1e-12);
    EXPECT_NEAR(b.remainder, b.derivation_bound - b.leading, 1e-12);
    EXPECT_GE(b.truc_margin, 0.0);
  }
}

TEST(MaxEntBlocks, LateMassIsInfeasible) {
  const auto b = maxent_blocks(chain_inputs(100.0));
  std::vector<double> masses(b.blocks.size(), 0.0);
  masses.back() = 1.0;
  EXPECT_FALSE(maxent_feasible(b, masses));
  masses.back() = 0.5;
  EXPECT_FALSE(maxent_feasible(b, masses));
  EXPECT_FALSE(maxent_feasible(b, {1.0}));
}

TEST(MaxEntBlocks, FeasibleSamplesNeverBeatTheBlocks) {
  const auto b = maxent_blocks(chain_inputs(100.0));
  const auto s = sample_feasible(b, 300, 5);
  EXPECT_EQ(s.accepted, 300);
  EXPECT_GE(s.min_gap, -1e-10);
  EXPECT_LE(s.max_entropy, b.entropy + 1e-10);
  const auto again = sample_feasible(b, 300, 5);
  EXPECT_EQ(again.max_entropy, s.max_entropy);
}

TEST(MaxEntBlocks, ParameterErrors) {
  auto in = chain_inputs(100.0);
  in.constants.nu = 1.0;
  EXPECT_THROW(maxent_blocks(in), ParameterError);
  in = chain_inputs(1.0);
  EXPECT_THROW(maxent_blocks(in), DomainError);
  in = chain_inputs(100.0);
  in.l_max = 10;
  EXPECT_THROW(maxent_blocks(in), ParameterError);
  in = chain_inputs(100.0);
  in.constants.c1 = 1e3;
  EXPECT_THROW(maxent_blocks(in), DomainError);
}
