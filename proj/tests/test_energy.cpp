#include <gtest/gtest.h>

#include <limits>

#include "i2e/energy.hpp"

namespace {

using namespace i2e::energy;

constexpr double uJ = 1e-6;

TEST(Energy, OperationCounts) {
  EXPECT_EQ(n_ops({7, 3, 64, 112, 112}), 118013952u);
  EXPECT_EQ(n_ops({7, 2, 64, 112, 112}), 78675968u);
  EXPECT_EQ(n_ops({1, 1, 1, 1, 1}), 1u);
  EXPECT_THROW(n_ops({0, 1, 1, 1, 1}), std::invalid_argument);
  const auto big = std::numeric_limits<std::uint64_t>::max() / 2;
  EXPECT_THROW(n_ops({1, 1, 1, big, 3}), std::overflow_error);
}

TEST(Energy, FirstLayerValues) {
  const EnergyModel m;
  EXPECT_NEAR(energy_ann(LayerSpec{}, m) / uJ, 542.8641792, 1e-9);
  EXPECT_NEAR(energy_snn({7, 2, 64, 112, 112}, m) / uJ, 28.32334848, 1e-9);
  EXPECT_NEAR(energy_i2e(8, 224, 224, m) / uJ, 0.3612672, 1e-12);
  EXPECT_EQ(energy_i2e(0, 224, 224, m), 0.0);
  EXPECT_NEAR(energy_ann({1, 1, 1, 1, 1}, m), 4.6e-12, 1e-24);
}

TEST(Energy, Comparison) {
  EnergyModel m;
  const auto c = compare_first_layer(LayerSpec{}, m, 224, 224);
  EXPECT_NEAR(c.total() / uJ, 28.68461568, 1e-9);
  EXPECT_NEAR(c.reduction(), 542.8641792 / 28.68461568, 1e-9);
  EXPECT_NEAR(c.reduction_snn_only(), 4.6 * 3 / (0.05 * 8 * 0.9 * 2), 1e-9);

  m.timesteps = 2;
  const auto c2 = compare_first_layer(LayerSpec{}, m, 224, 224);
  EXPECT_NEAR(c2.total() / uJ, 7.17115392, 1e-9);
}

TEST(Energy, LinearityAndScaleInvariance) {
  EnergyModel m;
  LayerSpec s;
  const double base = energy_ann(s, m);
  s.c_out *= 2;
  EXPECT_DOUBLE_EQ(energy_ann(s, m), 2 * base);
  m.firing_rate = 0.0;
  EXPECT_EQ(energy_snn(s, m), 0.0);

  EnergyModel a, b;
  b.e_mac *= 3.0;
  b.e_ac *= 3.0;
  EXPECT_NEAR(compare_first_layer(LayerSpec{}, a, 224, 224).reduction(),
              compare_first_layer(LayerSpec{}, b, 224, 224).reduction(), 1e-12);
}

TEST(Energy, ModelValidation) {
  EnergyModel m;
  m.firing_rate = 1.5;
  EXPECT_THROW(energy_snn(LayerSpec{}, m), std::invalid_argument);
  m = {};
  m.e_ac = 0.0;
  EXPECT_THROW(energy_i2e(8, 1, 1, m), std::invalid_argument);
}

}  // namespace
