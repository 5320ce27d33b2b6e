// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
#include "rbox/priors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <tuple>

namespace {

using rbox::AnglePeriod;
using rbox::PriorConfig;
using rbox::PriorSet;
using rbox::Task;

TEST(BuiltinConfig, ShipVehicleAirplaneCounts) {
  EXPECT_EQ(rbox::builtin_config(Task::ship).prior_count(), 43320u);      // 1444*5*6
  EXPECT_EQ(rbox::builtin_config(Task::vehicle).prior_count(), 17328u);   // 1444*1*12
  EXPECT_EQ(rbox::builtin_config(Task::airplane).prior_count(), 34656u);  // 1444*2*12
}

TEST(BuiltinConfig, ShipSettings) {
  const PriorConfig c = rbox::builtin_config(Task::ship);
  ASSERT_EQ(c.sizes.size(), 5u);
  EXPECT_DOUBLE_EQ(c.sizes[0].w, 20);
  EXPECT_DOUBLE_EQ(c.sizes[0].h, 8);
  EXPECT_DOUBLE_EQ(c.sizes[4].w, 100);
  EXPECT_DOUBLE_EQ(c.sizes[4].h, 25);
  ASSERT_EQ(c.angles.size(), 6u);
  EXPECT_DOUBLE_EQ(c.angles.back(), 150);
  EXPECT_EQ(c.angle_period, AnglePeriod::deg180);
  EXPECT_EQ(c.grid.rows, 38u);
  EXPECT_EQ(c.grid.cols, 38u);
  EXPECT_DOUBLE_EQ(c.step, 300.0 / 38.0);
}

TEST(BuiltinConfig, VehicleAndAirplaneSettings) {
  const PriorConfig v = rbox::builtin_config(Task::vehicle);
  ASSERT_EQ(v.sizes.size(), 1u);
  EXPECT_DOUBLE_EQ(v.sizes[0].w, 25);
  EXPECT_DOUBLE_EQ(v.sizes[0].h, 9);
  EXPECT_EQ(v.angles.size(), 12u);
  EXPECT_EQ(v.angle_period, AnglePeriod::deg360);

  const PriorConfig a = rbox::builtin_config(Task::airplane);
  ASSERT_EQ(a.sizes.size(), 2u);
  EXPECT_DOUBLE_EQ(a.sizes[1].w, 70);
  EXPECT_EQ(a.angles.size(), 12u);
}

TEST(ParseTask, UnknownTaskThrows) {
  EXPECT_EQ(rbox::parse_task("ship"), Task::ship);
  EXPECT_THROW(rbox::parse_task("boat"), std::invalid_argument);
}

TEST(Generate, CountsMatchClosedForm) {
  for (Task t : {Task::ship, Task::vehicle, Task::airplane}) {
    const PriorConfig c = rbox::builtin_config(t);
    EXPECT_EQ(rbox::generate(c).priors.size(), c.prior_count());
  }
}

TEST(Generate, FirstVehiclePriorSitsOnFirstCellCenter) {
  const PriorSet set = rbox::generate(rbox::builtin_config(Task::vehicle));
  const rbox::RBox& p = set.priors.front();
  EXPECT_NEAR(p.cx, 150.0 / 38.0, 1e-12);  // (0 + 0.5) * 300/38 ~ 3.947
  EXPECT_NEAR(p.cy, 150.0 / 38.0, 1e-12);
  EXPECT_DOUBLE_EQ(p.w, 25);
  EXPECT_DOUBLE_EQ(p.h, 9);
  EXPECT_DOUBLE_EQ(p.theta, 0);
}

TEST(Generate, SingleCellConfig) {
  PriorConfig c;
  c.class_name = "one";
  c.sizes = {{10, 4}};
  c.angles = {0.0};
  c.grid = {1, 1};
  c.input_size = 300.0;
  c.step = 300.0;
  const PriorSet set = rbox::generate(c);
  ASSERT_EQ(set.priors.size(), 1u);
  EXPECT_DOUBLE_EQ(set.priors[0].cx, 150.0);
  EXPECT_DOUBLE_EQ(set.priors[0].cy, 150.0);
}

TEST(Generate, CentersStrictlyInsideTile) {
  for (Task t : {Task::ship, Task::vehicle, Task::airplane}) {
    const PriorSet set = rbox::generate(rbox::builtin_config(t));
    for (const rbox::RBox& p : set.priors) {
      ASSERT_GT(p.cx, 0.0);
      ASSERT_LT(p.cx, 300.0);
      ASSERT_GT(p.cy, 0.0);
      ASSERT_LT(p.cy, 300.0);
    }
  }
}

TEST(Generate, NoTwoPriorsIdentical) {
  const PriorSet set = rbox::generate(rbox::builtin_config(Task::ship));
  std::set<std::tuple<double, double, double, double, double>> seen;
  for (const rbox::RBox& p : set.priors) {
    EXPECT_TRUE(seen.emplace(p.cx, p.cy, p.w, p.h, p.theta).second);
  }
  EXPECT_EQ(seen.size(), set.priors.size());
}

TEST(Indexing, RoundTripBijection) {
  const PriorConfig c = rbox::builtin_config(Task::airplane);
  std::size_t flat = 0;
  for (std::size_t r = 0; r < c.grid.rows; ++r) {
    for (std::size_t col = 0; col < c.grid.cols; ++col) {
      for (std::size_t s = 0; s < c.sizes.size(); ++s) {
        for (std::size_t a = 0; a < c.angles.size(); ++a, ++flat) {
          ASSERT_EQ(rbox::index_of(c, r, col, s, a), flat);
          const rbox::PriorLocation loc = rbox::locate(c, flat);
          ASSERT_EQ(loc.row, r);
          ASSERT_EQ(loc.col, col);
          ASSERT_EQ(loc.size_index, s);
          ASSERT_EQ(loc.angle_index, a);
        }
      }
    }
  }
  EXPECT_EQ(flat, c.prior_count());
}

TEST(Indexing, EndpointsAndBounds) {
  const PriorConfig c = rbox::builtin_config(Task::ship);
  EXPECT_EQ(rbox::index_of(c, 0, 0, 0, 0), 0u);
  EXPECT_EQ(rbox::index_of(c, 37, 37, 4, 5), c.prior_count() - 1);
  EXPECT_THROW(rbox::index_of(c, 38, 0, 0, 0), std::out_of_range);
  EXPECT_THROW(rbox::locate(c, c.prior_count()), std::out_of_range);
}

TEST(Validate, RejectsBadConfigs) {
  PriorConfig c = rbox::builtin_config(Task::ship);
  c.angles = {185.0};  // outside [0, 180)
  EXPECT_THROW(rbox::validate(c), std::invalid_argument);
  c = rbox::builtin_config(Task::ship);
  c.sizes.clear();
  EXPECT_THROW(rbox::validate(c), std::invalid_argument);
}

// generation order is (row, col, size, angle): locate() agrees with the
// generated boxes themselves
TEST(Generate, IndexArithmeticMatchesBoxes) {
  const PriorConfig c = rbox::builtin_config(Task::ship);
  const PriorSet set = rbox::generate(c);
  for (std::size_t idx : {std::size_t{0}, std::size_t{12345}, c.prior_count() - 1}) {
    const rbox::PriorLocation loc = rbox::locate(c, idx);
    const rbox::RBox& p = set.priors[idx];
    EXPECT_DOUBLE_EQ(p.cx, (static_cast<double>(loc.col) + 0.5) * c.step);
    EXPECT_DOUBLE_EQ(p.cy, (static_cast<double>(loc.row) + 0.5) * c.step);
    EXPECT_DOUBLE_EQ(p.w, c.sizes[loc.size_index].w);
    EXPECT_DOUBLE_EQ(p.theta, c.angles[loc.angle_index]);
  }
}

}  // namespace
