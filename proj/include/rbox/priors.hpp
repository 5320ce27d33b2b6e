// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-angle prior box generation over a detector feature grid, with the
// builtin per-task configurations (ship / vehicle / airplane).

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rbox/geometry.hpp"

namespace rbox {

enum class Task { ship = 0, vehicle = 1, airplane = 2 };

inline int class_id_of(Task t) { return static_cast<int>(t); }

inline std::string task_name(Task t) {
  switch (t) {
    case Task::ship: return "ship";
    case Task::vehicle: return "vehicle";
    case Task::airplane: return "airplane";
  }
  throw std::invalid_argument("task_name: bad task");
}

inline Task parse_task(std::string_view name) {
  if (name == "ship") return Task::ship;
  if (name == "vehicle") return Task::vehicle;
  if (name == "airplane") return Task::airplane;
  throw std::invalid_argument("unknown task \"" + std::string(name) +
                              "\" (expected ship, vehicle or airplane)");
}

struct PriorSize {
  double w = 0.0;
  double h = 0.0;
};

struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct PriorConfig {
  std::string class_name;
  std::vector<PriorSize> sizes;   // pixels, width along the orientation axis
  std::vector<double> angles;     // degrees, each in [0, angle_period)
  GridShape grid{38, 38};
  double step = 300.0 / 38.0;     // pixels per grid cell
  double input_size = 300.0;      // square tile edge, pixels
  AnglePeriod angle_period = AnglePeriod::deg360;

  std::size_t prior_count() const {
    return grid.rows * grid.cols * sizes.size() * angles.size();
  }
};

inline void validate(const PriorConfig& c) {
  if (c.sizes.empty()) throw std::invalid_argument("PriorConfig: sizes empty");
  if (c.angles.empty()) throw std::invalid_argument("PriorConfig: angles empty");
  if (c.grid.rows == 0 || c.grid.cols == 0) throw std::invalid_argument("PriorConfig: empty grid");
  if (!(c.step > 0.0) || !(c.input_size > 0.0)) {
    throw std::invalid_argument("PriorConfig: step and input_size must be positive");
  }
  for (const PriorSize& s : c.sizes) {
    if (!(s.w > 0.0) || !(s.h > 0.0)) throw std::invalid_argument("PriorConfig: size fields must be positive");
  }
  for (double a : c.angles) {
    if (!(a >= 0.0) || a >= period_degrees(c.angle_period)) {
      throw std::invalid_argument("PriorConfig: angles must lie in [0, angle_period)");
    }
  }
}

/// Builtin settings: squares grids of 38x38 cells over a 300x300 tile.
/// Ship priors sweep 0:30:150 with a 180-degree period (head/tail
/// indistinct); vehicle and airplane sweep 0:30:330 over the full circle.
inline PriorConfig builtin_config(Task task) {
  PriorConfig c;
  c.class_name = task_name(task);
  c.grid = {38, 38};
  c.input_size = 300.0;
  c.step = 300.0 / 38.0;
  auto sweep = [](double limit) {
    std::vector<double> a;
    for (double d = 0.0; d < limit; d += 30.0) a.push_back(d);
    return a;
  };
  switch (task) {
    case Task::ship:
      c.sizes = {{20, 8}, {40, 14}, {60, 17}, {80, 20}, {100, 25}};
      c.angles = sweep(180.0);
      c.angle_period = AnglePeriod::deg180;
      break;
    case Task::vehicle:
      c.sizes = {{25, 9}};
      c.angles = sweep(360.0);
      c.angle_period = AnglePeriod::deg360;
      break;
    case Task::airplane:
      c.sizes = {{50, 50}, {70, 70}};
      c.angles = sweep(360.0);
      c.angle_period = AnglePeriod::deg360;
      break;
  }
  return c;
}

struct PriorSet {
  std::vector<RBox> priors;  // ordered (row, col, size, angle)
  PriorConfig config;
};

struct PriorLocation {
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t size_index = 0;
  std::size_t angle_index = 0;
};

inline std::size_t index_of(const PriorConfig& c, std::size_t row, std::size_t col,
                            std::size_t size_index, std::size_t angle_index) {
  if (row >= c.grid.rows || col >= c.grid.cols || size_index >= c.sizes.size() ||
      angle_index >= c.angles.size()) {
    throw std::out_of_range("prior index components out of bounds");
  }
  return ((row * c.grid.cols + col) * c.sizes.size() + size_index) * c.angles.size() + angle_index;
}

inline PriorLocation locate(const PriorConfig& c, std::size_t index) {
  if (index >= c.prior_count()) throw std::out_of_range("prior index out of bounds");
  PriorLocation loc;
  loc.angle_index = index % c.angles.size();
  index /= c.angles.size();
  loc.size_index = index % c.sizes.size();
  index /= c.sizes.size();
  loc.col = index % c.grid.cols;
  loc.row = index / c.grid.cols;
  return loc;
}

/// One prior per (cell, size, angle), centered on the cell center.
inline PriorSet generate(const PriorConfig& c) {
  validate(c);
  PriorSet set;
  set.config = c;
  set.priors.reserve(c.prior_count());
  for (std::size_t r = 0; r < c.grid.rows; ++r) {
    const double cy = (static_cast<double>(r) + 0.5) * c.step;
    for (std::size_t col = 0; col < c.grid.cols; ++col) {
      const double cx = (static_cast<double>(col) + 0.5) * c.step;
      for (const PriorSize& s : c.sizes) {
        for (double angle : c.angles) {
          set.priors.push_back(RBox{cx, cy, s.w, s.h, normalize_angle(angle, c.angle_period)});
        }
      }
    }
  }
  return set;
}

}  // namespace rbox
