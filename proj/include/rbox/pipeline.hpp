// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Pyramid/tiling inference plumbing: rescale, split into overlapped tiles,
// run a pluggable per-tile detector, map detections back to global
// coordinates, and suppress duplicates across tiles and scales.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbox/image.hpp"
#include "rbox/nms.hpp"

namespace rbox {

inline constexpr int kDefaultTileSize = 300;
inline constexpr double kDefaultTileOverlap = 1.0 / 3.0;

/// One tile of the plan: a rectangle in scaled-image pixels.
struct Tile {
  std::size_t scale_index = 0;
  double scale = 1.0;
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

struct ScalePlan {
  double scale = 1.0;
  int width = 0;   // scaled image size
  int height = 0;
  std::vector<int> origins_x;
  std::vector<int> origins_y;
  std::vector<Tile> tiles;  // row-major
};

struct TilePlan {
  int tile_size = kDefaultTileSize;
  double overlap = kDefaultTileOverlap;
  std::vector<ScalePlan> scales;

  std::size_t tile_count() const {
    std::size_t n = 0;
    for (const ScalePlan& s : scales) n += s.tiles.size();
    return n;
  }
};

/// Per-tile detector contract: returns detections in tile-local
/// coordinates, each lying within the tile bounds expanded by one box
/// extent. Stands in for the per-tile network.
using TileDetector = std::function<std::vector<Detection>(const Tile&)>;

namespace detail {

inline std::vector<int> tile_origins(int image_len, int tile, int stride) {
  if (image_len <= tile) return {0};
  std::vector<int> xs;
  for (int x = 0; x + tile < image_len; x += stride) xs.push_back(x);
  xs.push_back(image_len - tile);
  return xs;
}

}  // namespace detail

/// Pyramid scales defaulting to powers of 1/2 while the shorter scaled side
/// still fits a full tile.
inline std::vector<double> default_scales(int width, int height, int tile_size = kDefaultTileSize) {
  std::vector<double> scales;
  double s = 1.0;
  scales.push_back(s);
  while (static_cast<double>(std::min(width, height)) * (s / 2.0) >= tile_size) {
    s /= 2.0;
    scales.push_back(s);
  }
  return scales;
}

/// Tile origins at stride = tile_size * (1 - overlap), the final origin
/// clamped so tiles never leave the image; images smaller than one tile get
/// a single tile at the origin.
inline TilePlan plan(int width, int height, std::span<const double> scales,
                     int tile_size = kDefaultTileSize, double overlap = kDefaultTileOverlap) {
  if (width < 1 || height < 1) throw std::invalid_argument("plan: image size must be >= 1");
  if (tile_size < 1) throw std::invalid_argument("plan: tile_size must be >= 1");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw std::invalid_argument("plan: overlap must lie in [0, 1)");
  if (scales.empty()) throw std::invalid_argument("plan: need at least one scale");

  const int stride = std::max(1, static_cast<int>(std::llround(tile_size * (1.0 - overlap))));
  TilePlan out;
  out.tile_size = tile_size;
  out.overlap = overlap;
  out.scales.reserve(scales.size());
  for (std::size_t si = 0; si < scales.size(); ++si) {
    const double s = scales[si];
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("plan: scales must be positive");
    ScalePlan sp;
    sp.scale = s;
    sp.width = std::max(1, static_cast<int>(std::llround(width * s)));
    sp.height = std::max(1, static_cast<int>(std::llround(height * s)));
    sp.origins_x = detail::tile_origins(sp.width, tile_size, stride);
    sp.origins_y = detail::tile_origins(sp.height, tile_size, stride);
    for (int oy : sp.origins_y) {
      for (int ox : sp.origins_x) {
        sp.tiles.push_back(Tile{si, s, ox, oy, std::min(tile_size, sp.width),
                                std::min(tile_size, sp.height)});
      }
    }
    out.scales.push_back(std::move(sp));
  }
  return out;
}

/// Tile-local detection -> global image coordinates.
inline Detection to_global(const Detection& d, const Tile& t) {
  Detection g = d;
  g.box.cx = (d.box.cx + t.x) / t.scale;
  g.box.cy = (d.box.cy + t.y) / t.scale;
  g.box.w = d.box.w / t.scale;
  g.box.h = d.box.h / t.scale;
  return g;
}

/// Global box -> tile-local coordinates.
inline RBox to_tile(const RBox& b, const Tile& t) {
  return RBox{b.cx * t.scale - t.x, b.cy * t.scale - t.y, b.w * t.scale, b.h * t.scale, b.theta};
}

struct SizeFilter {
  double min_size = 0.0;  // on max(w, h) in tile coordinates
  double max_size = std::numeric_limits<double>::infinity();
};

struct PipelineOptions {
  double nms_threshold = 0.3;
  // Per-scale detection size gate, indexed like the plan's scales.
  std::vector<std::optional<SizeFilter>> size_filters;
  unsigned threads = 1;
};

struct TileFailure {
  std::size_t scale_index = 0;
  std::size_t tile_index = 0;
  std::string message;
};

struct RunResult {
  std::vector<Detection> detections;  // global coords, class-id then score order
  std::vector<TileFailure> failures;
};

namespace detail {

// A detection survives its tile when the center lies inside the tile's
// non-overlap interior widened by half the overlap on each interior side.
// Consecutive windows abut (origins differ by at most the stride), so every
// center is claimed by at least one tile; clamped edge tiles may claim
// twice and the global NMS resolves those duplicates.
inline bool in_keep_window(double center, int origin, int tile_len, int tile_size, int image_len,
                           int margin) {
  const double lo = origin == 0 ? -std::numeric_limits<double>::infinity()
                                : static_cast<double>(origin + margin);
  const double hi = origin + tile_len >= image_len
                        ? std::numeric_limits<double>::infinity()
                        : static_cast<double>(origin + tile_size - margin);
  return center >= lo && center < hi;
}

}  // namespace detail

/// Runs the detector over every tile, maps detections to global
/// coordinates, and applies per-class greedy NMS across tiles and scales.
/// Detector failures are recorded per tile and the remaining tiles still
/// run. Merge order is fixed (scale, tile row-major, detector output
/// order), so results do not depend on the thread count.
inline RunResult run(const TilePlan& plan, const TileDetector& detector,
                     const PipelineOptions& opt = {}) {
  RunResult result;
  const int margin = static_cast<int>(std::llround(plan.tile_size * plan.overlap / 2.0));

  struct TileOutput {
    std::vector<Detection> dets;
    std::optional<std::string> error;
  };

  std::vector<const Tile*> all_tiles;
  for (const ScalePlan& sp : plan.scales) {
    for (const Tile& t : sp.tiles) all_tiles.push_back(&t);
  }
  std::vector<TileOutput> outputs(all_tiles.size());

  auto run_tile = [&](std::size_t i) {
    try {
      outputs[i].dets = detector(*all_tiles[i]);
    } catch (const std::exception& e) {
      outputs[i].error = e.what();
    } catch (...) {
      outputs[i].error = "unknown detector failure";
    }
  };

  const unsigned workers = std::max(1u, opt.threads);
  if (workers == 1 || all_tiles.size() <= 1) {
    for (std::size_t i = 0; i < all_tiles.size(); ++i) run_tile(i);
  } else {
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      futs.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next.fetch_add(1); i < all_tiles.size(); i = next.fetch_add(1)) {
          run_tile(i);
        }
      }));
    }
    for (auto& f : futs) f.get();
  }

  std::vector<Detection> merged;
  std::size_t flat = 0;
  for (const ScalePlan& sp : plan.scales) {
    for (std::size_t ti = 0; ti < sp.tiles.size(); ++ti, ++flat) {
      const Tile& tile = sp.tiles[ti];
      if (outputs[flat].error) {
        result.failures.push_back(TileFailure{tile.scale_index, ti, *outputs[flat].error});
        continue;
      }
      const std::optional<SizeFilter>* filter = nullptr;
      if (tile.scale_index < opt.size_filters.size()) filter = &opt.size_filters[tile.scale_index];
      for (const Detection& d : outputs[flat].dets) {
        if (filter && filter->has_value()) {
          const double sz = std::max(d.box.w, d.box.h);
          if (sz < (*filter)->min_size || sz > (*filter)->max_size) continue;
        }
        const double cx_s = d.box.cx + tile.x;
        const double cy_s = d.box.cy + tile.y;
        if (!detail::in_keep_window(cx_s, tile.x, tile.w, plan.tile_size, sp.width, margin) ||
            !detail::in_keep_window(cy_s, tile.y, tile.h, plan.tile_size, sp.height, margin)) {
          continue;
        }
        merged.push_back(to_global(d, tile));
      }
    }
  }

  // Per-class NMS; output grouped by ascending class id, score order within.
  std::map<int, std::vector<Detection>> by_class;
  for (const Detection& d : merged) by_class[d.class_id].push_back(d);
  for (auto& [cls, dets] : by_class) {
    std::vector<Detection> kept = nms(dets, opt.nms_threshold);
    result.detections.insert(result.detections.end(), kept.begin(), kept.end());
  }
  return result;
}

/// Per-tile detector fed with the tile's pixels (8-bit RGB crop of the
/// rescaled image).
using PixelTileDetector = std::function<std::vector<Detection>(const Tile&, const Image&)>;

/// Real-image path: rescales the raster once per pyramid scale, crops each
/// tile, and runs the pixel detector through the same merge/NMS machinery
/// as the synthetic path. The plan must describe this image's dimensions.
inline RunResult run_on_image(const Image& image, const TilePlan& plan,
                              const PixelTileDetector& detector, const PipelineOptions& opt = {}) {
  std::vector<Image> pyramid;
  pyramid.reserve(plan.scales.size());
  for (const ScalePlan& sp : plan.scales) {
    if (sp.scale == 1.0 && sp.width == image.width && sp.height == image.height) {
      pyramid.push_back(image);
    } else {
      pyramid.push_back(rescale_bilinear(image, sp.width, sp.height));
    }
  }
  const TileDetector wrapped = [&](const Tile& t) {
    return detector(t, crop(pyramid[t.scale_index], t.x, t.y, t.w, t.h));
  };
  return run(plan, wrapped, opt);
}

}  // namespace rbox
