// Copyright (C) 2026 rboxkit contributors
// SPDX-License-Identifier: Apache-2.0
//
// Rotated-rectangle geometry: corner expansion, convex clipping, areas,
// IoU, angle-related IoU and circumscribed axis-aligned boxes.
//
// Conventions: coordinates in pixels, angles in degrees. A rotation by
// +theta turns the +x axis toward the +y axis; polygons are stored with
// positive (shoelace) orientation, called counter-clockwise throughout.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbox {

// Vertex dedup / collinearity tolerance, in pixels.
inline constexpr double kVertexEps = 1e-9;
// Areas below this are treated as zero, in squared pixels.
inline constexpr double kAreaEps = 1e-12;

enum class AnglePeriod : int { deg180 = 180, deg360 = 360 };

inline constexpr double period_degrees(AnglePeriod p) { return static_cast<double>(p); }

inline constexpr double deg_to_rad(double d) { return d * (std::numbers::pi / 180.0); }
inline constexpr double rad_to_deg(double r) { return r * (180.0 / std::numbers::pi); }

/// Maps an angle into [0, period).
inline double normalize_angle(double theta_deg, AnglePeriod period) {
  const double p = period_degrees(period);
  double r = std::fmod(theta_deg, p);
  if (r < 0.0) r += p;
  return r >= p ? 0.0 : r;
}

/// Wraps an angle difference into (-90, 90]. tan() is pi-periodic, so the
/// offset codec loses nothing by wrapping this way regardless of the class
/// angle period.
inline double wrap_half_turn(double delta_deg) {
  double r = std::fmod(delta_deg, 180.0);
  if (r > 90.0) {
    r -= 180.0;
  } else if (r <= -90.0) {
    r += 180.0;
  }
  return r;
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
inline constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double length(Vec2 a) { return std::hypot(a.x, a.y); }

/// Rotatable bounding box: center, width along the orientation axis,
/// height perpendicular to it, orientation in degrees.
struct RBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double theta = 0.0;
};

inline bool is_valid(const RBox& b) {
  return std::isfinite(b.cx) && std::isfinite(b.cy) && std::isfinite(b.w) &&
         std::isfinite(b.h) && std::isfinite(b.theta) && b.w > 0.0 && b.h > 0.0;
}

inline void validate(const RBox& b) {
  if (!is_valid(b)) {
    throw std::invalid_argument("RBox requires finite fields and w > 0, h > 0");
  }
}

/// Axis-aligned box, used for fast-reject prefiltering and tiling.
struct AABox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool intersects(const AABox& o) const {
    return xmin <= o.xmax && o.xmin <= xmax && ymin <= o.ymax && o.ymin <= ymax;
  }
  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

inline AABox merge(const AABox& a, const AABox& b) {
  return {std::min(a.xmin, b.xmin), std::min(a.ymin, b.ymin),
          std::max(a.xmax, b.xmax), std::max(a.ymax, b.ymax)};
}

/// Convex polygon, vertices in counter-clockwise (positive shoelace) order.
/// Produced canonical: consecutive duplicates and collinear vertices removed
/// within kVertexEps; fewer than 3 survivors collapse to the empty polygon.
struct ConvexPolygon {
  std::vector<Vec2> vertices;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }
};

namespace detail {

// Fixed-capacity polygon buffer for the allocation-free clipping kernel.
// Clipping a convex n-gon by one half-plane yields at most n+1 vertices,
// so two rectangles never exceed 8; 16 leaves headroom for degenerate eps
// cases and larger convex inputs.
struct PolyBuf {
  std::array<Vec2, 16> pts;
  int n = 0;
};

inline void box_corners(const RBox& b, Vec2 out[4]) {
  const double r = deg_to_rad(b.theta);
  const double c = std::cos(r), s = std::sin(r);
  const Vec2 u{c * (b.w * 0.5), s * (b.w * 0.5)};   // width half-axis
  const Vec2 v{-s * (b.h * 0.5), c * (b.h * 0.5)};  // height half-axis
  const Vec2 ctr{b.cx, b.cy};
  out[0] = ctr + u + v;
  out[1] = ctr - u + v;
  out[2] = ctr - u - v;
  out[3] = ctr + u - v;
}

inline double shoelace(const Vec2* p, int n) {
  if (n < 3) return 0.0;
  double s = cross(p[n - 1], p[0]);
  for (int i = 1; i < n; ++i) s += cross(p[i - 1], p[i]);
  return s;
}

inline AABox corner_bounds(const Vec2* p, int n) {
  AABox r{p[0].x, p[0].y, p[0].x, p[0].y};
  for (int i = 1; i < n; ++i) {
    r.xmin = std::min(r.xmin, p[i].x);
    r.ymin = std::min(r.ymin, p[i].y);
    r.xmax = std::max(r.xmax, p[i].x);
    r.ymax = std::max(r.ymax, p[i].y);
  }
  return r;
}

// Clips `subject` by the half-plane left of edge a->b (counter-clockwise
// clip polygon). Points within kVertexEps of the edge count as inside, so
// coincident rectangles survive clipping intact.
inline void clip_half_plane(const PolyBuf& subject, Vec2 a, Vec2 b, PolyBuf& out) {
  out.n = 0;
  if (subject.n == 0) return;
  const Vec2 e = b - a;
  const double tol = -kVertexEps * length(e);
  double dprev = cross(e, subject.pts[subject.n - 1] - a);
  for (int i = 0; i < subject.n; ++i) {
    const Vec2 cur = subject.pts[i];
    const Vec2 prev = subject.pts[(i + subject.n - 1) % subject.n];
    const double dcur = cross(e, cur - a);
    const bool cur_in = dcur >= tol;
    const bool prev_in = dprev >= tol;
    if (cur_in != prev_in) {
      const double t = dprev / (dprev - dcur);
      out.pts[out.n++] = prev + (cur - prev) * t;
    }
    if (cur_in) out.pts[out.n++] = cur;
    dprev = dcur;
  }
}

inline void clip_convex(const PolyBuf& subject, const Vec2 clip[4], PolyBuf& out) {
  PolyBuf scratch;
  const PolyBuf* src = &subject;
  for (int i = 0; i < 4; ++i) {
    PolyBuf* dst = (i % 2 == 0) ? &out : &scratch;
    if (src->n == 0) {
      out.n = 0;
      return;
    }
    clip_half_plane(*src, clip[i], clip[(i + 1) % 4], *dst);
    src = dst;
  }
  if (src != &out) out = *src;
}

inline double clipped_intersection_area(const RBox& a, const RBox& b) {
  // Recenter on the midpoint of the two centers; keeps the clipping
  // arithmetic well conditioned for large scene coordinates.
  const double sx = 0.5 * (a.cx + b.cx);
  const double sy = 0.5 * (a.cy + b.cy);
  RBox al = a, bl = b;
  al.cx -= sx;
  al.cy -= sy;
  bl.cx -= sx;
  bl.cy -= sy;

  Vec2 ca[4], cb[4];
  box_corners(al, ca);
  box_corners(bl, cb);
  if (!corner_bounds(ca, 4).intersects(corner_bounds(cb, 4))) return 0.0;

  PolyBuf subj;
  subj.n = 4;
  std::copy(ca, ca + 4, subj.pts.begin());
  PolyBuf clipped;
  clip_convex(subj, cb, clipped);
  double area = 0.5 * std::fabs(shoelace(clipped.pts.data(), clipped.n));
  return area < kAreaEps ? 0.0 : area;
}

inline bool rbox_before(const RBox& a, const RBox& b) {
  if (a.cx != b.cx) return a.cx < b.cx;
  if (a.cy != b.cy) return a.cy < b.cy;
  if (a.w != b.w) return a.w < b.w;
  if (a.h != b.h) return a.h < b.h;
  return a.theta < b.theta;
}

}  // namespace detail

/// Canonicalizes a counter-clockwise vertex ring: drops consecutive
/// duplicates and collinear vertices (within kVertexEps of the line through
/// their neighbors); anything below 3 survivors becomes the empty polygon.
inline ConvexPolygon make_polygon(std::vector<Vec2> ring) {
  // duplicate pass
  std::vector<Vec2> uniq;
  uniq.reserve(ring.size());
  for (const Vec2& p : ring) {
    if (uniq.empty() || length(p - uniq.back()) > kVertexEps) uniq.push_back(p);
  }
  while (uniq.size() > 1 && length(uniq.front() - uniq.back()) <= kVertexEps) {
    uniq.pop_back();
  }
  // collinearity pass
  bool changed = true;
  while (changed && uniq.size() >= 3) {
    changed = false;
    std::vector<Vec2> next;
    next.reserve(uniq.size());
    const std::size_t n = uniq.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 prev = uniq[(i + n - 1) % n];
      const Vec2 cur = uniq[i];
      const Vec2 nxt = uniq[(i + 1) % n];
      const double len = length(nxt - prev);
      const double dev = len > 0.0 ? std::fabs(cross(nxt - prev, cur - prev)) / len : 0.0;
      if (dev <= kVertexEps) {
        changed = true;
      } else {
        next.push_back(cur);
      }
    }
    uniq = std::move(next);
  }
  if (uniq.size() < 3 || std::fabs(detail::shoelace(uniq.data(), static_cast<int>(uniq.size()))) * 0.5 < kAreaEps) {
    return {};
  }
  return ConvexPolygon{std::move(uniq)};
}

/// The four corners of a box, counter-clockwise, centroid at (cx, cy).
inline ConvexPolygon corners(const RBox& b) {
  Vec2 c[4];
  detail::box_corners(b, c);
  return ConvexPolygon{std::vector<Vec2>(c, c + 4)};
}

/// Shoelace area; zero for empty or degenerate polygons.
inline double area(const ConvexPolygon& p) {
  const double a =
      0.5 * std::fabs(detail::shoelace(p.vertices.data(), static_cast<int>(p.vertices.size())));
  return a < kAreaEps ? 0.0 : a;
}

/// Convex clip of `a` by `b`. Empty when disjoint; at most 8 vertices when
/// both inputs are rectangles.
inline ConvexPolygon intersect(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Vec2> cur(a.vertices);
  const std::size_t nb = b.vertices.size();
  for (std::size_t i = 0; i < nb && !cur.empty(); ++i) {
    const Vec2 ca = b.vertices[i];
    const Vec2 cb = b.vertices[(i + 1) % nb];
    const Vec2 e = cb - ca;
    const double tol = -kVertexEps * length(e);
    std::vector<Vec2> next;
    next.reserve(cur.size() + 1);
    double dprev = cross(e, cur.back() - ca);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      const Vec2 prev = cur[(j + cur.size() - 1) % cur.size()];
      const double dcur = cross(e, cur[j] - ca);
      const bool cur_in = dcur >= tol;
      const bool prev_in = dprev >= tol;
      if (cur_in != prev_in) {
        const double t = dprev / (dprev - dcur);
        next.push_back(prev + (cur[j] - prev) * t);
      }
      if (cur_in) next.push_back(cur[j]);
      dprev = dcur;
    }
    cur = std::move(next);
  }
  return make_polygon(std::move(cur));
}

/// Tightest axis-aligned box containing the four corners.
inline AABox circumscribe(const RBox& b) {
  Vec2 c[4];
  detail::box_corners(b, c);
  return detail::corner_bounds(c, 4);
}

/// Intersection-over-union of two boxes. Symmetric bit-for-bit: arguments
/// are ordered canonically before clipping so iou(a,b) and iou(b,a) share
/// one code path.
inline double iou(const RBox& a, const RBox& b) {
  const RBox* p = &a;
  const RBox* q = &b;
  if (detail::rbox_before(*q, *p)) std::swap(p, q);
  const double inter = detail::clipped_intersection_area(*p, *q);
  if (inter == 0.0) return 0.0;
  const double uni = p->w * p->h + q->w * q->h - inter;
  const double r = inter / uni;
  return std::clamp(r, 0.0, 1.0);
}

/// Angle-related IoU: IoU of `a` realigned to b's angle, scaled by
/// cos(theta_a - theta_b) — |cos| for 180-degree-symmetric classes — and
/// clamped below at zero. Not commutative.
inline double ariou(const RBox& a, const RBox& b, AnglePeriod period) {
  RBox aligned = a;
  aligned.theta = b.theta;
  const double overlap = iou(aligned, b);
  double c = std::cos(deg_to_rad(a.theta - b.theta));
  if (period == AnglePeriod::deg180) c = std::fabs(c);
  return std::max(0.0, overlap * c);
}

}  // namespace rbox
