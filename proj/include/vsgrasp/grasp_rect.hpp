#pragma once

// Grasp rectangles in image space: vertex <-> (x_c, y_c, w, h, theta)
// conversion, exact convex clipping for the Jaccard index, and the
// angle + overlap success rule.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "vsgrasp/error.hpp"
#include "vsgrasp/pose.hpp"

namespace vsgrasp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

struct GraspParams {
  double x_c = 0.0;
  double y_c = 0.0;
  double w = 0.0;      // gripper opening, along v1 -> v2
  double h = 0.0;      // plate size, along v2 -> v3
  double theta = 0.0;  // degrees, (-90, 90]

  friend bool operator==(const GraspParams&, const GraspParams&) = default;
};

using Quad = std::array<Point2, 4>;

/// Gripper orientation is 180 degree periodic: wraps into (-90, 90].
inline double normalize_grasp_angle_deg(double deg) {
  double r = std::fmod(deg, 180.0);
  if (r <= -90.0) r += 180.0;
  if (r > 90.0) r -= 180.0;
  return r;
}

/// sin/cos of an angle in degrees, exact at multiples of 90.
inline std::pair<double, double> sin_cos_deg(double deg) {
  const double q = deg / 90.0;
  if (q == std::round(q)) {
    switch (((static_cast<long long>(q) % 4) + 4) % 4) {
      case 0: return {0.0, 1.0};
      case 1: return {1.0, 0.0};
      case 2: return {0.0, -1.0};
      default: return {-1.0, 0.0};
    }
  }
  const double rad = deg_to_rad(deg);
  return {std::sin(rad), std::cos(rad)};
}

inline constexpr double kDegenerateEdgePx = 1e-9;

inline GraspParams vertices_to_params(const Quad& v) {
  for (const auto& p : v) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kDegenerateRectangle, "non-finite vertex");
    }
  }
  GraspParams g;
  g.x_c = (v[0].x + v[1].x + v[2].x + v[3].x) / 4.0;
  g.y_c = (v[0].y + v[1].y + v[2].y + v[3].y) / 4.0;
  g.w = distance(v[0], v[1]);
  g.h = distance(v[1], v[2]);
  if (g.w < kDegenerateEdgePx || g.h < kDegenerateEdgePx) {
    throw Error(ErrorCode::kDegenerateRectangle, "edge shorter than 1e-9 px");
  }
  g.theta = normalize_grasp_angle_deg(
      rad_to_deg(std::atan2(v[1].y - v[0].y, v[1].x - v[0].x)));
  return g;
}

inline Quad params_to_vertices(const GraspParams& g) {
  if (!(g.w > 0.0) || !(g.h > 0.0)) {
    throw Error(ErrorCode::kDegenerateRectangle, "w and h must be positive");
  }
  const auto [s, c] = sin_cos_deg(g.theta);
  const Point2 center{g.x_c, g.y_c};
  const Point2 along{c * g.w / 2.0, s * g.w / 2.0};
  const Point2 across{-s * g.h / 2.0, c * g.h / 2.0};
  return {center - along - across, center + along - across,
          center + along + across, center - along + across};
}

/// Quadrilateral carrying both representations. Labels may be parallelograms,
/// so from_vertices keeps the given vertices rather than regenerating them.
class GraspRectangle {
 public:
  static GraspRectangle from_vertices(const Quad& v) {
    return GraspRectangle(v, vertices_to_params(v));
  }
  static GraspRectangle from_params(const GraspParams& g) {
    GraspParams normalized = g;
    normalized.theta = normalize_grasp_angle_deg(g.theta);
    return GraspRectangle(params_to_vertices(normalized), normalized);
  }

  const Quad& vertices() const { return vertices_; }
  const GraspParams& params() const { return params_; }
  double theta() const { return params_.theta; }

 private:
  GraspRectangle(const Quad& v, const GraspParams& g) : vertices_(v), params_(g) {}
  Quad vertices_;
  GraspParams params_;
};

inline double polygon_area(std::span<const Point2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

inline std::vector<Point2> counter_clockwise(std::span<const Point2> poly) {
  std::vector<Point2> out(poly.begin(), poly.end());
  if (polygon_area(out) < 0.0) std::reverse(out.begin(), out.end());
  return out;
}

/// Sutherland-Hodgman clipping of a polygon against a convex CCW clip polygon.
inline std::vector<Point2> clip_convex(std::vector<Point2> subject,
                                       std::span<const Point2> clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Point2 a = clip[e];
    const Point2 b = clip[(e + 1) % clip.size()];
    const auto side = [&](Point2 p) { return cross(b - a, p - a); };
    std::vector<Point2> input;
    input.swap(subject);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Point2 p = input[i];
      const Point2 q = input[(i + 1) % input.size()];
      const double sp = side(p);
      const double sq = side(q);
      if (sp >= 0.0) subject.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        subject.push_back(p + t * (q - p));
      }
    }
  }
  return subject;
}

inline double intersection_area(const Quad& a, const Quad& b) {
  const auto pa = counter_clockwise(a);
  const auto pb = counter_clockwise(b);
  const auto clipped = clip_convex(pa, pb);
  return clipped.size() < 3 ? 0.0 : std::abs(polygon_area(clipped));
}

inline double jaccard(const GraspRectangle& a, const GraspRectangle& b) {
  const double inter = intersection_area(a.vertices(), b.vertices());
  const double area_a = std::abs(polygon_area(a.vertices()));
  const double area_b = std::abs(polygon_area(b.vertices()));
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

struct SuccessCriteria {
  double max_angle_deg = 30.0;
  double min_jaccard = 0.25;
  bool wrap_angle = true;  // treat 180 degree flipped grippers as identical
};

inline double angle_difference_deg(double a, double b, bool wrap) {
  const double d = std::abs(a - b);
  if (!wrap) return d;
  const double m = std::fmod(d, 180.0);
  return std::min(m, 180.0 - m);
}

/// True iff some label is within the angle tolerance and overlaps by more
/// than the Jaccard threshold.
inline bool grasp_success(const GraspRectangle& pred,
                          std::span<const GraspRectangle> labels,
                          const SuccessCriteria& criteria = {}) {
  if (labels.empty()) {
    throw Error(ErrorCode::kEmptyInput, "grasp_success needs at least one label");
  }
  return std::any_of(labels.begin(), labels.end(), [&](const GraspRectangle& label) {
    return angle_difference_deg(pred.theta(), label.theta(), criteria.wrap_angle) <=
               criteria.max_angle_deg &&
           jaccard(pred, label) > criteria.min_jaccard;
  });
}

}  // namespace vsgrasp
