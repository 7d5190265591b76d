#pragma once

// Independent reference computations used only by tests. None of these call
// into the code paths they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace oracle {

inline double rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double deg(double r) { return r * 180.0 / std::numbers::pi; }

inline Eigen::Matrix3d rot_x(double a_deg) {
  const double c = std::cos(rad(a_deg)), s = std::sin(rad(a_deg));
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, c, -s, 0, s, c;
  return m;
}
inline Eigen::Matrix3d rot_y(double a_deg) {
  const double c = std::cos(rad(a_deg)), s = std::sin(rad(a_deg));
  Eigen::Matrix3d m;
  m << c, 0, s, 0, 1, 0, -s, 0, c;
  return m;
}
inline Eigen::Matrix3d rot_z(double a_deg) {
  const double c = std::cos(rad(a_deg)), s = std::sin(rad(a_deg));
  Eigen::Matrix3d m;
  m << c, -s, 0, s, c, 0, 0, 0, 1;
  return m;
}

/// Extrinsic X, then Y, then Z about the fixed frame.
inline Eigen::Matrix3d extrinsic_xyz(double a, double b, double g) {
  return rot_z(g) * rot_y(b) * rot_x(a);
}

inline Eigen::Matrix4d homogeneous(const std::array<double, 6>& pose) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = extrinsic_xyz(pose[3], pose[4], pose[5]);
  h(0, 3) = pose[0];
  h(1, 3) = pose[1];
  h(2, 3) = pose[2];
  return h;
}

struct AngleAxisOracle {
  double angle_deg;
  Eigen::Vector3d axis;
};

/// Quaternion logarithm via Eigen's quaternion-from-matrix conversion.
inline AngleAxisOracle quaternion_log(const Eigen::Matrix3d& r) {
  Eigen::Quaterniond q(r);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  const Eigen::Vector3d v = q.vec();
  const double n = v.norm();
  if (n < 1e-300) return {0.0, Eigen::Vector3d::UnitZ()};
  return {deg(2.0 * std::atan2(n, q.w())), v / n};
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// ---- planar geometry ----

struct P {
  double x, y;
};

/// Axis-ordered true rectangle: v1->v2 has length w at angle theta, v2->v3 has length h.
inline std::array<P, 4> make_rectangle(double cx, double cy, double w, double h, double theta_deg) {
  const double c = std::cos(rad(theta_deg)), s = std::sin(rad(theta_deg));
  const std::array<std::array<double, 2>, 4> local{{{-w / 2, -h / 2}, {w / 2, -h / 2},
                                                     {w / 2, h / 2}, {-w / 2, h / 2}}};
  std::array<P, 4> out{};
  for (int k = 0; k < 4; ++k) {
    out[k] = {cx + c * local[k][0] - s * local[k][1], cy + s * local[k][0] + c * local[k][1]};
  }
  return out;
}

/// x-interval of a convex polygon along the horizontal line at height y.
inline bool row_interval(const std::array<P, 4>& poly, double y, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    const P a = poly[k], b = poly[(k + 1) % 4];
    if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
      const double x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  return lo <= hi;
}

/// Counts pixel centres of an n x n grid over the joint bounding box that fall
/// inside each polygon and inside both.
inline double raster_jaccard(const std::array<P, 4>& a, const std::array<P, 4>& b, int n = 1024) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto* poly : {&a, &b}) {
    for (const auto& p : *poly) {
      x0 = std::min(x0, p.x); y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x); y1 = std::max(y1, p.y);
    }
  }
  const double dx = (x1 - x0) / n, dy = (y1 - y0) / n;
  // Number of centres x0 + (k + 0.5) dx with lo <= x < hi.
  const auto count = [&](double lo, double hi) -> long long {
    if (!(hi > lo)) return 0;
    const long long k0 = static_cast<long long>(std::ceil((lo - x0) / dx - 0.5));
    const long long k1 = static_cast<long long>(std::ceil((hi - x0) / dx - 0.5)) - 1;
    const long long a0 = std::max<long long>(0, k0), a1 = std::min<long long>(n - 1, k1);
    return a1 >= a0 ? a1 - a0 + 1 : 0;
  };
  long long ca = 0, cb = 0, cab = 0;
  for (int r = 0; r < n; ++r) {
    const double y = y0 + (r + 0.5) * dy;
    double alo, ahi, blo, bhi;
    const bool ia = row_interval(a, y, alo, ahi);
    const bool ib = row_interval(b, y, blo, bhi);
    if (ia) ca += count(alo, ahi);
    if (ib) cb += count(blo, bhi);
    if (ia && ib) cab += count(std::max(alo, blo), std::min(ahi, bhi));
  }
  const long long uni = ca + cb - cab;
  return uni == 0 ? 0.0 : static_cast<double>(cab) / static_cast<double>(uni);
}

}  // namespace oracle
