#pragma once

// SE(3) pose algebra for the camera: Tait-Bryan extrinsic X-Y-Z Euler angles,
// homogeneous transforms, angle-axis extraction and the proportional PBVS
// velocity label. Degrees at every public boundary; radians stay internal.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "vsgrasp/error.hpp"

namespace vsgrasp {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle in degrees into (-180, 180].
inline double normalize_angle_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

/// Camera pose: position in meters, extrinsic X-Y-Z Euler angles in degrees.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  static Pose from_array(const std::array<double, 6>& v) {
    return Pose{v[0], v[1], v[2], v[3], v[4], v[5]}.normalized();
  }

  std::array<double, 6> to_array() const {
    return {x, y, z, alpha, beta, gamma};
  }

  Eigen::Vector3d position() const { return {x, y, z}; }

  Pose normalized() const {
    return Pose{x, y, z, normalize_angle_deg(alpha), normalize_angle_deg(beta),
                normalize_angle_deg(gamma)};
  }

  bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
           std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma);
  }

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// A 3x3 rotation matrix. Construction through from_matrix() enforces
/// orthonormality; unchecked() exists for feeding raw data to validators.
class Rotation3 {
 public:
  Rotation3() : m_(Eigen::Matrix3d::Identity()) {}

  static Rotation3 from_matrix(const Eigen::Matrix3d& m, double tol = 1e-9) {
    Rotation3 r(m);
    if (r.orthonormality_error() > tol) {
      throw Error(ErrorCode::kMalformedRotation,
                  "matrix is not a proper rotation (error " +
                      std::to_string(r.orthonormality_error()) + ")");
    }
    return r;
  }

  static Rotation3 unchecked(const Eigen::Matrix3d& m) { return Rotation3(m); }

  static Rotation3 identity() { return Rotation3(); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  Rotation3 transpose() const { return Rotation3(m_.transpose()); }

  /// Largest deviation of R^T R from I, or of det(R) from 1.
  double orthonormality_error() const {
    const double gram =
        (m_.transpose() * m_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return std::max(gram, std::abs(m_.determinant() - 1.0));
  }

  friend Rotation3 operator*(const Rotation3& a, const Rotation3& b) {
    return Rotation3(a.m_ * b.m_);
  }
  friend Eigen::Vector3d operator*(const Rotation3& r, const Eigen::Vector3d& v) {
    return r.m_ * v;
  }

 private:
  explicit Rotation3(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_;
};

struct HomogeneousTransform {
  Rotation3 rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static HomogeneousTransform identity() { return {}; }

  HomogeneousTransform inverse() const {
    const Rotation3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
    h.topLeftCorner<3, 3>() = rotation.matrix();
    h.topRightCorner<3, 1>() = translation;
    return h;
  }

  friend HomogeneousTransform operator*(const HomogeneousTransform& a,
                                        const HomogeneousTransform& b) {
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  }
};

struct AngleAxis {
  double angle_deg = 0.0;  // [0, 180]
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
};

/// Camera velocity: linear in m/s, angular in deg/s.
struct Twist {
  Eigen::Vector3d linear = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular = Eigen::Vector3d::Zero();

  static Twist from_array(const std::array<double, 6>& v) {
    return {Eigen::Vector3d(v[0], v[1], v[2]), Eigen::Vector3d(v[3], v[4], v[5])};
  }
  std::array<double, 6> to_array() const {
    return {linear.x(), linear.y(), linear.z(),
            angular.x(), angular.y(), angular.z()};
  }

  double l1_linear() const { return linear.lpNorm<1>(); }
  double l1_angular() const { return angular.lpNorm<1>(); }
  bool is_finite() const { return linear.allFinite() && angular.allFinite(); }

  friend bool operator==(const Twist&, const Twist&) = default;
};

inline constexpr double kAngleAxisSingularDeg = 1e-7;

// Matrix entries of Rz(gamma) * Ry(beta) * Rx(alpha): rotations about the
// fixed world x, then y, then z axes.
inline Rotation3 euler_to_rotation(const Pose& pose) {
  const double a = deg_to_rad(pose.alpha);
  const double b = deg_to_rad(pose.beta);
  const double g = deg_to_rad(pose.gamma);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cg = std::cos(g), sg = std::sin(g);
  Eigen::Matrix3d m;
  m << cg * cb, cg * sb * sa - sg * ca, cg * sb * ca + sg * sa,
       sg * cb, sg * sb * sa + cg * ca, sg * sb * ca - cg * sa,
       -sb,     cb * sa,                cb * ca;
  return Rotation3::unchecked(m);
}

/// Inverse of euler_to_rotation. Returns (alpha, beta, gamma) in degrees with
/// beta in [-90, 90]; at gimbal lock gamma is set to 0.
inline std::array<double, 3> rotation_to_euler(const Rotation3& r) {
  const Eigen::Matrix3d& m = r.matrix();
  const double cb = std::hypot(m(0, 0), m(1, 0));
  const double beta = std::atan2(-m(2, 0), cb);
  double alpha = 0.0;
  double gamma = 0.0;
  if (cb > 1e-12) {
    alpha = std::atan2(m(2, 1), m(2, 2));
    gamma = std::atan2(m(1, 0), m(0, 0));
  } else if (beta > 0.0) {
    alpha = std::atan2(m(0, 1), m(1, 1));
  } else {
    alpha = std::atan2(-m(0, 1), m(1, 1));
  }
  return {normalize_angle_deg(rad_to_deg(alpha)), rad_to_deg(beta),
          normalize_angle_deg(rad_to_deg(gamma))};
}

inline HomogeneousTransform pose_to_transform(const Pose& pose) {
  return {euler_to_rotation(pose), pose.position()};
}

inline Pose transform_to_pose(const HomogeneousTransform& h) {
  const auto e = rotation_to_euler(h.rotation);
  return Pose{h.translation.x(), h.translation.y(), h.translation.z(),
              e[0], e[1], e[2]};
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

/// Rodrigues formula.
inline Rotation3 angle_axis_to_rotation(const AngleAxis& aa) {
  const double th = deg_to_rad(aa.angle_deg);
  const Eigen::Matrix3d k = skew(aa.axis);
  return Rotation3::unchecked(Eigen::Matrix3d::Identity() + std::sin(th) * k +
                              (1.0 - std::cos(th)) * k * k);
}

/// Rotation exp of a rotation vector given in radians.
inline Rotation3 exp_so3(const Eigen::Vector3d& rotvec_rad) {
  const double th = rotvec_rad.norm();
  if (th < 1e-15) return Rotation3::identity();
  return angle_axis_to_rotation({rad_to_deg(th), rotvec_rad / th});
}

/// Closest rotation in the Frobenius sense (polar factor via SVD).
inline Rotation3 nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return Rotation3::unchecked(u * v.transpose());
}

/// theta = acos((tr R - 1) / 2), u = [r32 - r23, r13 - r31, r21 - r12] / (2 sin theta).
/// The angle is evaluated as atan2(|v|, tr R - 1), which equals the clamped
/// acos on rotations and keeps full precision near 0 and 180 degrees. Beyond
/// 179 degrees the axis comes from the symmetric part (R + R^T) / 2 =
/// cos(theta) I + (1 - cos(theta)) u u^T, with its sign taken from v.
inline AngleAxis rotation_to_angle_axis(const Rotation3& r) {
  if (r.orthonormality_error() > 1e-6) {
    throw Error(ErrorCode::kMalformedRotation,
                "orthonormality error " + std::to_string(r.orthonormality_error()));
  }
  const Eigen::Matrix3d& m = r.matrix();
  const Eigen::Vector3d v(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double trace_term = std::clamp(m.trace() - 1.0, -2.0, 2.0);
  const double theta = std::atan2(v.norm(), trace_term);
  const double theta_deg = rad_to_deg(theta);

  if (theta_deg < kAngleAxisSingularDeg) return AngleAxis{};

  if (theta_deg < 179.0) {
    return AngleAxis{theta_deg, v / (2.0 * std::sin(theta))};
  }

  const double c = trace_term / 2.0;
  const Eigen::Matrix3d uu =
      (0.5 * (m + m.transpose()) - c * Eigen::Matrix3d::Identity()) / (1.0 - c);
  Eigen::Index k = 0;
  uu.diagonal().maxCoeff(&k);
  Eigen::Vector3d axis = uu.col(k).normalized();
  if (axis.dot(v) < 0.0) axis = -axis;
  return AngleAxis{theta_deg, axis};
}

/// dH_c = (0H_d)^-1 * 0H_c: the current camera frame expressed in the desired one.
inline HomogeneousTransform relative_transform(const Pose& desired, const Pose& current) {
  return pose_to_transform(desired).inverse() * pose_to_transform(current);
}

/// v_c = [-lambda R^T t ; -lambda theta u], theta in degrees.
inline Twist twist_from_transform(const HomogeneousTransform& h, double lambda = 1.0) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gain must be positive");
  }
  const AngleAxis aa = rotation_to_angle_axis(h.rotation);
  const Eigen::Vector3d linear = -(h.rotation.transpose() * h.translation);
  const Eigen::Vector3d angular = -aa.angle_deg * aa.axis;
  return Twist{lambda * linear, lambda * angular};
}

}  // namespace vsgrasp
