#pragma once

// Kinematic eye-in-hand camera simulator running the proportional PBVS loop.
// The camera is a free-flying frame: the commanded camera-frame twist is
// integrated directly, with no joint-space model in between.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsgrasp/error.hpp"
#include "vsgrasp/pose.hpp"
#include "vsgrasp/random.hpp"
#include "vsgrasp/vs_dataset.hpp"

namespace vsgrasp {

struct ControllerConfig {
  double lambda_lin = 0.05;
  double lambda_ang = 2.0;
  std::optional<std::array<double, 6>> noise_sd;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lambda_lin > 0.0) || !(lambda_ang > 0.0)) {
      throw Error(ErrorCode::kInvalidConfig, "gains must be positive");
    }
    if (noise_sd) {
      for (double s : *noise_sd) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
          throw Error(ErrorCode::kInvalidConfig, "noise SDs must be >= 0");
        }
      }
    }
  }
};

/// (desired, current) -> camera twist.
using Controller = std::function<Twist(const Pose& desired, const Pose& current)>;

inline Twist ideal_pbvs(const Pose& desired, const Pose& current, const ControllerConfig& config) {
  Twist t = velocity_label(desired, current);
  t.linear *= config.lambda_lin;
  t.angular *= config.lambda_ang;
  return t;
}

inline Controller make_ideal_controller(const ControllerConfig& config) {
  config.validate();
  return [config](const Pose& d, const Pose& c) { return ideal_pbvs(d, c, config); };
}

/// Adds independent zero-mean Gaussian noise to each component of the wrapped
/// controller's output on every call.
class NoisyController {
 public:
  NoisyController(Controller base, const std::array<double, 6>& noise_sd, std::uint64_t seed)
      : base_(std::move(base)), sd_(noise_sd), rng_(seed) {
    for (double s : sd_) {
      if (!(s >= 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::kInvalidArgument, "noise SDs must be >= 0");
      }
    }
  }

  Twist operator()(const Pose& desired, const Pose& current) {
    auto v = base_(desired, current).to_array();
    for (std::size_t c = 0; c < 6; ++c) {
      if (sd_[c] > 0.0) v[c] += sd_[c] * unit_(rng_);
    }
    return Twist::from_array(v);
  }

 private:
  Controller base_;
  std::array<double, 6> sd_;
  Rng rng_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

inline Controller noisy_controller(Controller base, const std::array<double, 6>& noise_sd,
                                   std::uint64_t seed) {
  return NoisyController(std::move(base), noise_sd, seed);
}

inline Controller make_controller(const ControllerConfig& config) {
  Controller ideal = make_ideal_controller(config);
  if (!config.noise_sd) return ideal;
  return noisy_controller(std::move(ideal), *config.noise_sd, config.seed);
}

/// Camera state carried between iterations. Keeping the matrix avoids an
/// Euler round trip (and its gimbal-lock branch) on every step.
struct CameraState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Rotation3 orientation;

  static CameraState from_pose(const Pose& p) { return {p.position(), euler_to_rotation(p)}; }
  Pose pose() const {
    return transform_to_pose({orientation, position}).normalized();
  }
};

inline void integrate(CameraState& s, const Twist& twist, double dt) {
  s.position += s.orientation * twist.linear * dt;
  const Eigen::Vector3d rotvec = twist.angular.unaryExpr(&deg_to_rad) * dt;
  s.orientation = nearest_rotation((s.orientation * exp_so3(rotvec)).matrix());
}

/// position += R v dt; R <- R exp([w]x dt), re-projected onto SO(3).
inline Pose step(const Pose& current, const Twist& twist, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  CameraState s = CameraState::from_pose(current);
  integrate(s, twist, dt);
  return s.pose();
}

struct StopRule {
  enum class Mode { kClosedLoopThreshold, kOpenLoopNormIncrease };
  Mode mode = Mode::kClosedLoopThreshold;
  double threshold = 0.05;  // on l1_linear + l1_angular
  // When both are set, convergence requires each part below its own bound.
  std::optional<double> linear_threshold;
  std::optional<double> angular_threshold;
  std::size_t max_iterations = 100000;

  static StopRule closed_loop(double threshold, std::size_t max_iterations = 100000) {
    return {Mode::kClosedLoopThreshold, threshold, std::nullopt, std::nullopt, max_iterations};
  }
  static StopRule open_loop(std::size_t max_iterations = 100000) {
    return {Mode::kOpenLoopNormIncrease, 0.05, std::nullopt, std::nullopt, max_iterations};
  }

  void validate() const {
    if (max_iterations < 1) throw Error(ErrorCode::kInvalidConfig, "max_iterations must be >= 1");
    if (mode == Mode::kClosedLoopThreshold) {
      const bool per_part = linear_threshold && angular_threshold;
      if (!per_part && !(threshold > 0.0)) {
        throw Error(ErrorCode::kInvalidConfig, "threshold must be positive");
      }
      if ((linear_threshold && !(*linear_threshold > 0.0)) ||
          (angular_threshold && !(*angular_threshold > 0.0))) {
        throw Error(ErrorCode::kInvalidConfig, "per-part thresholds must be positive");
      }
    }
  }

  bool converged(double l1_lin, double l1_ang) const {
    if (linear_threshold && angular_threshold) {
      return l1_lin < *linear_threshold && l1_ang < *angular_threshold;
    }
    return l1_lin + l1_ang < threshold;
  }
};

enum class TerminalStatus { kConverged, kNormIncreased, kMaxIterations };

inline std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::kConverged: return "Converged";
    case TerminalStatus::kNormIncreased: return "NormIncreased";
    case TerminalStatus::kMaxIterations: return "MaxIterations";
  }
  return "MaxIterations";
}

struct TraceRecord {
  std::size_t iter = 0;  // 1-based
  double t = 0.0;        // simulated seconds at the start of the iteration
  Pose pose;
  Twist twist;           // twist applied this iteration
  double l1_lin = 0.0;   // norms the stop rule looked at
  double l1_ang = 0.0;
  double wall_seconds = 0.0;
};

struct SimTrace {
  std::vector<TraceRecord> records;
  TerminalStatus status = TerminalStatus::kMaxIterations;

  const TraceRecord& last() const { return records.back(); }
};

struct EpisodeOptions {
  double dt = 0.01;
  // Signal watched by the open-loop rule; defaults to the unit-gain PBVS law.
  Controller monitor;
};

/// Closed loop: evaluate, record, stop if below threshold, else integrate.
/// Open loop: the controller runs once; its twist is applied unchanged while
/// the PBVS signal at the actual pose is monitored, stopping as soon as both
/// its linear and angular L1 norms exceed those of the previous iteration.
inline SimTrace run_episode(const Pose& desired, const Pose& start, const Controller& controller,
                            const StopRule& stop, const EpisodeOptions& options = {}) {
  stop.validate();
  if (!(options.dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  if (!desired.is_finite() || !start.is_finite()) {
    throw Error(ErrorCode::kInvalidArgument, "poses must be finite");
  }

  const auto clock_start = std::chrono::steady_clock::now();
  const bool open_loop = stop.mode == StopRule::Mode::kOpenLoopNormIncrease;
  const Controller monitor =
      options.monitor ? options.monitor
                      : Controller([](const Pose& d, const Pose& c) { return velocity_label(d, c); });

  SimTrace trace;
  trace.records.reserve(std::min<std::size_t>(stop.max_iterations, 1 << 16));
  CameraState state = CameraState::from_pose(start);
  Twist applied;
  double prev_lin = 0.0;
  double prev_ang = 0.0;

  for (std::size_t k = 0; k < stop.max_iterations; ++k) {
    const Pose pose = state.pose();
    if (!open_loop || k == 0) applied = controller(desired, pose);

    TraceRecord rec;
    rec.iter = k + 1;
    rec.t = static_cast<double>(k) * options.dt;
    rec.pose = pose;
    rec.twist = applied;
    if (open_loop) {
      const Twist watched = monitor(desired, pose);
      rec.l1_lin = watched.l1_linear();
      rec.l1_ang = watched.l1_angular();
    } else {
      rec.l1_lin = applied.l1_linear();
      rec.l1_ang = applied.l1_angular();
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    trace.records.push_back(rec);

    if (!open_loop && stop.converged(rec.l1_lin, rec.l1_ang)) {
      trace.status = TerminalStatus::kConverged;
      return trace;
    }
    if (open_loop && k > 0 && rec.l1_lin > prev_lin && rec.l1_ang > prev_ang) {
      trace.status = TerminalStatus::kNormIncreased;
      return trace;
    }
    prev_lin = rec.l1_lin;
    prev_ang = rec.l1_ang;
    integrate(state, applied, options.dt);
  }
  trace.status = TerminalStatus::kMaxIterations;
  return trace;
}

/// Per-axis position error (m) and wrapped per-angle error (deg), final - desired.
inline std::array<double, 6> pose_error(const Pose& achieved, const Pose& desired) {
  return {achieved.x - desired.x,
          achieved.y - desired.y,
          achieved.z - desired.z,
          normalize_angle_deg(achieved.alpha - desired.alpha),
          normalize_angle_deg(achieved.beta - desired.beta),
          normalize_angle_deg(achieved.gamma - desired.gamma)};
}

inline void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "iter,t,x,y,z,alpha,beta,gamma,vx,vy,vz,wa,wb,wg,l1_lin,l1_ang,status\n";
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    out << r.iter << ',';
    num(r.t);
    for (double v : r.pose.to_array()) { out << ','; num(v); }
    for (double v : r.twist.to_array()) { out << ','; num(v); }
    out << ',';
    num(r.l1_lin);
    out << ',';
    num(r.l1_ang);
    // Status is reported on the terminal row only.
    out << ',' << (k + 1 == trace.records.size() ? to_string(trace.status) : "Running") << '\n';
  }
}

// ---- Episode config --------------------------------------------------------

struct EpisodeConfig {
  Pose desired;
  Pose start;
  ControllerConfig controller;
  StopRule stop;
  double dt = 0.01;
};

/// {"desired": [6], "start": [6],
///  "controller": {"lambda_lin", "lambda_ang", "noise_sd": [6]?},
///  "stop": {"mode": "closed_loop"|"open_loop", "threshold", "linear_threshold"?,
///           "angular_threshold"?, "max_iterations"},
///  "dt"}
inline EpisodeConfig episode_from_json(const nlohmann::json& j, std::uint64_t seed) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "episode config must be an object");
    EpisodeConfig c;
    c.desired = pose_from_json(j.at("desired"));
    c.start = pose_from_json(j.at("start"));
    if (j.contains("controller")) {
      const auto& cj = j.at("controller");
      c.controller.lambda_lin = cj.value("lambda_lin", c.controller.lambda_lin);
      c.controller.lambda_ang = cj.value("lambda_ang", c.controller.lambda_ang);
      if (cj.contains("noise_sd") && !cj.at("noise_sd").is_null()) {
        if (!cj.at("noise_sd").is_array() || cj.at("noise_sd").size() != 6) {
          throw Error(ErrorCode::kInvalidConfig, "noise_sd must be 6 numbers");
        }
        c.controller.noise_sd = cj.at("noise_sd").get<std::array<double, 6>>();
      }
    }
    c.controller.seed = seed;
    if (j.contains("stop")) {
      const auto& sj = j.at("stop");
      const std::string mode = sj.value("mode", std::string("closed_loop"));
      if (mode == "closed_loop") {
        c.stop.mode = StopRule::Mode::kClosedLoopThreshold;
      } else if (mode == "open_loop") {
        c.stop.mode = StopRule::Mode::kOpenLoopNormIncrease;
      } else {
        throw Error(ErrorCode::kInvalidConfig, "unknown stop mode '" + mode + "'");
      }
      c.stop.threshold = sj.value("threshold", c.stop.threshold);
      if (sj.contains("linear_threshold")) c.stop.linear_threshold = sj.at("linear_threshold").get<double>();
      if (sj.contains("angular_threshold")) c.stop.angular_threshold = sj.at("angular_threshold").get<double>();
      c.stop.max_iterations = sj.value("max_iterations", c.stop.max_iterations);
    }
    c.dt = j.value("dt", c.dt);
    if (!(c.dt > 0.0)) throw Error(ErrorCode::kInvalidConfig, "dt must be positive");
    c.controller.validate();
    c.stop.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
}

inline SimTrace run_episode(const EpisodeConfig& config) {
  return run_episode(config.desired, config.start, make_controller(config.controller), config.stop,
                     EpisodeOptions{config.dt, {}});
}

}  // namespace vsgrasp
