#pragma once

// Visual-servoing dataset factory: Gaussian camera poses around a reference,
// (desired, current) pairing, PBVS velocity labels with unit gain, and the
// velocity MSE metric.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsgrasp/error.hpp"
#include "vsgrasp/pose.hpp"
#include "vsgrasp/random.hpp"

namespace vsgrasp {

enum class SdTier { kHigh, kMid, kLow, kCustom };

inline std::string_view to_string(SdTier t) {
  switch (t) {
    case SdTier::kHigh: return "high";
    case SdTier::kMid: return "mid";
    case SdTier::kLow: return "low";
    case SdTier::kCustom: return "custom";
  }
  return "custom";
}

inline SdTier tier_from_string(std::string_view s) {
  if (s == "high") return SdTier::kHigh;
  if (s == "mid") return SdTier::kMid;
  if (s == "low") return SdTier::kLow;
  if (s == "custom") return SdTier::kCustom;
  throw Error(ErrorCode::kInvalidConfig, "unknown SD tier '" + std::string(s) + "'");
}

struct SamplingConfig {
  Pose mean;
  std::array<double, 6> sd{};  // x, y, z in m; alpha, beta, gamma in deg
  SdTier tier = SdTier::kCustom;

  void validate() const {
    if (!mean.is_finite()) throw Error(ErrorCode::kInvalidConfig, "mean pose not finite");
    for (double s : sd) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::kInvalidConfig, "standard deviations must be positive");
      }
    }
  }
};

/// Reference pose and per-tier standard deviations used to collect the
/// original VS dataset.
inline SamplingConfig reference_sampling(SdTier tier) {
  SamplingConfig c;
  c.mean = Pose{0.288, 0.344, 0.532, 175.8, -5.5, 90.0};
  c.tier = tier;
  switch (tier) {
    case SdTier::kHigh: c.sd = {0.080, 0.080, 0.080, 5.0, 5.0, 5.0}; break;
    case SdTier::kMid: c.sd = {0.030, 0.030, 0.030, 2.0, 2.0, 2.0}; break;
    case SdTier::kLow: c.sd = {0.010, 0.010, 0.005, 1.0, 1.0, 1.0}; break;
    case SdTier::kCustom:
      throw Error(ErrorCode::kInvalidConfig, "custom tier has no reference SDs");
  }
  return c;
}

inline Pose sample_pose(const SamplingConfig& config, Rng& rng) {
  const auto mean = config.mean.to_array();
  std::array<double, 6> v{};
  for (std::size_t d = 0; d < 6; ++d) {
    std::normal_distribution<double> dist(mean[d], config.sd[d]);
    v[d] = dist(rng);
  }
  return Pose::from_array(v);
}

inline std::vector<Pose> sample_poses(const SamplingConfig& config, std::size_t n,
                                      std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::vector<Pose> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.push_back(sample_pose(config, rng));
  return out;
}

/// Drops poses rejected by a visibility predicate supplied by the caller.
inline std::vector<Pose> filter_poses(const std::vector<Pose>& poses,
                                      const std::function<bool(const Pose&)>& keep) {
  std::vector<Pose> out;
  std::copy_if(poses.begin(), poses.end(), std::back_inserter(out), keep);
  return out;
}

struct PoseRef {
  Pose pose;
  std::string image;  // opaque image reference
};

struct VsInstance {
  PoseRef desired;
  PoseRef current;
  Twist label;
};

inline Twist velocity_label(const Pose& desired, const Pose& current) {
  return twist_from_transform(relative_transform(desired, current), 1.0);
}

struct Pairing {
  enum class Kind { kAllPairs, kRandomPairs };
  Kind kind = Kind::kAllPairs;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  static Pairing all() { return {}; }
  static Pairing random(std::size_t count, std::uint64_t seed) {
    return {Kind::kRandomPairs, count, seed};
  }
};

inline std::vector<PoseRef> with_default_refs(const std::vector<Pose>& poses) {
  std::vector<PoseRef> refs;
  refs.reserve(poses.size());
  for (std::size_t k = 0; k < poses.size(); ++k) {
    refs.push_back({poses[k], "pose_" + std::to_string(k)});
  }
  return refs;
}

inline std::size_t ordered_pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1); }

/// Ordered pair index k in [0, n(n-1)) -> (desired, current), desired-major.
inline std::pair<std::size_t, std::size_t> pair_at(std::size_t k, std::size_t n) {
  const std::size_t d = k / (n - 1);
  std::size_t c = k % (n - 1);
  if (c >= d) ++c;
  return {d, c};
}

/// RandomPairs draws distinct ordered pairs without replacement; the count is
/// clamped to n(n-1). Output keeps enumeration order.
inline std::vector<VsInstance> build_instances(const std::vector<PoseRef>& poses,
                                               const Pairing& pairing) {
  const std::size_t n = poses.size();
  if (n < 2) throw Error(ErrorCode::kInsufficientPoses, "need at least two poses");
  const std::size_t total = ordered_pair_count(n);

  std::vector<std::size_t> chosen;
  if (pairing.kind == Pairing::Kind::kAllPairs || pairing.count >= total) {
    chosen.resize(total);
    for (std::size_t k = 0; k < total; ++k) chosen[k] = k;
  } else {
    Rng rng(pairing.seed);
    chosen.reserve(pairing.count);
    selection_sample(total, pairing.count, rng, [&](std::uint64_t k) { chosen.push_back(k); });
  }

  std::vector<VsInstance> out;
  out.reserve(chosen.size());
  for (std::size_t k : chosen) {
    const auto [d, c] = pair_at(k, n);
    out.push_back({poses[d], poses[c], velocity_label(poses[d].pose, poses[c].pose)});
  }
  return out;
}

inline std::vector<VsInstance> build_instances(const std::vector<Pose>& poses,
                                               const Pairing& pairing) {
  return build_instances(with_default_refs(poses), pairing);
}

/// E = (1/n) sum_k mean_c (l_kc - p_kc)^2 over the six twist components.
inline double mse(std::span<const Twist> labels, std::span<const Twist> predictions) {
  if (labels.size() != predictions.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label and prediction counts differ");
  }
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "mse of an empty set");
  double sum = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const auto l = labels[k].to_array();
    const auto p = predictions[k].to_array();
    double inst = 0.0;
    for (std::size_t c = 0; c < 6; ++c) inst += (l[c] - p[c]) * (l[c] - p[c]);
    sum += inst / 6.0;
  }
  return sum / static_cast<double>(labels.size());
}

// ---- JSON-lines dataset file ----------------------------------------------

inline nlohmann::json pose_to_json(const Pose& p) { return p.to_array(); }

inline Pose pose_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 6) {
    throw Error(ErrorCode::kInvalidConfig, "pose must be an array of 6 numbers");
  }
  return Pose::from_array(j.get<std::array<double, 6>>());
}

inline nlohmann::json sampling_to_json(const SamplingConfig& c) {
  return {{"mean", pose_to_json(c.mean)}, {"sd", c.sd}, {"tier", to_string(c.tier)}};
}

/// Accepts {"tier": "high|mid|low"} with optional "mean"/"sd" overrides, or
/// an explicit {"mean": [...], "sd": [...]}.
inline SamplingConfig sampling_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "config must be an object");
    for (const auto& [key, _] : j.items()) {
      if (key != "tier" && key != "mean" && key != "sd") {
        throw Error(ErrorCode::kInvalidConfig, "unknown key '" + key + "'");
      }
    }
    SamplingConfig c;
    const SdTier tier =
        j.contains("tier") ? tier_from_string(j.at("tier").get<std::string>()) : SdTier::kCustom;
    if (tier != SdTier::kCustom) {
      c = reference_sampling(tier);
    } else if (!j.contains("mean") || !j.contains("sd")) {
      throw Error(ErrorCode::kInvalidConfig, "custom sampling needs 'mean' and 'sd'");
    }
    if (j.contains("mean")) c.mean = pose_from_json(j.at("mean"));
    if (j.contains("sd")) {
      if (!j.at("sd").is_array() || j.at("sd").size() != 6) {
        throw Error(ErrorCode::kInvalidConfig, "'sd' must be an array of 6 numbers");
      }
      c.sd = j.at("sd").get<std::array<double, 6>>();
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
}

struct VsDatasetHeader {
  SamplingConfig sampling;
  std::uint64_t seed = 0;
  std::size_t pose_count = 0;
  std::string pairing = "all";
  std::size_t pair_count = 0;
};

inline nlohmann::json header_to_json(const VsDatasetHeader& h) {
  return {{"type", "header"}, {"sampling", sampling_to_json(h.sampling)},
          {"seed", h.seed},   {"poses", h.pose_count},
          {"pairing", h.pairing}, {"pairs", h.pair_count}};
}

inline nlohmann::json instance_to_json(const VsInstance& v) {
  return {{"type", "instance"},
          {"desired", {{"pose", pose_to_json(v.desired.pose)}, {"image", v.desired.image}}},
          {"current", {{"pose", pose_to_json(v.current.pose)}, {"image", v.current.image}}},
          {"label", v.label.to_array()}};
}

inline VsInstance instance_from_json(const nlohmann::json& j) {
  VsInstance v;
  v.desired = {pose_from_json(j.at("desired").at("pose")),
               j.at("desired").at("image").get<std::string>()};
  v.current = {pose_from_json(j.at("current").at("pose")),
               j.at("current").at("image").get<std::string>()};
  v.label = Twist::from_array(j.at("label").get<std::array<double, 6>>());
  return v;
}

inline void write_dataset(std::ostream& out, const VsDatasetHeader& header,
                          const std::vector<VsInstance>& instances) {
  out << header_to_json(header).dump() << '\n';
  for (const auto& v : instances) out << instance_to_json(v).dump() << '\n';
}

struct VsDataset {
  VsDatasetHeader header;
  std::vector<VsInstance> instances;
};

inline VsDataset read_dataset(std::istream& in) {
  VsDataset ds;
  std::string line;
  bool have_header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        ds.header.sampling = sampling_from_json(j.at("sampling"));
        ds.header.seed = j.at("seed").get<std::uint64_t>();
        ds.header.pose_count = j.at("poses").get<std::size_t>();
        ds.header.pairing = j.at("pairing").get<std::string>();
        ds.header.pair_count = j.at("pairs").get<std::size_t>();
        have_header = true;
      } else if (type == "instance") {
        ds.instances.push_back(instance_from_json(j));
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown record type " + type);
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(ErrorCode::kInvalidArgument, "dataset has no header record");
  return ds;
}

}  // namespace vsgrasp
