#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vsgrasp/error.hpp"
#include "vsgrasp/grasp_rect.hpp"
#include "vsgrasp/random.hpp"

namespace vsgrasp {

struct AnnotatedImage {
  std::string image_id;
  std::string object_id;
  int width = 640;
  int height = 480;
  std::vector<GraspRectangle> rectangles;
};

inline void validate(const AnnotatedImage& image) {
  if (image.width <= 0 || image.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, image.image_id + ": non-positive size");
  }
  if (image.rectangles.empty()) {
    throw Error(ErrorCode::kInvalidArgument, image.image_id + ": no rectangles");
  }
}

enum class SplitMode { kImageWise, kObjectWise };

struct SplitFractions {
  double train = 0.84;
  double val = 0.01;
  double test = 0.15;
};

struct DatasetSplit {
  std::vector<AnnotatedImage> train;
  std::vector<AnnotatedImage> val;
  std::vector<AnnotatedImage> test;
};

namespace detail {

// Validation and test sizes are floored; the remainder goes to training.
inline std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitFractions& f) {
  const auto floor_count = [n](double frac) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
  };
  const std::size_t val = std::min(n, floor_count(f.val));
  const std::size_t test = std::min(n - val, floor_count(f.test));
  return {n - val - test, val, test};
}

}  // namespace detail

inline DatasetSplit split_dataset(const std::vector<AnnotatedImage>& images,
                                  SplitMode mode, const SplitFractions& fractions,
                                  std::uint64_t seed) {
  if (images.empty()) throw Error(ErrorCode::kEmptyInput, "no images to split");
  if (fractions.train < 0.0 || fractions.val < 0.0 || fractions.test < 0.0 ||
      std::abs(fractions.train + fractions.val + fractions.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must be >= 0 and sum to 1");
  }
  Rng rng(seed);
  DatasetSplit out;

  if (mode == SplitMode::kImageWise) {
    std::vector<std::size_t> order(images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const auto sizes = detail::split_sizes(order.size(), fractions);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& img = images[order[k]];
      if (k < sizes[0]) {
        out.train.push_back(img);
      } else if (k < sizes[0] + sizes[1]) {
        out.val.push_back(img);
      } else {
        out.test.push_back(img);
      }
    }
    return out;
  }

  // Object-wise: partition the distinct object ids, then route images.
  const std::set<std::string> unique_ids = [&] {
    std::set<std::string> ids;
    for (const auto& img : images) ids.insert(img.object_id);
    return ids;
  }();
  std::vector<std::string> objects(unique_ids.begin(), unique_ids.end());
  std::shuffle(objects.begin(), objects.end(), rng);
  const auto sizes = detail::split_sizes(objects.size(), fractions);
  std::map<std::string, int> set_of;
  for (std::size_t k = 0; k < objects.size(); ++k) {
    set_of[objects[k]] = k < sizes[0] ? 0 : (k < sizes[0] + sizes[1] ? 1 : 2);
  }
  for (const auto& img : images) {
    switch (set_of.at(img.object_id)) {
      case 0: out.train.push_back(img); break;
      case 1: out.val.push_back(img); break;
      default: out.test.push_back(img); break;
    }
  }
  return out;
}

/// Picks one ground-truth label per image, reproducibly for a given seed.
/// The choice for an image depends only on the seed and its image_id.
inline std::map<std::string, std::size_t> pick_training_labels(
    const std::vector<AnnotatedImage>& images, std::uint64_t seed) {
  std::map<std::string, std::size_t> picks;
  for (const auto& img : images) {
    if (img.rectangles.empty()) {
      throw Error(ErrorCode::kInvalidArgument, img.image_id + ": no labels to pick from");
    }
    Rng rng = derived_rng(seed, img.image_id);
    std::uniform_int_distribution<std::size_t> dist(0, img.rectangles.size() - 1);
    picks[img.image_id] = dist(rng);
  }
  return picks;
}

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::map<std::string, bool> outcomes;  // keyed by image_id
};

inline EvalReport evaluate(const std::map<std::string, GraspRectangle>& predictions,
                           const std::vector<AnnotatedImage>& images,
                           const SuccessCriteria& criteria = {}) {
  std::map<std::string, const AnnotatedImage*> by_id;
  for (const auto& img : images) by_id[img.image_id] = &img;

  EvalReport report;
  for (const auto& [id, pred] : predictions) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kUnknownImageId, "prediction for unknown image '" + id + "'");
    }
    const bool ok = grasp_success(pred, it->second->rectangles, criteria);
    report.outcomes[id] = ok;
    report.correct += ok ? 1 : 0;
  }
  report.total = predictions.size();
  report.accuracy = report.total == 0
                        ? 0.0
                        : static_cast<double>(report.correct) / static_cast<double>(report.total);
  return report;
}

}  // namespace vsgrasp
