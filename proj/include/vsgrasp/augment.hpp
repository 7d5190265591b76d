#pragma once

// Sliding-crop augmentation: every square window that keeps all ground-truth
// rectangles inside, relabeled into the network input frame.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsgrasp/error.hpp"
#include "vsgrasp/grasp_eval.hpp"
#include "vsgrasp/random.hpp"

namespace vsgrasp {

struct CropWindow {
  int i = 0;  // horizontal offset, px
  int j = 0;  // vertical offset, px
  int side = 320;

  friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

struct AugmentedInstance {
  std::string image_id;
  CropWindow window;
  int target_side = 224;
  std::vector<GraspRectangle> rectangles;
};

struct BoundingBox {
  double x_min = std::numeric_limits<double>::infinity();
  double y_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
};

inline BoundingBox label_bounds(const AnnotatedImage& image) {
  BoundingBox b;
  for (const auto& r : image.rectangles) {
    for (const auto& p : r.vertices()) {
      b.x_min = std::min(b.x_min, p.x);
      b.y_min = std::min(b.y_min, p.y);
      b.x_max = std::max(b.x_max, p.x);
      b.y_max = std::max(b.y_max, p.y);
    }
  }
  return b;
}

/// Closed integer ranges of feasible offsets:
/// max(0, X_max - side) <= i <= min(X_min, width - side), likewise for j.
struct OffsetRanges {
  int i_lo = 0, i_hi = -1;
  int j_lo = 0, j_hi = -1;
  int side = 320;
  int stride = 1;

  std::size_t count_i() const {
    return i_hi < i_lo ? 0 : static_cast<std::size_t>((i_hi - i_lo) / stride + 1);
  }
  std::size_t count_j() const {
    return j_hi < j_lo ? 0 : static_cast<std::size_t>((j_hi - j_lo) / stride + 1);
  }
  std::size_t count() const { return count_i() * count_j(); }

  /// Row-major (j outer, i inner) enumeration index -> window.
  CropWindow at(std::size_t k) const {
    const std::size_t ni = count_i();
    return CropWindow{i_lo + static_cast<int>(k % ni) * stride,
                      j_lo + static_cast<int>(k / ni) * stride, side};
  }
};

inline OffsetRanges offset_ranges(const AnnotatedImage& image, int side, int stride) {
  validate(image);
  if (side <= 0 || side > std::min(image.width, image.height)) {
    throw Error(ErrorCode::kInvalidArgument,
                image.image_id + ": crop side must be in (0, min(width, height)]");
  }
  if (stride < 1) throw Error(ErrorCode::kInvalidArgument, "stride must be >= 1");

  const BoundingBox b = label_bounds(image);
  OffsetRanges r;
  r.side = side;
  r.stride = stride;
  r.i_lo = std::max(0, static_cast<int>(std::ceil(b.x_max - side)));
  r.i_hi = std::min(static_cast<int>(std::floor(b.x_min)), image.width - side);
  r.j_lo = std::max(0, static_cast<int>(std::ceil(b.y_max - side)));
  r.j_hi = std::min(static_cast<int>(std::floor(b.y_min)), image.height - side);
  if (r.i_hi < r.i_lo || r.j_hi < r.j_lo) {
    throw Error(ErrorCode::kNoValidWindow,
                image.image_id + ": label bounding box does not fit a " +
                    std::to_string(side) + " px window");
  }
  return r;
}

inline std::vector<CropWindow> valid_offsets(const AnnotatedImage& image, int side = 320,
                                             int stride = 1) {
  const OffsetRanges r = offset_ranges(image, side, stride);
  std::vector<CropWindow> out;
  out.reserve(r.count());
  for (std::size_t k = 0; k < r.count(); ++k) out.push_back(r.at(k));
  return out;
}

inline bool window_contains_labels(const AnnotatedImage& image, const CropWindow& w) {
  if (w.i < 0 || w.j < 0 || w.i + w.side > image.width || w.j + w.side > image.height) {
    return false;
  }
  const BoundingBox b = label_bounds(image);
  return b.x_min >= w.i && b.y_min >= w.j && b.x_max <= w.i + w.side &&
         b.y_max <= w.j + w.side;
}

/// (x, y) -> ((x - i) s, (y - j) s) with s = target_side / side.
inline AugmentedInstance crop_and_relabel(const AnnotatedImage& image, const CropWindow& window,
                                          int target_side = 224) {
  if (target_side <= 0) throw Error(ErrorCode::kInvalidArgument, "target side must be positive");
  if (!window_contains_labels(image, window)) {
    throw Error(ErrorCode::kWindowOutOfRange,
                image.image_id + ": window (" + std::to_string(window.i) + ", " +
                    std::to_string(window.j) + ") does not contain every label");
  }
  const double s = static_cast<double>(target_side) / static_cast<double>(window.side);
  AugmentedInstance out{image.image_id, window, target_side, {}};
  out.rectangles.reserve(image.rectangles.size());
  for (const auto& r : image.rectangles) {
    Quad q = r.vertices();
    for (auto& p : q) p = Point2{(p.x - window.i) * s, (p.y - window.j) * s};
    out.rectangles.push_back(GraspRectangle::from_vertices(q));
  }
  return out;
}

/// Interleaved 8-bit raster, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;
};

inline Raster crop_raster(const Raster& src, const CropWindow& w) {
  if (w.i < 0 || w.j < 0 || w.i + w.side > src.width || w.j + w.side > src.height) {
    throw Error(ErrorCode::kWindowOutOfRange, "crop outside raster");
  }
  Raster out{w.side, w.side, src.channels, {}};
  out.data.resize(static_cast<std::size_t>(w.side) * w.side * src.channels);
  const std::size_t row_bytes = static_cast<std::size_t>(w.side) * src.channels;
  for (int r = 0; r < w.side; ++r) {
    const auto from = src.data.begin() +
                      (static_cast<std::ptrdiff_t>(w.j + r) * src.width + w.i) * src.channels;
    std::copy(from, from + static_cast<std::ptrdiff_t>(row_bytes),
              out.data.begin() + static_cast<std::ptrdiff_t>(r * row_bytes));
  }
  return out;
}

struct AugmentOptions {
  int side = 320;
  int target_side = 224;
  int stride = 1;
  std::optional<std::size_t> cap_per_image;
  std::uint64_t seed = 0;
};

struct ManifestRow {
  std::string image_id;
  std::size_t window_count = 0;
  bool skipped = false;
};

struct Manifest {
  std::vector<ManifestRow> rows;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.window_count;
    return n;
  }
};

/// Streams crops of a single image to `sink` and returns its manifest row.
/// Capped images take a seeded selection sample, kept in enumeration order.
inline ManifestRow expand_image(const AnnotatedImage& image, const AugmentOptions& opt,
                                const std::function<void(const AugmentedInstance&)>& sink) {
  OffsetRanges ranges;
  try {
    ranges = offset_ranges(image, opt.side, opt.stride);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoValidWindow) throw;
    return ManifestRow{image.image_id, 0, true};
  }
  const std::size_t n = ranges.count();
  const std::size_t want = opt.cap_per_image ? std::min(*opt.cap_per_image, n) : n;

  Rng rng = derived_rng(opt.seed, image.image_id);
  selection_sample(n, want, rng, [&](std::uint64_t k) {
    sink(crop_and_relabel(image, ranges.at(k), opt.target_side));
  });
  return ManifestRow{image.image_id, want, false};
}

inline Manifest expand_dataset(const std::vector<AnnotatedImage>& images,
                               const AugmentOptions& opt,
                               const std::function<void(const AugmentedInstance&)>& sink) {
  Manifest m;
  m.rows.reserve(images.size());
  for (const auto& img : images) m.rows.push_back(expand_image(img, opt, sink));
  return m;
}

inline nlohmann::json to_json(const AugmentedInstance& a) {
  nlohmann::json rects = nlohmann::json::array();
  for (const auto& r : a.rectangles) {
    nlohmann::json quad = nlohmann::json::array();
    for (const auto& p : r.vertices()) quad.push_back({p.x, p.y});
    rects.push_back(std::move(quad));
  }
  return {{"image_id", a.image_id},
          {"window", {{"i", a.window.i}, {"j", a.window.j}, {"side", a.window.side}}},
          {"target_side", a.target_side},
          {"rectangles", std::move(rects)}};
}

inline AugmentedInstance augmented_from_json(const nlohmann::json& j) {
  AugmentedInstance a;
  a.image_id = j.at("image_id").get<std::string>();
  a.window = CropWindow{j.at("window").at("i").get<int>(), j.at("window").at("j").get<int>(),
                        j.at("window").at("side").get<int>()};
  a.target_side = j.at("target_side").get<int>();
  for (const auto& quad : j.at("rectangles")) {
    if (quad.size() != 4) throw Error(ErrorCode::kInvalidArgument, "rectangle needs 4 vertices");
    Quad q;
    for (std::size_t k = 0; k < 4; ++k) q[k] = Point2{quad[k][0].get<double>(), quad[k][1].get<double>()};
    a.rectangles.push_back(GraspRectangle::from_vertices(q));
  }
  return a;
}

inline void write_manifest_csv(std::ostream& out, const Manifest& m) {
  out << "image_id,window_count,skipped\n";
  for (const auto& r : m.rows) {
    out << r.image_id << ',' << r.window_count << ',' << (r.skipped ? 1 : 0) << '\n';
  }
}

}  // namespace vsgrasp
