#pragma once

// Cornell-style grasp annotations: `<image_id>cpos.txt` holds one vertex per
// line ("x y"), four lines per rectangle. An optional `index.csv` in the same
// directory supplies image_id,object_id,width,height; otherwise the object id
// is the image id and the size is 640x480.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsgrasp/error.hpp"
#include "vsgrasp/grasp_eval.hpp"

namespace vsgrasp::cgd {

namespace fs = std::filesystem;

inline constexpr std::string_view kPositiveSuffix = "cpos.txt";

inline std::vector<GraspRectangle> parse_rectangles(std::istream& in,
                                                    const std::string& source) {
  std::vector<GraspRectangle> out;
  std::vector<Point2> pending;
  std::vector<int> pending_lines;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string xs, ys, extra;
    if (!(ss >> xs >> ys) || (ss >> extra)) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  source + ":" + std::to_string(line_no) + ": expected two numbers");
    }
    Point2 p;
    try {
      std::size_t nx = 0, ny = 0;
      p.x = std::stod(xs, &nx);
      p.y = std::stod(ys, &ny);
      if (nx != xs.size() || ny != ys.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  source + ":" + std::to_string(line_no) + ": not a number");
    }
    pending.push_back(p);
    pending_lines.push_back(line_no);
    if (pending.size() == 4) {
      const bool has_nan = std::any_of(pending.begin(), pending.end(), [](Point2 q) {
        return std::isnan(q.x) || std::isnan(q.y);
      });
      if (!has_nan) {
        try {
          out.push_back(GraspRectangle::from_vertices({pending[0], pending[1], pending[2], pending[3]}));
        } catch (const Error& e) {
          throw Error(ErrorCode::kMalformedAnnotation,
                      source + ":" + std::to_string(pending_lines.front()) + ": " + e.what());
        }
      }
      pending.clear();
      pending_lines.clear();
    }
  }
  if (!pending.empty()) {
    throw Error(ErrorCode::kMalformedAnnotation,
                source + ":" + std::to_string(pending_lines.front()) +
                    ": incomplete rectangle (vertex count not divisible by 4)");
  }
  return out;
}

inline std::vector<GraspRectangle> read_rectangles(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + file.string());
  return parse_rectangles(in, file.string());
}

inline void write_rectangles(std::ostream& out, const std::vector<GraspRectangle>& rects) {
  out << std::setprecision(17);
  for (const auto& r : rects) {
    for (const auto& p : r.vertices()) out << p.x << ' ' << p.y << '\n';
  }
}

inline void write_rectangles(const fs::path& file, const std::vector<GraspRectangle>& rects) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + file.string());
  write_rectangles(out, rects);
}

struct IndexEntry {
  std::string object_id;
  int width = 640;
  int height = 480;
};

inline std::map<std::string, IndexEntry> read_index(const fs::path& file) {
  std::map<std::string, IndexEntry> index;
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + file.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line.rfind("image_id", 0) == 0)) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 4) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  file.string() + ":" + std::to_string(line_no) + ": expected 4 columns");
    }
    try {
      index[cols[0]] = IndexEntry{cols[1], std::stoi(cols[2]), std::stoi(cols[3])};
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMalformedAnnotation,
                  file.string() + ":" + std::to_string(line_no) + ": bad image size");
    }
  }
  return index;
}

/// Loads every `*cpos.txt` in a directory, sorted by image id.
inline std::vector<AnnotatedImage> read_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  }
  std::map<std::string, IndexEntry> index;
  if (fs::exists(dir / "index.csv")) index = read_index(dir / "index.csv");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > kPositiveSuffix.size() &&
        name.ends_with(kPositiveSuffix)) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<AnnotatedImage> images;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    AnnotatedImage img;
    img.image_id = name.substr(0, name.size() - kPositiveSuffix.size());
    img.object_id = img.image_id;
    if (const auto it = index.find(img.image_id); it != index.end()) {
      img.object_id = it->second.object_id;
      img.width = it->second.width;
      img.height = it->second.height;
    }
    img.rectangles = read_rectangles(file);
    if (img.rectangles.empty()) {
      throw Error(ErrorCode::kMalformedAnnotation, file.string() + ": no rectangles");
    }
    validate(img);
    images.push_back(std::move(img));
  }
  return images;
}

/// Writes `<id>cpos.txt` per image plus index.csv.
inline void write_directory(const fs::path& dir, const std::vector<AnnotatedImage>& images) {
  fs::create_directories(dir);
  std::ofstream index(dir / "index.csv");
  if (!index) throw Error(ErrorCode::kIo, "cannot write index in " + dir.string());
  index << "image_id,object_id,width,height\n";
  for (const auto& img : images) {
    write_rectangles(dir / (img.image_id + std::string(kPositiveSuffix)), img.rectangles);
    index << img.image_id << ',' << img.object_id << ',' << img.width << ',' << img.height
          << '\n';
  }
}

// Prediction records: {"image_id": "...", "x_c":, "y_c":, "w":, "h":, "theta":}

inline nlohmann::json prediction_to_json(const std::string& image_id, const GraspParams& g) {
  return {{"image_id", image_id}, {"x_c", g.x_c}, {"y_c", g.y_c},
          {"w", g.w}, {"h", g.h}, {"theta", g.theta}};
}

inline std::map<std::string, GraspRectangle> read_predictions(std::istream& in,
                                                              const std::string& source) {
  std::map<std::string, GraspRectangle> preds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      GraspParams g{j.at("x_c").get<double>(), j.at("y_c").get<double>(),
                    j.at("w").get<double>(), j.at("h").get<double>(),
                    j.at("theta").get<double>()};
      const auto id = j.at("image_id").get<std::string>();
      if (preds.count(id) != 0) {
        throw Error(ErrorCode::kInvalidArgument, where + ": duplicate image_id " + id);
      }
      preds.emplace(id, GraspRectangle::from_params(g));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, where + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidArgument) throw;
      throw Error(ErrorCode::kInvalidArgument, where + ": " + e.what());
    }
  }
  return preds;
}

inline std::map<std::string, GraspRectangle> read_predictions(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + file.string());
  return read_predictions(in, file.string());
}

inline void write_predictions(std::ostream& out,
                              const std::map<std::string, GraspRectangle>& preds) {
  for (const auto& [id, rect] : preds) out << prediction_to_json(id, rect.params()).dump() << '\n';
}

}  // namespace vsgrasp::cgd
