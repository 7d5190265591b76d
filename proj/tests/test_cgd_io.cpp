#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "vsgrasp/cgd_io.hpp"

namespace vsgrasp {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("vsgrasp_cgd_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string MessageOf(const std::string& text) {
  std::istringstream in(text);
  try {
    cgd::parse_rectangles(in, "sample.txt");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedAnnotation);
    return e.what();
  }
  return "";
}

TEST(ParseRectangles, ReadsGroupsOfFour) {
  std::istringstream in("0 0\n2 0\n2 2\n0 2\n\n10 10\n14 10\n14 12\n10 12\n");
  const auto rects = cgd::parse_rectangles(in, "x");
  ASSERT_EQ(rects.size(), 2u);
  EXPECT_EQ(rects[0].params(), (GraspParams{1, 1, 2, 2, 0}));
  EXPECT_EQ(rects[1].params(), (GraspParams{12, 11, 4, 2, 0}));
}

TEST(ParseRectangles, SkipsRectanglesWithNaN) {
  std::istringstream in("0 0\n2 0\nNaN NaN\n0 2\n0 0\n2 0\n2 2\n0 2\n");
  EXPECT_EQ(cgd::parse_rectangles(in, "x").size(), 1u);
}

TEST(ParseRectangles, ReportsFileAndLine) {
  EXPECT_NE(MessageOf("0 0\n2 0\n2 abc\n0 2\n").find("sample.txt:3"), std::string::npos);
  EXPECT_NE(MessageOf("0 0\n2 0 7\n").find("sample.txt:2"), std::string::npos);
  EXPECT_NE(MessageOf("0 0\n2 0\n2 2\n0 2\n5 5\n").find("sample.txt:5"), std::string::npos);
  EXPECT_NE(MessageOf("0 0\n0 0\n0 2\n0 2\n").find("sample.txt:1"), std::string::npos);
  EXPECT_NE(MessageOf("3\n").find("sample.txt:1"), std::string::npos);
}

TEST(Directory, RoundTripsWithIndex) {
  TempDir dir;
  std::vector<AnnotatedImage> images;
  for (int k = 0; k < 4; ++k) {
    AnnotatedImage img;
    img.image_id = "pcd010" + std::to_string(k);
    img.object_id = k < 2 ? "mug" : "pen";
    img.width = 640;
    img.height = 480;
    img.rectangles.push_back(GraspRectangle::from_params({100.125 + k, 200.5, 30, 10, 12.34567890123}));
    img.rectangles.push_back(GraspRectangle::from_params({300, 220, 25, 12, -60}));
    images.push_back(img);
  }
  cgd::write_directory(dir.path(), images);
  const auto back = cgd::read_directory(dir.path());
  ASSERT_EQ(back.size(), images.size());
  for (std::size_t k = 0; k < images.size(); ++k) {
    EXPECT_EQ(back[k].image_id, images[k].image_id);
    EXPECT_EQ(back[k].object_id, images[k].object_id);
    ASSERT_EQ(back[k].rectangles.size(), 2u);
    for (std::size_t r = 0; r < 2; ++r) {
      EXPECT_EQ(back[k].rectangles[r].vertices(), images[k].rectangles[r].vertices());
    }
  }
}

TEST(Directory, DefaultsWithoutIndexAndIgnoresOtherFiles) {
  TempDir dir;
  WriteFile(dir.path() / "b7cpos.txt", "0 0\n2 0\n2 2\n0 2\n");
  WriteFile(dir.path() / "a1cpos.txt", "0 0\n2 0\n2 2\n0 2\n");
  WriteFile(dir.path() / "a1cneg.txt", "garbage\n");
  WriteFile(dir.path() / "notes.md", "hello\n");
  const auto images = cgd::read_directory(dir.path());
  ASSERT_EQ(images.size(), 2u);
  EXPECT_EQ(images[0].image_id, "a1");
  EXPECT_EQ(images[0].object_id, "a1");
  EXPECT_EQ(images[0].width, 640);
  EXPECT_EQ(images[1].image_id, "b7");
}

TEST(Directory, Errors) {
  TempDir dir;
  EXPECT_THROW(cgd::read_directory(dir.path() / "missing"), Error);
  WriteFile(dir.path() / "x1cpos.txt", "0 0\n2 0\n2 2\n");
  try {
    cgd::read_directory(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedAnnotation);
    EXPECT_NE(std::string(e.what()).find("x1cpos.txt:1"), std::string::npos);
  }
  WriteFile(dir.path() / "x1cpos.txt", "0 0\n2 0\n2 2\n0 2\n");
  WriteFile(dir.path() / "index.csv", "image_id,object_id,width,height\nx1,o,wide,480\n");
  EXPECT_THROW(cgd::read_directory(dir.path()), Error);
}

TEST(Predictions, RoundTrip) {
  std::map<std::string, GraspRectangle> preds;
  preds.emplace("a", GraspRectangle::from_params({1.5, 2.25, 30, 10, 45}));
  preds.emplace("b", GraspRectangle::from_params({100.1, 7, 3, 4, -12.5}));
  std::stringstream ss;
  cgd::write_predictions(ss, preds);
  const auto back = cgd::read_predictions(ss, "p");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.at("a").params(), preds.at("a").params());
  EXPECT_EQ(back.at("b").params(), preds.at("b").params());
}

TEST(Predictions, Errors) {
  std::istringstream dup(
      "{\"image_id\":\"a\",\"x_c\":1,\"y_c\":1,\"w\":2,\"h\":2,\"theta\":0}\n"
      "{\"image_id\":\"a\",\"x_c\":1,\"y_c\":1,\"w\":2,\"h\":2,\"theta\":0}\n");
  EXPECT_THROW(cgd::read_predictions(dup, "p"), Error);
  std::istringstream missing("{\"image_id\":\"a\",\"x_c\":1}\n");
  try {
    cgd::read_predictions(missing, "p");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("p:1"), std::string::npos);
  }
  std::istringstream bad_size("{\"image_id\":\"a\",\"x_c\":1,\"y_c\":1,\"w\":0,\"h\":2,\"theta\":0}\n");
  EXPECT_THROW(cgd::read_predictions(bad_size, "p"), Error);
}

}  // namespace
}  // namespace vsgrasp
