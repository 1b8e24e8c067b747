#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "ctr/error.hpp"
#include "ctr/io.hpp"
#include "ctr/labelgen.hpp"
#include "ctr/svm.hpp"
#include "ctr/synth.hpp"

using namespace ctr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ctr_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

Polygon rect_poly(double x0, double y0, double x1, double y1) {
  const std::vector<Vec2> pts{{x0, y1}, {x1, y1}, {x1, y0}, {x0, y0}};
  return validate_polygon(pts, {0, 1, 2, 3});
}

}  // namespace

TEST_CASE("feature map files round trip bit-exactly with the documented size") {
  TempDir tmp;
  const std::vector<Polygon> instances{rect_poly(4, 8, 44, 24)};
  const GeoFeatureMap map = rasterize_labels(48, 32, instances);
  const fs::path file = tmp.path / "map.ctrf";
  save_feature_map(map, file);

  CHECK(fs::file_size(file) == 20 + 4ull * 48 * 32 * 6);
  const GeoFeatureMap loaded = load_feature_map(file);
  REQUIRE(loaded.width() == map.width());
  REQUIRE(loaded.height() == map.height());
  const auto a = map.raw(), b = loaded.raw();
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);

  // save the loaded copy: the bytes must be identical
  const fs::path file2 = tmp.path / "map2.ctrf";
  save_feature_map(loaded, file2);
  std::ifstream f1(file, std::ios::binary), f2(file2, std::ios::binary);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
}

TEST_CASE("feature map loader rejects malformed files") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.ctrf";
  atomic_write(bad, "NOPE this is not a tensor");
  CHECK_THROWS_AS(load_feature_map(bad), Error);

  const GeoFeatureMap map(4, 4);
  const fs::path good = tmp.path / "good.ctrf";
  save_feature_map(map, good);
  std::string bytes;
  {
    std::ifstream in(good, std::ios::binary);
    bytes.assign((std::istreambuf_iterator<char>(in)), {});
  }
  bytes.resize(bytes.size() - 5);
  const fs::path trunc = tmp.path / "trunc.ctrf";
  atomic_write(trunc, bytes);
  CHECK_THROWS_AS(load_feature_map(trunc), Error);
  try {
    load_feature_map(trunc);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FormatError);
  }
}

TEST_CASE("annotations survive the image-frame round trip") {
  TempDir tmp;
  Annotation anno;
  anno.width = 200;
  anno.height = 100;
  anno.instances.push_back(rect_poly(10, 20, 90, 60));
  anno.instances.push_back(generate_ribbon({100, 24, 1.2, 12, 9}));
  const fs::path file = tmp.path / "anno.json";
  save_annotation(anno, file);
  const Annotation loaded = load_annotation(file);
  CHECK(loaded.width == anno.width);
  CHECK(loaded.height == anno.height);
  REQUIRE(loaded.instances.size() == anno.instances.size());
  for (std::size_t i = 0; i < anno.instances.size(); ++i) {
    const Polygon& a = anno.instances[i];
    const Polygon& b = loaded.instances[i];
    REQUIRE(a.size() == b.size());
    CHECK(polygon_iou(a, b) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.corners == a.corners);
  }
}

TEST_CASE("annotation loader rejects out-of-bounds points and bad JSON") {
  TempDir tmp;
  const fs::path bad_json = tmp.path / "corrupt.json";
  atomic_write(bad_json, "{ not json");
  CHECK_THROWS_AS(load_annotation(bad_json), Error);

  const fs::path oob = tmp.path / "oob.json";
  atomic_write(oob, R"({"image":{"width":10,"height":10},
    "instances":[{"points":[[0,0],[50,0],[50,5],[0,5]],"corners":[0,1,2,3]}]})");
  CHECK_THROWS_AS(load_annotation(oob), Error);
}

TEST_CASE("svm models round trip through JSON") {
  TempDir tmp;
  std::vector<Features> x;
  std::vector<int> y;
  for (int i = 0; i < 12; ++i) {
    x.push_back({0.2 * i, std::sin(double(i)), i % 2 ? 1.0 : 0.0});
    y.push_back(i % 2 ? 1 : -1);
  }
  const SvmModel model = train_smo(x, y, 10.0, 0.7);
  const fs::path file = tmp.path / "model.json";
  save_svm_model(model, file, R"([{"C":10,"gamma":0.7,"mean_accuracy":1.0}])");
  const SvmModel loaded = load_svm_model(file);
  for (const Features& f : x) {
    const auto [l1, v1] = predict(model, f);
    const auto [l2, v2] = predict(loaded, f);
    CHECK(l1 == l2);
    CHECK(v1 == doctest::Approx(v2).epsilon(1e-12));
  }
}

TEST_CASE("model loader rejects wrong feature arity") {
  TempDir tmp;
  const fs::path file = tmp.path / "bad_model.json";
  atomic_write(file, R"({"format_version":1,"C":1.0,"gamma":1.0,"bias":0.0,
    "feature_mean":[0,0,0],"feature_scale":[1,1,1],
    "support_vectors":[[0.5,0.5]],"coefficients":[1.0]})");
  CHECK_THROWS_AS(load_svm_model(file), Error);
  try {
    load_svm_model(file);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModelFeatureMismatch);
  }
}

TEST_CASE("detections file feeds back into polygon loading") {
  TempDir tmp;
  std::vector<DetectedInstance> instances(1);
  instances[0].boundary = rect_poly(5, 5, 25, 15);
  instances[0].mean_confidence = 0.9;
  instances[0].sigma_alpha = 0.05;
  instances[0].aspect_ratio = 2.0;
  instances[0].kept = true;
  const fs::path file = tmp.path / "det.json";
  save_detections(instances, 64, 32, file);
  const std::vector<Polygon> polys = load_polygons(file);
  REQUIRE(polys.size() == 1);
  CHECK(polygon_iou(polys[0], instances[0].boundary) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("atomic_write leaves no temporary behind") {
  TempDir tmp;
  const fs::path file = tmp.path / "x.txt";
  atomic_write(file, "payload");
  CHECK(fs::exists(file));
  CHECK_FALSE(fs::exists(tmp.path / "x.txt.tmp"));
}
