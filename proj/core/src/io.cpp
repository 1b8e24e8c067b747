#include "ctr/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ctr/error.hpp"

namespace ctr {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
}

void append_u32(std::string& out, std::uint32_t v) {
  out.push_back(char(v & 0xff));
  out.push_back(char((v >> 8) & 0xff));
  out.push_back(char((v >> 16) & 0xff));
  out.push_back(char((v >> 24) & 0xff));
}

std::uint32_t read_u32(const std::string& in, std::size_t at) {
  return std::uint32_t(std::uint8_t(in[at])) | (std::uint32_t(std::uint8_t(in[at + 1])) << 8) |
         (std::uint32_t(std::uint8_t(in[at + 2])) << 16) |
         (std::uint32_t(std::uint8_t(in[at + 3])) << 24);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// image coords (y down) <-> internal frame (y up)
Vec2 to_internal(double x, double y, int height) { return {x, double(height) - y}; }
Vec2 to_image(Vec2 p, int height) { return {p.x, double(height) - p.y}; }

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) raise(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(ErrorCode::IoError, "cannot rename into place: " + path.string());
}

Annotation load_annotation(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  Annotation anno;
  try {
    anno.width = doc.at("image").at("width").get<int>();
    anno.height = doc.at("image").at("height").get<int>();
    if (anno.width <= 0 || anno.height <= 0)
      raise(ErrorCode::FormatError, "non-positive image dimensions");
    for (const json& inst : doc.at("instances")) {
      std::vector<Vec2> pts;
      for (const json& p : inst.at("points")) {
        const double x = p.at(0).get<double>();
        const double y = p.at(1).get<double>();
        if (x < -0.5 || x > anno.width + 0.5 || y < -0.5 || y > anno.height + 0.5)
          raise(ErrorCode::FormatError, "annotation point outside the image");
        pts.push_back(to_internal(x, y, anno.height));
      }
      const auto& cj = inst.at("corners");
      if (cj.size() != 4) raise(ErrorCode::FormatError, "corners must have 4 indices");
      std::array<std::size_t, 4> corners{};
      for (int k = 0; k < 4; ++k) corners[k] = cj.at(k).get<std::size_t>();
      anno.instances.push_back(validate_polygon(pts, corners));
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
  return anno;
}

void save_annotation(const Annotation& annotation, const std::filesystem::path& path) {
  json doc;
  doc["image"] = {{"width", annotation.width}, {"height", annotation.height}};
  doc["instances"] = json::array();
  for (const Polygon& poly : annotation.instances) {
    json inst;
    inst["points"] = json::array();
    for (const Vec2& v : poly.vertices) {
      const Vec2 p = to_image(v, annotation.height);
      inst["points"].push_back({p.x, p.y});
    }
    inst["corners"] = {poly.corners[0], poly.corners[1], poly.corners[2], poly.corners[3]};
    doc["instances"].push_back(std::move(inst));
  }
  atomic_write(path, doc.dump(2) + "\n");
}

void save_feature_map(const GeoFeatureMap& map, const std::filesystem::path& path) {
  std::string bytes;
  const std::size_t plane = std::size_t(map.width()) * map.height();
  bytes.reserve(20 + 4 * plane * GeoFeatureMap::kChannels);
  bytes += "CTRF";
  append_u32(bytes, 1);
  append_u32(bytes, std::uint32_t(map.height()));
  append_u32(bytes, std::uint32_t(map.width()));
  append_u32(bytes, GeoFeatureMap::kChannels);
  for (float f : map.raw()) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    append_u32(bytes, v);
  }
  atomic_write(path, bytes);
}

GeoFeatureMap load_feature_map(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 20 || bytes.compare(0, 4, "CTRF") != 0)
    raise(ErrorCode::FormatError, path.string() + ": not a feature-map file");
  const std::uint32_t version = read_u32(bytes, 4);
  if (version != 1)
    raise(ErrorCode::FormatError, path.string() + ": unsupported version");
  const std::uint32_t h = read_u32(bytes, 8);
  const std::uint32_t w = read_u32(bytes, 12);
  const std::uint32_t c = read_u32(bytes, 16);
  if (c != GeoFeatureMap::kChannels)
    raise(ErrorCode::FormatError, path.string() + ": unexpected channel count");
  const std::size_t expect = 20 + 4ull * h * w * c;
  if (bytes.size() != expect)
    raise(ErrorCode::FormatError, path.string() + ": truncated feature-map file");
  GeoFeatureMap map{int(w), int(h)};
  auto raw = map.raw();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::uint32_t v = read_u32(bytes, 20 + 4 * i);
    float f;
    std::memcpy(&f, &v, 4);
    raw[i] = f;
  }
  return map;
}

void save_detections(const std::vector<DetectedInstance>& instances, int width, int height,
                     const std::filesystem::path& path) {
  json doc;
  doc["image"] = {{"width", width}, {"height", height}};
  doc["detections"] = json::array();
  for (const DetectedInstance& inst : instances) {
    if (!inst.kept) continue;
    json det;
    det["points"] = json::array();
    for (const Vec2& v : inst.boundary.vertices) {
      const Vec2 p = to_image(v, height);
      det["points"].push_back({p.x, p.y});
    }
    det["confidence"] = inst.mean_confidence;
    det["distortion"] = inst.sigma_alpha;
    det["aspect_ratio"] = inst.aspect_ratio;
    det["decision_value"] = inst.decision_value;
    doc["detections"].push_back(std::move(det));
  }
  atomic_write(path, doc.dump(2) + "\n");
}

std::vector<Polygon> load_polygons(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  std::vector<Polygon> out;
  try {
    const int height = doc.at("image").at("height").get<int>();
    const bool is_annotation = doc.contains("instances");
    for (const json& inst : doc.at(is_annotation ? "instances" : "detections")) {
      std::vector<Vec2> pts;
      for (const json& p : inst.at("points"))
        pts.push_back(to_internal(p.at(0).get<double>(), p.at(1).get<double>(), height));
      std::array<std::size_t, 4> corners{};
      if (inst.contains("corners")) {
        for (int k = 0; k < 4; ++k) corners[k] = inst.at("corners").at(k).get<std::size_t>();
      } else {
        const std::size_t n = pts.size();
        corners = {0, n / 4, n / 2, (3 * n) / 4};
      }
      out.push_back(validate_polygon(pts, corners));
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
  return out;
}

void save_svm_model(const SvmModel& model, const std::filesystem::path& path,
                    const std::string& cv_table_json) {
  json doc;
  doc["format_version"] = model.version;
  doc["C"] = model.C;
  doc["gamma"] = model.gamma;
  doc["bias"] = model.bias;
  doc["feature_mean"] = model.feature_mean;
  doc["feature_scale"] = model.feature_scale;
  doc["support_vectors"] = json::array();
  for (const Features& sv : model.support_vectors) doc["support_vectors"].push_back(sv);
  doc["coefficients"] = model.coefficients;
  if (!cv_table_json.empty()) doc["cv_table"] = json::parse(cv_table_json);
  atomic_write(path, doc.dump(2) + "\n");
}

SvmModel load_svm_model(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  SvmModel model;
  try {
    model.version = doc.at("format_version").get<int>();
    if (model.version != 1)
      raise(ErrorCode::FormatError, path.string() + ": unsupported model version");
    model.C = doc.at("C").get<double>();
    model.gamma = doc.at("gamma").get<double>();
    model.bias = doc.at("bias").get<double>();
    for (int k = 0; k < 3; ++k) {
      model.feature_mean[k] = doc.at("feature_mean").at(k).get<double>();
      model.feature_scale[k] = doc.at("feature_scale").at(k).get<double>();
    }
    for (const json& sv : doc.at("support_vectors")) {
      if (sv.size() != 3)
        raise(ErrorCode::ModelFeatureMismatch, "support vectors must have 3 features");
      model.support_vectors.push_back({sv.at(0).get<double>(), sv.at(1).get<double>(),
                                       sv.at(2).get<double>()});
    }
    model.coefficients = doc.at("coefficients").get<std::vector<double>>();
  } catch (const json::exception& e) {
    raise(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
  if (model.coefficients.size() != model.support_vectors.size())
    raise(ErrorCode::ModelFeatureMismatch, "coefficient/support-vector count mismatch");
  return model;
}

std::string eval_report_json(const EvalReport& report) {
  json doc;
  doc["iou_thresh"] = report.iou_thresh;
  doc["precision"] = report.overall.precision;
  doc["recall"] = report.overall.recall;
  doc["f_measure"] = report.overall.f_measure;
  doc["matches"] = report.total_matches;
  doc["predictions"] = report.total_preds;
  doc["ground_truth"] = report.total_gts;
  doc["images"] = json::array();
  for (const ImageEval& ie : report.images) {
    doc["images"].push_back({{"matches", ie.matches},
                             {"preds", ie.preds},
                             {"gts", ie.gts},
                             {"min_matched_iou", ie.matches ? ie.min_matched_iou : 0.0}});
  }
  return doc.dump(2) + "\n";
}

std::string eval_report_text(const EvalReport& report) {
  std::ostringstream ss;
  ss << "images: " << report.images.size() << "  matches: " << report.total_matches
     << "/" << report.total_preds << " preds, " << report.total_gts << " gts @ IoU "
     << report.iou_thresh << "\n"
     << "precision: " << report.overall.precision << "  recall: " << report.overall.recall
     << "  f-measure: " << report.overall.f_measure << "\n";
  return ss.str();
}

}  // namespace ctr
