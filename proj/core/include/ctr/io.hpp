#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ctr/evalkit.hpp"
#include "ctr/feature_map.hpp"
#include "ctr/geometry.hpp"
#include "ctr/postproc.hpp"
#include "ctr/svm.hpp"

namespace ctr {

/// Image-space annotation file parsed into the internal y-up frame.
struct Annotation {
  int width = 0, height = 0;
  std::vector<Polygon> instances;
};

Annotation load_annotation(const std::filesystem::path& path);
void save_annotation(const Annotation& annotation, const std::filesystem::path& path);

/// Binary feature-map container: magic "CTRF", version, dims, then six
/// float32 planes (text, r_k, r_e, alpha, q1, q2), row 0 at the image top.
void save_feature_map(const GeoFeatureMap& map, const std::filesystem::path& path);
GeoFeatureMap load_feature_map(const std::filesystem::path& path);

void save_detections(const std::vector<DetectedInstance>& instances, int width, int height,
                     const std::filesystem::path& path);
/// Accepts either a detections file or an annotation file; polygons come back
/// in the internal frame.
std::vector<Polygon> load_polygons(const std::filesystem::path& path);

void save_svm_model(const SvmModel& model, const std::filesystem::path& path,
                    const std::string& cv_table_json = "");
SvmModel load_svm_model(const std::filesystem::path& path);

std::string eval_report_json(const EvalReport& report);
std::string eval_report_text(const EvalReport& report);

/// Write-then-rename so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

}  // namespace ctr
