#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "ctr/corpus.hpp"
#include "ctr/error.hpp"
#include "ctr/evalkit.hpp"
#include "ctr/io.hpp"
#include "ctr/labelgen.hpp"
#include "ctr/postproc.hpp"
#include "ctr/render.hpp"
#include "ctr/rng.hpp"
#include "ctr/svm.hpp"
#include "ctr/synth.hpp"
#include "png_io.hpp"

using json = nlohmann::json;
using namespace ctr;

namespace {

unsigned thread_count() {
  if (const char* env = std::getenv("CTRF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return unsigned(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = std::min<std::size_t>(thread_count(), n ? n : 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CorpusConfig load_corpus_config(const std::string& path) {
  CorpusConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::FormatError, path + ": " + e.what());
  }
  cfg.images = doc.value("images", cfg.images);
  cfg.width = doc.value("width", cfg.width);
  cfg.height = doc.value("height", cfg.height);
  cfg.min_instances = doc.value("min_instances", cfg.min_instances);
  cfg.max_instances = doc.value("max_instances", cfg.max_instances);
  cfg.min_aspect = doc.value("min_aspect", cfg.min_aspect);
  cfg.max_aspect = doc.value("max_aspect", cfg.max_aspect);
  cfg.min_height = doc.value("min_height", cfg.min_height);
  cfg.max_height = doc.value("max_height", cfg.max_height);
  if (doc.contains("max_curvature_deg"))
    cfg.max_curvature = doc["max_curvature_deg"].get<double>() * std::numbers::pi / 180.0;
  cfg.curvature_aspect_cap = doc.value("curvature_aspect_cap", cfg.curvature_aspect_cap);
  cfg.rotate = doc.value("rotate", cfg.rotate);
  cfg.boundary_points = doc.value("boundary_points", cfg.boundary_points);
  cfg.seed = doc.value("seed", cfg.seed);
  return cfg;
}

NoiseConfig load_noise_config(const std::string& path) {
  NoiseConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    raise(ErrorCode::FormatError, path + ": " + e.what());
  }
  cfg.sigma_r = doc.value("sigma_r", cfg.sigma_r);
  cfg.sigma_alpha = doc.value("sigma_alpha", cfg.sigma_alpha);
  cfg.flip_prob = doc.value("flip_prob", cfg.flip_prob);
  cfg.conf_blur = doc.value("conf_blur", cfg.conf_blur);
  cfg.spurious_blob_rate = doc.value("spurious_blob_rate", cfg.spurious_blob_rate);
  cfg.seed = doc.value("seed", cfg.seed);
  return cfg;
}

json diagnostics_to_json(const InstanceDiagnostics& d) {
  json j;
  j["instance"] = d.index;
  j["ok"] = d.ok;
  j["w_c"] = d.w_c;
  j["h_c"] = d.h_c;
  j["flipped_triangles"] = d.flipped_triangles;
  j["solve_seconds"] = d.solve_seconds;
  j["max_colinearity_dev"] = d.max_colinearity_dev;
  j["mean_colinearity_dev"] = d.mean_colinearity_dev;
  if (!d.error.empty()) j["error"] = d.error;
  return j;
}

// ---------------------------------------------------------------------------

struct LabelsArgs {
  std::string anno, out, log;
  double max_area_frac = 1.0 / 2000.0;
  bool paper_area = false;
  std::size_t budget = 200000;
};

int cmd_labels(const LabelsArgs& args) {
  const Annotation anno = load_annotation(args.anno);
  LabelConfig cfg;
  cfg.ctr.max_area_fraction = args.max_area_frac;
  cfg.ctr.normalized_area_mode = args.paper_area;
  cfg.ctr.max_vertices = args.budget;
  std::vector<InstanceDiagnostics> diags;
  const GeoFeatureMap map =
      rasterize_labels(anno.width, anno.height, anno.instances, cfg, &diags);
  save_feature_map(map, args.out);

  std::ostringstream log;
  for (const auto& d : diags) log << diagnostics_to_json(d).dump() << "\n";
  if (args.log.empty())
    std::cerr << log.str();
  else
    atomic_write(args.log, log.str());
  int failed = 0;
  for (const auto& d : diags)
    if (!d.ok) {
      ++failed;
      std::cerr << "error: instance " << d.index << " skipped: " << d.error << "\n";
    }
  return failed ? 2 : 0;  // map is written either way; skipped instances are reported
}

struct DetectArgs {
  std::string map, model, out, debug_dump;
  double conf = 0.65, cls = 0.5, kernel_scale = 0.0;
  int min_size = 10;
};

int cmd_detect(const DetectArgs& args) {
  const GeoFeatureMap map = load_feature_map(args.map);
  std::optional<SvmModel> model;
  if (!args.model.empty()) model = load_svm_model(args.model);
  PostprocConfig cfg;
  cfg.conf_thresh = args.conf;
  cfg.cls_thresh = args.cls;
  cfg.kernel_scale = args.kernel_scale;
  cfg.min_candidates = args.min_size;
  cfg.collect_debug = !args.debug_dump.empty();
  const DetectResult result = detect(map, cfg, model ? &*model : nullptr);
  save_detections(result.instances, map.width(), map.height(), args.out);
  if (!args.debug_dump.empty()) {
    std::ostringstream dump;
    for (const KernelStamp& s : result.debug_stamps) {
      json j;
      j["row"] = s.row;
      j["col"] = s.col;
      j["radius"] = s.radius;
      dump << j.dump() << "\n";
    }
    atomic_write(args.debug_dump, dump.str());
  }
  return 0;
}

struct RoundtripArgs {
  std::string corpus, noise, report, model, dump_dir;
  double kernel_scale = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct PipelineOutput {
  std::vector<std::vector<Polygon>> detections;
  std::vector<std::vector<Polygon>> truth;
  std::vector<std::vector<LabeledDetection>> labeled;  // features + boundary per image
  double label_seconds = 0.0, perturb_seconds = 0.0, detect_seconds = 0.0;
};

PipelineOutput run_pipeline(const std::vector<CorpusImage>& corpus, const NoiseConfig& noise,
                            const PostprocConfig& post, const SvmModel* model,
                            const std::string& dump_dir) {
  PipelineOutput out;
  out.detections.resize(corpus.size());
  out.truth.resize(corpus.size());
  out.labeled.resize(corpus.size());
  std::atomic<double> label_s{0.0}, perturb_s{0.0}, detect_s{0.0};

  parallel_for(corpus.size(), [&](std::size_t i) {
    const CorpusImage& image = corpus[i];
    out.truth[i] = image.instances;

    auto t0 = std::chrono::steady_clock::now();
    const GeoFeatureMap labels =
        rasterize_labels(image.width, image.height, image.instances);
    label_s.fetch_add(seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    NoiseConfig img_noise = noise;
    img_noise.seed = Rng::mix(noise.seed, i + 1);
    const GeoFeatureMap noisy = perturb(labels, img_noise);
    perturb_s.fetch_add(seconds_since(t0));

    t0 = std::chrono::steady_clock::now();
    const DetectResult result = detect(noisy, post, model);
    detect_s.fetch_add(seconds_since(t0));

    for (const DetectedInstance& inst : result.instances) {
      if (!inst.kept) continue;
      out.detections[i].push_back(inst.boundary);
      out.labeled[i].push_back(
          {{inst.mean_confidence, inst.sigma_alpha, inst.aspect_ratio}, inst.boundary});
    }

    if (!dump_dir.empty()) {
      const std::filesystem::path dir(dump_dir);
      std::filesystem::create_directories(dir);
      Annotation anno{image.width, image.height, image.instances};
      save_annotation(anno, dir / ("image_" + std::to_string(i) + ".json"));
      save_feature_map(noisy, dir / ("image_" + std::to_string(i) + ".ctrf"));
      save_detections(result.instances, image.width, image.height,
                      dir / ("image_" + std::to_string(i) + "_det.json"));
    }
  });
  out.label_seconds = label_s.load();
  out.perturb_seconds = perturb_s.load();
  out.detect_seconds = detect_s.load();
  return out;
}

int cmd_roundtrip(const RoundtripArgs& args) {
  CorpusConfig corpus_cfg = load_corpus_config(args.corpus);
  NoiseConfig noise_cfg = load_noise_config(args.noise);
  if (args.seed_set) {
    corpus_cfg.seed = args.seed;
    noise_cfg.seed = args.seed + 1000;
  }
  std::optional<SvmModel> model;
  if (!args.model.empty()) model = load_svm_model(args.model);
  PostprocConfig post;
  post.kernel_scale = args.kernel_scale;

  const auto wall0 = std::chrono::steady_clock::now();
  const std::vector<CorpusImage> corpus = build_corpus(corpus_cfg);
  const PipelineOutput pipe =
      run_pipeline(corpus, noise_cfg, post, model ? &*model : nullptr, args.dump_dir);
  const auto t0 = std::chrono::steady_clock::now();
  const EvalReport report = evaluate(pipe.detections, pipe.truth, 0.5);
  const double eval_seconds = seconds_since(t0);

  json doc = json::parse(eval_report_json(report));
  doc["config"] = {{"corpus_seed", corpus_cfg.seed},
                   {"noise_seed", noise_cfg.seed},
                   {"kernel_scale", args.kernel_scale},
                   {"images", corpus_cfg.images},
                   {"filtered", bool(model)}};
  doc["timings"] = {{"label_seconds", pipe.label_seconds},
                    {"perturb_seconds", pipe.perturb_seconds},
                    {"detect_seconds", pipe.detect_seconds},
                    {"eval_seconds", eval_seconds},
                    {"wall_seconds", seconds_since(wall0)}};
  if (!args.report.empty()) atomic_write(args.report, doc.dump(2) + "\n");
  std::cout << eval_report_text(report);
  return 0;
}

struct TrainFilterArgs {
  std::string corpus, noise, out;
  int folds = 5;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_train_filter(const TrainFilterArgs& args) {
  CorpusConfig corpus_cfg = load_corpus_config(args.corpus);
  NoiseConfig noise_cfg = load_noise_config(args.noise);
  if (args.seed_set) {
    corpus_cfg.seed = args.seed;
    noise_cfg.seed = args.seed + 1000;
  }
  const std::vector<CorpusImage> corpus = build_corpus(corpus_cfg);
  const PipelineOutput pipe = run_pipeline(corpus, noise_cfg, {}, nullptr, "");

  const FilterDataset dataset = build_filter_dataset(pipe.labeled, pipe.truth, 0.5);
  bool has_pos = false, has_neg = false;
  for (int y : dataset.labels) (y > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    raise(ErrorCode::SingleClassData,
          "corpus produced a single label class; add noise or spurious blobs");

  const GridSearchResult grid =
      grid_search_cv(dataset.samples, dataset.labels, default_c_grid(), default_gamma_grid(),
                     args.folds, noise_cfg.seed);
  const SvmModel model =
      train_smo(dataset.samples, dataset.labels, grid.best_C, grid.best_gamma);

  json table = json::array();
  for (const CvEntry& e : grid.table)
    table.push_back({{"C", e.C}, {"gamma", e.gamma}, {"mean_accuracy", e.mean_accuracy}});
  save_svm_model(model, args.out, table.dump());
  std::cout << "samples: " << dataset.samples.size() << "  best C: " << grid.best_C
            << "  best gamma: " << grid.best_gamma << "  cv accuracy: " << grid.best_accuracy
            << "\n";
  return 0;
}

struct EvalArgs {
  std::vector<std::string> gt, pred;
  double iou = 0.5;
  std::string out;
};

int cmd_eval(const EvalArgs& args) {
  if (args.gt.size() != args.pred.size() || args.gt.empty())
    raise(ErrorCode::FormatError, "--gt and --pred must be paired");
  std::vector<std::vector<Polygon>> gts, preds;
  for (std::size_t i = 0; i < args.gt.size(); ++i) {
    gts.push_back(load_polygons(args.gt[i]));
    preds.push_back(load_polygons(args.pred[i]));
  }
  const EvalReport report = evaluate(preds, gts, args.iou);
  if (!args.out.empty()) atomic_write(args.out, eval_report_json(report));
  std::cout << eval_report_text(report);
  return 0;
}

struct RenderArgs {
  std::string map, channel = "alpha", out;
};

int cmd_render(const RenderArgs& args) {
  if (!is_render_channel(args.channel))
    raise(ErrorCode::FormatError, "unknown channel: " + args.channel);
  const GeoFeatureMap map = load_feature_map(args.map);
  const RgbImage image = render_channel(map, args.channel);
  write_png(image, args.out);
  return 0;
}

int classify_exit(const Error& e) {
  switch (e.code()) {
    case ErrorCode::TooFewVertices:
    case ErrorCode::NonSimplePolygon:
    case ErrorCode::BadCorners:
    case ErrorCode::ModelFeatureMismatch:
    case ErrorCode::SingleClassData:
    case ErrorCode::InsufficientData:
    case ErrorCode::FormatError:
    case ErrorCode::IoError:
      return 1;  // input problem
    default:
      return 2;  // internal failure
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conceptual-text-region pipeline tool"};
  app.require_subcommand(1);

  LabelsArgs labels;
  auto* labels_cmd = app.add_subcommand("labels", "rasterize geometric labels for an annotation");
  labels_cmd->add_option("--anno", labels.anno, "annotation JSON")->required();
  labels_cmd->add_option("--out", labels.out, "output feature-map file")->required();
  labels_cmd->add_option("--log", labels.log, "per-instance diagnostics JSONL (default stderr)");
  labels_cmd->add_option("--max-area-frac", labels.max_area_frac,
                         "max triangle area as a fraction of instance area");
  labels_cmd->add_flag("--paper-area", labels.paper_area,
                       "use the normalized 1e-5 max-area rule instead");
  labels_cmd->add_option("--budget", labels.budget, "refinement vertex budget");

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "post-process a feature map into detections");
  detect_cmd->add_option("--map", det.map, "feature-map file")->required();
  detect_cmd->add_option("--model", det.model, "optional SVM filter model");
  detect_cmd->add_option("--out", det.out, "detections JSON")->required();
  detect_cmd->add_option("--conf", det.conf, "confidence threshold");
  detect_cmd->add_option("--cls-thresh", det.cls, "classification threshold");
  detect_cmd->add_option("--kernel-scale", det.kernel_scale, "kernel disk scale s");
  detect_cmd->add_option("--min-size", det.min_size, "minimum candidate support per cluster");
  detect_cmd->add_option("--debug-dump", det.debug_dump, "kernel stamp dump JSONL");

  RoundtripArgs rt;
  auto* rt_cmd = app.add_subcommand("roundtrip", "corpus -> labels -> noise -> detect -> eval");
  rt_cmd->add_option("--corpus", rt.corpus, "corpus config JSON");
  rt_cmd->add_option("--noise", rt.noise, "noise config JSON");
  rt_cmd->add_option("--report", rt.report, "report JSON path");
  rt_cmd->add_option("--model", rt.model, "optional SVM filter model");
  rt_cmd->add_option("--kernel-scale", rt.kernel_scale, "kernel disk scale s");
  rt_cmd->add_option("--dump-dir", rt.dump_dir, "dump per-image artifacts here");
  auto* rt_seed = rt_cmd->add_option("--seed", rt.seed, "override corpus/noise seeds");

  TrainFilterArgs tf;
  auto* tf_cmd = app.add_subcommand("train-filter", "grid-search and train the SVM filter");
  tf_cmd->add_option("--corpus", tf.corpus, "corpus config JSON");
  tf_cmd->add_option("--noise", tf.noise, "noise config JSON");
  tf_cmd->add_option("--out", tf.out, "model output path")->required();
  tf_cmd->add_option("--folds", tf.folds, "cross-validation folds");
  auto* tf_seed = tf_cmd->add_option("--seed", tf.seed, "override corpus/noise seeds");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "score detections against ground truth");
  eval_cmd->add_option("--gt", ev.gt, "ground-truth annotation JSON (repeatable)")->required();
  eval_cmd->add_option("--pred", ev.pred, "detections JSON (repeatable)")->required();
  eval_cmd->add_option("--iou", ev.iou, "match IoU threshold");
  eval_cmd->add_option("--out", ev.out, "report JSON path");

  RenderArgs rd;
  auto* render_cmd = app.add_subcommand("render", "render one channel as a PNG heatmap");
  render_cmd->add_option("--map", rd.map, "feature-map file")->required();
  render_cmd->add_option("--channel", rd.channel,
                         "text|r_k|r_e|alpha|q1|q2|sin_theta|cos_theta");
  render_cmd->add_option("--out", rd.out, "output PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    rt.seed_set = rt_seed->count() > 0;
    tf.seed_set = tf_seed->count() > 0;
    if (labels_cmd->parsed()) return cmd_labels(labels);
    if (detect_cmd->parsed()) return cmd_detect(det);
    if (rt_cmd->parsed()) return cmd_roundtrip(rt);
    if (tf_cmd->parsed()) return cmd_train_filter(tf);
    if (eval_cmd->parsed()) return cmd_eval(ev);
    if (render_cmd->parsed()) return cmd_render(rd);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_exit(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
