#include "tgrasp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <thread>

#include "tgrasp/io.hpp"
#include "tgrasp/nnet/detector.hpp"
#include "tgrasp/nnet/train.hpp"
#include "tgrasp/render.hpp"

namespace tgrasp::harness {

using nlohmann::json;

namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

template <typename F>
void parallel_for(int n, int threads, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, n);
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

Raster rasterize_polygon(const Polygon& poly_px, int rows, int cols) {
  Raster out(rows, cols, 0.0f);
  if (poly_px.size() < 3) return out;
  double min_x = poly_px[0].x, max_x = poly_px[0].x;
  double min_y = poly_px[0].y, max_y = poly_px[0].y;
  for (const auto& v : poly_px) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  const int r0 = std::max(0, static_cast<int>(std::floor(min_y)));
  const int r1 = std::min(rows - 1, static_cast<int>(std::ceil(max_y)));
  const int c0 = std::max(0, static_cast<int>(std::floor(min_x)));
  const int c1 = std::min(cols - 1, static_cast<int>(std::ceil(max_x)));
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c)
      if (point_in_polygon(poly_px, {c + 0.5, r + 0.5})) out.at(r, c) = 1.0f;
  return out;
}

double god(const Circle& circle_px, const Raster& mask, GodDenominator den) {
  if (circle_px.radius <= 0.0)
    throw std::invalid_argument("god: circle radius must be positive");
  const double r2 = circle_px.radius * circle_px.radius;
  size_t inter = 0, circle_only = 0, mask_only = 0;
  for (int r = 0; r < mask.rows; ++r) {
    for (int c = 0; c < mask.cols; ++c) {
      const double dx = c + 0.5 - circle_px.center.x;
      const double dy = r + 0.5 - circle_px.center.y;
      const bool in_circle = dx * dx + dy * dy <= r2;
      const bool in_mask = mask.at(r, c) > 0.5f;
      if (in_circle && in_mask)
        ++inter;
      else if (in_circle)
        ++circle_only;
      else if (in_mask)
        ++mask_only;
    }
  }
  const size_t denom = den == GodDenominator::union_area
                           ? inter + circle_only + mask_only
                           : inter + circle_only;
  if (denom == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(denom);
}

GodResult evaluate_detection(const GraspMap& pred, const Raster& mask,
                             double r_max_px, double threshold,
                             GodDenominator den) {
  // Best visible grasp: global argmax of Q, radius decoded from R there.
  int best_r = 0, best_c = 0;
  for (int r = 0; r < pred.Q.rows; ++r)
    for (int c = 0; c < pred.Q.cols; ++c)
      if (pred.Q.at(r, c) > pred.Q.at(best_r, best_c)) {
        best_r = r;
        best_c = c;
      }
  GodResult out;
  out.circle_px.center = {best_c + 0.5, best_r + 0.5};
  out.circle_px.radius =
      std::max(0.5, static_cast<double>(pred.R.at(best_r, best_c)) * r_max_px);
  out.god = god(out.circle_px, mask, den);
  out.correct = out.god > threshold;
  return out;
}

std::vector<LabeledImage> make_detection_set(const DetectionSetConfig& cfg) {
  if (cfg.classes.empty())
    throw std::invalid_argument("make_detection_set: empty class list");
  std::vector<LabeledImage> out;
  out.reserve(cfg.count);
  std::mt19937_64 rng(cfg.seed * kGolden + 0x64657473ULL);
  std::uniform_real_distribution<double> pos(-45.0, 45.0);
  std::uniform_real_distribution<double> scale(0.8, 1.2);
  std::uniform_real_distribution<double> thick(8.0, 16.0);

  const CameraModel cam = make_overhead_camera(400.0, 0.0, cfg.image_size,
                                               cfg.image_size,
                                               2.0 * cfg.image_size);
  for (int i = 0; i < cfg.count; ++i) {
    LabeledImage li;
    li.cam = cam;
    li.scene.kind = SceneKind::plane;
    li.scene.seed = rng();
    li.scene.lighting_gain = cfg.lighting_gain;
    li.scene.background.family = cfg.families[rng() % cfg.families.size()];
    li.scene.background.seed =
        cfg.background_seeds.empty()
            ? rng()
            : cfg.background_seeds[rng() % cfg.background_seeds.size()];
    li.scene.background.scale_mm = 20.0 + 10.0 * (rng() % 5);

    ObjectInstance obj;
    obj.id = 0;
    obj.class_id = cfg.classes[rng() % cfg.classes.size()];
    const Vec2 c(pos(rng), pos(rng));
    obj.footprint =
        class_footprint(obj.class_id, c, cfg.object_scale_mm * scale(rng));
    obj.base_height_mm = 0.0;
    obj.top_height_mm = thick(rng);
    auto [a, b] = diameter_pair(obj.footprint);
    obj.graspable_diameter_mm = (a - b).norm();
    li.scene.objects.push_back(obj);

    li.image = render_rgb(li.scene, cam);
    auto [gm, meta] = gaussian_mask_label(li.scene, cam, cfg.r_max_px);
    li.center_px = meta.objects[0].gaussian_center;
    li.label = cfg.binary_labels ? binary_label(li.scene, cam, cfg.r_max_px)
                                 : std::move(gm);
    li.mask = rasterize_polygon(project_footprint(obj, cam), cfg.image_size,
                                cfg.image_size);
    out.push_back(std::move(li));
  }
  return out;
}

void write_detection_set(const std::filesystem::path& dir,
                         const std::vector<LabeledImage>& set) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  json scenes = json::array();
  char name[32];
  for (size_t i = 0; i < set.size(); ++i) {
    std::snprintf(name, sizeof(name), "img_%04zu.ppm", i);
    io::write_ppm(dir / name, set[i].image);
    files.emplace_back(name);
    std::snprintf(name, sizeof(name), "lab_%04zu.gmap", i);
    io::write_gmap(dir / name, set[i].label);
    files.emplace_back(name);
    scenes.push_back(set[i].scene);
  }
  io::write_json(dir / "scenes.json", scenes);
  files.emplace_back("scenes.json");
  if (!set.empty()) {
    io::write_json(dir / "camera.json", set.front().cam);
    files.emplace_back("camera.json");
  }
  io::write_json(dir / "manifest.json", io::build_manifest(dir, files));
}

std::vector<std::pair<ImageRGB, GraspMap>> read_detection_set(
    const std::filesystem::path& dir) {
  const json manifest = io::read_json(dir / "manifest.json");
  if (!io::verify_manifest(dir, manifest))
    throw std::runtime_error("detection set manifest mismatch in " +
                             dir.string());
  std::vector<std::pair<ImageRGB, GraspMap>> out;
  char name[32];
  for (size_t i = 0;; ++i) {
    std::snprintf(name, sizeof(name), "img_%04zu.ppm", i);
    if (!std::filesystem::exists(dir / name)) break;
    ImageRGB img = io::read_ppm(dir / name);
    std::snprintf(name, sizeof(name), "lab_%04zu.gmap", i);
    GraspMap gm = io::read_gmap(dir / name);
    out.emplace_back(std::move(img), std::move(gm));
  }
  return out;
}

std::vector<LabeledImage> load_labeled_set(const std::filesystem::path& dir,
                                           double r_max_px) {
  auto pairs = read_detection_set(dir);
  const json scenes = io::read_json(dir / "scenes.json");
  const CameraModel cam = io::read_json(dir / "camera.json").get<CameraModel>();
  if (scenes.size() != pairs.size())
    throw std::runtime_error("detection set scene count mismatch in " +
                             dir.string());
  std::vector<LabeledImage> out;
  out.reserve(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    LabeledImage li;
    li.cam = cam;
    li.scene = scenes[i].get<Scene>();
    li.image = std::move(pairs[i].first);
    li.label = std::move(pairs[i].second);
    auto [gm, meta] = gaussian_mask_label(li.scene, cam, r_max_px);
    li.center_px = meta.objects.at(0).gaussian_center;
    li.mask = rasterize_polygon(project_footprint(li.scene.objects.at(0), cam),
                                cam.rows, cam.cols);
    out.push_back(std::move(li));
  }
  return out;
}

std::shared_ptr<nnet::Tgcnn<float>> train_detector(
    const std::vector<LabeledImage>& set, int epochs, uint64_t seed,
    std::vector<double>* curve, double lr, int batch) {
  std::vector<nnet::DetectionSample> samples;
  samples.reserve(set.size());
  for (const auto& li : set)
    samples.push_back(
        {nnet::image_to_chw(li.image), li.label.Q, li.label.R});
  auto model = std::make_shared<nnet::Tgcnn<float>>();
  model->init(seed);
  nnet::TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = seed;
  cfg.lr = lr;
  cfg.batch = batch;
  auto c = nnet::train(*model, samples, cfg);
  if (curve) *curve = std::move(c);
  return model;
}

DetectionScore score_detector(nnet::Tgcnn<float>& model,
                              const std::vector<LabeledImage>& set,
                              double r_max_px, double threshold,
                              GodDenominator den) {
  DetectionScore s;
  if (set.empty()) return s;
  for (const auto& li : set) {
    const GraspMap pred = nnet::predict(model, nnet::image_to_chw(li.image),
                                        li.image.rows, li.image.cols);
    const GodResult g = evaluate_detection(pred, li.mask, r_max_px, threshold, den);
    s.accuracy += g.correct ? 1.0 : 0.0;
    s.mean_god += g.god;
    s.mean_center_dist_px += (g.circle_px.center - li.center_px).norm();
  }
  const double n = static_cast<double>(set.size());
  s.accuracy /= n;
  s.mean_god /= n;
  s.mean_center_dist_px /= n;
  return s;
}

namespace {

std::vector<uint64_t> seed_range(uint64_t base, int count) {
  std::vector<uint64_t> s(count);
  for (int i = 0; i < count; ++i) s[i] = base + kGolden * (i + 1);
  return s;
}

CameraModel episode_camera() { return make_overhead_camera(700.0); }

json detection_score_json(const DetectionScore& s) {
  return {{"accuracy", s.accuracy},
          {"mean_god", s.mean_god},
          {"mean_center_dist_px", s.mean_center_dist_px}};
}

// ---- E1 / E1b: unseen backgrounds and unseen classes --------------------

ExperimentReport run_e1(const ExperimentConfig& cfg, bool classes_only) {
  DetectionSetConfig train_cfg;
  train_cfg.count = cfg.train_images;
  train_cfg.classes = cfg.train_classes;
  train_cfg.background_seeds = seed_range(11, cfg.train_backgrounds);
  train_cfg.image_size = cfg.image_size;
  train_cfg.object_scale_mm = cfg.object_scale_mm;
  train_cfg.r_max_px = cfg.r_max_px;
  train_cfg.seed = cfg.seed;

  auto test_bg_cfg = train_cfg;
  test_bg_cfg.count = cfg.test_images;
  test_bg_cfg.background_seeds = seed_range(500011, cfg.train_backgrounds);
  test_bg_cfg.seed = cfg.seed + 101;

  auto test_cls_cfg = train_cfg;
  test_cls_cfg.count = cfg.test_images;
  test_cls_cfg.classes = cfg.unseen_classes;
  test_cls_cfg.seed = cfg.seed + 202;

  const auto train_set = make_detection_set(train_cfg);
  std::vector<double> curve;
  auto model = train_detector(train_set, cfg.epochs, cfg.seed, &curve,
                              cfg.lr, cfg.batch);

  ExperimentReport rep;
  rep.id = classes_only ? "E1b" : "E1";
  rep.seed = cfg.seed;
  rep.metrics["loss_curve"] = curve;
  if (!classes_only) {
    const auto bg = score_detector(*model, make_detection_set(test_bg_cfg),
                                   cfg.r_max_px, cfg.god_threshold,
                                   cfg.denominator);
    rep.metrics["unseen_backgrounds"] = detection_score_json(bg);
  }
  const auto cls = score_detector(*model, make_detection_set(test_cls_cfg),
                                  cfg.r_max_px, cfg.god_threshold,
                                  cfg.denominator);
  rep.metrics["unseen_classes"] = detection_score_json(cls);
  return rep;
}

// ---- E1c: Gaussian vs binary label ablation -----------------------------

ExperimentReport run_e1c(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.id = "E1c";
  rep.seed = cfg.seed;
  json acc_g = json::array(), acc_b = json::array();
  json dist_g = json::array(), dist_b = json::array();
  for (int s = 0; s < cfg.label_ablation_seeds; ++s) {
    const uint64_t seed = cfg.seed + 1000ULL * s;
    DetectionSetConfig train_cfg;
    train_cfg.count = cfg.train_images;
    train_cfg.classes = cfg.train_classes;
    train_cfg.background_seeds = seed_range(11, cfg.train_backgrounds);
    train_cfg.image_size = cfg.image_size;
    train_cfg.object_scale_mm = cfg.object_scale_mm;
    train_cfg.r_max_px = cfg.r_max_px;
    train_cfg.seed = seed;
    auto binary_cfg = train_cfg;
    binary_cfg.binary_labels = true;  // identical scenes, different labels

    auto test_cfg = train_cfg;
    test_cfg.count = cfg.test_images;
    test_cfg.background_seeds = seed_range(500011, cfg.train_backgrounds);
    test_cfg.seed = seed + 101;
    const auto test_set = make_detection_set(test_cfg);

    auto model_g = train_detector(make_detection_set(train_cfg), cfg.epochs,
                                  seed, nullptr, cfg.lr, cfg.batch);
    auto model_b = train_detector(make_detection_set(binary_cfg), cfg.epochs,
                                  seed, nullptr, cfg.lr, cfg.batch);
    const auto sg = score_detector(*model_g, test_set, cfg.r_max_px,
                                   cfg.god_threshold, cfg.denominator);
    const auto sb = score_detector(*model_b, test_set, cfg.r_max_px,
                                   cfg.god_threshold, cfg.denominator);
    acc_g.push_back(sg.accuracy);
    acc_b.push_back(sb.accuracy);
    dist_g.push_back(sg.mean_center_dist_px);
    dist_b.push_back(sb.mean_center_dist_px);
  }
  auto mean = [](const json& arr) {
    double s = 0.0;
    for (const auto& v : arr) s += v.get<double>();
    return arr.empty() ? 0.0 : s / arr.size();
  };
  rep.metrics = {{"accuracy_gaussian", acc_g},
                 {"accuracy_binary", acc_b},
                 {"center_dist_gaussian_px", dist_g},
                 {"center_dist_binary_px", dist_b},
                 {"mean_accuracy_gaussian", mean(acc_g)},
                 {"mean_accuracy_binary", mean(acc_b)},
                 {"mean_center_dist_gaussian_px", mean(dist_g)},
                 {"mean_center_dist_binary_px", mean(dist_b)}};
  return rep;
}

// ---- E2 / E3: background-family and lighting sweeps ---------------------

ExperimentReport run_sweep(const ExperimentConfig& cfg, bool lighting) {
  DetectionSetConfig train_cfg;
  train_cfg.count = cfg.train_images;
  train_cfg.classes = cfg.train_classes;
  train_cfg.background_seeds = seed_range(11, cfg.train_backgrounds);
  train_cfg.image_size = cfg.image_size;
  train_cfg.object_scale_mm = cfg.object_scale_mm;
  train_cfg.r_max_px = cfg.r_max_px;
  train_cfg.seed = cfg.seed;
  auto model = train_detector(make_detection_set(train_cfg), cfg.epochs,
                                cfg.seed, nullptr, cfg.lr, cfg.batch);

  ExperimentReport rep;
  rep.id = lighting ? "E3" : "E2";
  rep.seed = cfg.seed;
  auto test_cfg = train_cfg;
  test_cfg.count = cfg.test_images;
  test_cfg.background_seeds = seed_range(500011, cfg.train_backgrounds);
  if (lighting) {
    for (double gain : {0.25, 0.5, 1.0, 1.5, 2.0, 2.5}) {
      test_cfg.lighting_gain = gain;
      test_cfg.seed = cfg.seed + 301 + static_cast<uint64_t>(gain * 100);
      const auto s = score_detector(*model, make_detection_set(test_cfg),
                                    cfg.r_max_px, cfg.god_threshold,
                                    cfg.denominator);
      rep.metrics["lighting"][std::to_string(gain)] = detection_score_json(s);
    }
  } else {
    const char* names[] = {"solid", "stripes", "checker", "smooth_noise"};
    for (int f = 0; f < 4; ++f) {
      test_cfg.families = {static_cast<TextureFamily>(f)};
      test_cfg.seed = cfg.seed + 401 + f;
      const auto s = score_detector(*model, make_detection_set(test_cfg),
                                    cfg.r_max_px, cfg.god_threshold,
                                    cfg.denominator);
      rep.metrics["family"][names[f]] = detection_score_json(s);
    }
  }
  return rep;
}

// ---- episode experiments ------------------------------------------------

struct EpStat {
  int objects = 0;
  int grasped = 0;
  int calibs = 0;
  int probes = 0;
  double sim_time = 0.0;
  int contacts = 0;
  int ths_violations = 0;
  bool top_down = true;
  int classified = 0;
  int classified_correct = 0;
};

/// THS-bound audit: the declared contact height must be within one descent
/// step of the top of the object actually touched (located via the recorded
/// innermost contact pixel; morphology can pad the region by about a pixel).
void audit_ths(const Scene& scene, const strategy::EpisodeRecord& rec,
               double step_mm, EpStat& st) {
  for (const auto& a : rec.attempts) {
    if (!a.had_contact) continue;
    ++st.contacts;
    // Stacked footprints nest, so several objects can contain the contact
    // point; the declaration must match the top of one of them.
    double err = std::numeric_limits<double>::infinity();
    for (const auto& obj : scene.objects) {
      const bool touchable =
          point_in_polygon(obj.footprint, a.contact_point) ||
          distance_to_boundary(obj.footprint, a.contact_point) <= 1.5;
      if (touchable)
        err = std::min(err,
                       std::abs(a.contact_height_mm - obj.top_height_mm));
    }
    if (err > step_mm) ++st.ths_violations;
  }
}

/// Stack order audit: within each stacked pair (even id below odd id), the
/// upper object must be grasped before the lower one.
bool stacked_top_down(const Scene& scene,
                      const std::vector<int>& grasp_order) {
  auto pos = [&](int id) {
    for (size_t i = 0; i < grasp_order.size(); ++i)
      if (grasp_order[i] == id) return static_cast<int>(i);
    return -1;
  };
  for (size_t i = 1; i < scene.objects.size(); i += 2) {
    const int lower = scene.objects[i - 1].id;
    const int upper = scene.objects[i].id;
    const int pl = pos(lower), pu = pos(upper);
    if (pl >= 0 && pu < 0) return false;           // lower taken, upper left
    if (pl >= 0 && pu >= 0 && pu > pl) return false;
  }
  return true;
}

ExperimentReport run_e4(const ExperimentConfig& cfg) {
  const CameraModel cam = episode_camera();
  SceneSpec spec;
  spec.kind = SceneKind::plane;
  spec.object_count = cfg.objects_per_scene;
  spec.class_pool = {0, 1, 3, 4};
  spec.workspace_half_extent_mm = 120.0;
  spec.object_scale_mm = 28.0;

  fuse::Dataset fusion_data = fuse::make_dataset(cfg.fusion);
  fuse::Classifier clf(fuse::Ablation::fusion, cfg.seed);
  clf.train(fusion_data.train, cfg.fusion_train);

  nnet::OracleNoise noise;
  noise.center_jitter_mm = 5.0;
  noise.seed = cfg.seed;
  const auto detector = nnet::make_oracle_detector(cfg.r_max_px, noise);

  EpStat plain, fused;
  // The classifier caches activations, so the fused condition is sequential.
  for (int e = 0; e < cfg.episodes; ++e) {
    const uint64_t seed = cfg.seed + kGolden * (e + 1);
    const Scene scene = generate_scene(spec, seed);
    auto policy = cfg.policy;
    policy.mode = strategy::Mode::vision_first;
    policy.noise_seed = seed;

    const auto rec =
        strategy::run_vision_first(scene, cam, detector, cfg.gripper, policy);
    plain.objects += rec.objects_initial;
    plain.grasped += rec.objects_grasped();
    plain.calibs += rec.calib_count;
    plain.sim_time += rec.simulated_time_s;

    strategy::ClassifierHook hook = [&](const Scene& s,
                                        const ObjectInstance& o) {
      const auto sample =
          fuse::make_sample(s, o, cfg.gripper, cfg.tactile_noise, seed ^ o.id);
      std::vector<float> probs;
      const int pred = clf.classify(sample, &probs);
      return std::make_pair(pred, static_cast<double>(probs[pred]));
    };
    const auto rec2 = strategy::run_vision_first(scene, cam, detector,
                                                 cfg.gripper, policy, hook);
    fused.objects += rec2.objects_initial;
    fused.grasped += rec2.objects_grasped();
    fused.calibs += rec2.calib_count;
    for (const auto& a : rec2.attempts) {
      if (a.result != strategy::AttemptResult::success) continue;
      for (const auto& obj : scene.objects)
        if (obj.id == a.grasped_object_id) {
          ++fused.classified;
          if (a.predicted_class == obj.class_id) ++fused.classified_correct;
        }
    }
  }
  ExperimentReport rep;
  rep.id = "E4";
  rep.seed = cfg.seed;
  rep.metrics = {
      {"success_rate", plain.objects ? double(plain.grasped) / plain.objects : 0.0},
      {"mean_calibrations",
       plain.grasped ? double(plain.calibs) / plain.grasped : 0.0},
      {"success_rate_with_fusion",
       fused.objects ? double(fused.grasped) / fused.objects : 0.0},
      {"classification_accuracy",
       fused.classified ? double(fused.classified_correct) / fused.classified
                        : 0.0},
      {"fusion_test_accuracy", clf.accuracy(fusion_data.test)}};
  return rep;
}

ExperimentReport run_e5(const ExperimentConfig& cfg) {
  const CameraModel cam = episode_camera();
  SceneSpec spec;
  spec.kind = SceneKind::fragments;
  spec.object_count = 1;
  spec.fragment_footprints = true;
  spec.workspace_half_extent_mm = 100.0;
  spec.object_scale_mm = 25.0;

  struct Cell {
    int calibrated = 0, direct = 0, calibrated_clean = 0, direct_clean = 0;
    int calib_count = 0;
  };
  std::vector<Cell> cells(cfg.episodes);
  parallel_for(cfg.episodes, cfg.threads, [&](int e) {
    const uint64_t seed = cfg.seed + kGolden * (e + 1);
    const Scene scene = generate_scene(spec, seed);
    auto run = [&](double jitter, int calib_iters) {
      nnet::OracleNoise noise;
      noise.center_jitter_mm = jitter;
      noise.seed = cfg.seed;
      auto policy = cfg.policy;
      policy.mode = strategy::Mode::vision_first;
      policy.max_calib_iters = calib_iters;
      policy.noise_seed = seed;
      return strategy::run_vision_first(
          scene, cam, nnet::make_oracle_detector(cfg.r_max_px, noise),
          cfg.gripper, policy);
    };
    const auto rec_c = run(cfg.detector_jitter_mm, cfg.policy.max_calib_iters);
    cells[e].calibrated = rec_c.objects_grasped() > 0 ? 1 : 0;
    cells[e].calib_count = rec_c.calib_count;
    cells[e].direct =
        run(cfg.detector_jitter_mm, 0).objects_grasped() > 0 ? 1 : 0;
    cells[e].calibrated_clean =
        run(0.0, cfg.policy.max_calib_iters).objects_grasped() > 0 ? 1 : 0;
    cells[e].direct_clean = run(0.0, 0).objects_grasped() > 0 ? 1 : 0;
  });
  Cell sum;
  for (const auto& c : cells) {
    sum.calibrated += c.calibrated;
    sum.direct += c.direct;
    sum.calibrated_clean += c.calibrated_clean;
    sum.direct_clean += c.direct_clean;
    sum.calib_count += c.calib_count;
  }
  const double n = cfg.episodes;
  ExperimentReport rep;
  rep.id = "E5";
  rep.seed = cfg.seed;
  rep.metrics = {{"success_calibrated", sum.calibrated / n},
                 {"success_direct", sum.direct / n},
                 {"success_calibrated_zero_jitter", sum.calibrated_clean / n},
                 {"success_direct_zero_jitter", sum.direct_clean / n},
                 {"mean_calibrations", sum.calib_count / n},
                 {"jitter_mm", cfg.detector_jitter_mm}};
  return rep;
}

ExperimentReport run_e6(const ExperimentConfig& cfg) {
  const CameraModel cam = episode_camera();
  nnet::OracleNoise noise;
  noise.center_jitter_mm = 3.0;
  noise.seed = cfg.seed;
  const auto detector = nnet::make_oracle_detector(cfg.r_max_px, noise);

  auto run_kind = [&](SceneKind kind, int episodes, uint64_t salt) {
    SceneSpec spec;
    spec.kind = kind;
    spec.object_count = kind == SceneKind::stacked ? 4 : 2;
    spec.class_pool = {0, 1, 3};
    spec.workspace_half_extent_mm = 120.0;
    spec.object_scale_mm = 28.0;
    if (kind == SceneKind::undulating) {
      spec.support.kind = SupportKind::undulating;
      spec.support.amplitude_mm = 12.0;
      spec.support.wavelength_mm = 140.0;
    } else if (kind == SceneKind::sand) {
      spec.support.kind = SupportKind::sand;
      spec.support.amplitude_mm = 10.0;
      spec.support.wavelength_mm = 90.0;
    }
    std::vector<EpStat> stats(episodes);
    parallel_for(episodes, cfg.threads, [&](int e) {
      const uint64_t seed = cfg.seed + salt + kGolden * (e + 1);
      Scene scene;
      // Dense stacked/overlapping specs can exhaust placement attempts;
      // skip to the next seed rather than abort the batch.
      for (uint64_t s = seed;; ++s) {
        try {
          scene = generate_scene(spec, s);
          break;
        } catch (const std::runtime_error&) {
        }
      }
      auto policy = cfg.policy;
      policy.mode = strategy::Mode::vision_touch;
      policy.noise_seed = seed;
      policy.start_height_mm = 100.0;
      const auto rec =
          strategy::run_vision_touch(scene, cam, detector, cfg.gripper, policy);
      EpStat& st = stats[e];
      st.objects = rec.objects_initial;
      st.grasped = rec.objects_grasped();
      st.calibs = rec.calib_count;
      st.probes = rec.probe_count;
      audit_ths(scene, rec, policy.descent_step_mm, st);
      st.top_down = kind != SceneKind::stacked ||
                    stacked_top_down(scene, rec.grasped_object_ids);
    });
    EpStat sum;
    int ordered = 0;
    for (const auto& st : stats) {
      sum.objects += st.objects;
      sum.grasped += st.grasped;
      sum.contacts += st.contacts;
      sum.ths_violations += st.ths_violations;
      sum.probes += st.probes;
      if (st.top_down) ++ordered;
    }
    return json{{"episodes", episodes},
                {"success_rate",
                 sum.objects ? double(sum.grasped) / sum.objects : 0.0},
                {"contacts", sum.contacts},
                {"ths_violations", sum.ths_violations},
                {"mean_probes", episodes ? double(sum.probes) / episodes : 0.0},
                {"top_down_ordered_fraction",
                 episodes ? double(ordered) / episodes : 0.0}};
  };

  ExperimentReport rep;
  rep.id = "E6";
  rep.seed = cfg.seed;
  rep.metrics["undulating"] = run_kind(SceneKind::undulating, cfg.episodes, 1);
  rep.metrics["stacked"] =
      run_kind(SceneKind::stacked, (cfg.episodes + 1) / 2, 7777);
  rep.metrics["overlapping"] =
      run_kind(SceneKind::overlapping, (cfg.episodes + 3) / 4, 333);
  rep.metrics["sand"] = run_kind(SceneKind::sand, (cfg.episodes + 3) / 4, 555);
  return rep;
}

ExperimentReport run_e7(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.id = "E7";
  rep.seed = cfg.seed;
  for (double pitch : cfg.tpe_pitches) {
    struct Cell {
      int success = 0;
      double time = 0.0;
      int probes = 0;
    };
    std::vector<Cell> cells(cfg.episodes);
    parallel_for(cfg.episodes, cfg.threads, [&](int e) {
      const uint64_t seed = cfg.seed + kGolden * (e + 1);
      std::mt19937_64 rng(seed ^ 0x7470655fULL);
      std::uniform_real_distribution<double> pos(-150.0, 150.0);
      Scene scene;
      scene.kind = SceneKind::water_dynamic;
      scene.support.kind = SupportKind::water_dynamic;
      scene.seed = seed;
      ObjectInstance obj;
      obj.id = 0;
      obj.class_id = 0;
      const Vec2 c(pos(rng), pos(rng));
      obj.footprint = class_footprint(0, c, 30.0);
      obj.base_height_mm = 0.0;
      obj.top_height_mm = 20.0;
      obj.graspable_diameter_mm = 60.0;
      scene.objects.push_back(obj);

      auto policy = cfg.policy;
      policy.mode = strategy::Mode::touch_first;
      policy.tpe_step_mm = pitch;
      policy.tpe_region = {-200.0, -200.0, 200.0, 200.0};
      policy.start_height_mm = 60.0;
      policy.noise_seed = seed;
      const auto rec =
          strategy::run_touch_first(scene, cfg.gripper, policy);
      cells[e].success = rec.objects_grasped() > 0 ? 1 : 0;
      cells[e].time = rec.simulated_time_s;
      cells[e].probes = rec.probe_count;
    });
    Cell sum;
    for (const auto& c : cells) {
      sum.success += c.success;
      sum.time += c.time;
      sum.probes += c.probes;
    }
    const double n = cfg.episodes;
    rep.metrics["pitch_" + std::to_string(static_cast<int>(pitch))] = {
        {"success_rate", sum.success / n},
        {"mean_time_s", sum.time / n},
        {"mean_probes", sum.probes / n}};
  }
  return rep;
}

void flatten_csv(const json& j, const std::string& prefix, std::ostream& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten_csv(value, name, out);
    } else if (value.is_array()) {
      out << name << ",";
      for (size_t i = 0; i < value.size(); ++i)
        out << (i ? ";" : "") << value[i].dump();
      out << "\n";
    } else {
      out << name << "," << value.dump() << "\n";
    }
  }
}

}  // namespace

ExperimentReport run_experiment(const std::string& id,
                                const ExperimentConfig& cfg) {
  ExperimentReport rep;
  if (id == "E1")
    rep = run_e1(cfg, false);
  else if (id == "E1b")
    rep = run_e1(cfg, true);
  else if (id == "E1c")
    rep = run_e1c(cfg);
  else if (id == "E2")
    rep = run_sweep(cfg, false);
  else if (id == "E3")
    rep = run_sweep(cfg, true);
  else if (id == "E4")
    rep = run_e4(cfg);
  else if (id == "E5")
    rep = run_e5(cfg);
  else if (id == "E6")
    rep = run_e6(cfg);
  else if (id == "E7")
    rep = run_e7(cfg);
  else
    throw std::invalid_argument("run_experiment: unknown id " + id);
  rep.config = cfg;
  return rep;
}

void write_report(const std::filesystem::path& out_dir,
                  const ExperimentReport& report) {
  std::filesystem::create_directories(out_dir);
  io::write_json(out_dir / (report.id + ".json"),
                 json{{"id", report.id},
                      {"seed", report.seed},
                      {"config", report.config},
                      {"metrics", report.metrics}});
  std::ofstream csv(out_dir / (report.id + ".csv"));
  csv << "metric,value\n";
  flatten_csv(report.metrics, "", csv);
}

void to_json(json& j, const ExperimentConfig& cfg) {
  j = json{{"seed", cfg.seed},
           {"threads", cfg.threads},
           {"train_images", cfg.train_images},
           {"test_images", cfg.test_images},
           {"image_size", cfg.image_size},
           {"epochs", cfg.epochs},
           {"lr", cfg.lr},
           {"batch", cfg.batch},
           {"train_backgrounds", cfg.train_backgrounds},
           {"train_classes", cfg.train_classes},
           {"unseen_classes", cfg.unseen_classes},
           {"object_scale_mm", cfg.object_scale_mm},
           {"r_max_px", cfg.r_max_px},
           {"god_threshold", cfg.god_threshold},
           {"denominator", cfg.denominator},
           {"label_ablation_seeds", cfg.label_ablation_seeds},
           {"episodes", cfg.episodes},
           {"objects_per_scene", cfg.objects_per_scene},
           {"detector_jitter_mm", cfg.detector_jitter_mm},
           {"tpe_pitches", cfg.tpe_pitches},
           {"gripper", cfg.gripper},
           {"tactile_noise", cfg.tactile_noise},
           {"policy", cfg.policy},
           {"fusion", cfg.fusion},
           {"fusion_train", cfg.fusion_train}};
}

void from_json(const json& j, ExperimentConfig& cfg) {
  cfg.seed = j.value("seed", cfg.seed);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.train_images = j.value("train_images", cfg.train_images);
  cfg.test_images = j.value("test_images", cfg.test_images);
  cfg.image_size = j.value("image_size", cfg.image_size);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.batch = j.value("batch", cfg.batch);
  cfg.train_backgrounds = j.value("train_backgrounds", cfg.train_backgrounds);
  cfg.train_classes = j.value("train_classes", cfg.train_classes);
  cfg.unseen_classes = j.value("unseen_classes", cfg.unseen_classes);
  cfg.object_scale_mm = j.value("object_scale_mm", cfg.object_scale_mm);
  cfg.r_max_px = j.value("r_max_px", cfg.r_max_px);
  cfg.god_threshold = j.value("god_threshold", cfg.god_threshold);
  cfg.denominator = j.value("denominator", cfg.denominator);
  cfg.label_ablation_seeds = j.value("label_ablation_seeds", cfg.label_ablation_seeds);
  cfg.episodes = j.value("episodes", cfg.episodes);
  cfg.objects_per_scene = j.value("objects_per_scene", cfg.objects_per_scene);
  cfg.detector_jitter_mm = j.value("detector_jitter_mm", cfg.detector_jitter_mm);
  cfg.tpe_pitches = j.value("tpe_pitches", cfg.tpe_pitches);
  cfg.gripper = j.value("gripper", cfg.gripper);
  cfg.tactile_noise = j.value("tactile_noise", cfg.tactile_noise);
  cfg.policy = j.value("policy", cfg.policy);
  cfg.fusion = j.value("fusion", cfg.fusion);
  cfg.fusion_train = j.value("fusion_train", cfg.fusion_train);
}

}  // namespace tgrasp::harness
