// Command-line front end: dataset generation, training, evaluation and the
// experiment runners, driven by a single JSON config with per-module sections.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "tgrasp/harness.hpp"
#include "tgrasp/io.hpp"
#include "tgrasp/nnet/checkpoint.hpp"
#include "tgrasp/nnet/detector.hpp"
#include "tgrasp/nnet/train.hpp"

namespace fs = std::filesystem;
using namespace tgrasp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitThreshold = 4;

std::vector<nnet::ParamRef<float>> model_state(nnet::Tgcnn<float>& model) {
  auto entries = model.params();
  for (auto& b : model.buffers()) entries.push_back(b);
  return entries;
}

void require_file(const fs::path& p) {
  if (!fs::exists(p))
    throw std::system_error(std::make_error_code(std::errc::no_such_file_or_directory),
                            p.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-transparent object grasping simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  bool dump_heatmaps = false;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--threads", threads, "worker threads for episode batches");
  app.add_flag("--dump-heatmaps", dump_heatmaps,
               "write predicted Q maps as PGM during eval-detect");

  auto* gen = app.add_subcommand("gen-dataset", "render a labeled detection set");
  int gen_count = 100;
  bool gen_binary = false;
  gen->add_option("--count", gen_count, "number of images");
  gen->add_flag("--binary-labels", gen_binary, "binary masks instead of Gaussian");

  auto* train_cmd = app.add_subcommand("train", "train the detection network");
  std::string train_data, checkpoint_base = "";
  train_cmd->add_option("--data", train_data, "dataset directory")->required();
  train_cmd->add_option("--checkpoint", checkpoint_base,
                        "checkpoint base path (default <out-dir>/detector)");

  auto* eval_cmd = app.add_subcommand("eval-detect", "score a trained detector");
  std::string eval_data, eval_checkpoint;
  double min_accuracy = -1.0;
  eval_cmd->add_option("--data", eval_data, "dataset directory")->required();
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint base path")
      ->required();
  eval_cmd->add_option("--min-accuracy", min_accuracy,
                       "exit 4 when accuracy falls below this");

  auto* episodes_cmd = app.add_subcommand("run-episodes", "run grasping episodes");
  std::string mode = "vision_first";
  int episode_count = 20;
  episodes_cmd->add_option("--mode", mode,
                           "vision_first | vision_touch | touch_first");
  episodes_cmd->add_option("--episodes", episode_count, "episode count");

  auto* ablate_cmd =
      app.add_subcommand("ablate-labels", "Gaussian vs binary label ablation");
  auto* tpe_cmd = app.add_subcommand("explore-tpe", "lattice pitch sweep");

  auto* report_cmd = app.add_subcommand("report", "run a named experiment");
  std::vector<std::string> experiment_ids;
  report_cmd->add_option("--experiment", experiment_ids, "E1,E1b,E1c,E2..E7")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    harness::ExperimentConfig cfg;
    if (!config_path.empty()) {
      require_file(config_path);
      try {
        cfg = io::read_json(config_path).get<harness::ExperimentConfig>();
      } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
      }
    }
    if (seed_given) cfg.seed = seed;
    if (threads > 0) cfg.threads = threads;
    fs::create_directories(out_dir);

    if (*gen) {
      harness::DetectionSetConfig dcfg;
      dcfg.count = gen_count;
      dcfg.classes = cfg.train_classes;
      dcfg.image_size = cfg.image_size;
      dcfg.object_scale_mm = cfg.object_scale_mm;
      dcfg.r_max_px = cfg.r_max_px;
      dcfg.binary_labels = gen_binary;
      dcfg.seed = cfg.seed;
      harness::write_detection_set(out_dir, harness::make_detection_set(dcfg));
      std::cout << "wrote " << gen_count << " images to " << out_dir << "\n";
      return kExitOk;
    }

    if (*train_cmd) {
      require_file(fs::path(train_data) / "manifest.json");
      const auto set = harness::load_labeled_set(train_data, cfg.r_max_px);
      std::vector<double> curve;
      auto model = harness::train_detector(set, cfg.epochs, cfg.seed, &curve);
      const fs::path base = checkpoint_base.empty()
                                ? fs::path(out_dir) / "detector"
                                : fs::path(checkpoint_base);
      nnet::save_checkpoint(base, model_state(*model));
      io::write_json(base.string() + "_curve.json", curve);
      std::cout << "final epoch loss " << curve.back() << ", checkpoint at "
                << base << "\n";
      return kExitOk;
    }

    if (*eval_cmd) {
      require_file(fs::path(eval_data) / "manifest.json");
      require_file(eval_checkpoint + ".json");
      const auto set = harness::load_labeled_set(eval_data, cfg.r_max_px);
      nnet::Tgcnn<float> model;
      nnet::load_checkpoint(eval_checkpoint, model_state(model));
      if (dump_heatmaps) {
        char name[32];
        for (size_t i = 0; i < set.size(); ++i) {
          const auto pred = nnet::predict(model, nnet::image_to_chw(set[i].image),
                                          set[i].image.rows, set[i].image.cols);
          std::snprintf(name, sizeof(name), "heat_%04zu.pgm", i);
          io::write_pgm(fs::path(out_dir) / name, pred.Q);
        }
      }
      const auto score = harness::score_detector(model, set, cfg.r_max_px,
                                                 cfg.god_threshold,
                                                 cfg.denominator);
      io::write_json(fs::path(out_dir) / "eval.json",
                     {{"accuracy", score.accuracy},
                      {"mean_god", score.mean_god},
                      {"mean_center_dist_px", score.mean_center_dist_px}});
      std::cout << "accuracy " << score.accuracy << " mean_god "
                << score.mean_god << "\n";
      if (min_accuracy >= 0.0 && score.accuracy < min_accuracy) {
        std::cerr << "accuracy below threshold " << min_accuracy << "\n";
        return kExitThreshold;
      }
      return kExitOk;
    }

    if (*episodes_cmd) {
      const CameraModel cam = make_overhead_camera(700.0);
      nnet::OracleNoise noise;
      noise.center_jitter_mm = 5.0;
      noise.seed = cfg.seed;
      const auto detector = nnet::make_oracle_detector(cfg.r_max_px, noise);
      SceneSpec spec;
      spec.object_count = cfg.objects_per_scene;
      spec.class_pool = {0, 1, 3, 4};
      spec.workspace_half_extent_mm = 120.0;
      spec.object_scale_mm = 28.0;
      int grasped = 0, objects = 0;
      std::ofstream csv(fs::path(out_dir) / "episodes.csv");
      csv << "episode,objects,grasped,probes,calibs,sim_time_s\n";
      for (int e = 0; e < episode_count; ++e) {
        const uint64_t s = cfg.seed + 0x9e3779b97f4a7c15ULL * (e + 1);
        const Scene scene = generate_scene(spec, s);
        auto policy = cfg.policy;
        policy.noise_seed = s;
        strategy::EpisodeRecord rec;
        if (mode == "vision_first") {
          policy.mode = strategy::Mode::vision_first;
          rec = strategy::run_vision_first(scene, cam, detector, cfg.gripper, policy);
        } else if (mode == "vision_touch") {
          policy.mode = strategy::Mode::vision_touch;
          rec = strategy::run_vision_touch(scene, cam, detector, cfg.gripper, policy);
        } else if (mode == "touch_first") {
          policy.mode = strategy::Mode::touch_first;
          rec = strategy::run_touch_first(scene, cfg.gripper, policy);
        } else {
          std::cerr << "config error: unknown mode " << mode << "\n";
          return kExitConfig;
        }
        char name[32];
        std::snprintf(name, sizeof(name), "episode_%04d.jsonl", e);
        strategy::write_episode_jsonl(fs::path(out_dir) / name, rec);
        csv << e << "," << rec.objects_initial << "," << rec.objects_grasped()
            << "," << rec.probe_count << "," << rec.calib_count << ","
            << rec.simulated_time_s << "\n";
        grasped += rec.objects_grasped();
        objects += rec.objects_initial;
      }
      std::cout << "grasped " << grasped << "/" << objects << " objects over "
                << episode_count << " episodes\n";
      return kExitOk;
    }

    std::vector<std::string> ids;
    if (*ablate_cmd) ids = {"E1c"};
    if (*tpe_cmd) ids = {"E7"};
    if (*report_cmd) ids = experiment_ids;
    for (const auto& id : ids) {
      harness::ExperimentReport rep;
      try {
        rep = harness::run_experiment(id, cfg);
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
      }
      harness::write_report(out_dir, rep);
      std::cout << rep.id << ": " << rep.metrics.dump(2) << "\n";
    }
    return kExitOk;
  } catch (const std::system_error& e) {
    std::cerr << "missing artifact: " << e.what() << "\n";
    return kExitMissing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
