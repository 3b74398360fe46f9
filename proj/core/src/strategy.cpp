#include "tgrasp/strategy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tgrasp::strategy {

using nlohmann::json;

std::vector<Vec2> boustrophedon_lattice(const Region& region, double pitch_mm) {
  if (pitch_mm <= 0.0) throw std::invalid_argument("lattice pitch must be positive");
  std::vector<Vec2> nodes;
  int row = 0;
  for (double y = region.min_y; y <= region.max_y + 1e-9; y += pitch_mm, ++row) {
    std::vector<Vec2> line;
    for (double x = region.min_x; x <= region.max_x + 1e-9; x += pitch_mm)
      line.push_back({x, y});
    if (row % 2 == 1) std::reverse(line.begin(), line.end());
    nodes.insert(nodes.end(), line.begin(), line.end());
  }
  return nodes;
}

namespace {

/// Shared episode state; all strategies funnel through the same probe /
/// calibrate / grasp primitives so counters and traces stay comparable.
struct Executor {
  Scene world;  // mutated as objects are removed
  const GripperSpec& gripper;
  const StrategyConfig& cfg;
  const ClassifierHook& classifier;
  EpisodeRecord rec;
  MarkMask marks;
  uint64_t seed_counter = 0;

  Executor(const Scene& scene, const GripperSpec& g, const StrategyConfig& c,
           const ClassifierHook& cls)
      : world(scene), gripper(g), cfg(c), classifier(cls) {
    rec.scene_seed = scene.seed;
    rec.policy_seed = c.noise_seed;
    rec.mode = c.mode;
    rec.objects_initial = static_cast<int>(scene.objects.size());
  }

  uint64_t next_seed() {
    return cfg.noise_seed + 0x9e3779b97f4a7c15ULL * (++seed_counter);
  }

  void event(json j) { rec.events.push_back(std::move(j)); }

  void move_to(const Vec2& p) {
    ++rec.move_count;
    rec.simulated_time_s += cfg.t_move_s;
    event({{"t", "move"}, {"x", p.x}, {"y", p.y}});
  }

  ContactRegion probe(const Vec2& p, double h) {
    ++rec.probe_count;
    rec.simulated_time_s += cfg.t_probe_s;
    const TactileFrame frame =
        sense(world, gripper, p, h, next_seed(), cfg.tactile_noise);
    const ContactRegion region = segment(frame, gripper);
    event({{"t", "probe"},
           {"x", p.x},
           {"y", p.y},
           {"h", h},
           {"contact", region.has_contact}});
    return region;
  }

  struct Contact {
    double declared_h;   // sag-corrected contact height
    Vec2 point;          // world point of the innermost contact pixel
  };

  /// Stepwise descent from start height until first contact. First touch can
  /// happen at the membrane rim while the centre is still above the object,
  /// so the declaration subtracts the sag at the innermost contact pixel:
  /// h - sag(l_min). Near the rim sag(l) is nearly vertical, so a one-pixel
  /// segmentation shift (dilation, salt noise) turns into several mm of
  /// declared height; such grazing contacts are kept descending until the
  /// inner radius reaches a part of the curve where a one-pixel error costs
  /// less than a descent step. Rim-only coverage falls back to the deepest
  /// frame seen.
  std::optional<Contact> descend(const Vec2& p) {
    const double rho = gripper.radius_mm;
    const double half = gripper.tactile_resolution / 2.0;
    std::optional<Contact> grazing;
    for (double h = cfg.start_height_mm; h >= cfg.floor_height_mm - 1e-9;
         h -= cfg.descent_step_mm) {
      const ContactRegion region = probe(p, h);
      if (!region.has_contact) continue;
      double l_min = rho;
      Vec2 inner = p;
      for (const auto& [row, col] : region.pixels) {
        const double x = (col + 0.5 - half) / gripper.px_per_mm;
        const double y = (row + 0.5 - half) / gripper.px_per_mm;
        const double l = std::hypot(x, y);
        if (l < l_min) {
          l_min = l;
          inner = {p.x + x, p.y + y};
        }
      }
      const double sag = rho - std::sqrt(std::max(0.0, rho * rho - l_min * l_min));
      const double declared = h - sag;
      // Conditioning test at one pixel outside the observed inner radius:
      // declare only where sag'(l) <= 3, i.e. a <=1 mm radius error moves the
      // declaration by at most ~3 mm.
      const double lw = std::min(rho, l_min + 2.0 / gripper.px_per_mm);
      const double chord = std::sqrt(std::max(0.0, rho * rho - lw * lw));
      if (lw < rho && lw <= 3.0 * chord) {
        event({{"t", "contact"}, {"h", h}, {"declared", declared}});
        return Contact{declared, inner};
      }
      grazing = Contact{declared, inner};
    }
    if (grazing)
      event({{"t", "contact_grazing"}, {"declared", grazing->declared_h}});
    return grazing;
  }

  /// Iterative re-centering at a fixed press height. Returns final position;
  /// attempt.result is set on failure modes.
  bool calibrate(Vec2& p, double press_h, Attempt& attempt) {
    if (cfg.max_calib_iters == 0) return true;  // direct grasping baseline
    for (int iter = 0; iter < cfg.max_calib_iters; ++iter) {
      const ContactRegion region = probe(p, press_h);
      if (!region.has_contact) {
        attempt.result = AttemptResult::wrong_point;
        attempt.calib_iters = iter;
        return false;
      }
      const Vec2 d = calibration_offset(region);
      event({{"t", "calib"}, {"dx", d.x}, {"dy", d.y}, {"iter", iter}});
      if (d.norm() <= cfg.calib_tol_mm) {
        attempt.calib_iters = iter;
        return true;
      }
      p = apply_calibration_move(p, d);
      ++rec.calib_count;
      move_to(p);
    }
    attempt.result = AttemptResult::ambiguous;
    attempt.calib_iters = cfg.max_calib_iters;
    return false;
  }

  /// Close the gripper at (p, h) and resolve the outcome against ground truth.
  void grasp(const Vec2& p, double h, double r_mm, Attempt& attempt) {
    const JudgeResult res = judge_grasp(world, {p, h, r_mm}, gripper);
    event({{"t", "grasp"},
           {"x", p.x},
           {"y", p.y},
           {"h", h},
           {"outcome", static_cast<int>(res.outcome)}});
    switch (res.outcome) {
      case Outcome::success: {
        const ObjectInstance obj = world.objects[res.object_index];
        attempt.result = AttemptResult::success;
        attempt.grasped_object_id = obj.id;
        if (classifier) attempt.predicted_class = classifier(world, obj).first;
        world.objects.erase(world.objects.begin() + res.object_index);
        rec.grasped_object_ids.push_back(obj.id);
        break;
      }
      case Outcome::slide:
        attempt.result = AttemptResult::slide;
        break;
      default:
        attempt.result = AttemptResult::miss;
        break;
    }
    // Mark only invalid points: a success removes the object, and anything
    // underneath it (stacks) must stay detectable at the same spot.
    if (res.outcome != Outcome::success) {
      marks.mark(p, cfg.mark_radius_mm);
      event({{"t", "mark"}, {"x", p.x}, {"y", p.y}, {"r", cfg.mark_radius_mm}});
    }
  }

  void finish(std::chrono::steady_clock::time_point t0) {
    rec.wallclock_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t0)
            .count();
  }
};

std::optional<nnet::ExtractedGrasp> best_detection(
    Executor& ex, const CameraModel& cam, const nnet::Detector& detector) {
  const GraspMap gm = detector(ex.world, cam);
  ex.rec.detections = nnet::extract_grasps(gm.Q, gm.R, ex.cfg.k, cam,
                                           ex.world.support.base_height_mm,
                                           ex.cfg.r_max_px, ex.cfg.q_threshold);
  for (const auto& g : ex.rec.detections)
    if (!ex.marks.contains(g.world.p)) return g;
  return std::nullopt;
}

EpisodeRecord run_vision(const Scene& scene, const CameraModel& cam,
                         const nnet::Detector& detector,
                         const GripperSpec& gripper, const StrategyConfig& cfg,
                         const ClassifierHook& classifier, bool use_descent) {
  const auto t0 = std::chrono::steady_clock::now();
  Executor ex(scene, gripper, cfg, classifier);
  while (static_cast<int>(ex.rec.attempts.size()) < cfg.max_attempts &&
         !ex.world.objects.empty()) {
    const auto pick = best_detection(ex, cam, detector);
    if (!pick) break;  // nothing left above threshold
    Attempt attempt;
    attempt.target = pick->world.p;
    Vec2 p = pick->world.p;
    ex.move_to(p);

    double press_h;
    if (use_descent) {
      const auto contact = ex.descend(p);
      if (!contact) {
        attempt.result = AttemptResult::wrong_point;
        attempt.final_position = p;
        ex.marks.mark(p, cfg.mark_radius_mm);
        ex.rec.attempts.push_back(attempt);
        continue;
      }
      attempt.had_contact = true;
      attempt.contact_height_mm = contact->declared_h;
      attempt.contact_point = contact->point;
      press_h = std::max(
          cfg.floor_height_mm,
          adaptive_drop_height(pick->world.r, contact->declared_h, cfg.ahd));
    } else {
      // Flat support: the press height is known a priori.
      press_h = ex.world.support.height(p.x, p.y) + 0.5;
      const ContactRegion first = ex.probe(p, press_h);
      if (!first.has_contact) {
        attempt.result = AttemptResult::wrong_point;
        attempt.final_position = p;
        ex.marks.mark(p, cfg.mark_radius_mm);
        ex.rec.attempts.push_back(attempt);
        continue;
      }
      attempt.had_contact = true;
      attempt.contact_height_mm = press_h;
    }

    if (ex.calibrate(p, press_h, attempt))
      ex.grasp(p, press_h, pick->world.r, attempt);
    else
      ex.marks.mark(p, cfg.mark_radius_mm);
    attempt.final_position = p;
    ex.rec.attempts.push_back(attempt);
  }
  ex.finish(t0);
  return ex.rec;
}

}  // namespace

EpisodeRecord run_vision_first(const Scene& scene, const CameraModel& cam,
                               const nnet::Detector& detector,
                               const GripperSpec& gripper,
                               const StrategyConfig& cfg,
                               const ClassifierHook& classifier) {
  return run_vision(scene, cam, detector, gripper, cfg, classifier, false);
}

EpisodeRecord run_vision_touch(const Scene& scene, const CameraModel& cam,
                               const nnet::Detector& detector,
                               const GripperSpec& gripper,
                               const StrategyConfig& cfg,
                               const ClassifierHook& classifier) {
  return run_vision(scene, cam, detector, gripper, cfg, classifier, true);
}

EpisodeRecord run_touch_first(const Scene& scene, const GripperSpec& gripper,
                              const StrategyConfig& cfg,
                              const ClassifierHook& classifier) {
  const auto t0 = std::chrono::steady_clock::now();
  Executor ex(scene, gripper, cfg, classifier);
  const auto lattice = boustrophedon_lattice(cfg.tpe_region, cfg.tpe_step_mm);
  // Repeat sweeps while they keep yielding grasps: dense clutter can hide
  // several objects behind a single lattice node.
  const int max_passes = 3;
  for (int pass = 0; pass < max_passes && !ex.world.objects.empty(); ++pass) {
    int grasped_this_pass = 0;
    for (const Vec2& node : lattice) {
      if (static_cast<int>(ex.rec.attempts.size()) >= cfg.max_attempts) break;
      if (ex.world.objects.empty()) break;
      if (ex.marks.contains(node)) continue;
      ex.move_to(node);
      const auto contact = ex.descend(node);
      if (!contact) continue;  // empty cell, keep sweeping

      Attempt attempt;
      attempt.target = node;
      attempt.had_contact = true;
      attempt.contact_height_mm = contact->declared_h;
      attempt.contact_point = contact->point;
      Vec2 p = node;
      // No vision: size the press from the first contact's enclosing circle.
      const ContactRegion first = ex.probe(p, contact->declared_h);
      const double r_hat =
          first.has_contact ? first.mec_mm.radius : cfg.ahd.r_min_mm;
      const double press_h =
          std::max(cfg.floor_height_mm,
                   adaptive_drop_height(r_hat, contact->declared_h, cfg.ahd));
      if (ex.calibrate(p, press_h, attempt))
        ex.grasp(p, press_h, r_hat, attempt);
      else
        ex.marks.mark(p, cfg.mark_radius_mm);
      attempt.final_position = p;
      if (attempt.result == AttemptResult::success) ++grasped_this_pass;
      ex.rec.attempts.push_back(attempt);
    }
    if (grasped_this_pass == 0) break;
  }
  if (ex.rec.attempts.empty() && !ex.world.objects.empty()) {
    Attempt none;
    none.result = AttemptResult::not_found;
    ex.rec.attempts.push_back(none);
  }
  ex.finish(t0);
  return ex.rec;
}

void write_episode_jsonl(const std::filesystem::path& path,
                         const EpisodeRecord& record) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  json header{{"t", "episode"},
              {"scene_seed", record.scene_seed},
              {"policy_seed", record.policy_seed},
              {"mode", record.mode},
              {"objects_initial", record.objects_initial}};
  out << header.dump() << "\n";
  for (const auto& e : record.events) out << e.dump() << "\n";
  json summary{{"t", "summary"},
               {"attempts", record.attempts.size()},
               {"grasped", record.grasped_object_ids},
               {"probes", record.probe_count},
               {"moves", record.move_count},
               {"calibs", record.calib_count},
               {"sim_time_s", record.simulated_time_s}};
  out << summary.dump() << "\n";
}

void to_json(json& j, const Region& r) {
  j = json{{"min_x", r.min_x}, {"min_y", r.min_y},
           {"max_x", r.max_x}, {"max_y", r.max_y}};
}

void from_json(const json& j, Region& r) {
  r.min_x = j.value("min_x", r.min_x);
  r.min_y = j.value("min_y", r.min_y);
  r.max_x = j.value("max_x", r.max_x);
  r.max_y = j.value("max_y", r.max_y);
}

void to_json(json& j, const StrategyConfig& c) {
  j = json{{"mode", c.mode},
           {"q_threshold", c.q_threshold},
           {"max_calib_iters", c.max_calib_iters},
           {"calib_tol_mm", c.calib_tol_mm},
           {"descent_step_mm", c.descent_step_mm},
           {"floor_height_mm", c.floor_height_mm},
           {"start_height_mm", c.start_height_mm},
           {"tpe_step_mm", c.tpe_step_mm},
           {"tpe_region", c.tpe_region},
           {"k", c.k},
           {"r_max_px", c.r_max_px},
           {"mark_radius_mm", c.mark_radius_mm},
           {"t_probe_s", c.t_probe_s},
           {"t_move_s", c.t_move_s},
           {"max_attempts", c.max_attempts},
           {"noise_seed", c.noise_seed},
           {"tactile_noise", c.tactile_noise},
           {"ahd", c.ahd}};
}

void from_json(const json& j, StrategyConfig& c) {
  c.mode = j.value("mode", c.mode);
  c.q_threshold = j.value("q_threshold", c.q_threshold);
  c.max_calib_iters = j.value("max_calib_iters", c.max_calib_iters);
  c.calib_tol_mm = j.value("calib_tol_mm", c.calib_tol_mm);
  c.descent_step_mm = j.value("descent_step_mm", c.descent_step_mm);
  c.floor_height_mm = j.value("floor_height_mm", c.floor_height_mm);
  c.start_height_mm = j.value("start_height_mm", c.start_height_mm);
  c.tpe_step_mm = j.value("tpe_step_mm", c.tpe_step_mm);
  c.tpe_region = j.value("tpe_region", c.tpe_region);
  c.k = j.value("k", c.k);
  c.r_max_px = j.value("r_max_px", c.r_max_px);
  c.mark_radius_mm = j.value("mark_radius_mm", c.mark_radius_mm);
  c.t_probe_s = j.value("t_probe_s", c.t_probe_s);
  c.t_move_s = j.value("t_move_s", c.t_move_s);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  c.noise_seed = j.value("noise_seed", c.noise_seed);
  c.tactile_noise = j.value("tactile_noise", c.tactile_noise);
  c.ahd = j.value("ahd", c.ahd);
}

}  // namespace tgrasp::strategy
