// Acceptance gate: one line per criterion, PASS or FAIL with the measured
// numbers. Exits nonzero when any criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tgrasp/fuse.hpp"
#include "tgrasp/harness.hpp"
#include "tgrasp/nnet/layers.hpp"
#include "tgrasp/tactile.hpp"

using namespace tgrasp;
using namespace tgrasp::nnet;
using harness::ExperimentConfig;

namespace {

struct CheckResult {
  bool pass = false;
  std::string detail;
};

double now_s() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---------- criterion 1: finite-difference gradient suite ----------

double sum_sq(const Tensor<double>& t) {
  double s = 0.0;
  for (double v : t.data) s += v * v;
  return s;
}

Tensor<double> sum_sq_grad(const Tensor<double>& t) {
  Tensor<double> g(t.n, t.c, t.h, t.w);
  for (size_t i = 0; i < t.numel(); ++i) g.data[i] = 2.0 * t.data[i];
  return g;
}

template <typename Layer>
double layer_max_rel_err(Layer& layer, Tensor<double> x, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x.data) v = u(rng);
  auto params = layer.params();
  for (auto& p : params)
    if (p.grad) std::fill(p.grad->begin(), p.grad->end(), 0.0);
  Tensor<double> y = layer.forward(x);
  Tensor<double> dx = layer.backward(sum_sq_grad(y));
  auto loss_at = [&] { return sum_sq(layer.forward(x)); };
  const double eps = 1e-5;
  double worst = 0.0;
  auto probe = [&](double* value, double analytic) {
    const double orig = *value;
    *value = orig + eps;
    const double lp = loss_at();
    *value = orig - eps;
    const double lm = loss_at();
    *value = orig;
    const double fd = (lp - lm) / (2.0 * eps);
    // Exact-zero gradients leave only rounding noise in the quotient.
    if (std::abs(fd - analytic) < 1e-7) return;
    const double rel = std::abs(fd - analytic) /
                       std::max({std::abs(fd), std::abs(analytic), 1e-8});
    worst = std::max(worst, rel);
  };
  for (auto& p : params) {
    if (!p.grad) continue;
    for (int k = 0; k < 3; ++k) {
      const size_t j = rng() % p.value->size();
      probe(&(*p.value)[j], (*p.grad)[j]);
    }
  }
  for (int k = 0; k < 3; ++k) {
    const size_t j = rng() % x.numel();
    probe(&x.data[j], dx.data[j]);
  }
  return worst;
}

CheckResult criterion_gradients() {
  const double t0 = now_s();
  std::mt19937_64 rng(515);
  double worst_layer = 0.0, worst_bn = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int size = 4 + 2 * static_cast<int>(rng() % 3);
    const int in = 1 + static_cast<int>(rng() % 3);
    const int out = 1 + static_cast<int>(rng() % 3);
    const int k = 1 + 2 * static_cast<int>(rng() % 2);

    Conv2d<double> conv("c", in, out, k, 1 + static_cast<int>(rng() % 2),
                        k / 2);
    conv.init(rng);
    worst_layer = std::max(
        worst_layer,
        layer_max_rel_err(
            conv, Tensor<double>(1 + static_cast<int>(rng() % 2), in, size,
                                 size), rng));

    ConvTranspose2d<double> dec("d", in, out, 4, 2, 1);
    dec.init(rng);
    worst_layer = std::max(
        worst_layer,
        layer_max_rel_err(dec, Tensor<double>(1, in, size / 2, size / 2),
                          rng));

    // Batchnorm updates its running stats on every forward, so the probe
    // passes see slightly drifted normalization; allow a looser tolerance.
    BatchNorm2d<double> bn("b", in);
    bn.set_training(true);
    worst_bn = std::max(
        worst_bn,
        layer_max_rel_err(bn, Tensor<double>(2, in, size, size), rng));

    Linear<double> fc("f", in + 2, out + 1);
    fc.init(rng);
    worst_layer = std::max(
        worst_layer,
        layer_max_rel_err(
            fc, Tensor<double>(1 + static_cast<int>(rng() % 3), in + 2, 1, 1),
            rng));
  }
  const double dt = now_s() - t0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "max rel err %.2e (limit 1e-4; batchnorm %.2e, limit 1e-3), "
                "%.1f s (limit 60 s)",
                worst_layer, worst_bn, dt);
  return {worst_layer < 1e-4 && worst_bn < 1e-3 && dt < 60.0, buf};
}

// ---------- criterion 2: MEC brute-force oracle ----------

Circle brute_mec(const std::vector<Vec2>& pts) {
  auto contains_all = [&](const Circle& c) {
    for (const auto& p : pts)
      if ((p - c.center).norm() > c.radius + 1e-9) return false;
    return true;
  };
  Circle best{{0, 0}, 1e300};
  for (size_t i = 0; i < pts.size(); ++i) {
    if (contains_all({pts[i], 0.0})) return {pts[i], 0.0};
    for (size_t j = i + 1; j < pts.size(); ++j) {
      Circle two{(pts[i] + pts[j]) / 2.0, (pts[i] - pts[j]).norm() / 2.0};
      if (two.radius < best.radius && contains_all(two)) best = two;
      for (size_t k = j + 1; k < pts.size(); ++k) {
        const Vec2 a = pts[i], b = pts[j], c = pts[k];
        const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) +
                                c.x * (a.y - b.y));
        if (std::abs(d) < 1e-12) continue;
        const double ux = (a.squared_norm() * (b.y - c.y) +
                           b.squared_norm() * (c.y - a.y) +
                           c.squared_norm() * (a.y - b.y)) / d;
        const double uy = (a.squared_norm() * (c.x - b.x) +
                           b.squared_norm() * (a.x - c.x) +
                           c.squared_norm() * (b.x - a.x)) / d;
        Circle three{{ux, uy}, (Vec2{ux, uy} - a).norm()};
        if (three.radius < best.radius && contains_all(three)) best = three;
      }
    }
  }
  return best;
}

CheckResult criterion_mec() {
  const double t0 = now_s();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<Vec2> pts(1 + rng() % 50);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const Circle fast = min_enclosing_circle(pts);
    const Circle slow = brute_mec(pts);
    worst = std::max(worst, std::abs(fast.radius - slow.radius));
    worst = std::max(worst, (fast.center - slow.center).norm());
  }
  const double dt = now_s() - t0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "1000 sets, max deviation %.2e (limit 1e-9), %.1f s "
                "(limit 10 s)",
                worst, dt);
  return {worst < 1e-9 && dt < 10.0, buf};
}

// ---------- criterion 3: detection on unseen backgrounds / classes ----------

CheckResult criterion_detection() {
  const double t0 = now_s();
  ExperimentConfig cfg;  // 500 train / 200 test / 96 px / 2 classes / 40 bgs
  cfg.threads = 1;       // the runtime bound is for a single CPU
  const auto rep = harness::run_experiment("E1", cfg);
  const double dt = now_s() - t0;
  const double bg = rep.metrics["unseen_backgrounds"]["accuracy"];
  const double cls = rep.metrics["unseen_classes"]["accuracy"];
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "unseen backgrounds %.1f%% (need >= 85), unseen classes "
                "%.1f%% (need >= 80), %.0f s (limit 900 s)",
                100.0 * bg, 100.0 * cls, dt);
  return {bg >= 0.85 && cls >= 0.80 && dt <= 900.0, buf};
}

// ---------- criterion 4: Gaussian vs binary label ablation ----------

CheckResult criterion_label_ablation() {
  ExperimentConfig cfg;
  cfg.train_images = 150;
  cfg.test_images = 60;
  cfg.image_size = 64;
  cfg.epochs = 30;
  cfg.train_backgrounds = 20;
  cfg.label_ablation_seeds = 3;
  cfg.threads = 4;
  const auto rep = harness::run_experiment("E1c", cfg);
  const auto& m = rep.metrics;
  bool acc_higher = true;
  for (size_t i = 0; i < m["accuracy_gaussian"].size(); ++i)
    acc_higher = acc_higher && m["accuracy_gaussian"][i].get<double>() >
                                   m["accuracy_binary"][i].get<double>();
  const double dg = m["mean_center_dist_gaussian_px"];
  const double db = m["mean_center_dist_binary_px"];
  const double reduction = 1.0 - dg / db;
  char buf[240];
  std::snprintf(
      buf, sizeof(buf),
      "per-seed accuracy gaussian > binary: %s; centre distance %.2f px vs "
      "%.2f px, reduction %.0f%% (need >= 30%%)",
      acc_higher ? "yes" : "no", dg, db, 100.0 * reduction);
  return {acc_higher && reduction >= 0.30, buf};
}

// ---------- criterion 5: calibration gain on fragments ----------

CheckResult criterion_calibration() {
  ExperimentConfig cfg;
  cfg.episodes = 200;
  cfg.threads = 4;
  cfg.detector_jitter_mm = 0.5 * cfg.gripper.radius_mm;
  const auto rep = harness::run_experiment("E5", cfg);
  const double cal = rep.metrics["success_calibrated"];
  const double dir = rep.metrics["success_direct"];
  const double cal0 = rep.metrics["success_calibrated_zero_jitter"];
  const double dir0 = rep.metrics["success_direct_zero_jitter"];
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "jitter 0.5*rho: calibrated %.1f%% vs direct %.1f%% (need gap "
                ">= 25 points); zero jitter: %.1f%% / %.1f%% (need >= 98)",
                100.0 * cal, 100.0 * dir, 100.0 * cal0, 100.0 * dir0);
  return {cal - dir >= 0.25 && cal0 >= 0.98 && dir0 >= 0.98, buf};
}

// ---------- criterion 6: fusion gain ----------

CheckResult criterion_fusion() {
  double min_fusion_std = 1.0, min_gap_heavy = 1.0;
  for (uint64_t seed : {7ULL, 8ULL, 9ULL}) {
    fuse::DatasetConfig dc;
    dc.seed = seed;
    dc.train_per_class = 60;
    dc.test_per_class = 20;
    fuse::TrainOptions to;
    to.seed = seed;
    {
      const auto ds = fuse::make_dataset(dc);
      fuse::Classifier clf(fuse::Ablation::fusion, seed * 3 + 2);
      clf.train(ds.train, to);
      min_fusion_std = std::min(min_fusion_std, clf.accuracy(ds.test));
    }
    {
      dc.heavy_background = true;
      const auto ds = fuse::make_dataset(dc);
      fuse::Classifier vis(fuse::Ablation::visual_only, seed * 3);
      vis.train(ds.train, to);
      fuse::Classifier fus(fuse::Ablation::fusion, seed * 3 + 2);
      fus.train(ds.train, to);
      min_gap_heavy = std::min(
          min_gap_heavy, fus.accuracy(ds.test) - vis.accuracy(ds.test));
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "standard fusion accuracy >= %.1f%% over 3 seeds (need >= "
                "95); heavy-background fusion-visual gap >= %.1f points "
                "(need >= 20)",
                100.0 * min_fusion_std, 100.0 * min_gap_heavy);
  return {min_fusion_std >= 0.95 && min_gap_heavy >= 0.20, buf};
}

// ---------- criterion 7: THS bound and stacked ordering ----------

CheckResult criterion_ths() {
  ExperimentConfig cfg;
  cfg.episodes = 100;  // E6 runs stacked at half of this: the required 50
  cfg.threads = 4;
  const auto rep = harness::run_experiment("E6", cfg);
  const int contacts = rep.metrics["undulating"]["contacts"];
  const int violations = rep.metrics["undulating"]["ths_violations"];
  const double ordered =
      rep.metrics["stacked"]["top_down_ordered_fraction"];
  const int stacked_eps = rep.metrics["stacked"]["episodes"];
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "undulating: %d THS violations over %d contacts in 100 "
                "episodes (need 0); stacked: top-down in %.0f%% of %d "
                "episodes (need 100)",
                violations, contacts, 100.0 * ordered, stacked_eps);
  return {contacts > 0 && violations == 0 && ordered == 1.0 &&
              stacked_eps >= 50,
          buf};
}

// ---------- criterion 8: TPE step-length ordering ----------

CheckResult criterion_tpe() {
  ExperimentConfig cfg;
  cfg.episodes = 100;
  cfg.threads = 4;
  const auto rep = harness::run_experiment("E7", cfg);
  const double s50 = rep.metrics["pitch_50"]["success_rate"];
  const double s100 = rep.metrics["pitch_100"]["success_rate"];
  const double s150 = rep.metrics["pitch_150"]["success_rate"];
  const double t50 = rep.metrics["pitch_50"]["mean_time_s"];
  const double t100 = rep.metrics["pitch_100"]["mean_time_s"];
  const double t150 = rep.metrics["pitch_150"]["mean_time_s"];
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "success %.0f/%.0f/%.0f%% (need monotone, >= 85 at pitch 50);"
                " mean time %.0f/%.0f/%.0f s (need strictly decreasing)",
                100.0 * s50, 100.0 * s100, 100.0 * s150, t50, t100, t150);
  return {s50 >= s100 && s100 >= s150 && s50 >= 0.85 && t50 > t100 &&
              t100 > t150,
          buf};
}

// ---------- criterion 9: bit-exact replay ----------

CheckResult criterion_determinism() {
  ExperimentConfig e1;
  e1.train_images = 60;
  e1.test_images = 40;
  e1.image_size = 64;
  e1.epochs = 8;
  e1.train_backgrounds = 10;
  e1.threads = 1;
  const auto a1 = harness::run_experiment("E1", e1);
  e1.threads = 4;  // thread count must not leak into the numbers
  const auto b1 = harness::run_experiment("E1", e1);

  ExperimentConfig e7;
  e7.episodes = 20;
  e7.threads = 1;
  const auto a7 = harness::run_experiment("E7", e7);
  e7.threads = 4;
  const auto b7 = harness::run_experiment("E7", e7);

  const bool same1 = a1.metrics == b1.metrics;
  const bool same7 = a7.metrics == b7.metrics;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "E1 replay bit-exact: %s; E7 replay bit-exact: %s (reduced "
                "configs, 1 vs 4 threads)",
                same1 ? "yes" : "no", same7 ? "yes" : "no");
  return {same1 && same7, buf};
}

// ---------- criterion 10: Huber unit identities ----------

CheckResult criterion_huber() {
  Tensor<float> x(1, 1, 2, 2), t(1, 1, 2, 2);
  x.data = {0.3f, -1.2f, 4.0f, 0.0f};
  t.data = x.data;
  const bool zero = huber_loss<float>(x, t, 1.0) == 0.0f;

  Tensor<float> p(1, 1, 1, 1), q(1, 1, 1, 1);
  p.data = {0.5f};
  q.data = {0.0f};
  const bool half = huber_loss<float>(p, q, 1.0) == 0.125f;
  p.data = {3.0f};
  const bool three = huber_loss<float>(p, q, 1.0) == 2.5f;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "loss(x,x)=0: %s; e=0.5 -> 0.125: %s; e=3 -> 2.5: %s (exact)",
                zero ? "yes" : "no", half ? "yes" : "no",
                three ? "yes" : "no");
  return {zero && half && three, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> criteria{
      {"1 gradient suite", criterion_gradients},
      {"2 MEC oracle", criterion_mec},
      {"3 detection accuracy", criterion_detection},
      {"4 label ablation", criterion_label_ablation},
      {"5 calibration gain", criterion_calibration},
      {"6 fusion gain", criterion_fusion},
      {"7 THS bound", criterion_ths},
      {"8 TPE ordering", criterion_tpe},
      {"9 determinism", criterion_determinism},
      {"10 huber identities", criterion_huber},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    CheckResult out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("criterion %s: %s — %s\n", name.c_str(),
                out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
