#include "tgrasp/fuse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tgrasp/nnet/optim.hpp"
#include "tgrasp/render.hpp"

namespace tgrasp::fuse {

namespace {

/// 32x32 camera hovering over `center`; the crop spans roughly 100 mm.
CameraModel crop_camera(const Vec2& center, double base_height) {
  const double height = 400.0;
  const double focal = kCropSize * height / 100.0;
  CameraModel cam = make_overhead_camera(height + base_height, 0.0, kCropSize,
                                         kCropSize, focal);
  // Shift the viewpoint laterally so the object centroid hits the image centre.
  const Eigen::Vector3d c(center.x, center.y, base_height + height);
  cam.translation = -cam.rotation * c;
  return cam;
}

std::vector<float> tactile_descriptor(const Scene& scene,
                                      const ObjectInstance& obj,
                                      const GripperSpec& gripper,
                                      const TactileNoise& noise,
                                      uint64_t noise_seed) {
  const Vec2 c = obj.centroid();
  const double press_h = std::max(obj.base_height_mm + 0.25,
                                  obj.top_height_mm - 0.5);
  const TactileFrame frame = sense(scene, gripper, c, press_h, noise_seed, noise);
  const ContactRegion region = segment(frame, gripper);

  std::vector<float> d(kTactileDim, 0.0f);
  if (!region.has_contact) return d;
  const double mm_per_px = 1.0 / gripper.px_per_mm;
  const double half = gripper.tactile_resolution / 2.0;
  for (const auto& [row, col] : region.pixels) {
    const double x = (col + 0.5 - half) * mm_per_px - region.mec_mm.center.x;
    const double y = (row + 0.5 - half) * mm_per_px - region.mec_mm.center.y;
    const double r = std::hypot(x, y);
    const double ang = std::atan2(y, x);  // [-pi, pi]
    int bin = static_cast<int>((ang + M_PI) / (2.0 * M_PI) * kRadialBins);
    bin = std::clamp(bin, 0, kRadialBins - 1);
    d[bin] = std::max(d[bin], static_cast<float>(r));
  }
  // Unit-max normalization keeps the descriptor scale-free per sample.
  float peak = 0.0f;
  for (int i = 0; i < kRadialBins; ++i) peak = std::max(peak, d[i]);
  if (peak > 0.0f)
    for (int i = 0; i < kRadialBins; ++i) d[i] /= peak;
  const double frame_area = static_cast<double>(gripper.tactile_resolution) *
                            gripper.tactile_resolution;
  d[kRadialBins] = static_cast<float>(region.pixels.size() / frame_area);
  d[kRadialBins + 1] =
      static_cast<float>(region.mec_mm.radius / gripper.radius_mm);
  return d;
}

}  // namespace

FusionSample make_sample(const Scene& scene, const ObjectInstance& obj,
                         const GripperSpec& gripper, const TactileNoise& noise,
                         uint64_t noise_seed) {
  FusionSample s;
  s.label = obj.class_id;
  s.features.reserve(kFeatureDim);

  const CameraModel cam =
      crop_camera(obj.centroid(), scene.support.base_height_mm);
  const ImageRGB crop = render_rgb(scene, cam);
  const size_t plane = static_cast<size_t>(kCropSize) * kCropSize;
  s.features.assign(kFeatureDim, 0.0f);
  for (int r = 0; r < kCropSize; ++r)
    for (int c = 0; c < kCropSize; ++c)
      for (int ch = 0; ch < 3; ++ch)
        s.features[ch * plane + r * kCropSize + c] = crop.at(r, c, ch);

  const auto tac = tactile_descriptor(scene, obj, gripper, noise, noise_seed);
  std::copy(tac.begin(), tac.end(), s.features.begin() + kVisualDim);
  return s;
}

void apply_ablation(std::vector<float>& features, Ablation ablation) {
  if (static_cast<int>(features.size()) != kFeatureDim)
    throw std::invalid_argument("apply_ablation: feature size mismatch");
  if (ablation == Ablation::visual_only)
    std::fill(features.begin() + kVisualDim, features.end(), 0.0f);
  else if (ablation == Ablation::tactile_only)
    std::fill(features.begin(), features.begin() + kVisualDim, 0.0f);
}

Dataset make_dataset(const DatasetConfig& cfg) {
  Dataset out;
  std::mt19937_64 rng(cfg.seed * 0x2545f4914f6cdd1dULL + 1);
  std::uniform_real_distribution<double> pos(-60.0, 60.0);
  std::uniform_real_distribution<double> scale(0.8, 1.2);

  auto emit = [&](int cls, bool test) {
    Scene scene;
    scene.kind = SceneKind::plane;
    scene.seed = rng();
    if (cfg.heavy_background) {
      // Clutter at the objects' own feature scale: the crop is dominated by
      // background structure and the visual modality carries little signal.
      scene.background.family = (rng() % 2) ? TextureFamily::checker
                                            : TextureFamily::stripes;
      scene.background.scale_mm = 4.0 + 1.0 * (rng() % 8);
    } else {
      scene.background.family = static_cast<TextureFamily>(rng() % 4);
      scene.background.scale_mm = 20.0 + 40.0 * (rng() % 5);
    }
    // Disjoint texture-seed parity keeps train and test backgrounds apart.
    scene.background.seed = (rng() << 1) | (test ? 1ULL : 0ULL);
    ObjectInstance obj;
    obj.id = 0;
    obj.class_id = cls;
    const Vec2 c(pos(rng), pos(rng));
    const double s = cfg.object_scale_mm * scale(rng);
    obj.footprint = class_footprint(cls, c, s);
    obj.base_height_mm = 0.0;
    obj.top_height_mm = 12.0 + 6.0 * (cls % 3);
    Polygon hull = convex_hull(obj.footprint);
    auto [a, b] = diameter_pair(hull);
    obj.graspable_diameter_mm = (a - b).norm();
    scene.objects.push_back(obj);
    FusionSample sample =
        make_sample(scene, obj, cfg.gripper, cfg.noise, rng());
    (test ? out.test : out.train).push_back(std::move(sample));
  };

  for (int cls = 0; cls < kClasses; ++cls) {
    for (int i = 0; i < cfg.train_per_class; ++i) emit(cls, false);
    for (int i = 0; i < cfg.test_per_class; ++i) emit(cls, true);
  }
  return out;
}

Classifier::Classifier(Ablation ablation, uint64_t init_seed)
    : ablation_(ablation),
      l1_("fc1", kFeatureDim, 128),
      l2_("fc2", 128, 64),
      l3_("fc3", 64, kClasses) {
  std::mt19937_64 rng(init_seed + 0x66757365ULL);
  l1_.init(rng);
  l2_.init(rng);
  l3_.init(rng);
}

std::vector<nnet::ParamRef<float>> Classifier::params() {
  std::vector<nnet::ParamRef<float>> out;
  for (auto* l : {&l1_, &l2_, &l3_})
    for (auto& p : l->params()) out.push_back(p);
  return out;
}

nnet::Tensor<float> Classifier::forward(
    const std::vector<const FusionSample*>& batch) {
  nnet::Tensor<float> x(static_cast<int>(batch.size()), kFeatureDim, 1, 1);
  for (size_t b = 0; b < batch.size(); ++b) {
    std::vector<float> f = batch[b]->features;
    apply_ablation(f, ablation_);
    for (int i = 0; i < kVisualDim; ++i) f[i] *= kVisualScale;
    std::copy(f.begin(), f.end(),
              x.data.begin() + b * static_cast<size_t>(kFeatureDim));
  }
  return l3_.forward(r2_.forward(l2_.forward(r1_.forward(l1_.forward(x)))));
}

void Classifier::backward(const nnet::Tensor<float>& dlogits) {
  l1_.backward(r1_.backward(l2_.backward(r2_.backward(l3_.backward(dlogits)))));
}

std::vector<double> Classifier::train(const std::vector<FusionSample>& data,
                                      const TrainOptions& opt) {
  if (data.empty()) throw std::invalid_argument("Classifier::train: empty dataset");
  nnet::Adam<float> sgd(params(), opt.lr, opt.momentum);
  std::mt19937_64 rng(opt.seed + 0x636c7366ULL);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> curve;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    size_t batches = 0;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(opt.batch)) {
      const size_t count = std::min<size_t>(opt.batch, order.size() - begin);
      std::vector<const FusionSample*> batch(count);
      std::vector<int> labels(count);
      for (size_t i = 0; i < count; ++i) {
        batch[i] = &data[order[begin + i]];
        labels[i] = batch[i]->label;
      }
      nnet::Tensor<float> logits = forward(batch);
      nnet::Tensor<float> grad;
      loss_sum += nnet::softmax_cross_entropy<float>(logits, labels, &grad);
      sgd.zero_grad();
      backward(grad);
      sgd.step();
      ++batches;
    }
    curve.push_back(loss_sum / static_cast<double>(batches));
  }
  return curve;
}

int Classifier::classify(const FusionSample& sample, std::vector<float>* probs) {
  const std::vector<const FusionSample*> batch{&sample};
  nnet::Tensor<float> logits = forward(batch);
  if (probs) {
    std::vector<int> dummy_label{0};
    nnet::softmax_cross_entropy<float>(logits, dummy_label, nullptr, probs);
  }
  int best = 0;
  for (int i = 1; i < kClasses; ++i)
    if (logits.data[i] > logits.data[best]) best = i;
  return best;
}

double Classifier::accuracy(const std::vector<FusionSample>& data) {
  if (data.empty()) return 0.0;
  int correct = 0;
  for (const auto& s : data)
    if (classify(s) == s.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace tgrasp::fuse
