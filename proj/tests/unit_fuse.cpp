#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tgrasp/fuse.hpp"

using namespace tgrasp;
using namespace tgrasp::fuse;

namespace {

Scene single_object(int cls, const Vec2& center) {
  Scene scene;
  scene.kind = SceneKind::plane;
  scene.seed = 3;
  scene.background.family = TextureFamily::checker;
  scene.background.seed = 12;
  ObjectInstance obj;
  obj.id = 0;
  obj.class_id = cls;
  obj.footprint = class_footprint(cls, center, 30.0);
  obj.base_height_mm = 0.0;
  obj.top_height_mm = 15.0;
  auto [a, b] = diameter_pair(obj.footprint);
  obj.graspable_diameter_mm = (a - b).norm();
  scene.objects.push_back(obj);
  return scene;
}

TactileNoise clean() {
  TactileNoise n;
  n.salt_pepper_rate = 0.0;
  n.morphological_step = false;
  return n;
}

}  // namespace

TEST_CASE("feature vector layout and dimensions") {
  GripperSpec g;
  Scene scene = single_object(0, {0.0, 0.0});
  FusionSample s = make_sample(scene, scene.objects[0], g, clean(), 1);
  CHECK(static_cast<int>(s.features.size()) == kFeatureDim);
  CHECK(s.label == 0);
  // Tactile block present: descriptor peak is unit after normalization.
  float peak = 0.0f;
  for (int i = 0; i < kRadialBins; ++i)
    peak = std::max(peak, s.features[kVisualDim + i]);
  CHECK(peak == doctest::Approx(1.0f));
  // Area and MEC-radius features are positive for a real contact.
  CHECK(s.features[kVisualDim + kRadialBins] > 0.0f);
  CHECK(s.features[kVisualDim + kRadialBins + 1] > 0.0f);
}

TEST_CASE("tactile descriptor is translation invariant bitwise") {
  GripperSpec g;
  Scene a = single_object(2, {20.0, 10.0});
  Scene b = single_object(2, {-20.0, -10.0});
  FusionSample sa = make_sample(a, a.objects[0], g, clean(), 7);
  FusionSample sb = make_sample(b, b.objects[0], g, clean(), 7);
  for (int i = kVisualDim; i < kFeatureDim; ++i)
    CHECK(sa.features[i] == sb.features[i]);
}

TEST_CASE("descriptors separate the six proxy classes") {
  GripperSpec g;
  std::vector<std::vector<float>> desc;
  for (int cls = 0; cls < kClasses; ++cls) {
    Scene scene = single_object(cls, {0.0, 0.0});
    FusionSample s = make_sample(scene, scene.objects[0], g, clean(), 1);
    desc.emplace_back(s.features.begin() + kVisualDim, s.features.end());
  }
  for (int i = 0; i < kClasses; ++i)
    for (int j = i + 1; j < kClasses; ++j) {
      double dist = 0.0;
      for (size_t k = 0; k < desc[i].size(); ++k) {
        const double d = desc[i][k] - desc[j][k];
        dist += d * d;
      }
      CHECK(dist > 0.0);
    }
}

TEST_CASE("ablation masks exactly the excluded modality") {
  std::vector<float> f(kFeatureDim, 0.5f);
  auto v = f;
  apply_ablation(v, Ablation::visual_only);
  for (int i = 0; i < kVisualDim; ++i) CHECK(v[i] == 0.5f);
  for (int i = kVisualDim; i < kFeatureDim; ++i) CHECK(v[i] == 0.0f);

  auto t = f;
  apply_ablation(t, Ablation::tactile_only);
  for (int i = 0; i < kVisualDim; ++i) CHECK(t[i] == 0.0f);
  for (int i = kVisualDim; i < kFeatureDim; ++i) CHECK(t[i] == 0.5f);

  auto fu = f;
  apply_ablation(fu, Ablation::fusion);
  CHECK(fu == f);

  std::vector<float> wrong(10, 0.0f);
  CHECK_THROWS_AS(apply_ablation(wrong, Ablation::fusion),
                  std::invalid_argument);
}

TEST_CASE("same seed reproduces the dataset exactly") {
  DatasetConfig cfg;
  cfg.train_per_class = 2;
  cfg.test_per_class = 1;
  cfg.seed = 99;
  Dataset a = make_dataset(cfg);
  Dataset b = make_dataset(cfg);
  REQUIRE(a.train.size() == b.train.size());
  for (size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].features == b.train[i].features);
    CHECK(a.train[i].label == b.train[i].label);
  }
  CHECK(a.train.size() == 2 * kClasses);
  CHECK(a.test.size() == 1 * kClasses);
}

TEST_CASE("classifier probabilities normalize") {
  GripperSpec g;
  Scene scene = single_object(1, {0.0, 0.0});
  FusionSample s = make_sample(scene, scene.objects[0], g, clean(), 1);
  Classifier clf(Ablation::fusion, 4);
  std::vector<float> probs;
  clf.classify(s, &probs);
  REQUIRE(static_cast<int>(probs.size()) == kClasses);
  float sum = 0.0f;
  for (float p : probs) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("single-class training is trivially perfect") {
  GripperSpec g;
  std::vector<FusionSample> data;
  for (int i = 0; i < 8; ++i) {
    Scene scene = single_object(3, {5.0 * i - 20.0, 0.0});
    scene.background.seed = 100 + i;
    data.push_back(make_sample(scene, scene.objects[0], g, clean(), i));
  }
  TrainOptions opt;
  opt.epochs = 10;
  Classifier clf(Ablation::tactile_only, 1);
  clf.train(data, opt);
  CHECK(clf.accuracy(data) == doctest::Approx(1.0));

  CHECK_THROWS_AS(clf.train({}, opt), std::invalid_argument);
}
