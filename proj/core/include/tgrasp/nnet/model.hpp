#pragma once

#include <memory>

#include "tgrasp/nnet/layers.hpp"

namespace tgrasp::nnet {

/// Residual block: conv3x3-bn-relu-conv3x3-bn, shortcut add, relu.
template <typename S>
class ResidualBlock {
 public:
  ResidualBlock(const std::string& name, int ch)
      : conv1_(name + ".conv1", ch, ch, 3, 1, 1),
        bn1_(name + ".bn1", ch),
        conv2_(name + ".conv2", ch, ch, 3, 1, 1),
        bn2_(name + ".bn2", ch) {}

  void init(std::mt19937_64& rng) {
    conv1_.init(rng);
    conv2_.init(rng);
  }

  void set_training(bool t) {
    bn1_.set_training(t);
    bn2_.set_training(t);
  }

  Tensor<S> forward(const Tensor<S>& x) {
    Tensor<S> y = bn2_.forward(conv2_.forward(
        relu1_.forward(bn1_.forward(conv1_.forward(x)))));
    for (size_t i = 0; i < y.numel(); ++i) y.data[i] += x.data[i];
    return relu2_.forward(y);
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    Tensor<S> d = relu2_.backward(dy);
    Tensor<S> dx = conv1_.backward(
        bn1_.backward(relu1_.backward(conv2_.backward(bn2_.backward(d)))));
    for (size_t i = 0; i < dx.numel(); ++i) dx.data[i] += d.data[i];
    return dx;
  }

  std::vector<ParamRef<S>> params() {
    auto p = conv1_.params();
    for (auto& q : bn1_.params()) p.push_back(q);
    for (auto& q : conv2_.params()) p.push_back(q);
    for (auto& q : bn2_.params()) p.push_back(q);
    return p;
  }

  std::vector<ParamRef<S>> buffers() {
    auto b = bn1_.buffers();
    for (auto& q : bn2_.buffers()) b.push_back(q);
    return b;
  }

 private:
  Conv2d<S> conv1_;
  BatchNorm2d<S> bn1_;
  Conv2d<S> conv2_;
  BatchNorm2d<S> bn2_;
  ReLU<S> relu1_, relu2_;
};

/// Pixel-wise grasp detector: strided conv encoder, residual body, transpose
/// conv decoder with an encoder skip, two linear 1x1 heads (quality, radius).
template <typename S>
class Tgcnn {
 public:
  Tgcnn()
      : enc1_("enc1", 3, 16, 9, 2, 4),
        enc2_("enc2", 16, 32, 5, 2, 2),
        res1_("res1", 32),
        res2_("res2", 32),
        res3_("res3", 32),
        dec1_("dec1", 32, 16, 4, 2, 1),
        dec2_("dec2", 16, 8, 4, 2, 1),
        head_q_("head_q", 8, 1, 1, 1, 0, /*zero_init=*/true),
        head_r_("head_r", 8, 1, 1, 1, 0, /*zero_init=*/true) {}

  void init(uint64_t seed) {
    std::mt19937_64 rng(seed);
    enc1_.init(rng);
    enc2_.init(rng);
    res1_.init(rng);
    res2_.init(rng);
    res3_.init(rng);
    dec1_.init(rng);
    dec2_.init(rng);
  }

  void set_training(bool t) {
    training_ = t;
    for (auto* bn : {&res1_, &res2_, &res3_}) bn->set_training(t);
  }
  bool training() const { return training_; }

  /// Input (n,3,H,W), H and W divisible by 4; outputs (n,1,H,W) each.
  std::pair<Tensor<S>, Tensor<S>> forward(const Tensor<S>& x) {
    if (x.c != 3 || x.h % 4 != 0 || x.w % 4 != 0)
      throw std::invalid_argument("tgcnn: input must be 3xHxW, H,W % 4 == 0");
    Tensor<S> e1 = relu1_.forward(enc1_.forward(x));  // 16 @ H/2
    Tensor<S> e2 = relu2_.forward(enc2_.forward(e1)); // 32 @ H/4
    Tensor<S> b = res3_.forward(res2_.forward(res1_.forward(e2)));
    Tensor<S> d1 = dec1_.forward(b);                  // 16 @ H/2
    for (size_t i = 0; i < d1.numel(); ++i) d1.data[i] += e1.data[i];
    d1 = relu3_.forward(d1);
    Tensor<S> d2 = relu4_.forward(dec2_.forward(d1)); // 8 @ H
    return {head_q_.forward(d2), head_r_.forward(d2)};
  }

  Tensor<S> backward(const Tensor<S>& dq, const Tensor<S>& dr) {
    Tensor<S> dd2 = head_q_.backward(dq);
    Tensor<S> dd2r = head_r_.backward(dr);
    for (size_t i = 0; i < dd2.numel(); ++i) dd2.data[i] += dd2r.data[i];
    Tensor<S> dd1 = dec2_.backward(relu4_.backward(dd2));
    dd1 = relu3_.backward(dd1);
    Tensor<S> db = dec1_.backward(dd1);  // skip gradient flows to e1 as well
    Tensor<S> de2 = res1_.backward(res2_.backward(res3_.backward(db)));
    Tensor<S> de1 = enc2_.backward(relu2_.backward(de2));
    for (size_t i = 0; i < de1.numel(); ++i) de1.data[i] += dd1.data[i];
    return enc1_.backward(relu1_.backward(de1));
  }

  std::vector<ParamRef<S>> params() {
    std::vector<ParamRef<S>> p;
    for (auto& q : enc1_.params()) p.push_back(q);
    for (auto& q : enc2_.params()) p.push_back(q);
    for (auto& q : res1_.params()) p.push_back(q);
    for (auto& q : res2_.params()) p.push_back(q);
    for (auto& q : res3_.params()) p.push_back(q);
    for (auto& q : dec1_.params()) p.push_back(q);
    for (auto& q : dec2_.params()) p.push_back(q);
    for (auto& q : head_q_.params()) p.push_back(q);
    for (auto& q : head_r_.params()) p.push_back(q);
    return p;
  }

  std::vector<ParamRef<S>> buffers() {
    std::vector<ParamRef<S>> b;
    for (auto& q : res1_.buffers()) b.push_back(q);
    for (auto& q : res2_.buffers()) b.push_back(q);
    for (auto& q : res3_.buffers()) b.push_back(q);
    return b;
  }

  size_t parameter_count() {
    size_t n = 0;
    for (auto& p : params()) n += p.value->size();
    return n;
  }

 private:
  Conv2d<S> enc1_, enc2_;
  ResidualBlock<S> res1_, res2_, res3_;
  ConvTranspose2d<S> dec1_, dec2_;
  Conv2d<S> head_q_, head_r_;
  ReLU<S> relu1_, relu2_, relu3_, relu4_;
  bool training_ = true;
};

}  // namespace tgrasp::nnet
