#pragma once

#include <cmath>
#include <vector>

#include "tgrasp/nnet/tensor.hpp"

namespace tgrasp::nnet {

/// SGD with classical momentum.
template <typename S>
class SgdMomentum {
 public:
  SgdMomentum(std::vector<ParamRef<S>> params, double lr, double momentum = 0.9)
      : params_(std::move(params)), lr_(lr), momentum_(momentum) {
    for (const auto& p : params_) velocity_.emplace_back(p.value->size(), S(0));
  }

  void zero_grad() {
    for (auto& p : params_)
      if (p.grad) std::fill(p.grad->begin(), p.grad->end(), S(0));
  }

  void step() {
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i];
      if (!p.grad) continue;
      auto& v = velocity_[i];
      for (size_t j = 0; j < v.size(); ++j) {
        v[j] = static_cast<S>(momentum_ * v[j] - lr_ * (*p.grad)[j]);
        (*p.value)[j] += v[j];
      }
    }
  }

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

 private:
  std::vector<ParamRef<S>> params_;
  std::vector<std::vector<S>> velocity_;
  double lr_, momentum_;
};

/// Adam. The detection loss is normalized by pixel count, which leaves the
/// trunk with gradients several orders of magnitude below the heads'; plain
/// SGD stalls there, so detector training relies on Adam's per-parameter
/// scaling.
template <typename S>
class Adam {
 public:
  Adam(std::vector<ParamRef<S>> params, double lr, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8)
      : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2),
        eps_(eps) {
    for (const auto& p : params_) {
      m_.emplace_back(p.value->size(), S(0));
      v_.emplace_back(p.value->size(), S(0));
    }
  }

  void zero_grad() {
    for (auto& p : params_)
      if (p.grad) std::fill(p.grad->begin(), p.grad->end(), S(0));
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (size_t i = 0; i < params_.size(); ++i) {
      auto& p = params_[i];
      if (!p.grad) continue;
      for (size_t j = 0; j < p.value->size(); ++j) {
        const double g = (*p.grad)[j];
        m_[i][j] = static_cast<S>(beta1_ * m_[i][j] + (1.0 - beta1_) * g);
        v_[i][j] = static_cast<S>(beta2_ * v_[i][j] + (1.0 - beta2_) * g * g);
        const double mhat = m_[i][j] / bc1;
        const double vhat = v_[i][j] / bc2;
        (*p.value)[j] -=
            static_cast<S>(lr_ * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  void set_lr(double lr) { lr_ = lr; }
  double lr() const { return lr_; }

 private:
  std::vector<ParamRef<S>> params_;
  std::vector<std::vector<S>> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
};

}  // namespace tgrasp::nnet
