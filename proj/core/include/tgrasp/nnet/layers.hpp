#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>

#include "tgrasp/nnet/tensor.hpp"

namespace tgrasp::nnet {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using MatMap = Eigen::Map<Mat<S>>;
template <typename S>
using ConstMatMap = Eigen::Map<const Mat<S>>;

inline int conv_out_dim(int in, int k, int stride, int pad) {
  return (in + 2 * pad - k) / stride + 1;
}

/// im2col: (c,h,w) channel block -> cols (c*k*k rows, oh*ow cols), column-major.
template <typename S>
void im2col(const S* src, int c, int h, int w, int k, int stride, int pad,
            S* cols) {
  const int oh = conv_out_dim(h, k, stride, pad);
  const int ow = conv_out_dim(w, k, stride, pad);
  const int rows = c * k * k;
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      S* col = cols + static_cast<size_t>(oy * ow + ox) * rows;
      int idx = 0;
      for (int ci = 0; ci < c; ++ci) {
        const S* plane = src + static_cast<size_t>(ci) * h * w;
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * stride - pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * stride - pad + kx;
            col[idx++] = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                             ? plane[iy * w + ix]
                             : S(0);
          }
        }
      }
    }
  }
}

/// Scatter-add inverse of im2col.
template <typename S>
void col2im(const S* cols, int c, int h, int w, int k, int stride, int pad,
            S* dst) {
  const int oh = conv_out_dim(h, k, stride, pad);
  const int ow = conv_out_dim(w, k, stride, pad);
  const int rows = c * k * k;
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const S* col = cols + static_cast<size_t>(oy * ow + ox) * rows;
      int idx = 0;
      for (int ci = 0; ci < c; ++ci) {
        S* plane = dst + static_cast<size_t>(ci) * h * w;
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * stride - pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * stride - pad + kx;
            if (iy >= 0 && iy < h && ix >= 0 && ix < w)
              plane[iy * w + ix] += col[idx];
            ++idx;
          }
        }
      }
    }
  }
}

template <typename S>
class Conv2d {
 public:
  Conv2d(std::string name, int in_ch, int out_ch, int k, int stride, int pad,
         bool zero_init = false)
      : name_(std::move(name)), in_(in_ch), out_(out_ch), k_(k),
        stride_(stride), pad_(pad),
        w_(static_cast<size_t>(out_ch) * in_ch * k * k, S(0)),
        b_(out_ch, S(0)), gw_(w_.size(), S(0)), gb_(b_.size(), S(0)),
        zero_init_(zero_init) {}

  void init(std::mt19937_64& rng) {
    if (zero_init_) return;
    const double fan_in = static_cast<double>(in_) * k_ * k_;
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (auto& v : w_) v = static_cast<S>(dist(rng));
  }

  Tensor<S> forward(const Tensor<S>& x) {
    if (x.c != in_) throw std::invalid_argument(name_ + ": channel mismatch");
    x_ = x;
    const int oh = conv_out_dim(x.h, k_, stride_, pad_);
    const int ow = conv_out_dim(x.w, k_, stride_, pad_);
    Tensor<S> y(x.n, out_, oh, ow);
    const int rows = in_ * k_ * k_;
    const int cols = oh * ow;
    cols_.assign(static_cast<size_t>(x.n) * rows * cols, S(0));
    ConstMatMap<S> wmat(w_.data(), rows, out_);
    for (int ni = 0; ni < x.n; ++ni) {
      S* colbuf = cols_.data() + static_cast<size_t>(ni) * rows * cols;
      im2col(x.channel(ni, 0), in_, x.h, x.w, k_, stride_, pad_, colbuf);
      // Column oc of the (plane x out) column-major product is exactly the
      // contiguous channel-oc plane in NCHW storage.
      MatMap<S> ymat(y.channel(ni, 0), cols, out_);
      ConstMatMap<S> cmat(colbuf, rows, cols);
      ymat.noalias() = cmat.transpose() * wmat;
      for (int oc = 0; oc < out_; ++oc) ymat.col(oc).array() += b_[oc];
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    const int oh = dy.h, ow = dy.w;
    const int rows = in_ * k_ * k_;
    const int cols = oh * ow;
    Tensor<S> dx(x_.n, in_, x_.h, x_.w);
    MatMap<S> gwmat(gw_.data(), rows, out_);
    ConstMatMap<S> wmat(w_.data(), rows, out_);
    std::vector<S> dcols(static_cast<size_t>(rows) * cols);
    for (int ni = 0; ni < x_.n; ++ni) {
      ConstMatMap<S> dymat(dy.channel(ni, 0), cols, out_);
      ConstMatMap<S> cmat(cols_.data() + static_cast<size_t>(ni) * rows * cols,
                          rows, cols);
      gwmat.noalias() += cmat * dymat;
      for (int oc = 0; oc < out_; ++oc) gb_[oc] += dymat.col(oc).sum();
      MatMap<S> dcmat(dcols.data(), rows, cols);
      dcmat.noalias() = wmat * dymat.transpose();
      col2im(dcols.data(), in_, x_.h, x_.w, k_, stride_, pad_,
             dx.channel(ni, 0));
    }
    return dx;
  }

  std::vector<ParamRef<S>> params() {
    return {{name_ + ".weight", &w_, &gw_, {out_, in_, k_, k_}},
            {name_ + ".bias", &b_, &gb_, {out_}}};
  }

 private:
  std::string name_;
  int in_, out_, k_, stride_, pad_;
  std::vector<S> w_, b_, gw_, gb_;
  bool zero_init_ = false;
  Tensor<S> x_;
  std::vector<S> cols_;
};

template <typename S>
class ConvTranspose2d {
 public:
  ConvTranspose2d(std::string name, int in_ch, int out_ch, int k, int stride,
                  int pad)
      : name_(std::move(name)), in_(in_ch), out_(out_ch), k_(k),
        stride_(stride), pad_(pad),
        w_(static_cast<size_t>(in_ch) * out_ch * k * k, S(0)),
        b_(out_ch, S(0)), gw_(w_.size(), S(0)), gb_(b_.size(), S(0)) {}

  void init(std::mt19937_64& rng) {
    const double fan_in = static_cast<double>(in_) * k_ * k_ /
                          (static_cast<double>(stride_) * stride_);
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / fan_in));
    for (auto& v : w_) v = static_cast<S>(dist(rng));
  }

  int out_dim(int in) const { return (in - 1) * stride_ - 2 * pad_ + k_; }

  Tensor<S> forward(const Tensor<S>& x) {
    if (x.c != in_) throw std::invalid_argument(name_ + ": channel mismatch");
    x_ = x;
    const int oh = out_dim(x.h);
    const int ow = out_dim(x.w);
    Tensor<S> y(x.n, out_, oh, ow);
    const int rows = out_ * k_ * k_;
    const int cols = x.h * x.w;
    ConstMatMap<S> wmat(w_.data(), rows, in_);  // (out*k*k) x in
    std::vector<S> colbuf(static_cast<size_t>(rows) * cols);
    for (int ni = 0; ni < x.n; ++ni) {
      ConstMatMap<S> xmat(x.channel(ni, 0), cols, in_);
      MatMap<S> cmat(colbuf.data(), rows, cols);
      cmat.noalias() = wmat * xmat.transpose();
      col2im(colbuf.data(), out_, oh, ow, k_, stride_, pad_, y.channel(ni, 0));
      MatMap<S> ymat(y.channel(ni, 0), oh * ow, out_);
      for (int oc = 0; oc < out_; ++oc) ymat.col(oc).array() += b_[oc];
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    const int rows = out_ * k_ * k_;
    const int cols = x_.h * x_.w;
    Tensor<S> dx(x_.n, in_, x_.h, x_.w);
    MatMap<S> gwmat(gw_.data(), rows, in_);
    ConstMatMap<S> wmat(w_.data(), rows, in_);
    std::vector<S> dcols(static_cast<size_t>(rows) * cols);
    for (int ni = 0; ni < x_.n; ++ni) {
      im2col(dy.channel(ni, 0), out_, dy.h, dy.w, k_, stride_, pad_,
             dcols.data());
      ConstMatMap<S> dcmat(dcols.data(), rows, cols);
      ConstMatMap<S> xmat(x_.channel(ni, 0), cols, in_);
      gwmat.noalias() += dcmat * xmat;
      MatMap<S> dxmat(dx.channel(ni, 0), cols, in_);
      dxmat.noalias() = dcmat.transpose() * wmat;
      ConstMatMap<S> dymat(dy.channel(ni, 0), dy.h * dy.w, out_);
      for (int oc = 0; oc < out_; ++oc) gb_[oc] += dymat.col(oc).sum();
    }
    return dx;
  }

  std::vector<ParamRef<S>> params() {
    return {{name_ + ".weight", &w_, &gw_, {in_, out_, k_, k_}},
            {name_ + ".bias", &b_, &gb_, {out_}}};
  }

 private:
  std::string name_;
  int in_, out_, k_, stride_, pad_;
  std::vector<S> w_, b_, gw_, gb_;
  Tensor<S> x_;
};

template <typename S>
class BatchNorm2d {
 public:
  BatchNorm2d(std::string name, int ch, double momentum = 0.1,
              double eps = 1e-5)
      : name_(std::move(name)), ch_(ch), momentum_(momentum), eps_(eps),
        gamma_(ch, S(1)), beta_(ch, S(0)), ggamma_(ch, S(0)), gbeta_(ch, S(0)),
        run_mean_(ch, S(0)), run_var_(ch, S(1)) {}

  void set_training(bool training) { training_ = training; }

  Tensor<S> forward(const Tensor<S>& x) {
    if (x.c != ch_) throw std::invalid_argument(name_ + ": channel mismatch");
    Tensor<S> y(x.n, x.c, x.h, x.w);
    const size_t plane = x.plane();
    const double count = static_cast<double>(x.n) * plane;
    xhat_ = Tensor<S>(x.n, x.c, x.h, x.w);
    inv_std_.assign(ch_, S(0));
    for (int ci = 0; ci < ch_; ++ci) {
      double mean, var;
      if (training_) {
        double sum = 0.0, sq = 0.0;
        for (int ni = 0; ni < x.n; ++ni) {
          const S* p = x.channel(ni, ci);
          for (size_t i = 0; i < plane; ++i) {
            sum += p[i];
            sq += static_cast<double>(p[i]) * p[i];
          }
        }
        mean = sum / count;
        var = sq / count - mean * mean;
        run_mean_[ci] = static_cast<S>((1.0 - momentum_) * run_mean_[ci] +
                                       momentum_ * mean);
        run_var_[ci] = static_cast<S>((1.0 - momentum_) * run_var_[ci] +
                                      momentum_ * var);
      } else {
        mean = run_mean_[ci];
        var = run_var_[ci];
      }
      const double inv = 1.0 / std::sqrt(var + eps_);
      inv_std_[ci] = static_cast<S>(inv);
      for (int ni = 0; ni < x.n; ++ni) {
        const S* p = x.channel(ni, ci);
        S* xh = xhat_.channel(ni, ci);
        S* yp = y.channel(ni, ci);
        for (size_t i = 0; i < plane; ++i) {
          xh[i] = static_cast<S>((p[i] - mean) * inv);
          yp[i] = gamma_[ci] * xh[i] + beta_[ci];
        }
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    Tensor<S> dx(dy.n, dy.c, dy.h, dy.w);
    const size_t plane = dy.plane();
    const double count = static_cast<double>(dy.n) * plane;
    for (int ci = 0; ci < ch_; ++ci) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (int ni = 0; ni < dy.n; ++ni) {
        const S* d = dy.channel(ni, ci);
        const S* xh = xhat_.channel(ni, ci);
        for (size_t i = 0; i < plane; ++i) {
          sum_dy += d[i];
          sum_dy_xhat += static_cast<double>(d[i]) * xh[i];
        }
      }
      ggamma_[ci] += static_cast<S>(sum_dy_xhat);
      gbeta_[ci] += static_cast<S>(sum_dy);
      const double g = gamma_[ci];
      const double inv = inv_std_[ci];
      for (int ni = 0; ni < dy.n; ++ni) {
        const S* d = dy.channel(ni, ci);
        const S* xh = xhat_.channel(ni, ci);
        S* dxp = dx.channel(ni, ci);
        if (training_) {
          for (size_t i = 0; i < plane; ++i)
            dxp[i] = static_cast<S>(
                g * inv * (d[i] - sum_dy / count - xh[i] * sum_dy_xhat / count));
        } else {
          for (size_t i = 0; i < plane; ++i)
            dxp[i] = static_cast<S>(g * inv * d[i]);
        }
      }
    }
    return dx;
  }

  std::vector<ParamRef<S>> params() {
    return {{name_ + ".gamma", &gamma_, &ggamma_, {ch_}},
            {name_ + ".beta", &beta_, &gbeta_, {ch_}}};
  }

  /// Running stats, persisted in checkpoints but not optimized.
  std::vector<ParamRef<S>> buffers() {
    return {{name_ + ".running_mean", &run_mean_, nullptr, {ch_}},
            {name_ + ".running_var", &run_var_, nullptr, {ch_}}};
  }

 private:
  std::string name_;
  int ch_;
  double momentum_, eps_;
  bool training_ = true;
  std::vector<S> gamma_, beta_, ggamma_, gbeta_, run_mean_, run_var_;
  Tensor<S> xhat_;
  std::vector<S> inv_std_;
};

template <typename S>
class ReLU {
 public:
  Tensor<S> forward(const Tensor<S>& x) {
    mask_.assign(x.numel(), 0);
    Tensor<S> y = x;
    for (size_t i = 0; i < y.numel(); ++i) {
      if (y.data[i] > S(0))
        mask_[i] = 1;
      else
        y.data[i] = S(0);
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    Tensor<S> dx = dy;
    for (size_t i = 0; i < dx.numel(); ++i)
      if (!mask_[i]) dx.data[i] = S(0);
    return dx;
  }

 private:
  std::vector<uint8_t> mask_;
};

template <typename S>
class Linear {
 public:
  Linear(std::string name, int in, int out, bool zero_init = false)
      : name_(std::move(name)), in_(in), out_(out),
        w_(static_cast<size_t>(in) * out, S(0)), b_(out, S(0)),
        gw_(w_.size(), S(0)), gb_(b_.size(), S(0)), zero_init_(zero_init) {}

  void init(std::mt19937_64& rng) {
    if (zero_init_) return;
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / in_));
    for (auto& v : w_) v = static_cast<S>(dist(rng));
  }

  /// x: (batch x in) stored row-major as Tensor with c=in, h=w=1.
  Tensor<S> forward(const Tensor<S>& x) {
    if (x.c != in_ || x.h != 1 || x.w != 1)
      throw std::invalid_argument(name_ + ": shape mismatch");
    x_ = x;
    Tensor<S> y(x.n, out_, 1, 1);
    ConstMatMap<S> wmat(w_.data(), in_, out_);
    ConstMatMap<S> xmat(x.data.data(), in_, x.n);
    MatMap<S> ymat(y.data.data(), out_, y.n);
    ymat.noalias() = wmat.transpose() * xmat;
    for (int ni = 0; ni < y.n; ++ni)
      for (int oc = 0; oc < out_; ++oc) ymat(oc, ni) += b_[oc];
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) {
    Tensor<S> dx(x_.n, in_, 1, 1);
    ConstMatMap<S> wmat(w_.data(), in_, out_);
    ConstMatMap<S> xmat(x_.data.data(), in_, x_.n);
    ConstMatMap<S> dymat(dy.data.data(), out_, dy.n);
    MatMap<S> gwmat(gw_.data(), in_, out_);
    MatMap<S> dxmat(dx.data.data(), in_, dx.n);
    gwmat.noalias() += xmat * dymat.transpose();
    for (int ni = 0; ni < dy.n; ++ni)
      for (int oc = 0; oc < out_; ++oc) gb_[oc] += dymat(oc, ni);
    dxmat.noalias() = wmat * dymat;
    return dx;
  }

  std::vector<ParamRef<S>> params() {
    return {{name_ + ".weight", &w_, &gw_, {out_, in_}},
            {name_ + ".bias", &b_, &gb_, {out_}}};
  }

 private:
  std::string name_;
  int in_, out_;
  std::vector<S> w_, b_, gw_, gb_;
  bool zero_init_ = false;
  Tensor<S> x_;
};

/// Elementwise smooth-L1 with delta = 1: 0.5 e^2 if |e|<1 else |e|-0.5.
/// Returns the sum over all entries divided by `normalizer`.
template <typename S>
S huber_loss(const Tensor<S>& pred, const Tensor<S>& target, double normalizer,
             Tensor<S>* grad = nullptr) {
  if (!pred.same_shape(target))
    throw std::invalid_argument("huber_loss: shape mismatch");
  if (grad) *grad = Tensor<S>(pred.n, pred.c, pred.h, pred.w);
  double total = 0.0;
  for (size_t i = 0; i < pred.numel(); ++i) {
    const double e = static_cast<double>(pred.data[i]) - target.data[i];
    const double a = std::abs(e);
    total += a < 1.0 ? 0.5 * e * e : a - 0.5;
    if (grad)
      grad->data[i] =
          static_cast<S>((a < 1.0 ? e : (e > 0 ? 1.0 : -1.0)) / normalizer);
  }
  return static_cast<S>(total / normalizer);
}

/// Softmax + cross-entropy over (batch x classes). Returns mean loss and the
/// logits gradient; fills probabilities when requested.
template <typename S>
S softmax_cross_entropy(const Tensor<S>& logits, const std::vector<int>& labels,
                        Tensor<S>* grad = nullptr,
                        std::vector<S>* probs_out = nullptr) {
  const int n = logits.n, k = logits.c;
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("softmax_cross_entropy: label count mismatch");
  if (grad) *grad = Tensor<S>(n, k, 1, 1);
  if (probs_out) probs_out->assign(static_cast<size_t>(n) * k, S(0));
  double total = 0.0;
  for (int ni = 0; ni < n; ++ni) {
    const S* z = logits.data.data() + static_cast<size_t>(ni) * k;
    double zmax = z[0];
    for (int i = 1; i < k; ++i) zmax = std::max<double>(zmax, z[i]);
    double denom = 0.0;
    for (int i = 0; i < k; ++i) denom += std::exp(z[i] - zmax);
    const double logdenom = std::log(denom) + zmax;
    total += logdenom - z[labels[ni]];
    for (int i = 0; i < k; ++i) {
      const double p = std::exp(z[i] - logdenom);
      if (probs_out) (*probs_out)[static_cast<size_t>(ni) * k + i] = static_cast<S>(p);
      if (grad)
        grad->data[static_cast<size_t>(ni) * k + i] =
            static_cast<S>((p - (i == labels[ni] ? 1.0 : 0.0)) / n);
    }
  }
  return static_cast<S>(total / n);
}

}  // namespace tgrasp::nnet
