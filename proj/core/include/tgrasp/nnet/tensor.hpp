#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tgrasp::nnet {

/// Dense NCHW tensor.
template <typename S>
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<S> data;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        data(static_cast<size_t>(n_) * c_ * h_ * w_, S(0)) {}

  size_t numel() const { return data.size(); }
  size_t plane() const { return static_cast<size_t>(h) * w; }

  S* channel(int ni, int ci) {
    return data.data() + (static_cast<size_t>(ni) * c + ci) * plane();
  }
  const S* channel(int ni, int ci) const {
    return data.data() + (static_cast<size_t>(ni) * c + ci) * plane();
  }

  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }

  void require_shape(int n_, int c_, int h_, int w_) const {
    if (n != n_ || c != c_ || h != h_ || w != w_)
      throw std::invalid_argument("tensor shape mismatch");
  }
};

/// Named view of a parameter buffer and its gradient.
template <typename S>
struct ParamRef {
  std::string name;
  std::vector<S>* value = nullptr;
  std::vector<S>* grad = nullptr;
  std::vector<int> shape;
};

}  // namespace tgrasp::nnet
