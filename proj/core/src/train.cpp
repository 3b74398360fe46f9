#include "tgrasp/nnet/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tgrasp/nnet/optim.hpp"

namespace tgrasp::nnet {

std::vector<float> image_to_chw(const ImageRGB& img) {
  std::vector<float> out(static_cast<size_t>(3) * img.rows * img.cols);
  const size_t plane = static_cast<size_t>(img.rows) * img.cols;
  for (int r = 0; r < img.rows; ++r)
    for (int c = 0; c < img.cols; ++c)
      for (int ch = 0; ch < 3; ++ch)
        out[ch * plane + r * img.cols + c] = img.at(r, c, ch);
  return out;
}

namespace {

void fill_batch(const std::vector<DetectionSample>& data,
                const std::vector<size_t>& idx, size_t begin, size_t count,
                Tensor<float>& x, Tensor<float>& tq, Tensor<float>& tr) {
  const int h = data[0].q_target.rows, w = data[0].q_target.cols;
  x = Tensor<float>(static_cast<int>(count), 3, h, w);
  tq = Tensor<float>(static_cast<int>(count), 1, h, w);
  tr = Tensor<float>(static_cast<int>(count), 1, h, w);
  const size_t plane = static_cast<size_t>(h) * w;
  for (size_t b = 0; b < count; ++b) {
    const auto& s = data[idx[begin + b]];
    std::copy(s.chw.begin(), s.chw.end(), x.data.begin() + b * 3 * plane);
    std::copy(s.q_target.v.begin(), s.q_target.v.end(),
              tq.data.begin() + b * plane);
    std::copy(s.r_target.v.begin(), s.r_target.v.end(),
              tr.data.begin() + b * plane);
  }
}

}  // namespace

double batch_loss(Tgcnn<float>& model, const std::vector<DetectionSample>& data,
                  const std::vector<size_t>& indices) {
  Tensor<float> x, tq, tr;
  fill_batch(data, indices, 0, indices.size(), x, tq, tr);
  auto [q, r] = model.forward(x);
  const double norm = static_cast<double>(x.n) * x.h * x.w;
  return huber_loss<float>(q, tq, norm) + huber_loss<float>(r, tr, norm);
}

std::vector<double> train(Tgcnn<float>& model,
                          const std::vector<DetectionSample>& data,
                          const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  model.set_training(true);
  Adam<float> opt(model.params(), cfg.lr, cfg.momentum);
  std::mt19937_64 rng(cfg.seed + 0x7261696eULL);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> curve;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    size_t batches = 0;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(cfg.batch)) {
      const size_t count =
          std::min<size_t>(cfg.batch, order.size() - begin);
      Tensor<float> x, tq, tr;
      fill_batch(data, order, begin, count, x, tq, tr);
      auto [q, r] = model.forward(x);
      const double norm = static_cast<double>(x.n) * x.h * x.w;
      Tensor<float> dq, dr;
      const double loss = huber_loss<float>(q, tq, norm, &dq) +
                          huber_loss<float>(r, tr, norm, &dr);
      opt.zero_grad();
      model.backward(dq, dr);
      opt.step();
      epoch_loss += loss;
      ++batches;
    }
    curve.push_back(epoch_loss / static_cast<double>(batches));
  }
  return curve;
}

GraspMap predict(Tgcnn<float>& model, const std::vector<float>& chw, int h,
                 int w) {
  const bool was_training = model.training();
  model.set_training(false);
  Tensor<float> x(1, 3, h, w);
  std::copy(chw.begin(), chw.end(), x.data.begin());
  auto [q, r] = model.forward(x);
  model.set_training(was_training);
  GraspMap gm;
  gm.Q = Raster(h, w);
  gm.R = Raster(h, w);
  std::copy(q.data.begin(), q.data.end(), gm.Q.v.begin());
  std::copy(r.data.begin(), r.data.end(), gm.R.v.begin());
  return gm;
}

}  // namespace tgrasp::nnet
