#pragma once

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <vector>

#include "subspect/gemm.hpp"
#include "subspect/rng.hpp"
#include "subspect/tensor.hpp"

namespace subspect::nn {

enum class LayerKind : uint8_t {
  conv = 1,
  relu = 2,
  sigmoid = 3,
  softmax = 4,
  custom_pool = 5,
  dense = 6,
  inception = 7,
};

// Forward/backward layer over per-frame tensors (bands x length x channels).
// backward() must be called right after a forward(x, /*cache=*/true) on the
// same input; layers keep their scratch between the two calls.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual LayerKind kind() const = 0;
  virtual const char* name() const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, bool cache) = 0;
  virtual Tensor<T> backward(const Tensor<T>& gy) = 0;
  virtual void collect_params(std::vector<Tensor<T>*>&) {}
  virtual void hparams(std::vector<int32_t>&) const {}
  virtual void init_params(Rng&) {}
  // Distance of the last cached forward pass to the nearest non-smooth point
  // (relu kink); +inf for smooth layers. Finite-difference tests reject
  // instances too close to a kink.
  virtual double kink_distance() const {
    return std::numeric_limits<double>::infinity();
  }
};

template <typename T>
void glorot_uniform(Tensor<T>& w, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : w.data) v = static_cast<T>(rng.uniform(-limit, limit));
}

// 1 x width convolution along the length axis, identical weights for every
// band row. `valid` shrinks the length to L - width + 1; `same` keeps it
// (odd widths only).
template <typename T>
class Conv1xW : public Layer<T> {
 public:
  Conv1xW(int width, int cin, int cout, bool same_pad = false)
      : width_(width),
        cin_(cin),
        cout_(cout),
        same_(same_pad),
        weight_({width, cin, cout}),
        bias_({cout}) {
    if (width < 1 || cin < 1 || cout < 1)
      throw ConfigError("conv: width/cin/cout must be >= 1");
    if (same_ && width % 2 == 0)
      throw ConfigError("conv: same padding requires odd width");
    weight_.alloc_grad();
    bias_.alloc_grad();
  }

  LayerKind kind() const override { return LayerKind::conv; }
  const char* name() const override { return same_ ? "conv-same" : "conv"; }
  int width() const { return width_; }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

  void collect_params(std::vector<Tensor<T>*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }
  void hparams(std::vector<int32_t>& out) const override {
    out.insert(out.end(), {width_, cin_, cout_, same_ ? 1 : 0});
  }
  void init_params(Rng& rng) override {
    glorot_uniform(weight_, width_ * cin_, width_ * cout_, rng);
    std::fill(bias_.data.begin(), bias_.data.end(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    check_input(x);
    const int bands = x.dim(0), len = x.dim(1);
    const int lout = out_len(len);
    build_im2col(x, lout);
    Tensor<T> y({bands, lout, cout_});
    const int rows = bands * lout, cols = width_ * cin_;
    gemm<T>(false, false, rows, cout_, cols, T(1), im2col_.data(),
            weight_.data.data(), T(0), y.data.data());
    for (int r = 0; r < rows; r++) {
      T* yp = y.data.data() + static_cast<int64_t>(r) * cout_;
      for (int c = 0; c < cout_; c++) yp[c] += bias_.data[c];
    }
    if (cache) {
      in_bands_ = bands;
      in_len_ = len;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    const int bands = in_bands_, len = in_len_;
    const int lout = out_len(len);
    if (gy.shape != std::vector<int>{bands, lout, cout_})
      throw ShapeError("conv backward: bad upstream shape " + gy.shape_str());
    const int rows = bands * lout, cols = width_ * cin_;

    for (int r = 0; r < rows; r++) {
      const T* gp = gy.data.data() + static_cast<int64_t>(r) * cout_;
      for (int c = 0; c < cout_; c++) bias_.grad[c] += gp[c];
    }
    gemm<T>(true, false, cols, cout_, rows, T(1), im2col_.data(),
            gy.data.data(), T(1), weight_.grad.data());

    Tensor<T> dx({bands, len, cin_});
    if (width_ == 1 && !same_) {
      gemm<T>(false, true, rows, cols, cout_, T(1), gy.data.data(),
              weight_.data.data(), T(0), dx.data.data());
      return dx;
    }
    gcol_.assign(static_cast<size_t>(rows) * cols, T(0));
    gemm<T>(false, true, rows, cols, cout_, T(1), gy.data.data(),
            weight_.data.data(), T(0), gcol_.data());
    const int pad = same_ ? (width_ - 1) / 2 : 0;
    for (int b = 0; b < bands; b++) {
      for (int o = 0; o < lout; o++) {
        const T* src = gcol_.data() + (static_cast<int64_t>(b) * lout + o) * cols;
        const int start = o - pad;
        for (int d = 0; d < width_; d++) {
          const int l = start + d;
          if (l < 0 || l >= len) continue;
          T* dst = dx.data.data() + (static_cast<int64_t>(b) * len + l) * cin_;
          const T* s = src + static_cast<int64_t>(d) * cin_;
          for (int c = 0; c < cin_; c++) dst[c] += s[c];
        }
      }
    }
    return dx;
  }

 private:
  void check_input(const Tensor<T>& x) const {
    if (x.rank() != 3 || x.dim(2) != cin_)
      throw ShapeError("conv: expected (bands, length, " +
                       std::to_string(cin_) + "), got " + x.shape_str());
    if (out_len(x.dim(1)) < 1)
      throw ShapeError("conv: length " + std::to_string(x.dim(1)) +
                       " shorter than filter width " + std::to_string(width_));
  }
  int out_len(int len) const { return same_ ? len : len - width_ + 1; }

  void build_im2col(const Tensor<T>& x, int lout) {
    const int bands = x.dim(0), len = x.dim(1);
    const int rows = bands * lout, cols = width_ * cin_;
    im2col_.resize(static_cast<size_t>(rows) * cols);
    const int pad = same_ ? (width_ - 1) / 2 : 0;
    for (int b = 0; b < bands; b++) {
      const T* xrow = x.data.data() + static_cast<int64_t>(b) * len * cin_;
      for (int o = 0; o < lout; o++) {
        T* dst = im2col_.data() + (static_cast<int64_t>(b) * lout + o) * cols;
        const int start = o - pad;
        if (start >= 0 && start + width_ <= len) {
          std::memcpy(dst, xrow + static_cast<int64_t>(start) * cin_,
                      sizeof(T) * cols);
        } else {
          std::memset(dst, 0, sizeof(T) * cols);
          const int dlo = std::max(0, -start);
          const int dhi = std::min(width_, len - start);
          if (dhi > dlo)
            std::memcpy(dst + static_cast<int64_t>(dlo) * cin_,
                        xrow + static_cast<int64_t>(start + dlo) * cin_,
                        sizeof(T) * (dhi - dlo) * cin_);
        }
      }
    }
  }

  int width_, cin_, cout_;
  bool same_;
  Tensor<T> weight_;  // (width, cin, cout) == row-major (width*cin) x cout
  Tensor<T> bias_;
  std::vector<T> im2col_, gcol_;
  int in_bands_ = 0, in_len_ = 0;
};

template <typename T>
class Relu : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::relu; }
  const char* name() const override { return "relu"; }
  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    Tensor<T> y = x;
    for (auto& v : y.data) v = v > T(0) ? v : T(0);
    if (cache) {
      mask_.resize(x.data.size());
      kink_ = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < x.data.size(); i++) {
        mask_[i] = x.data[i] > T(0);
        kink_ = std::min(kink_, std::abs(static_cast<double>(x.data[i])));
      }
      shape_ = x.shape;
    }
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    Tensor<T> dx = gy;
    dx.shape = shape_;
    for (size_t i = 0; i < dx.data.size(); i++)
      if (!mask_[i]) dx.data[i] = T(0);
    return dx;
  }
  double kink_distance() const override { return kink_; }

 private:
  std::vector<uint8_t> mask_;
  std::vector<int> shape_;
  double kink_ = std::numeric_limits<double>::infinity();
};

template <typename T>
class Sigmoid : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::sigmoid; }
  const char* name() const override { return "sigmoid"; }
  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    Tensor<T> y = x;
    for (auto& v : y.data) v = T(1) / (T(1) + std::exp(-v));
    if (cache) out_ = y;
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    Tensor<T> dx = gy;
    for (size_t i = 0; i < dx.data.size(); i++) {
      const T s = out_.data[i];
      dx.data[i] *= s * (T(1) - s);
    }
    return dx;
  }

 private:
  Tensor<T> out_;
};

// Row-wise softmax over the last axis, computed with max-subtraction.
template <typename T>
class Softmax : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::softmax; }
  const char* name() const override { return "softmax"; }
  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    if (x.rank() < 1) throw ShapeError("softmax: rank >= 1 required");
    const int classes = x.shape.back();
    const int64_t rows = x.size() / classes;
    Tensor<T> y = x;
    for (int64_t r = 0; r < rows; r++) {
      T* v = y.data.data() + r * classes;
      T mx = v[0];
      for (int c = 1; c < classes; c++) mx = std::max(mx, v[c]);
      T sum = T(0);
      for (int c = 0; c < classes; c++) {
        v[c] = std::exp(v[c] - mx);
        sum += v[c];
      }
      for (int c = 0; c < classes; c++) v[c] /= sum;
    }
    if (cache) out_ = y;
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    const int classes = out_.shape.back();
    const int64_t rows = out_.size() / classes;
    Tensor<T> dx = gy;
    for (int64_t r = 0; r < rows; r++) {
      const T* p = out_.data.data() + r * classes;
      T* g = dx.data.data() + r * classes;
      T dot = T(0);
      for (int c = 0; c < classes; c++) dot += g[c] * p[c];
      for (int c = 0; c < classes; c++) g[c] = p[c] * (g[c] - dot);
    }
    return dx;
  }

 private:
  Tensor<T> out_;
};

// Mean over the length axis: (bands, L, C) -> (bands, C).
template <typename T>
class CustomPool : public Layer<T> {
 public:
  LayerKind kind() const override { return LayerKind::custom_pool; }
  const char* name() const override { return "custom-pool"; }
  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    if (x.rank() != 3) throw ShapeError("custom_pool: rank-3 input required");
    const int bands = x.dim(0), len = x.dim(1), ch = x.dim(2);
    Tensor<T> y({bands, ch});
    for (int b = 0; b < bands; b++)
      for (int l = 0; l < len; l++)
        for (int c = 0; c < ch; c++) y.at(b, c) += x.at(b, l, c);
    const T inv = T(1) / static_cast<T>(len);
    for (auto& v : y.data) v *= inv;
    if (cache) {
      len_ = len;
    }
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    const int bands = gy.dim(0), ch = gy.dim(1);
    Tensor<T> dx({bands, len_, ch});
    const T inv = T(1) / static_cast<T>(len_);
    for (int b = 0; b < bands; b++)
      for (int l = 0; l < len_; l++)
        for (int c = 0; c < ch; c++) dx.at(b, l, c) = gy.at(b, c) * inv;
    return dx;
  }

 private:
  int len_ = 0;
};

// Per-band affine map with weights shared across bands: (bands, Cin) ->
// (bands, Cout).
template <typename T>
class DenseLayer : public Layer<T> {
 public:
  DenseLayer(int cin, int cout)
      : cin_(cin), cout_(cout), weight_({cin, cout}), bias_({cout}) {
    weight_.alloc_grad();
    bias_.alloc_grad();
  }
  LayerKind kind() const override { return LayerKind::dense; }
  const char* name() const override { return "dense"; }
  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

  void collect_params(std::vector<Tensor<T>*>& out) override {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }
  void hparams(std::vector<int32_t>& out) const override {
    out.insert(out.end(), {cin_, cout_});
  }
  void init_params(Rng& rng) override {
    glorot_uniform(weight_, cin_, cout_, rng);
    std::fill(bias_.data.begin(), bias_.data.end(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    if (x.rank() != 2 || x.dim(1) != cin_)
      throw ShapeError("dense: expected (bands, " + std::to_string(cin_) +
                       "), got " + x.shape_str());
    const int bands = x.dim(0);
    Tensor<T> y({bands, cout_});
    gemm<T>(false, false, bands, cout_, cin_, T(1), x.data.data(),
            weight_.data.data(), T(0), y.data.data());
    for (int b = 0; b < bands; b++)
      for (int c = 0; c < cout_; c++) y.at(b, c) += bias_.data[c];
    if (cache) xin_ = x;
    return y;
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    const int bands = xin_.dim(0);
    if (gy.shape != std::vector<int>{bands, cout_})
      throw ShapeError("dense backward: bad upstream shape");
    gemm<T>(true, false, cin_, cout_, bands, T(1), xin_.data.data(),
            gy.data.data(), T(1), weight_.grad.data());
    for (int b = 0; b < bands; b++)
      for (int c = 0; c < cout_; c++) bias_.grad[c] += gy.at(b, c);
    Tensor<T> dx({bands, cin_});
    gemm<T>(false, true, bands, cin_, cout_, T(1), gy.data.data(),
            weight_.data.data(), T(0), dx.data.data());
    return dx;
  }

 private:
  int cin_, cout_;
  Tensor<T> weight_, bias_, xin_;
};

// Length-axis average pool, same padding, zero-counted edges. Used inside the
// inception block only.
template <typename T>
class AvgPoolSame : public Layer<T> {
 public:
  explicit AvgPoolSame(int width) : width_(width) {
    if (width < 1 || width % 2 == 0)
      throw ConfigError("avg pool: odd width required");
  }
  LayerKind kind() const override { return LayerKind::custom_pool; }
  const char* name() const override { return "avgpool-same"; }
  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    if (cache) shape_ = x.shape;
    return apply(x);
  }
  Tensor<T> backward(const Tensor<T>& gy) override {
    // Symmetric window: the adjoint is the same windowed average.
    return apply(gy);
  }

 private:
  Tensor<T> apply(const Tensor<T>& x) const {
    const int bands = x.dim(0), len = x.dim(1), ch = x.dim(2);
    const int pad = (width_ - 1) / 2;
    Tensor<T> y({bands, len, ch});
    const T inv = T(1) / static_cast<T>(width_);
    for (int b = 0; b < bands; b++)
      for (int o = 0; o < len; o++)
        for (int c = 0; c < ch; c++) {
          T acc = T(0);
          for (int d = -pad; d <= pad; d++) {
            const int l = o + d;
            if (l >= 0 && l < len) acc += x.at(b, l, c);
          }
          y.at(b, o, c) = acc * inv;
        }
    return y;
  }
  int width_;
  std::vector<int> shape_;
};

// Inception block (same-length branches concatenated along channels):
//   1x1 conv | 1x1 -> 1x3 conv | 1x1 -> 1x5 conv | avgpool(3) -> 1x1 conv,
// each conv followed by relu.
template <typename T>
class InceptionBlock : public Layer<T> {
 public:
  struct Split {
    int c1 = 64, r3 = 32, c3 = 64, r5 = 16, c5 = 32, cp = 32;
    int total() const { return c1 + c3 + c5 + cp; }
  };

  InceptionBlock(int cin, int cout, Split split = {})
      : cin_(cin), cout_(cout), split_(split) {
    if (split.total() != cout)
      throw ConfigError("inception: branch channels sum to " +
                        std::to_string(split.total()) + ", expected " +
                        std::to_string(cout));
    auto conv = [](int w, int ci, int co, bool same) {
      return std::make_unique<Conv1xW<T>>(w, ci, co, same);
    };
    branches_.resize(4);
    branches_[0].push_back(conv(1, cin, split.c1, false));
    branches_[0].push_back(std::make_unique<Relu<T>>());
    branches_[1].push_back(conv(1, cin, split.r3, false));
    branches_[1].push_back(std::make_unique<Relu<T>>());
    branches_[1].push_back(conv(3, split.r3, split.c3, true));
    branches_[1].push_back(std::make_unique<Relu<T>>());
    branches_[2].push_back(conv(1, cin, split.r5, false));
    branches_[2].push_back(std::make_unique<Relu<T>>());
    branches_[2].push_back(conv(5, split.r5, split.c5, true));
    branches_[2].push_back(std::make_unique<Relu<T>>());
    branches_[3].push_back(std::make_unique<AvgPoolSame<T>>(3));
    branches_[3].push_back(conv(1, cin, split.cp, false));
    branches_[3].push_back(std::make_unique<Relu<T>>());
    widths_ = {split.c1, split.c3, split.c5, split.cp};
  }

  LayerKind kind() const override { return LayerKind::inception; }
  const char* name() const override { return "inception"; }
  void collect_params(std::vector<Tensor<T>*>& out) override {
    for (auto& br : branches_)
      for (auto& l : br) l->collect_params(out);
  }
  void hparams(std::vector<int32_t>& out) const override {
    out.insert(out.end(), {cin_, cout_, split_.c1, split_.r3, split_.c3,
                           split_.r5, split_.c5, split_.cp});
  }
  void init_params(Rng& rng) override {
    for (auto& br : branches_)
      for (auto& l : br) l->init_params(rng);
  }
  double kink_distance() const override {
    double k = std::numeric_limits<double>::infinity();
    for (const auto& br : branches_)
      for (const auto& l : br) k = std::min(k, l->kink_distance());
    return k;
  }

  Tensor<T> forward(const Tensor<T>& x, bool cache) override {
    if (x.rank() != 3 || x.dim(2) != cin_)
      throw ShapeError("inception: expected (bands, L, " +
                       std::to_string(cin_) + "), got " + x.shape_str());
    const int bands = x.dim(0), len = x.dim(1);
    Tensor<T> y({bands, len, cout_});
    int base = 0;
    for (size_t i = 0; i < branches_.size(); i++) {
      Tensor<T> t = x;
      for (auto& l : branches_[i]) t = l->forward(t, cache);
      const int w = widths_[i];
      for (int b = 0; b < bands; b++)
        for (int o = 0; o < len; o++)
          for (int c = 0; c < w; c++) y.at(b, o, base + c) = t.at(b, o, c);
      base += w;
    }
    if (cache) {
      bands_ = bands;
      len_ = len;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) override {
    Tensor<T> dx({bands_, len_, cin_});
    int base = 0;
    for (size_t i = 0; i < branches_.size(); i++) {
      const int w = widths_[i];
      Tensor<T> g({bands_, len_, w});
      for (int b = 0; b < bands_; b++)
        for (int o = 0; o < len_; o++)
          for (int c = 0; c < w; c++) g.at(b, o, c) = gy.at(b, o, base + c);
      for (auto it = branches_[i].rbegin(); it != branches_[i].rend(); ++it)
        g = (*it)->backward(g);
      for (size_t j = 0; j < dx.data.size(); j++) dx.data[j] += g.data[j];
      base += w;
    }
    return dx;
  }

 private:
  int cin_, cout_;
  Split split_;
  std::vector<std::vector<std::unique_ptr<Layer<T>>>> branches_;
  std::vector<int> widths_;
  int bands_ = 0, len_ = 0;
};

}  // namespace subspect::nn
