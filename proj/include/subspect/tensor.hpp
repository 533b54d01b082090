#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "subspect/common.hpp"

namespace subspect::nn {

// Dense row-major real tensor (rank <= 3 in practice: bands x length x
// channels) with an optional gradient buffer of the same shape.
template <typename T>
struct Tensor {
  std::vector<int> shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until alloc_grad()

  Tensor() = default;
  explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
    data.assign(count(shape), T(0));
  }

  static int64_t count(const std::vector<int>& s) {
    int64_t c = 1;
    for (int d : s) {
      if (d < 0) throw ShapeError("negative tensor dimension");
      c *= d;
    }
    return c;
  }

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[i]; }

  T& at(int i) { return data[i]; }
  T& at(int i, int j) { return data[static_cast<int64_t>(i) * shape[1] + j]; }
  T& at(int i, int j, int k) {
    return data[(static_cast<int64_t>(i) * shape[1] + j) * shape[2] + k];
  }
  const T& at(int i) const { return data[i]; }
  const T& at(int i, int j) const {
    return data[static_cast<int64_t>(i) * shape[1] + j];
  }
  const T& at(int i, int j, int k) const {
    return data[(static_cast<int64_t>(i) * shape[1] + j) * shape[2] + k];
  }

  void alloc_grad() { grad.assign(data.size(), T(0)); }
  void zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), T(0));
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::string s = "(";
    for (size_t i = 0; i < shape.size(); i++)
      s += (i ? "," : "") + std::to_string(shape[i]);
    return s + ")";
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape);
    for (size_t i = 0; i < data.size(); i++) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

}  // namespace subspect::nn
