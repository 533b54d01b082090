#include "subspect/loss.hpp"

#include <cmath>

namespace subspect::nn {

template <typename T>
LossResult<T> bce_loss(const Tensor<T>& pred, std::span<const uint8_t> labels) {
  const int n = static_cast<int>(labels.size());
  const bool flat = pred.shape == std::vector<int>{n};
  if (!flat && pred.shape != std::vector<int>{n, 1})
    throw ShapeError("bce_loss: pred must be (N) or (N,1) with N = labels");

  LossResult<T> r;
  r.grad = Tensor<T>(pred.shape);
  constexpr double eps = 1e-7;
  for (int i = 0; i < n; i++) {
    const double p =
        std::min(1.0 - eps, std::max(eps, static_cast<double>(pred.data[i])));
    const double s = labels[i] ? 1.0 : 0.0;
    r.value -= s * std::log(p) + (1.0 - s) * std::log(1.0 - p);
    r.grad.data[i] = static_cast<T>(-(s / p) + (1.0 - s) / (1.0 - p));
  }
  return r;
}

template <typename T>
LossResult<T> masked_ce_loss(const Tensor<T>& logits, std::span<const int> mods,
                             std::span<const uint8_t> mask) {
  if (logits.rank() != 2)
    throw ShapeError("masked_ce_loss: logits must be (N, classes)");
  const int n = logits.dim(0), classes = logits.dim(1);
  if (static_cast<int>(mods.size()) != n || static_cast<int>(mask.size()) != n)
    throw ShapeError("masked_ce_loss: label/mask length mismatch");

  LossResult<T> r;
  r.grad = Tensor<T>(logits.shape);
  std::vector<double> prob(classes);
  for (int b = 0; b < n; b++) {
    if (!mask[b]) continue;  // zero loss, zero gradient
    const int target = mods[b];
    if (target < 0 || target >= classes)
      throw DataError("masked_ce_loss: label " + std::to_string(target) +
                      " outside [0," + std::to_string(classes - 1) + "]");
    const T* row = logits.data.data() + static_cast<int64_t>(b) * classes;
    double mx = row[0];
    for (int c = 1; c < classes; c++) mx = std::max(mx, static_cast<double>(row[c]));
    double sum = 0;
    for (int c = 0; c < classes; c++) {
      prob[c] = std::exp(static_cast<double>(row[c]) - mx);
      sum += prob[c];
    }
    for (int c = 0; c < classes; c++) prob[c] /= sum;
    r.value -= std::log(std::max(prob[target], 1e-300));
    T* g = r.grad.data.data() + static_cast<int64_t>(b) * classes;
    for (int c = 0; c < classes; c++)
      g[c] = static_cast<T>(prob[c] - (c == target ? 1.0 : 0.0));
  }
  return r;
}

template LossResult<float> bce_loss<float>(const Tensor<float>&,
                                           std::span<const uint8_t>);
template LossResult<double> bce_loss<double>(const Tensor<double>&,
                                             std::span<const uint8_t>);
template LossResult<float> masked_ce_loss<float>(const Tensor<float>&,
                                                 std::span<const int>,
                                                 std::span<const uint8_t>);
template LossResult<double> masked_ce_loss<double>(const Tensor<double>&,
                                                   std::span<const int>,
                                                   std::span<const uint8_t>);

}  // namespace subspect::nn
