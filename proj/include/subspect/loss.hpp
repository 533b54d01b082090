#pragma once

#include <span>

#include "subspect/tensor.hpp"

namespace subspect::nn {

template <typename T>
struct LossResult {
  double value = 0;
  Tensor<T> grad;  // d loss / d input, same shape as the input
};

// Multi-label binary cross entropy over per-band occupancy probabilities.
// pred holds values in (0,1) shaped (N) or (N,1); predictions are clamped to
// [1e-7, 1-1e-7] before the log.
template <typename T>
LossResult<T> bce_loss(const Tensor<T>& pred, std::span<const uint8_t> labels);

// Per-band categorical cross entropy over raw logits (N x classes), masked by
// the band status: masked-out bands contribute exactly zero loss and zero
// gradient. Softmax is applied internally with max-subtraction. mods[n] is the
// target class of band n (0 = vacant).
template <typename T>
LossResult<T> masked_ce_loss(const Tensor<T>& logits, std::span<const int> mods,
                             std::span<const uint8_t> mask);

}  // namespace subspect::nn
