#pragma once

#include <span>

#include "subspect/datasets.hpp"
#include "subspect/model.hpp"
#include "subspect/optim.hpp"

namespace subspect::train {

struct EpochStats {
  int epoch = 0;
  double train_loss = 0, val_loss = 0;
  double train_acc = 0, val_acc = 0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = -1;   // epoch with the lowest validation loss
  double best_val_loss = 0;
};

// Whose occupancy masks the per-band classification loss: the ground-truth
// labels (training default) or externally supplied occupancy predictions
// (Algorithm-1 pipeline mode).
enum class MaskSource { ground_truth, predicted };

// Mini-batch training of the occupancy network with BCE loss. Dataset tail
// (cfg.val_fraction) is held out for validation/early stopping; weights of
// the best validation epoch are restored on return.
TrainResult train_dlwss(nn::Sequential<float>& model, const data::Dataset& ds,
                        const nn::TrainCfg& cfg);

// Mini-batch training of a modulation classifier with the masked per-band
// cross entropy. predicted_masks (one vector per example) is required for
// MaskSource::predicted.
TrainResult train_dlmc(
    nn::Sequential<float>& model, const data::Dataset& ds,
    const nn::TrainCfg& cfg, MaskSource mask_source = MaskSource::ground_truth,
    const std::vector<std::vector<uint8_t>>* predicted_masks = nullptr);

// Sigmoid outputs thresholded at 0.5 (ties -> busy).
std::vector<uint8_t> infer_occupancy(nn::Sequential<float>& model,
                                     const nn::Tensor<float>& input);

// Per busy band argmax over the class logits (ties -> lowest class index);
// vacant bands forced to 0.
std::vector<int> infer_modulation(nn::Sequential<float>& model,
                                  const nn::Tensor<float>& input,
                                  std::span<const uint8_t> occupancy);

// CSV: epoch,train_loss,val_loss,train_acc,val_acc
void write_history_csv(const TrainResult& r, const std::string& path);

}  // namespace subspect::train
