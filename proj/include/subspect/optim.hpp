#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "subspect/tensor.hpp"

namespace subspect::nn {

struct TrainCfg {
  double lr = 1e-3;
  int batch = 64;
  int max_epochs = 30;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int patience = 5;  // early stop on validation loss
  double val_fraction = 0.1;
  uint64_t seed = 1;
  bool plain_sgd = false;  // theta -= lr * grad, no moments

  void validate() const {
    if (lr <= 0) throw ConfigError("train: lr must be > 0");
    if (batch < 1) throw ConfigError("train: batch must be >= 1");
    if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
      throw ConfigError("train: beta1/beta2 must be in [0,1)");
    if (val_fraction < 0 || val_fraction >= 1)
      throw ConfigError("train: val_fraction in [0,1)");
  }
};

// Adam over the parameter tensors' .grad buffers (or plain SGD when
// cfg.plain_sgd). grad_scale is applied to every gradient before the update,
// used for batch averaging.
template <typename T>
class Optimizer {
 public:
  Optimizer(std::vector<Tensor<T>*> params, const TrainCfg& cfg)
      : params_(std::move(params)), cfg_(cfg) {
    cfg_.validate();
    for (auto* p : params_) {
      m_.emplace_back(p->size(), T(0));
      v_.emplace_back(p->size(), T(0));
    }
  }

  void step(double grad_scale = 1.0) {
    t_++;
    if (cfg_.plain_sgd) {
      for (auto* p : params_)
        for (int64_t i = 0; i < p->size(); i++)
          p->data[i] -= static_cast<T>(cfg_.lr * grad_scale * p->grad[i]);
      return;
    }
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (size_t k = 0; k < params_.size(); k++) {
      Tensor<T>* p = params_[k];
      for (int64_t i = 0; i < p->size(); i++) {
        const double g = grad_scale * p->grad[i];
        const double m = cfg_.beta1 * m_[k][i] + (1 - cfg_.beta1) * g;
        const double v = cfg_.beta2 * v_[k][i] + (1 - cfg_.beta2) * g * g;
        m_[k][i] = static_cast<T>(m);
        v_[k][i] = static_cast<T>(v);
        p->data[i] -= static_cast<T>(cfg_.lr * (m / bc1) /
                                     (std::sqrt(v / bc2) + cfg_.eps));
      }
    }
  }

  int64_t steps() const { return t_; }

 private:
  std::vector<Tensor<T>*> params_;
  TrainCfg cfg_;
  std::vector<std::vector<T>> m_, v_;
  int64_t t_ = 0;
};

}  // namespace subspect::nn
