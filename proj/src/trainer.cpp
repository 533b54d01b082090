#include "subspect/trainer.hpp"

#include <cmath>
#include <fstream>

#include "subspect/loss.hpp"

namespace subspect::train {

namespace {

struct Split {
  std::vector<int> train, val;
};

Split split_dataset(int count, double val_fraction) {
  Split s;
  const int val = static_cast<int>(std::llround(count * val_fraction));
  for (int i = 0; i < count - val; i++) s.train.push_back(i);
  for (int i = count - val; i < count; i++) s.val.push_back(i);
  if (s.train.empty()) throw DataError("train: empty training split");
  return s;
}

std::vector<float> snapshot_params(nn::Sequential<float>& model) {
  std::vector<float> out;
  for (auto* p : model.params())
    out.insert(out.end(), p->data.begin(), p->data.end());
  return out;
}

void restore_params(nn::Sequential<float>& model, const std::vector<float>& s) {
  size_t pos = 0;
  for (auto* p : model.params()) {
    std::copy(s.begin() + pos, s.begin() + pos + p->data.size(),
              p->data.begin());
    pos += p->data.size();
  }
}

// One forward (+optional backward) returning (loss, correct, scored).
template <typename LossFn>
std::tuple<double, int, int> run_example(nn::Sequential<float>& model,
                                         const data::LabeledExample& ex,
                                         LossFn&& loss_fn, bool learn) {
  const auto out = model.forward(ex.input, learn);
  auto [loss, correct, scored, grad] = loss_fn(out, ex);
  if (learn) model.backward(std::move(grad));
  return {loss, correct, scored};
}

template <typename LossFn>
TrainResult train_loop(nn::Sequential<float>& model, const data::Dataset& ds,
                       const nn::TrainCfg& cfg, LossFn&& loss_fn) {
  cfg.validate();
  if (ds.examples.empty()) throw DataError("train: empty dataset");
  auto split = split_dataset(ds.count(), cfg.val_fraction);

  nn::Optimizer<float> opt(model.params(), cfg);
  Rng shuffle_rng(cfg.seed);

  TrainResult result;
  std::vector<float> best;
  int stale = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; epoch++) {
    shuffle_rng.shuffle(split.train);
    double loss_sum = 0;
    int64_t correct = 0, scored = 0;
    for (size_t start = 0; start < split.train.size();
         start += static_cast<size_t>(cfg.batch)) {
      const size_t stop =
          std::min(split.train.size(), start + static_cast<size_t>(cfg.batch));
      model.zero_grads();
      for (size_t i = start; i < stop; i++) {
        auto [l, c, s] =
            run_example(model, ds.examples[split.train[i]], loss_fn, true);
        loss_sum += l;
        correct += c;
        scored += s;
      }
      opt.step(1.0 / static_cast<double>(stop - start));
    }

    EpochStats es;
    es.epoch = epoch;
    es.train_loss = loss_sum / static_cast<double>(split.train.size());
    es.train_acc = scored ? static_cast<double>(correct) / scored : 0.0;

    if (!split.val.empty()) {
      double vloss = 0;
      int64_t vc = 0, vs = 0;
      for (int idx : split.val) {
        auto [l, c, s] = run_example(model, ds.examples[idx], loss_fn, false);
        vloss += l;
        vc += c;
        vs += s;
      }
      es.val_loss = vloss / static_cast<double>(split.val.size());
      es.val_acc = vs ? static_cast<double>(vc) / vs : 0.0;
    }
    result.history.push_back(es);

    if (!split.val.empty()) {
      if (result.best_epoch < 0 || es.val_loss < result.best_val_loss) {
        result.best_epoch = epoch;
        result.best_val_loss = es.val_loss;
        best = snapshot_params(model);
        stale = 0;
      } else if (++stale > cfg.patience) {
        break;
      }
    }
  }
  if (!best.empty()) restore_params(model, best);
  return result;
}

}  // namespace

TrainResult train_dlwss(nn::Sequential<float>& model, const data::Dataset& ds,
                        const nn::TrainCfg& cfg) {
  auto loss_fn = [](const nn::Tensor<float>& out,
                    const data::LabeledExample& ex) {
    const int n = static_cast<int>(ex.s.size());
    auto lr = nn::bce_loss(out, ex.s);
    int correct = 0;
    for (int b = 0; b < n; b++) {
      const bool busy = out.data[b] >= 0.5f;
      if (busy == (ex.s[b] != 0)) correct++;
    }
    return std::make_tuple(lr.value, correct, n, std::move(lr.grad));
  };
  return train_loop(model, ds, cfg, loss_fn);
}

TrainResult train_dlmc(nn::Sequential<float>& model, const data::Dataset& ds,
                       const nn::TrainCfg& cfg, MaskSource mask_source,
                       const std::vector<std::vector<uint8_t>>* predicted_masks) {
  if (mask_source == MaskSource::predicted) {
    if (!predicted_masks ||
        predicted_masks->size() != ds.examples.size())
      throw ConfigError("train_dlmc: predicted mask per example required");
  }
  const auto* masks = predicted_masks;
  auto mask_for = [&](const data::LabeledExample& ex) -> const std::vector<uint8_t>& {
    if (mask_source == MaskSource::ground_truth) return ex.s;
    const size_t idx = &ex - ds.examples.data();
    return (*masks)[idx];
  };

  auto loss_fn = [&](const nn::Tensor<float>& out,
                     const data::LabeledExample& ex) {
    const int n = static_cast<int>(ex.k.size());
    const int classes = out.dim(1);
    std::vector<int> mods(ex.k.begin(), ex.k.end());
    const auto& mask = mask_for(ex);
    auto lr = nn::masked_ce_loss(out, mods, mask);
    int correct = 0, scored = 0;
    for (int b = 0; b < n; b++) {
      if (!mask[b]) continue;
      int arg = 0;
      for (int c = 1; c < classes; c++)
        if (out.at(b, c) > out.at(b, arg)) arg = c;
      scored++;
      if (arg == mods[b]) correct++;
    }
    return std::make_tuple(lr.value, correct, scored, std::move(lr.grad));
  };
  return train_loop(model, ds, cfg, loss_fn);
}

std::vector<uint8_t> infer_occupancy(nn::Sequential<float>& model,
                                     const nn::Tensor<float>& input) {
  const auto out = model.forward(input, false);
  std::vector<uint8_t> s(out.data.size());
  for (size_t i = 0; i < out.data.size(); i++) s[i] = out.data[i] >= 0.5f;
  return s;
}

std::vector<int> infer_modulation(nn::Sequential<float>& model,
                                  const nn::Tensor<float>& input,
                                  std::span<const uint8_t> occupancy) {
  const auto out = model.forward(input, false);
  if (out.rank() != 2 ||
      out.dim(0) != static_cast<int>(occupancy.size()))
    throw ShapeError("infer_modulation: logits shape mismatch");
  const int classes = out.dim(1);
  std::vector<int> k(occupancy.size(), 0);
  for (size_t b = 0; b < occupancy.size(); b++) {
    if (!occupancy[b]) continue;
    int arg = 0;
    for (int c = 1; c < classes; c++)
      if (out.at(static_cast<int>(b), c) > out.at(static_cast<int>(b), arg))
        arg = c;
    k[b] = arg;
  }
  return k;
}

void write_history_csv(const TrainResult& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for write: " + path);
  os << "epoch,train_loss,val_loss,train_acc,val_acc\n";
  for (const auto& e : r.history)
    os << e.epoch << "," << e.train_loss << "," << e.val_loss << ","
       << e.train_acc << "," << e.val_acc << "\n";
}

}  // namespace subspect::train
