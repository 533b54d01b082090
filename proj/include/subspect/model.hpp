#pragma once

#include <array>
#include <memory>
#include <string>
#include <utility>

#include "subspect/layers.hpp"

namespace subspect::nn {

enum class ArchId : uint8_t {
  dlwss = 0,
  ndlmc_baseline = 1,
  ndlmc_inception = 2,
  wdlmc = 3,
};

const char* arch_name(ArchId id);
ArchId arch_from_name(const std::string& name);

// Architecture hyper-parameters. The factory methods carry the published
// layer settings; bands/in_len may be overridden (weights are band-shared, so
// models are band-count agnostic).
struct ModelSpec {
  ArchId id = ArchId::dlwss;
  int bands = 14;
  int in_len = 299;
  int in_ch = 2;
  int classes = 8;  // M+1 (classifiers)

  std::array<int, 3> conv_widths{150, 100, 51};   // dlwss / wdlmc stack
  std::array<int, 3> conv_filters{256, 128, 64};
  int base_width = 3;      // ndlmc baseline
  int base_filters = 64;
  InceptionBlock<float>::Split inception_split{};

  static ModelSpec dlwss(int bands = 14, int q = 299);
  static ModelSpec ndlmc_baseline(int bands = 14, int l = 256);
  static ModelSpec ndlmc_inception(int bands = 14, int l = 256);
  static ModelSpec wdlmc(int bands = 14, int q = 299);
  static ModelSpec for_arch(ArchId id);
};

template <typename T>
class Sequential {
 public:
  ModelSpec spec;
  std::vector<std::unique_ptr<Layer<T>>> layers;

  Tensor<T> forward(const Tensor<T>& x, bool cache = false) {
    Tensor<T> t = x;
    for (auto& l : layers) t = l->forward(t, cache);
    return t;
  }

  Tensor<T> backward(Tensor<T> gy) {
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
      gy = (*it)->backward(gy);
    return gy;
  }

  std::vector<Tensor<T>*> params() {
    std::vector<Tensor<T>*> out;
    for (auto& l : layers) l->collect_params(out);
    return out;
  }

  void zero_grads() {
    for (auto* p : params()) p->zero_grad();
  }

  double min_kink_distance() const {
    double k = std::numeric_limits<double>::infinity();
    for (const auto& l : layers) k = std::min(k, l->kink_distance());
    return k;
  }

  int64_t param_count() {
    int64_t c = 0;
    for (auto* p : params()) c += p->size();
    return c;
  }

  // Layer-by-layer (name, output shape) for shape-conformance checks.
  std::vector<std::pair<std::string, std::vector<int>>> forward_trace(
      const Tensor<T>& x) {
    std::vector<std::pair<std::string, std::vector<int>>> trace;
    Tensor<T> t = x;
    for (auto& l : layers) {
      t = l->forward(t, false);
      trace.emplace_back(l->name(), t.shape);
    }
    return trace;
  }
};

template <typename T>
Sequential<T> build_model(const ModelSpec& spec, uint64_t init_seed);

// Checkpoint: magic "SNSM", version u16, arch id u8, input dims (bands,
// in_len, in_ch, classes as u16), layer count u16; per layer kind u8 +
// hyper-parameter count u8 + i32 values; then raw little-endian f32 parameter
// arrays in declaration order; trailing CRC-64 of all preceding bytes.
void save_checkpoint(Sequential<float>& model, const std::string& path);
Sequential<float> load_checkpoint(const std::string& path);

}  // namespace subspect::nn
