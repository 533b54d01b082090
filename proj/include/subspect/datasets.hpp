#pragma once

#include <map>
#include <string>

#include "subspect/recon.hpp"
#include "subspect/tensor.hpp"

namespace subspect::data {

enum class DatasetKind : uint8_t {
  dwss = 0,
  dnmc_iq = 1,
  dnmc_ap = 2,
  dwmc = 3,
};

const char* kind_name(DatasetKind k);
DatasetKind kind_from_name(const std::string& name);

struct LabeledExample {
  nn::Tensor<float> input;  // bands x len x 2
  std::vector<uint8_t> s;   // occupancy
  std::vector<uint8_t> k;   // modulation index, 0 = vacant
  float snr_db = 0;
  uint64_t seed = 0;
};

struct Dataset {
  DatasetKind kind = DatasetKind::dwss;
  int bands = 0;
  int len = 0;
  int channels = 2;
  sig::ChannelKind channel = sig::ChannelKind::awgn;
  std::vector<LabeledExample> examples;
  std::string config_text;  // config snapshot stored in the manifest

  int count() const { return static_cast<int>(examples.size()); }
  std::map<std::string, int> key_histogram() const;  // "<scheme>@<snr>" counts
};

struct GenCfg {
  sig::FrameCfg frame;
  std::vector<double> snr_grid;  // cycled over examples
  int l_symbols = 256;           // D_NMC symbol budget
  std::string config_text;

  static std::vector<double> default_snr_grid();  // -10..20 dB step 2
};

// Global per-frame min-max map to [0,1]; constant frames map to all-zeros.
// Throws DataError on NaN/Inf.
nn::Tensor<float> normalize_minmax(const nn::Tensor<float>& x);

// N x L complex symbols -> N x L x 2: channel 0 = |z| with each band row
// scaled to unit Euclidean norm (zero rows stay zero); channel 1 = arg(z)/pi.
nn::Tensor<float> normalize_ap(const Eigen::MatrixXcd& symbols);

// N x Q complex -> N x Q x 2 (real, imag).
nn::Tensor<float> split_complex(const Eigen::MatrixXcd& m);

// Pseudo-reconstructed occupancy dataset: (minmax(split(A† Z)), s).
Dataset gen_dwss(const GenCfg& cfg, const sns::SensingMatrix& a, int count,
                 uint64_t seed);

// Post-DDC classification dataset (IQ or AP form), ground-truth support.
Dataset gen_dnmc(const GenCfg& cfg, const sns::SensingMatrix& a, int count,
                 uint64_t seed, bool ap_form, sig::ChannelKind channel);

// Raw reconstructed-signal classification dataset.
Dataset gen_dwmc(const GenCfg& cfg, const sns::SensingMatrix& a, int count,
                 uint64_t seed, sig::ChannelKind channel);

// Binary layout: magic "SNSD", version u16, kind u8, count u32, bands u16,
// len u16, channels u16; per example f32 input + u8 s + u8 k + f32 snr +
// u64 seed; trailing CRC-64/XZ of all preceding bytes. A JSON manifest
// sidecar (<path>.manifest.json) carries the channel kind, per-key counts and
// the config snapshot, and is verified on load.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// CRC-64/XZ of the serialized payload (also stored in the manifest).
uint64_t dataset_checksum(const Dataset& ds);

}  // namespace subspect::data
