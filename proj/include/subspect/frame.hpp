#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "subspect/channel.hpp"
#include "subspect/modem.hpp"

namespace subspect::sig {

struct FrameCfg {
  int n_bands = 14;
  int q = 299;    // samples per band
  int p_max = 4;  // max simultaneously occupied bands
  double snr_db = 10.0;  // +inf disables noise
  ChannelCfg channel;
  double rolloff = 0.35;
  int sps = 2;
  int span_symbols = 40;

  // Test/dataset hooks: pin the occupancy pattern and/or the scheme of each
  // occupied band (in increasing band order).
  std::optional<std::vector<uint8_t>> forced_occupancy;
  std::optional<std::vector<int>> forced_mods;

  void validate() const;
};

// Band-decomposed wideband frame: row n holds the baseband time samples of
// band n at the band rate. mods[n] = 0 iff occupancy[n] = 0.
struct WidebandFrame {
  Eigen::MatrixXcd x;  // n_bands x q
  std::vector<uint8_t> occupancy;
  std::vector<int> mods;
  double snr_db = 0;
  uint64_t seed = 0;

  int bands() const { return static_cast<int>(x.rows()); }
  int samples() const { return static_cast<int>(x.cols()); }
};

// Synthesizes a sparse multiband frame: 1..p_max occupied bands with distinct
// indices, random schemes, per-band channel, and circularly-symmetric white
// noise on every row sized so the per-occupied-band SNR equals cfg.snr_db.
// Identical cfg + seed gives a bit-identical frame.
WidebandFrame assemble_frame(const FrameCfg& cfg, uint64_t seed);

}  // namespace subspect::sig
