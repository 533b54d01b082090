#pragma once

#include <span>
#include <vector>

#include "subspect/common.hpp"
#include "subspect/rng.hpp"

namespace subspect::sig {

enum class ChannelKind { awgn, rayleigh, rician };

struct ChannelCfg {
  ChannelKind kind = ChannelKind::awgn;
  // Doppler in cycles per sample at the band rate. Quasi-static per frame at
  // the default.
  double normalized_doppler = 1e-4;
  double rician_k = 4.0;  // LOS-to-scatter power ratio, linear
  int num_paths = 48;     // sum-of-sinusoids count

  void validate() const;
};

const char* channel_name(ChannelKind k);
ChannelKind channel_from_index(int idx);  // 1=AWGN 2=Rayleigh 3=Rician
int channel_index(ChannelKind k);

// Flat-fading tap sequence h[0..n), sum-of-sinusoids scatter model with
// E|h|^2 = 1. Rician adds a line-of-sight component of power k/(k+1).
std::vector<cplx> fading_taps(int n, const ChannelCfg& cfg, Rng& rng);

// Per-band channel. AWGN-only returns the band unchanged (noise is added
// frame-wide in assemble_frame); fading kinds multiply by fading_taps.
std::vector<cplx> apply_channel(std::span<const cplx> band,
                                const ChannelCfg& cfg, Rng& rng);

}  // namespace subspect::sig
