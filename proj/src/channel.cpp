#include "subspect/channel.hpp"

#include <cmath>
#include <numbers>

namespace subspect::sig {

void ChannelCfg::validate() const {
  if (normalized_doppler < 0) throw ConfigError("channel: normalized_doppler must be >= 0");
  if (rician_k < 0) throw ConfigError("channel: rician_k must be >= 0");
  if (kind != ChannelKind::awgn && num_paths < 1)
    throw ConfigError("channel: num_paths must be >= 1 for fading kinds");
}

const char* channel_name(ChannelKind k) {
  switch (k) {
    case ChannelKind::awgn: return "awgn";
    case ChannelKind::rayleigh: return "rayleigh";
    case ChannelKind::rician: return "rician";
  }
  return "?";
}

ChannelKind channel_from_index(int idx) {
  switch (idx) {
    case 1: return ChannelKind::awgn;
    case 2: return ChannelKind::rayleigh;
    case 3: return ChannelKind::rician;
  }
  throw ConfigError("channel index must be 1 (AWGN), 2 (Rayleigh) or 3 (Rician)");
}

int channel_index(ChannelKind k) { return static_cast<int>(k) + 1; }

std::vector<cplx> fading_taps(int n, const ChannelCfg& cfg, Rng& rng) {
  cfg.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  const int paths = cfg.num_paths;

  // Scatter component: random arrival angles and phases, unit mean power.
  std::vector<double> omega(paths), phi(paths);
  for (int p = 0; p < paths; p++) {
    omega[p] = two_pi * cfg.normalized_doppler * std::cos(rng.uniform(0, two_pi));
    phi[p] = rng.uniform(0, two_pi);
  }
  const bool rician = cfg.kind == ChannelKind::rician;
  const double scatter_gain =
      rician ? std::sqrt(1.0 / ((cfg.rician_k + 1.0) * paths))
             : std::sqrt(1.0 / paths);
  double los_omega = 0, los_phi = 0, los_gain = 0;
  if (rician) {
    los_omega = two_pi * cfg.normalized_doppler * std::cos(rng.uniform(0, two_pi));
    los_phi = rng.uniform(0, two_pi);
    los_gain = std::sqrt(cfg.rician_k / (cfg.rician_k + 1.0));
  }

  std::vector<cplx> h(n);
  for (int i = 0; i < n; i++) {
    cplx acc{0.0, 0.0};
    for (int p = 0; p < paths; p++) {
      const double a = omega[p] * i + phi[p];
      acc += cplx{std::cos(a), std::sin(a)};
    }
    acc *= scatter_gain;
    if (rician) {
      const double a = los_omega * i + los_phi;
      acc += los_gain * cplx{std::cos(a), std::sin(a)};
    }
    h[i] = acc;
  }
  return h;
}

std::vector<cplx> apply_channel(std::span<const cplx> band,
                                const ChannelCfg& cfg, Rng& rng) {
  if (band.empty()) throw ShapeError("apply_channel: empty band");
  cfg.validate();
  std::vector<cplx> out(band.begin(), band.end());
  if (cfg.kind == ChannelKind::awgn) return out;
  const auto h = fading_taps(static_cast<int>(band.size()), cfg, rng);
  for (size_t i = 0; i < out.size(); i++) out[i] *= h[i];
  return out;
}

}  // namespace subspect::sig
