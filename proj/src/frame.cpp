#include "subspect/frame.hpp"

#include <cmath>
#include <limits>

namespace subspect::sig {

void FrameCfg::validate() const {
  if (n_bands < 1) throw ConfigError("frame: n_bands must be >= 1");
  if (q < 1) throw ConfigError("frame: q must be >= 1");
  if (p_max < 1 || p_max > n_bands)
    throw ConfigError("frame: p_max must be in [1, n_bands]");
  if (sps < 1) throw ConfigError("frame: sps must be >= 1");
  if (rolloff < 0 || rolloff > 1) throw ConfigError("frame: rolloff in [0,1]");
  channel.validate();
  if (forced_occupancy && static_cast<int>(forced_occupancy->size()) != n_bands)
    throw ConfigError("frame: forced_occupancy length must equal n_bands");
}

WidebandFrame assemble_frame(const FrameCfg& cfg, uint64_t seed) {
  cfg.validate();
  Rng rng(seed);

  WidebandFrame f;
  f.x = Eigen::MatrixXcd::Zero(cfg.n_bands, cfg.q);
  f.occupancy.assign(cfg.n_bands, 0);
  f.mods.assign(cfg.n_bands, 0);
  f.snr_db = cfg.snr_db;
  f.seed = seed;

  std::vector<int> occupied;
  if (cfg.forced_occupancy) {
    for (int n = 0; n < cfg.n_bands; n++)
      if ((*cfg.forced_occupancy)[n]) occupied.push_back(n);
    if (static_cast<int>(occupied.size()) > cfg.p_max)
      throw ConfigError("frame: forced occupancy exceeds p_max");
  } else {
    const int p = 1 + static_cast<int>(rng.uniform_int(cfg.p_max));
    occupied = rng.sample_without_replacement(cfg.n_bands, p);
    std::sort(occupied.begin(), occupied.end());
  }
  if (cfg.forced_mods &&
      cfg.forced_mods->size() != occupied.size())
    throw ConfigError("frame: forced_mods length must match occupied count");

  const auto taps = rrc_taps(cfg.rolloff, cfg.sps, cfg.span_symbols);
  const int nsym = symbols_needed(cfg.q, static_cast<int>(taps.size()), cfg.sps);

  for (size_t i = 0; i < occupied.size(); i++) {
    const int band = occupied[i];
    const ModScheme scheme =
        cfg.forced_mods ? scheme_from_index((*cfg.forced_mods)[i])
                        : scheme_from_index(1 + static_cast<int>(
                                                    rng.uniform_int(kNumSchemes)));
    f.occupancy[band] = 1;
    f.mods[band] = static_cast<int>(scheme);

    auto symbols = gen_symbols(scheme, nsym, rng);
    auto shaped = shape_band(symbols, taps, cfg.sps, cfg.q);
    auto faded = apply_channel(shaped, cfg.channel, rng);
    for (int t = 0; t < cfg.q; t++) f.x(band, t) = faded[t];
  }

  if (std::isfinite(cfg.snr_db)) {
    // Unit signal power per occupied band, so noise variance fixes the SNR.
    const double sigma = std::sqrt(std::pow(10.0, -cfg.snr_db / 10.0));
    for (int n = 0; n < cfg.n_bands; n++)
      for (int t = 0; t < cfg.q; t++) f.x(n, t) += sigma * rng.cnormal();
  }
  return f;
}

}  // namespace subspect::sig
