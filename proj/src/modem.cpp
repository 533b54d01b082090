#include "subspect/modem.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace subspect::sig {

namespace {

std::vector<cplx> square_qam(int side) {
  std::vector<cplx> pts;
  pts.reserve(static_cast<size_t>(side) * side);
  double power_sum = 0;
  for (int i = 0; i < side; i++) {
    for (int q = 0; q < side; q++) {
      const double re = 2 * i - side + 1;
      const double im = 2 * q - side + 1;
      pts.emplace_back(re, im);
      power_sum += re * re + im * im;
    }
  }
  const double scale = 1.0 / std::sqrt(power_sum / static_cast<double>(pts.size()));
  for (auto& p : pts) p *= scale;
  return pts;
}

// 128-point cross constellation: 12x12 odd-integer grid minus the four 2x2
// corner blocks (|re| >= 9 and |im| >= 9).
std::vector<cplx> cross_qam128() {
  std::vector<cplx> pts;
  pts.reserve(128);
  double power_sum = 0;
  for (int re = -11; re <= 11; re += 2) {
    for (int im = -11; im <= 11; im += 2) {
      if (std::abs(re) >= 9 && std::abs(im) >= 9) continue;
      pts.emplace_back(re, im);
      power_sum += static_cast<double>(re) * re + static_cast<double>(im) * im;
    }
  }
  const double scale = 1.0 / std::sqrt(power_sum / static_cast<double>(pts.size()));
  for (auto& p : pts) p *= scale;
  return pts;
}

std::vector<cplx> pam(int levels) {
  std::vector<cplx> pts;
  pts.reserve(levels);
  double power_sum = 0;
  for (int i = 0; i < levels; i++) {
    const double a = 2 * i - levels + 1;
    pts.emplace_back(a, 0.0);
    power_sum += a * a;
  }
  const double scale = 1.0 / std::sqrt(power_sum / static_cast<double>(pts.size()));
  for (auto& p : pts) p *= scale;
  return pts;
}

}  // namespace

const char* scheme_name(ModScheme s) {
  switch (s) {
    case ModScheme::bpsk: return "BPSK";
    case ModScheme::qpsk: return "QPSK";
    case ModScheme::qam16: return "16-QAM";
    case ModScheme::qam64: return "64-QAM";
    case ModScheme::qam128: return "128-QAM";
    case ModScheme::qam256: return "256-QAM";
    case ModScheme::pam8: return "8-PAM";
  }
  return "?";
}

ModScheme scheme_from_index(int idx) {
  if (idx < 1 || idx > kNumSchemes)
    throw DataError("modulation index out of range [1," +
                    std::to_string(kNumSchemes) + "]: " + std::to_string(idx));
  return static_cast<ModScheme>(idx);
}

const std::vector<cplx>& constellation(ModScheme s) {
  static const std::array<std::vector<cplx>, kNumSchemes> tables = {
      std::vector<cplx>{{1.0, 0.0}, {-1.0, 0.0}},
      square_qam(2),
      square_qam(4),
      square_qam(8),
      cross_qam128(),
      square_qam(16),
      pam(8),
  };
  return tables[static_cast<int>(s) - 1];
}

std::vector<cplx> gen_symbols(ModScheme s, int count, Rng& rng) {
  if (count < 1) throw ConfigError("gen_symbols: count must be >= 1");
  const auto& table = constellation(s);
  std::vector<cplx> out(count);
  for (auto& sym : out) sym = table[rng.uniform_int(table.size())];
  return out;
}

std::vector<double> rrc_taps(double rolloff, int sps, int span_symbols) {
  if (rolloff < 0.0 || rolloff > 1.0)
    throw ConfigError("rrc_taps: rolloff must be in [0,1]");
  if (sps < 1) throw ConfigError("rrc_taps: sps must be >= 1");
  if (span_symbols < 2) throw ConfigError("rrc_taps: span must be >= 2 symbols");

  const int len = span_symbols * sps + 1;
  std::vector<double> g(len);
  const double pi = std::numbers::pi;
  for (int i = 0; i < len; i++) {
    const double t = (i - (len - 1) / 2.0) / sps;  // symbol units
    if (std::abs(t) < 1e-12) {
      g[i] = 1.0 + rolloff * (4.0 / pi - 1.0);
    } else if (rolloff > 0.0 &&
               std::abs(std::abs(t) - 1.0 / (4.0 * rolloff)) < 1e-9) {
      const double a = pi / (4.0 * rolloff);
      g[i] = (rolloff / std::sqrt(2.0)) *
             ((1.0 + 2.0 / pi) * std::sin(a) + (1.0 - 2.0 / pi) * std::cos(a));
    } else {
      const double num = std::sin(pi * t * (1.0 - rolloff)) +
                         4.0 * rolloff * t * std::cos(pi * t * (1.0 + rolloff));
      const double den = pi * t * (1.0 - 16.0 * rolloff * rolloff * t * t);
      g[i] = num / den;
    }
  }
  double energy = 0;
  for (double v : g) energy += v * v;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& v : g) v *= scale;
  return g;
}

int symbols_needed(int out_len, int taps_len, int sps) {
  // Full linear convolution of the upsampled sequence with the taps has
  // length count*sps + taps_len - 1; it must cover out_len samples.
  const int deficit = out_len - taps_len + 1;
  return std::max(1, (deficit + sps - 1) / sps);
}

std::vector<cplx> shape_band(std::span<const cplx> symbols,
                             std::span<const double> taps, int sps,
                             int out_len) {
  if (out_len < 1) throw ConfigError("shape_band: out_len must be >= 1");
  const int need = symbols_needed(out_len, static_cast<int>(taps.size()), sps);
  if (static_cast<int>(symbols.size()) < need)
    throw ShapeError("shape_band: need >= " + std::to_string(need) +
                     " symbols for out_len " + std::to_string(out_len) +
                     ", got " + std::to_string(symbols.size()));

  std::vector<cplx> out(out_len, cplx{0.0, 0.0});
  // out[i] = sum_l taps[i - l*sps] * symbols[l]
  const int tlen = static_cast<int>(taps.size());
  for (size_t l = 0; l < symbols.size(); l++) {
    const int base = static_cast<int>(l) * sps;
    if (base >= out_len) break;
    const cplx b = symbols[l];
    const int hi = std::min(tlen, out_len - base);
    for (int j = 0; j < hi; j++) out[base + j] += taps[j] * b;
  }
  double power = 0;
  for (const auto& v : out) power += std::norm(v);
  power /= out_len;
  if (power > 0) {
    const double scale = 1.0 / std::sqrt(power);
    for (auto& v : out) v *= scale;
  }
  return out;
}

}  // namespace subspect::sig
