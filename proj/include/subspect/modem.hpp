#pragma once

#include <span>
#include <vector>

#include "subspect/common.hpp"
#include "subspect/rng.hpp"

namespace subspect::sig {

// Modulation schemes of the occupied bands. Index 0 is reserved for "vacant"
// and is not a scheme.
enum class ModScheme : int {
  bpsk = 1,
  qpsk = 2,
  qam16 = 3,
  qam64 = 4,
  qam128 = 5,
  qam256 = 6,
  pam8 = 7,
};

inline constexpr int kNumSchemes = 7;

const char* scheme_name(ModScheme s);
ModScheme scheme_from_index(int idx);

// Unit-average-power constellation points of a scheme. The points are an
// integer lattice scaled by 1/sqrt(exact mean power), so the average power of
// the returned set is 1 up to floating-point rounding.
const std::vector<cplx>& constellation(ModScheme s);

// `count` i.i.d. uniform draws from the scheme's constellation.
std::vector<cplx> gen_symbols(ModScheme s, int count, Rng& rng);

// Root-raised-cosine taps: span_symbols*sps + 1 samples, even-symmetric,
// unit energy. The singular points of the closed form (t=0, |t|=1/(4*rolloff))
// use their analytic limits. rolloff=0 degenerates to a unit-energy sinc.
std::vector<double> rrc_taps(double rolloff, int sps, int span_symbols);

// Upsample by sps, filter with taps, truncate to out_len (keeping the filter
// onset so that symbol l peaks at sample l*sps + (taps-1)/2), then normalize
// to unit average power.
std::vector<cplx> shape_band(std::span<const cplx> symbols,
                             std::span<const double> taps, int sps,
                             int out_len);

// Smallest symbol count accepted by shape_band for the given output length.
int symbols_needed(int out_len, int taps_len, int sps);

}  // namespace subspect::sig
