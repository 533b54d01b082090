#pragma once

#include <span>
#include <vector>

#include "subspect/sensing.hpp"

namespace subspect::rec {

// Sorted distinct band indices detected as busy.
struct Support {
  std::vector<int> indices;

  static Support from_occupancy(std::span<const uint8_t> occ);
  std::vector<uint8_t> to_occupancy(int n_bands) const;
  int size() const { return static_cast<int>(indices.size()); }
};

// X~ = A† Z. No thresholding or cleanup; this is the noisy input to the
// occupancy network.
Eigen::MatrixXcd pseudo_reconstruct(const sns::SensingMatrix& a,
                                    const sns::Measurement& m);

// Least-squares reconstruction restricted to the support: rows in s get
// pinv(A restricted to s) * Z, all other rows are exactly zero. Throws
// DataError when the restricted matrix is numerically rank-deficient
// (sigma_min < 1e-9 * sigma_max).
Eigen::MatrixXcd support_reconstruct(const sns::SensingMatrix& a,
                                     const sns::Measurement& m,
                                     const Support& s);

struct SompResult {
  Support support;
  // Frobenius norm of the residual after 0, 1, ..., sparsity iterations.
  std::vector<double> residual_norms;
};

// Simultaneous OMP over the Q measurement columns: each iteration picks the
// column j maximizing sum_q |a_j^H r_q| (ties -> lowest index), re-solves
// least squares on the support and updates the residual.
SompResult somp(const sns::SensingMatrix& a, const sns::Measurement& m,
                int sparsity);

// Digital down-conversion of one reconstructed band row: matched filter with
// the RRC taps, compensate the full cascade delay, decimate by sps and return
// l symbols normalized to unit average power (zero rows stay zero).
std::vector<cplx> ddc(std::span<const cplx> row, std::span<const double> taps,
                      int sps, int l);

// Samples required by ddc to produce l symbols.
int ddc_row_length(int l, int taps_len, int sps);

}  // namespace subspect::rec
