#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "subspect/frame.hpp"

namespace subspect::sns {

// K x N multi-coset sensing matrix with cached Moore-Penrose pseudo-inverse.
struct SensingMatrix {
  Eigen::MatrixXcd a;      // K x N, unit-norm rows
  Eigen::MatrixXcd pinv;   // N x K
  std::vector<int> coset_offsets;

  int k() const { return static_cast<int>(a.rows()); }
  int n() const { return static_cast<int>(a.cols()); }

  // max_{i != j} |<a_i, a_j>| / (|a_i| |a_j|) over column pairs.
  double mutual_coherence() const;
};

// Sub-Nyquist sample matrix Z together with the source frame's labels.
struct Measurement {
  Eigen::MatrixXcd z;  // K x Q
  std::vector<uint8_t> occupancy;
  std::vector<int> mods;
  double snr_db = 0;
  uint64_t seed = 0;
};

// Partial-DFT-row sensing matrix a[r,c] = exp(-j*2*pi*offsets[r]*c/n)/sqrt(n),
// rows normalized to unit norm. Without explicit offsets, a randomized search
// (fixed seed kOffsetSearchSeed, kOffsetSearchTrials trials) picks the offset
// set with the smallest mutual coherence.
SensingMatrix build_sensing_matrix(int k, int n,
                                   std::optional<std::vector<int>> offsets = {});

inline constexpr uint64_t kOffsetSearchSeed = 20240u;
inline constexpr int kOffsetSearchTrials = 256;

// The default K=7, N=14 matrix used across the tools.
const SensingMatrix& default_sensing_matrix();

// Z = A * X, column-wise over the Q samples.
Measurement sample(const sig::WidebandFrame& frame, const SensingMatrix& a);

// SVD pseudo-inverse with relative singular-value cutoff 1e-12 * sigma_max.
Eigen::MatrixXcd pseudo_inverse(const Eigen::MatrixXcd& m);

// Binary blob: magic "SNSA", version u16, K u16, N u16, row-major complex64
// (little-endian float32 pairs), then offsets as u16.
void save_sensing_matrix(const SensingMatrix& a, const std::string& path);
SensingMatrix load_sensing_matrix(const std::string& path);

}  // namespace subspect::sns
