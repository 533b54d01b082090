#include "subspect/recon.hpp"

#include <algorithm>
#include <cmath>

namespace subspect::rec {

Support Support::from_occupancy(std::span<const uint8_t> occ) {
  Support s;
  for (size_t i = 0; i < occ.size(); i++)
    if (occ[i]) s.indices.push_back(static_cast<int>(i));
  return s;
}

std::vector<uint8_t> Support::to_occupancy(int n_bands) const {
  std::vector<uint8_t> occ(n_bands, 0);
  for (int i : indices) {
    if (i < 0 || i >= n_bands) throw ShapeError("support index out of range");
    occ[i] = 1;
  }
  return occ;
}

Eigen::MatrixXcd pseudo_reconstruct(const sns::SensingMatrix& a,
                                    const sns::Measurement& m) {
  if (m.z.rows() != a.k())
    throw ShapeError("pseudo_reconstruct: Z rows != K");
  return a.pinv * m.z;
}

Eigen::MatrixXcd support_reconstruct(const sns::SensingMatrix& a,
                                     const sns::Measurement& m,
                                     const Support& s) {
  if (m.z.rows() != a.k())
    throw ShapeError("support_reconstruct: Z rows != K");
  if (s.size() > a.k())
    throw ConfigError("support_reconstruct: |support| must be <= K");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a.n(), m.z.cols());
  if (s.indices.empty()) return out;

  Eigen::MatrixXcd restricted(a.k(), s.size());
  for (int j = 0; j < s.size(); j++) {
    const int col = s.indices[j];
    if (col < 0 || col >= a.n())
      throw ShapeError("support_reconstruct: band index out of range");
    restricted.col(j) = a.a.col(col);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      restricted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-9 * sv(0))
    throw DataError("support_reconstruct: rank-deficient restricted matrix");
  Eigen::VectorXd inv(sv.size());
  for (int i = 0; i < sv.size(); i++) inv(i) = 1.0 / sv(i);
  const Eigen::MatrixXcd rows =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint() * m.z;
  for (int j = 0; j < s.size(); j++) out.row(s.indices[j]) = rows.row(j);
  return out;
}

SompResult somp(const sns::SensingMatrix& a, const sns::Measurement& m,
                int sparsity) {
  if (sparsity < 0 || sparsity > a.k())
    throw ConfigError("somp: sparsity must be in [0, K]");
  if (m.z.rows() != a.k()) throw ShapeError("somp: Z rows != K");

  SompResult result;
  Eigen::MatrixXcd residual = m.z;
  result.residual_norms.push_back(residual.norm());
  std::vector<bool> selected(a.n(), false);

  for (int it = 0; it < sparsity; it++) {
    // Correlate each atom with all residual columns.
    const Eigen::MatrixXcd corr = a.a.adjoint() * residual;
    int best = -1;
    double best_score = -1;
    for (int j = 0; j < a.n(); j++) {
      if (selected[j]) continue;
      const double score = corr.row(j).cwiseAbs().sum();
      if (score > best_score + 0.0) {
        best_score = score;
        best = j;
      }
    }
    selected[best] = true;
    result.support.indices.push_back(best);
    std::sort(result.support.indices.begin(), result.support.indices.end());
    residual = m.z - a.a(Eigen::all, result.support.indices) *
                         (sns::pseudo_inverse(
                              a.a(Eigen::all, result.support.indices)) *
                          m.z);
    result.residual_norms.push_back(residual.norm());
  }
  return result;
}

int ddc_row_length(int l, int taps_len, int sps) {
  return (l - 1) * sps + taps_len;
}

std::vector<cplx> ddc(std::span<const cplx> row, std::span<const double> taps,
                      int sps, int l) {
  if (l < 1) throw ConfigError("ddc: l must be >= 1");
  const int tlen = static_cast<int>(taps.size());
  if (static_cast<int>(row.size()) < ddc_row_length(l, tlen, sps))
    throw ShapeError("ddc: row too short for " + std::to_string(l) +
                     " symbols (need " +
                     std::to_string(ddc_row_length(l, tlen, sps)) + ")");

  // Matched filter output at the cascade delay: symbol i lives at full-conv
  // index i*sps + (tlen - 1).
  std::vector<cplx> out(l);
  const int q = static_cast<int>(row.size());
  for (int i = 0; i < l; i++) {
    const int idx = i * sps + tlen - 1;
    cplx acc{0.0, 0.0};
    const int jlo = std::max(0, idx - q + 1);
    const int jhi = std::min(tlen - 1, idx);
    for (int j = jlo; j <= jhi; j++) acc += taps[j] * row[idx - j];
    out[i] = acc;
  }
  double power = 0;
  for (const auto& v : out) power += std::norm(v);
  power /= l;
  if (power > 0) {
    const double scale = 1.0 / std::sqrt(power);
    for (auto& v : out) v *= scale;
  }
  return out;
}

}  // namespace subspect::rec
