#include "subspect/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>

#include "subspect/rng.hpp"

namespace subspect::sns {

double SensingMatrix::mutual_coherence() const {
  double best = 0;
  for (int i = 0; i < n(); i++) {
    for (int j = i + 1; j < n(); j++) {
      const double ip = std::abs(a.col(i).dot(a.col(j)));
      const double nn = a.col(i).norm() * a.col(j).norm();
      best = std::max(best, ip / nn);
    }
  }
  return best;
}

Eigen::MatrixXcd pseudo_inverse(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-12 * (sv.size() ? sv(0) : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); i++)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

namespace {

SensingMatrix from_offsets(int k, int n, const std::vector<int>& offsets) {
  SensingMatrix sm;
  sm.coset_offsets = offsets;
  sm.a.resize(k, n);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int r = 0; r < k; r++) {
    for (int c = 0; c < n; c++) {
      const double ang = -two_pi * offsets[r] * c / n;
      sm.a(r, c) = cplx{std::cos(ang), std::sin(ang)} / std::sqrt(double(n));
    }
    sm.a.row(r) /= sm.a.row(r).norm();
  }
  sm.pinv = pseudo_inverse(sm.a);
  return sm;
}

}  // namespace

SensingMatrix build_sensing_matrix(int k, int n,
                                   std::optional<std::vector<int>> offsets) {
  if (k < 1 || k > n) throw ConfigError("sensing: need 1 <= K <= N");
  if (offsets) {
    if (static_cast<int>(offsets->size()) != k)
      throw ConfigError("sensing: offsets size must equal K");
    std::set<int> distinct(offsets->begin(), offsets->end());
    if (static_cast<int>(distinct.size()) != k)
      throw ConfigError("sensing: duplicate coset offsets");
    for (int o : *offsets)
      if (o < 0 || o >= n) throw ConfigError("sensing: offset out of [0, N)");
    return from_offsets(k, n, *offsets);
  }

  Rng rng(kOffsetSearchSeed);
  std::vector<int> best;
  double best_mu = 2.0;
  for (int trial = 0; trial < kOffsetSearchTrials; trial++) {
    auto cand = rng.sample_without_replacement(n, k);
    std::sort(cand.begin(), cand.end());
    const double mu = from_offsets(k, n, cand).mutual_coherence();
    if (mu < best_mu) {
      best_mu = mu;
      best = cand;
    }
  }
  return from_offsets(k, n, best);
}

const SensingMatrix& default_sensing_matrix() {
  static const SensingMatrix sm = build_sensing_matrix(7, 14);
  return sm;
}

Measurement sample(const sig::WidebandFrame& frame, const SensingMatrix& a) {
  if (a.n() != frame.bands())
    throw ShapeError("sample: sensing matrix N (" + std::to_string(a.n()) +
                     ") != frame bands (" + std::to_string(frame.bands()) + ")");
  Measurement m;
  m.z = a.a * frame.x;
  m.occupancy = frame.occupancy;
  m.mods = frame.mods;
  m.snr_db = frame.snr_db;
  m.seed = frame.seed;
  return m;
}

namespace {

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("sensing matrix blob truncated");
  return v;
}

}  // namespace

void save_sensing_matrix(const SensingMatrix& a, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for write: " + path);
  os.write("SNSA", 4);
  put<uint16_t>(os, 1);  // version
  put<uint16_t>(os, static_cast<uint16_t>(a.k()));
  put<uint16_t>(os, static_cast<uint16_t>(a.n()));
  for (int r = 0; r < a.k(); r++)
    for (int c = 0; c < a.n(); c++) {
      put<float>(os, static_cast<float>(a.a(r, c).real()));
      put<float>(os, static_cast<float>(a.a(r, c).imag()));
    }
  for (int o : a.coset_offsets) put<uint16_t>(os, static_cast<uint16_t>(o));
  if (!os) throw IoError("write failed: " + path);
}

SensingMatrix load_sensing_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SNSA", 4) != 0)
    throw IoError("bad sensing matrix magic");
  const auto version = take<uint16_t>(is);
  if (version != 1) throw IoError("unsupported sensing matrix version");
  const int k = take<uint16_t>(is);
  const int n = take<uint16_t>(is);
  SensingMatrix sm;
  sm.a.resize(k, n);
  for (int r = 0; r < k; r++)
    for (int c = 0; c < n; c++) {
      const float re = take<float>(is);
      const float im = take<float>(is);
      sm.a(r, c) = cplx{re, im};
    }
  sm.coset_offsets.resize(k);
  for (int r = 0; r < k; r++) sm.coset_offsets[r] = take<uint16_t>(is);
  sm.pinv = pseudo_inverse(sm.a);
  return sm;
}

}  // namespace subspect::sns
