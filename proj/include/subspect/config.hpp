#pragma once

#include <map>
#include <string>
#include <vector>

#include "subspect/datasets.hpp"
#include "subspect/optim.hpp"

namespace subspect::harness {

// Plain-text sectioned key=value configuration:
//
//   [frame]
//   n = 14
//   snr_db = 10
//
// Keys are addressed as "section.key". Overrides (--set key=value) may use
// either the full dotted form or a bare key, which then shadows that key in
// every section.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text);
  static Config defaults();

  void apply_override(const std::string& key_eq_value);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Rendered snapshot (sorted dotted keys) for manifests and reproducibility.
  std::string render() const;

  sig::FrameCfg frame_cfg() const;
  nn::TrainCfg train_cfg() const;
  data::GenCfg gen_cfg() const;
  std::vector<double> snr_grid() const;

 private:
  std::string lookup(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> overrides_;
};

// "-10:20:2" or "-10,-8,...,20" style lists.
std::vector<double> parse_grid(const std::string& text);

}  // namespace subspect::harness
