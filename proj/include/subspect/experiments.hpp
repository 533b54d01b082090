#pragma once

#include <iosfwd>

#include "subspect/config.hpp"
#include "subspect/metrics.hpp"
#include "subspect/trainer.hpp"

namespace subspect::harness {

struct SompBaselineCfg {
  enum class Mode { oracle, fixed };
  Mode mode = Mode::oracle;  // oracle: per-frame true busy count
  int fixed_k = 2;
  int frames_per_snr = 128;
  std::vector<double> snr_grid;
  sig::FrameCfg frame;
  uint64_t seed = 99;
};

// Scores the SOMP support as an occupancy prediction per SNR point.
metrics::MetricReport run_somp_baseline(const SompBaselineCfg& cfg,
                                        const sns::SensingMatrix& a);

// Generates fresh frames per SNR and evaluates occupancy and/or modulation
// models. Either model pointer may be null. When both are given, modulation
// predictions are masked by the occupancy predictions (Algorithm-1 replay);
// with dlmc only, ground-truth occupancy masks the classifier.
struct EvalCfg {
  std::vector<double> snr_grid;
  int frames_per_snr = 128;
  sig::FrameCfg frame;
  uint64_t seed = 1234;
  int l_symbols = 256;          // DDC budget for narrowband classifiers
  bool classifier_wideband = false;  // feed minmax(split(Xhat)) instead of DDC
};

struct StageShape {
  std::string name;
  std::vector<int> dims;
};

struct PipelineResult {
  metrics::MetricReport report;
  std::vector<StageShape> stage_shapes;  // recorded on the first frame
};

PipelineResult eval_models(const EvalCfg& cfg, const sns::SensingMatrix& a,
                           nn::Sequential<float>* dlwss,
                           nn::Sequential<float>* dlmc);

// sweep.csv (snr_db, sensing_acc, class_acc) plus confusion_<snr>.csv files.
void write_sweep_csv(const metrics::MetricReport& report,
                     const std::string& out_dir);

// Fast invariant suite; returns the number of failed checks.
int run_selftest(std::ostream& os);

}  // namespace subspect::harness
