#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "subspect/common.hpp"

namespace subspect::metrics {

// Mean per-band binary agreement across all bands and frames.
double sensing_accuracy(const std::vector<std::vector<uint8_t>>& preds,
                        const std::vector<std::vector<uint8_t>>& labels);

// Mean agreement over busy bands only (occupancy[n] = 1); throws DataError
// when the set contains no busy band.
double classification_accuracy(const std::vector<std::vector<int>>& preds,
                               const std::vector<std::vector<int>>& labels,
                               const std::vector<std::vector<uint8_t>>& occupancy);

// rows = true class, cols = predicted class, busy bands only.
Eigen::MatrixXi confusion_matrix(const std::vector<std::vector<int>>& preds,
                                 const std::vector<std::vector<int>>& labels,
                                 const std::vector<std::vector<uint8_t>>& occupancy,
                                 int classes = 8);

struct MetricReport {
  std::vector<double> snr_db;
  std::vector<double> sensing_acc;  // NaN when not evaluated
  std::vector<double> class_acc;    // NaN when not evaluated
  std::vector<Eigen::MatrixXi> confusion;
  double runtime_sec = 0;
};

}  // namespace subspect::metrics
