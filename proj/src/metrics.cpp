#include "subspect/metrics.hpp"

namespace subspect::metrics {

double sensing_accuracy(const std::vector<std::vector<uint8_t>>& preds,
                        const std::vector<std::vector<uint8_t>>& labels) {
  if (preds.size() != labels.size() || preds.empty())
    throw ShapeError("sensing_accuracy: prediction/label count mismatch");
  int64_t agree = 0, total = 0;
  for (size_t f = 0; f < preds.size(); f++) {
    if (preds[f].size() != labels[f].size())
      throw ShapeError("sensing_accuracy: band count mismatch");
    for (size_t b = 0; b < preds[f].size(); b++) {
      agree += (preds[f][b] != 0) == (labels[f][b] != 0);
      total++;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(total);
}

double classification_accuracy(
    const std::vector<std::vector<int>>& preds,
    const std::vector<std::vector<int>>& labels,
    const std::vector<std::vector<uint8_t>>& occupancy) {
  if (preds.size() != labels.size() || preds.size() != occupancy.size())
    throw ShapeError("classification_accuracy: count mismatch");
  int64_t agree = 0, busy = 0;
  for (size_t f = 0; f < preds.size(); f++) {
    if (preds[f].size() != labels[f].size() ||
        preds[f].size() != occupancy[f].size())
      throw ShapeError("classification_accuracy: band count mismatch");
    for (size_t b = 0; b < preds[f].size(); b++) {
      if (!occupancy[f][b]) continue;
      busy++;
      agree += preds[f][b] == labels[f][b];
    }
  }
  if (busy == 0)
    throw DataError("classification_accuracy: no busy bands in the set");
  return static_cast<double>(agree) / static_cast<double>(busy);
}

Eigen::MatrixXi confusion_matrix(
    const std::vector<std::vector<int>>& preds,
    const std::vector<std::vector<int>>& labels,
    const std::vector<std::vector<uint8_t>>& occupancy, int classes) {
  Eigen::MatrixXi c = Eigen::MatrixXi::Zero(classes, classes);
  for (size_t f = 0; f < preds.size(); f++)
    for (size_t b = 0; b < preds[f].size(); b++) {
      if (!occupancy[f][b]) continue;
      const int t = labels[f][b], p = preds[f][b];
      if (t < 0 || t >= classes || p < 0 || p >= classes)
        throw DataError("confusion_matrix: class index out of range");
      c(t, p)++;
    }
  return c;
}

}  // namespace subspect::metrics
