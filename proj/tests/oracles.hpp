#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "specnet/model/classifier.hpp"

namespace specnet::testing {

// Exhaustive reference: every midpoint plus both sentinels, best F1 with the
// smallest tau among ties.
inline Calibration exhaustive_calibration(const std::vector<double>& eps, const std::vector<InternalLabel>& labels) {
  std::vector<double> sorted = eps;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const double margin = std::max(1e-6, 1e-6 * std::abs(sorted.back()));
  std::vector<double> candidates = {sorted.front() - margin};
  for (std::size_t i = 1; i < sorted.size(); ++i) candidates.push_back((sorted[i - 1] + sorted[i]) / 2);
  candidates.push_back(sorted.back() + margin);
  Calibration best{candidates.front(), -1};
  for (double tau : candidates) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const bool benign_call = eps[i] <= tau;
      tp += benign_call && labels[i].benign();
      fp += benign_call && !labels[i].benign();
      fn += !benign_call && labels[i].benign();
    }
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    if (f1 > best.f1) best = {tau, f1};
  }
  return best;
}

}  // namespace specnet::testing
