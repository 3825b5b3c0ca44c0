#include <algorithm>

#include "specnet/model/classifier.hpp"

namespace specnet {

std::vector<double> threshold_candidates(std::span<const double> epsilons) {
  std::vector<double> sorted(epsilons.begin(), epsilons.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> out;
  if (sorted.empty()) return out;
  const double margin = std::max(1e-6, 1e-6 * std::abs(sorted.back()));
  out.push_back(sorted.front() - margin);
  for (std::size_t i = 1; i < sorted.size(); ++i) out.push_back((sorted[i - 1] + sorted[i]) / 2);
  out.push_back(sorted.back() + margin);
  return out;
}

Calibration calibrate_threshold(std::span<const double> epsilons, std::span<const InternalLabel> labels) {
  if (epsilons.size() != labels.size()) throw Error(ErrorKind::ShapeError, "calibration: errors and labels differ in length");
  const auto benign = std::count_if(labels.begin(), labels.end(), [](InternalLabel y) { return y.benign(); });
  if (benign == 0 || static_cast<std::size_t>(benign) == labels.size()) {
    throw Error(ErrorKind::CalibrationDegenerate, "validation set must contain both classes");
  }
  std::vector<std::size_t> order(epsilons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return epsilons[a] < epsilons[b]; });

  // Sweep candidates in ascending order, moving samples into the "benign"
  // side as tau passes them.
  const auto candidates = threshold_candidates(epsilons);
  std::size_t tp = 0, fp = 0;
  const auto positives = static_cast<std::size_t>(benign);
  std::size_t next = 0;
  Calibration best{candidates.front(), -1};
  for (double tau : candidates) {
    while (next < order.size() && epsilons[order[next]] <= tau) {
      if (labels[order[next]].benign()) ++tp;
      else ++fp;
      ++next;
    }
    const std::size_t fn = positives - tp;
    const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    if (f1 > best.f1) best = {tau, f1};
  }
  return best;
}

}  // namespace specnet
