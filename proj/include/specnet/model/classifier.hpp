#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "specnet/error.hpp"
#include "specnet/nn/ops.hpp"

namespace specnet {

/// Label as seen by the losses: 1 = benign, 0 = phishing. External labels
/// use the opposite convention.
struct InternalLabel {
  int value = 0;

  static InternalLabel from_external(int external) { return {1 - external}; }
  int to_external() const { return 1 - value; }
  bool benign() const { return value == 1; }
  friend bool operator==(InternalLabel, InternalLabel) = default;
};

inline constexpr double kReconstructionClamp = 1e-12;
inline constexpr double kProbabilityClamp = 1e-7;

/// y * eps - (1 - y) * log(1 - exp(-eps)), with 1 - exp(-eps) floored at 1e-12.
template <class T>
nn::Var<T> loss_reconstruction(nn::Var<T> epsilon, InternalLabel y) {
  if (y.benign()) return epsilon;
  nn::Var<T> gap = nn::clamp(nn::one_minus_exp_neg(epsilon), T(kReconstructionClamp), T(1));
  return nn::scale(nn::log(gap), T(-1));
}

inline double loss_reconstruction(double epsilon, InternalLabel y) {
  if (y.benign()) return epsilon;
  return -std::log(std::max(kReconstructionClamp, -std::expm1(-epsilon)));
}

/// Binary cross entropy on prob2 clamped to [1e-7, 1 - 1e-7].
template <class T>
nn::Var<T> loss_classification(nn::Var<T> prob, InternalLabel y) {
  nn::Var<T> p = nn::clamp(prob, T(kProbabilityClamp), T(1 - kProbabilityClamp));
  if (y.benign()) return nn::scale(nn::log(p), T(-1));
  return nn::scale(nn::log(nn::add_scalar(nn::scale(p, T(-1)), T(1))), T(-1));
}

inline double loss_classification(double prob, InternalLabel y) {
  double p = std::clamp(prob, kProbabilityClamp, 1 - kProbabilityClamp);
  return y.benign() ? -std::log(p) : -std::log(1 - p);
}

/// L1 * exp(-w1) + w1 + L2 * exp(-w2) + w2.
template <class T>
nn::Var<T> multitask_loss(nn::Var<T> l1, nn::Var<T> l2, nn::Var<T> w1, nn::Var<T> w2) {
  nn::Var<T> a = nn::add(nn::mul(l1, nn::exp(nn::scale(w1, T(-1)))), w1);
  nn::Var<T> b = nn::add(nn::mul(l2, nn::exp(nn::scale(w2, T(-1)))), w2);
  return nn::add(a, b);
}

inline double multitask_loss(double l1, double l2, double w1, double w2) {
  return l1 * std::exp(-w1) + w1 + l2 * std::exp(-w2) + w2;
}

/// 1 / (1 + exp(beta * (eps - tau))), benign-oriented.
inline double prob_threshold(double epsilon, double tau, double beta) {
  const double z = beta * (epsilon - tau);
  if (z >= 0) {
    const double e = std::exp(-z);
    return e / (1 + e);
  }
  return 1 / (1 + std::exp(z));
}

struct Decision {
  InternalLabel internal;
  int verdict;  // external label
};

inline Decision ensemble_decide(double prob1, double prob2) {
  InternalLabel y{(prob1 + prob2) / 2 <= 0.5 ? 0 : 1};
  return {y, y.to_external()};
}

inline Decision single_decide(double prob) {
  InternalLabel y{prob <= 0.5 ? 0 : 1};
  return {y, y.to_external()};
}

struct Calibration {
  double tau = 0;
  double f1 = 0;
};

/// F1 of the rule "eps <= tau means benign", benign being the positive class.
inline double threshold_f1(std::span<const double> epsilons, std::span<const InternalLabel> labels, double tau) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const bool predicted = epsilons[i] <= tau;
    const bool actual = labels[i].benign();
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

/// Candidate thresholds: a sentinel below the smallest error, midpoints of
/// consecutive distinct errors and a sentinel above the largest. Ascending.
std::vector<double> threshold_candidates(std::span<const double> epsilons);

/// Picks the candidate maximizing threshold_f1, ties to the smaller tau.
/// Throws Error(CalibrationDegenerate) unless both classes are present.
Calibration calibrate_threshold(std::span<const double> epsilons, std::span<const InternalLabel> labels);

}  // namespace specnet
