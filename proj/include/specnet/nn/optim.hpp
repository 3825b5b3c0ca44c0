#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "specnet/nn/tape.hpp"

namespace specnet::nn {

namespace detail {

template <class T>
void require_finite_gradients(const ParameterStore<T>& store) {
  for (const auto& p : store) {
    if (!p.grad.allFinite()) throw Error(ErrorKind::NonFiniteGradient, "parameter " + p.name);
  }
}

}  // namespace detail

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias-corrected moments. The learning rate is supplied per step
/// so a schedule can drive it.
template <class T>
class Adam {
 public:
  explicit Adam(const ParameterStore<T>& store, AdamOptions options = {}) : options_(options) {
    for (const auto& p : store) {
      first_.push_back(Matrix<T>::Zero(p.value.rows(), p.value.cols()));
      second_.push_back(Matrix<T>::Zero(p.value.rows(), p.value.cols()));
    }
  }

  /// Throws Error(NonFiniteGradient) before touching any parameter.
  void step(ParameterStore<T>& store, double lr) {
    detail::require_finite_gradients(store);
    ++steps_;
    const T b1 = static_cast<T>(options_.beta1);
    const T b2 = static_cast<T>(options_.beta2);
    const T correction1 = T(1) - static_cast<T>(std::pow(options_.beta1, static_cast<double>(steps_)));
    const T correction2 = T(1) - static_cast<T>(std::pow(options_.beta2, static_cast<double>(steps_)));
    const T rate = static_cast<T>(lr);
    const T eps = static_cast<T>(options_.eps);
    for (std::size_t i = 0; i < store.size(); ++i) {
      auto& p = store[i];
      first_[i] = b1 * first_[i] + (T(1) - b1) * p.grad;
      second_[i] = b2 * second_[i] + (T(1) - b2) * p.grad.cwiseAbs2();
      p.value.array() -= rate * (first_[i].array() / correction1) /
                         ((second_[i].array() / correction2).sqrt() + eps);
    }
  }

  std::uint64_t steps() const noexcept { return steps_; }

 private:
  AdamOptions options_;
  std::vector<Matrix<T>> first_;
  std::vector<Matrix<T>> second_;
  std::uint64_t steps_ = 0;
};

/// Plain gradient descent, kept for optimizer sweeps.
template <class T>
class Sgd {
 public:
  void step(ParameterStore<T>& store, double lr) {
    detail::require_finite_gradients(store);
    ++steps_;
    for (auto& p : store) p.value -= static_cast<T>(lr) * p.grad;
  }
  std::uint64_t steps() const noexcept { return steps_; }

 private:
  std::uint64_t steps_ = 0;
};

/// Cosine annealing with warm restarts. Cycle i has length t0 * mult^i
/// epochs; within a cycle the rate falls from `max_lr` to `floor` along a
/// half cosine and jumps back to `max_lr` at the next cycle.
class CosineWarmRestarts {
 public:
  CosineWarmRestarts(double max_lr, double floor, double t0, double mult)
      : max_lr_(max_lr), floor_(floor), t0_(t0), mult_(mult) {
    if (!(t0 > 0) || !(mult >= 1)) throw Error(ErrorKind::ConfigError, "schedule: t0 > 0 and mult >= 1 required");
  }

  /// Rate at a (possibly fractional) epoch.
  double at(double epoch) const {
    double start = 0;
    double length = t0_;
    while (epoch >= start + length) {
      start += length;
      length *= mult_;
    }
    double progress = (epoch - start) / length;
    return floor_ + (max_lr_ - floor_) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
  }

  /// Index of the cycle containing `epoch`.
  int cycle(double epoch) const {
    double start = 0;
    double length = t0_;
    int index = 0;
    while (epoch >= start + length) {
      start += length;
      length *= mult_;
      ++index;
    }
    return index;
  }

 private:
  double max_lr_;
  double floor_;
  double t0_;
  double mult_;
};

}  // namespace specnet::nn
