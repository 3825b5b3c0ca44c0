#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "specnet/nn/tape.hpp"

namespace specnet::nn {

struct GradCheckOptions {
  double step = 1e-5;
  // Relative error is |analytic - numeric| / max(floor, |analytic|, |numeric|),
  // so gradients much smaller than the floor are compared absolutely.
  double denominator_floor = 1e-3;
  // 0 checks every entry; otherwise a seeded sample of entries per parameter.
  std::size_t max_entries_per_parameter = 0;
  std::uint64_t seed = 0;
};

struct GradCheckEntry {
  std::string name;
  double max_relative_error = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // probes that crossed a kink (branch signature changed)
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_relative_error = 0;
  double tolerance = 0;
  bool passed = false;
};

/// Compares reverse-mode gradients of a scalar function with central
/// finite differences. `fn` must build its graph from `params` via
/// Tape::parameter and return a 1x1 value.
inline GradCheckReport grad_check(const std::function<Var<double>(Tape<double>&)>& fn,
                                  ParameterStore<double>& params, double tolerance,
                                  const GradCheckOptions& options = {}) {
  GradientBuffer<double> analytic = params.zero_buffer();
  std::uint64_t base_signature = 0;
  {
    Tape<double> tape;
    Var<double> y = fn(tape);
    base_signature = tape.signature();
    tape.backward(y, analytic, &params);
  }

  auto evaluate = [&](std::uint64_t& signature) {
    Tape<double> tape(false);
    Var<double> y = fn(tape);
    signature = tape.signature();
    return y.item();
  };

  std::mt19937_64 rng(options.seed);
  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& param = params[p];
    GradCheckEntry entry;
    entry.name = param.name;
    std::vector<Eigen::Index> indices(static_cast<std::size_t>(param.value.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<Eigen::Index>(i);
    if (options.max_entries_per_parameter > 0 && indices.size() > options.max_entries_per_parameter) {
      std::shuffle(indices.begin(), indices.end(), rng);
      indices.resize(options.max_entries_per_parameter);
    }
    for (auto idx : indices) {
      double& slot = param.value.data()[idx];
      const double original = slot;
      std::uint64_t sig_plus = 0, sig_minus = 0;
      slot = original + options.step;
      const double f_plus = evaluate(sig_plus);
      slot = original - options.step;
      const double f_minus = evaluate(sig_minus);
      slot = original;
      if (sig_plus != base_signature || sig_minus != base_signature) {
        ++entry.skipped;
        continue;
      }
      const double numeric = (f_plus - f_minus) / (2 * options.step);
      const double a = analytic[p].data()[idx];
      const double denom = std::max({options.denominator_floor, std::abs(a), std::abs(numeric)});
      const double err = std::abs(a - numeric) / denom;
      entry.max_relative_error = std::max(entry.max_relative_error, std::isfinite(err) ? err : 1e300);
      ++entry.checked;
    }
    report.max_relative_error = std::max(report.max_relative_error, entry.max_relative_error);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_relative_error <= tolerance;
  return report;
}

}  // namespace specnet::nn
