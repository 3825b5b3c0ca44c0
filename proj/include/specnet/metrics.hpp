#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace specnet {

/// Counts with phishing (external label 1) as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
};

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

struct LatencySummary {
  double mean_ms = 0;
  double median_ms = 0;
  double p90_ms = 0;
};

/// Confidence of the error-MLP in its own call, max(prob2, 1 - prob2),
/// split by whether the threshold rule and the MLP were right.
struct ComplementarityDiagnostic {
  static constexpr std::size_t kBins = 10;  // over [0.5, 1]
  struct Group {
    std::size_t count = 0;
    double mean_confidence = 0;
    std::array<std::size_t, kBins> histogram{};
  };
  Group both_correct;
  Group threshold_correct_mlp_wrong;
  Group threshold_wrong_mlp_correct;
  Group both_wrong;
};

struct MetricsReport {
  double accuracy = 0;
  double macro_precision = 0;
  double macro_recall = 0;
  double macro_f1 = 0;
  Confusion confusion;
  ClassMetrics benign;
  ClassMetrics phishing;
  std::optional<ComplementarityDiagnostic> diagnostic;
  std::optional<LatencySummary> latency;

  nlohmann::json to_json() const;
};

Confusion confusion_matrix(std::span<const int> labels, std::span<const int> predictions);

/// Accuracy and macro-averaged precision/recall/F1 over external labels.
/// Throws Error(EmptyDataset) for empty input.
MetricsReport compute_metrics(std::span<const int> labels, std::span<const int> predictions);

/// Sample of one page for the diagnostic: external label, verdict of the
/// threshold rule, error-MLP probability (benign-oriented).
struct DiagnosticSample {
  int label = 0;
  int threshold_verdict = 0;
  double prob2 = 0.5;
};

ComplementarityDiagnostic complementarity(std::span<const DiagnosticSample> samples);

/// Linear-interpolated percentile, q in [0, 1].
double percentile(std::vector<double> values, double q);
LatencySummary summarize_latency(std::span<const double> milliseconds);

}  // namespace specnet
