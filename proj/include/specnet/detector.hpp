#pragma once

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "specnet/bundle.hpp"
#include "specnet/manifest.hpp"
#include "specnet/metrics.hpp"
#include "specnet/model/model.hpp"

namespace specnet {

/// Raw network outputs for one page.
struct Scores {
  std::optional<double> epsilon;
  std::optional<double> prob2;
  std::vector<double> delta;
};

Scores score_page(const Model<float>& model, const PreparedPage& page);

struct ReconstructionReport {
  std::optional<double> epsilon;
  std::vector<double> delta;
  std::optional<double> prob1;
  std::optional<double> prob2;
  int verdict = 0;  // external label
  double latency_ms = 0;
  std::size_t nodes = 0;

  /// Keys epsilon, prob1, prob2, verdict, latency_ms; quantities a variant
  /// does not produce are null.
  nlohmann::json to_json() const;
};

/// Applies the variant's decision rule to scores.
ReconstructionReport decide(const Scores& scores, double tau, double beta, Ablation ablation);

/// Inference over a loaded bundle.
class Detector {
 public:
  explicit Detector(ModelBundle bundle);

  const ModelBundle& bundle() const noexcept { return bundle_; }
  const Model<float>& model() const noexcept { return model_; }
  void set_tau(double tau) { bundle_.tau = tau; }

  PreparedPage prepare(const RawPage& page) const;
  Scores score(const PreparedPage& page) const { return score_page(model_, page); }
  ReconstructionReport decide(const Scores& s) const {
    return specnet::decide(s, bundle_.tau, bundle_.beta, bundle_.config.ablation);
  }

  /// End to end, parse through verdict; latency covers the whole call.
  ReconstructionReport predict(const RawPage& page) const;

 private:
  ModelBundle bundle_;
  Model<float> model_;
};

struct Evaluation {
  MetricsReport metrics;
  std::vector<ReconstructionReport> reports;
  std::vector<std::string> errors;
};

/// Predicts every page (in parallel when threads > 1, results in input
/// order) and scores the labeled ones. Throws Error(EmptyDataset) when no
/// labeled page could be processed.
Evaluation evaluate(const Detector& detector, std::span<const RawPage> pages, int threads = 1);

}  // namespace specnet
