#include "specnet/detector.hpp"

#include <chrono>

#include "specnet/corpus.hpp"
#include "specnet/parallel.hpp"

namespace specnet {

Scores score_page(const Model<float>& model, const PreparedPage& page) {
  nn::Tape<float> tape(false);
  auto r = model.forward(tape, page);
  Scores s;
  if (r.epsilon) s.epsilon = static_cast<double>(r.epsilon->item());
  if (r.prob2) s.prob2 = static_cast<double>(r.prob2->item());
  if (r.delta) {
    const auto& d = r.delta->value();
    s.delta.assign(d.data(), d.data() + d.size());
  }
  return s;
}

ReconstructionReport decide(const Scores& s, double tau, double beta, Ablation ablation) {
  ReconstructionReport r;
  r.epsilon = s.epsilon;
  r.delta = s.delta;
  r.prob2 = s.prob2;
  if (s.epsilon) r.prob1 = prob_threshold(*s.epsilon, tau, beta);
  switch (decision_rule(ablation)) {
    case DecisionRule::Ensemble: r.verdict = ensemble_decide(*r.prob1, *r.prob2).verdict; break;
    case DecisionRule::ThresholdOnly: r.verdict = single_decide(*r.prob1).verdict; break;
    case DecisionRule::MlpOnly: r.verdict = single_decide(*r.prob2).verdict; break;
  }
  return r;
}

nlohmann::json ReconstructionReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"epsilon", opt(epsilon)},
          {"prob1", opt(prob1)},
          {"prob2", opt(prob2)},
          {"verdict", verdict},
          {"latency_ms", latency_ms}};
}

Detector::Detector(ModelBundle bundle)
    : bundle_(std::move(bundle)), model_(bundle_.config, bundle_.embeddings, bundle_.parameters) {}

PreparedPage Detector::prepare(const RawPage& page) const {
  return prepare_page(ingest_page(page, bundle_.config), bundle_.vocabulary);
}

ReconstructionReport Detector::predict(const RawPage& page) const {
  const auto start = std::chrono::steady_clock::now();
  PreparedPage prepared = prepare(page);
  ReconstructionReport r = decide(score(prepared));
  r.nodes = prepared.size();
  r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Evaluation evaluate(const Detector& detector, std::span<const RawPage> pages, int threads) {
  std::vector<std::optional<ReconstructionReport>> slots(pages.size());
  std::vector<std::string> failures(pages.size());
  parallel_for(pages.size(), threads, [&](std::size_t i) {
    try {
      slots[i] = detector.predict(pages[i]);
    } catch (const Error& e) {
      failures[i] = pages[i].source + ": " + e.what();
    }
  });

  Evaluation out;
  std::vector<int> labels, verdicts;
  std::vector<double> latencies;
  std::vector<DiagnosticSample> diagnostic;
  const bool ensemble = decision_rule(detector.bundle().config.ablation) == DecisionRule::Ensemble;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (!slots[i]) {
      out.errors.push_back(std::move(failures[i]));
      continue;
    }
    const auto& r = *slots[i];
    latencies.push_back(r.latency_ms);
    if (pages[i].label) {
      labels.push_back(*pages[i].label);
      verdicts.push_back(r.verdict);
      if (ensemble) diagnostic.push_back({*pages[i].label, single_decide(*r.prob1).verdict, *r.prob2});
    }
    out.reports.push_back(r);
  }
  out.metrics = compute_metrics(labels, verdicts);
  if (ensemble) out.metrics.diagnostic = complementarity(diagnostic);
  out.metrics.latency = summarize_latency(latencies);
  return out;
}

}  // namespace specnet
