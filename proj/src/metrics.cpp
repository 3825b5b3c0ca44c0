#include "specnet/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "specnet/error.hpp"

namespace specnet {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  m.support = tp + fn;
  return m;
}

nlohmann::json class_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

nlohmann::json group_json(const ComplementarityDiagnostic::Group& g) {
  return {{"count", g.count}, {"mean_confidence", g.mean_confidence}, {"histogram", g.histogram}};
}

}  // namespace

Confusion confusion_matrix(std::span<const int> labels, std::span<const int> predictions) {
  if (labels.size() != predictions.size()) throw Error(ErrorKind::ShapeError, "labels and predictions differ in length");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == 1;
    const bool predicted = predictions[i] == 1;
    if (actual && predicted) ++c.tp;
    else if (!actual && predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsReport compute_metrics(std::span<const int> labels, std::span<const int> predictions) {
  if (labels.empty()) throw Error(ErrorKind::EmptyDataset, "no labeled pages to evaluate");
  MetricsReport r;
  r.confusion = confusion_matrix(labels, predictions);
  const auto& c = r.confusion;
  r.accuracy = ratio(c.tp + c.tn, c.total());
  r.phishing = class_metrics(c.tp, c.fp, c.fn);
  r.benign = class_metrics(c.tn, c.fn, c.fp);
  r.macro_precision = (r.phishing.precision + r.benign.precision) / 2;
  r.macro_recall = (r.phishing.recall + r.benign.recall) / 2;
  r.macro_f1 = (r.phishing.f1 + r.benign.f1) / 2;
  return r;
}

ComplementarityDiagnostic complementarity(std::span<const DiagnosticSample> samples) {
  ComplementarityDiagnostic d;
  for (const auto& s : samples) {
    const int mlp_verdict = s.prob2 > 0.5 ? 0 : 1;
    const bool threshold_ok = s.threshold_verdict == s.label;
    const bool mlp_ok = mlp_verdict == s.label;
    auto& g = threshold_ok ? (mlp_ok ? d.both_correct : d.threshold_correct_mlp_wrong)
                           : (mlp_ok ? d.threshold_wrong_mlp_correct : d.both_wrong);
    const double confidence = std::max(s.prob2, 1 - s.prob2);
    auto bin = static_cast<std::size_t>((confidence - 0.5) * 2 * ComplementarityDiagnostic::kBins);
    g.histogram[std::min(bin, ComplementarityDiagnostic::kBins - 1)]++;
    g.mean_confidence += confidence;
    ++g.count;
  }
  for (auto* g : {&d.both_correct, &d.threshold_correct_mlp_wrong, &d.threshold_wrong_mlp_correct, &d.both_wrong}) {
    if (g->count) g->mean_confidence /= static_cast<double>(g->count);
  }
  return d;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
}

LatencySummary summarize_latency(std::span<const double> ms) {
  LatencySummary s;
  if (ms.empty()) return s;
  s.mean_ms = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
  std::vector<double> v(ms.begin(), ms.end());
  s.median_ms = percentile(v, 0.5);
  s.p90_ms = percentile(std::move(v), 0.9);
  return s;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = {
      {"accuracy", accuracy},
      {"macro_f1", macro_f1},
      {"macro_precision", macro_precision},
      {"macro_recall", macro_recall},
      {"confusion", {{"tp", confusion.tp}, {"fp", confusion.fp}, {"fn", confusion.fn}, {"tn", confusion.tn}}},
      {"per_class", {{"benign", class_json(benign)}, {"phishing", class_json(phishing)}}},
  };
  if (diagnostic) {
    j["complementarity"] = {
        {"both_correct", group_json(diagnostic->both_correct)},
        {"threshold_correct_mlp_wrong", group_json(diagnostic->threshold_correct_mlp_wrong)},
        {"threshold_wrong_mlp_correct", group_json(diagnostic->threshold_wrong_mlp_correct)},
        {"both_wrong", group_json(diagnostic->both_wrong)},
    };
  }
  if (latency) j["latency_ms"] = {{"mean", latency->mean_ms}, {"median", latency->median_ms}, {"p90", latency->p90_ms}};
  return j;
}

}  // namespace specnet
