#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "specnet/bundle.hpp"
#include "specnet/config.hpp"
#include "specnet/manifest.hpp"
#include "specnet/model/classifier.hpp"

namespace specnet {

struct EpochReport {
  int epoch = 0;  // 1-based
  double train_loss = 0;
  double validation_macro_f1 = 0;
  double learning_rate = 0;
  double tau = 0;
  bool improved = false;
};

struct TrainOptions {
  std::function<void(const EpochReport&)> on_epoch;
};

struct TrainResult {
  ModelBundle bundle;
  std::vector<EpochReport> history;
  std::vector<std::string> warnings;  // pages skipped during ingestion
};

/// Full training run: vocabulary and embeddings from the training pages,
/// mini-batch optimization with early stopping on validation macro-F1,
/// restoration of the best checkpoint, and final threshold calibration.
///
/// Throws Error(EmptyDataset) when no labeled training page survives
/// ingestion, Error(CalibrationDegenerate) when validation lacks a class,
/// and Error(NonFiniteLoss) if a sample's loss stops being finite.
TrainResult train(const TrainConfig& config, std::span<const RawPage> train_pages,
                  std::span<const RawPage> validation_pages, const TrainOptions& options = {});

/// Recomputes tau on labeled validation pages, leaving every other
/// parameter untouched.
Calibration calibrate_bundle(ModelBundle& bundle, std::span<const RawPage> validation_pages, int threads = 1,
                             std::vector<std::string>* errors = nullptr);

}  // namespace specnet
