#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "specnet/config.hpp"
#include "specnet/nn/tape.hpp"
#include "specnet/vocabulary.hpp"

namespace specnet {

struct TrainingMetadata {
  std::uint64_t seed = 0;
  int epochs_run = 0;
  int best_epoch = 0;
  double validation_macro_f1 = 0;
  double validation_accuracy = 0;
  double calibration_f1 = 0;
  bool embedding_fallback = false;
  std::size_t train_pages = 0;
  std::size_t validation_pages = 0;

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

/// Everything needed to run inference: configuration, vocabulary, the
/// embedding table, all learned parameters, and the calibrated threshold.
struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  TrainConfig config;
  TokenVocabulary vocabulary;
  nn::Matrix<float> embeddings;
  nn::ParameterStore<float> parameters;
  double tau = 0;
  double beta = 1;
  TrainingMetadata metadata;
};

/// Bitwise comparison of every field and tensor.
bool identical(const ModelBundle& a, const ModelBundle& b);

/// Layout: the line "SPECNETB", a line with the header length in bytes, a
/// JSON header (version, config, metadata, vocabulary, tau, beta, tensor
/// table, checksum), then little-endian float32 tensor data.
std::string serialize_bundle(const ModelBundle& bundle);

/// Throws Error(UnsupportedVersion) for another format version and
/// Error(CorruptBundle) for anything malformed, truncated or failing the
/// checksum.
ModelBundle deserialize_bundle(std::string_view bytes);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

}  // namespace specnet
