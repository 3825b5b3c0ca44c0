#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specnet {

enum class Ablation {
  None,
  NoClassificationLoss,
  NoReconstructionLoss,
  NoDecoder,
  NoAutoencoder,
  NoBaseGnn,
  NoDomain,
};

std::string_view to_string(Ablation a);
/// Throws Error(ConfigError) for an unknown name.
Ablation parse_ablation(std::string_view name);
const std::vector<Ablation>& all_ablations();

enum class Activation { LeakyRelu, Relu };
enum class OptimizerKind { Adam, Sgd };

struct TrainConfig {
  // architecture
  int feature_dim = 32;
  int gcn_layers = 3;
  int gcn_hidden = 64;
  int lstm_layers = 1;
  int lstm_hidden = 32;
  int char_embedding_dim = 16;
  double pool_ratio = 0.2;
  int ae_linear_width = 32;
  std::vector<int> mlp_layers = {16, 1};
  Activation activation = Activation::LeakyRelu;
  double leaky_slope = 0.01;
  bool root_in_error = true;

  // optimization
  OptimizerKind optimizer = OptimizerKind::Adam;
  int batch_size = 8;
  double learning_rate = 1e-3;
  int epochs = 100;
  int patience = 10;
  double schedule_t0 = 10;
  double schedule_mult = 2;
  double schedule_floor = 1e-5;
  std::uint64_t seed = 1;

  // embeddings
  int w2v_epochs = 5;
  int w2v_negatives = 5;
  double w2v_learning_rate = 0.025;

  // pipeline
  bool use_domain = true;
  Ablation ablation = Ablation::None;
  std::optional<double> beta;  // default depends on domain usage
  std::size_t max_nodes = 200'000;
  int threads = 1;

  bool domain_enabled() const { return use_domain && ablation != Ablation::NoDomain; }
  double effective_beta() const { return beta ? *beta : (domain_enabled() ? 1.0 : 10.0); }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Sets one key. Throws Error(ConfigError) naming the key for unknown keys
/// and unparsable values.
void set_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// Rejects structurally invalid settings (naming the key) and returns
/// warnings for values outside the recommended tuning ranges.
std::vector<std::string> validate_config(const TrainConfig& config);

/// Parses `key = value` lines; `#` starts a comment. Validates the result.
TrainConfig parse_config(std::string_view text, std::vector<std::string>* warnings = nullptr);
TrainConfig load_config(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Canonical text form; parse_config(to_text(c)) == c.
std::string to_text(const TrainConfig& config);

}  // namespace specnet
