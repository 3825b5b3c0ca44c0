#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "specnet/config.hpp"
#include "specnet/model/backbone.hpp"
#include "specnet/model/classifier.hpp"
#include "specnet/model/domain_encoder.hpp"
#include "specnet/model/specular.hpp"

namespace specnet {

/// A page reduced to what the network consumes: tree shape plus one
/// embedding row per node. When a domain is present its node is the last
/// one and its row entry is unused.
struct PreparedPage {
  ParentArray parent;
  std::vector<std::size_t> rows;
  std::optional<std::string> domain;
  std::optional<InternalLabel> label;

  std::size_t size() const noexcept { return parent.size(); }
};

enum class DecisionRule { Ensemble, ThresholdOnly, MlpOnly };

inline DecisionRule decision_rule(Ablation a) {
  switch (a) {
    case Ablation::NoClassificationLoss: return DecisionRule::ThresholdOnly;
    case Ablation::NoReconstructionLoss:
    case Ablation::NoDecoder:
    case Ablation::NoAutoencoder: return DecisionRule::MlpOnly;
    default: return DecisionRule::Ensemble;
  }
}

/// Whether the variant produces a reconstruction error at all.
inline bool has_reconstruction(Ablation a) { return a != Ablation::NoDecoder && a != Ablation::NoAutoencoder; }
inline bool has_error_mlp(Ablation a) { return a != Ablation::NoClassificationLoss; }

template <class T>
struct ForwardResult {
  std::optional<nn::Var<T>> epsilon;
  std::optional<nn::Var<T>> delta;
  std::optional<nn::Var<T>> prob2;
  std::optional<nn::Var<T>> features;        // X entering the autoencoder
  std::optional<nn::Var<T>> reconstruction;  // X-hat
};

/// Structural by-products of one forward pass, for inspection.
struct ForwardTrace {
  PooledTree pooled;
  SpecularGraph graph;
  UpdateLog encoder;
  UpdateLog decoder;
};

struct LinearLayer {
  std::size_t weight = 0;
  std::size_t bias = 0;
};

template <class T>
class Model {
 public:
  /// Freshly initialized parameters.
  Model(TrainConfig config, nn::Matrix<T> embeddings, std::uint64_t seed)
      : config_(std::move(config)), embeddings_(std::move(embeddings)) {
    Rng rng(seed);
    build(rng);
  }

  /// Parameters restored from `params`, which must match this
  /// configuration's layout name for name and shape for shape.
  Model(TrainConfig config, nn::Matrix<T> embeddings, const nn::ParameterStore<T>& params)
      : config_(std::move(config)), embeddings_(std::move(embeddings)) {
    Rng rng(0);
    build(rng);
    if (params.size() != store_.size()) {
      throw Error(ErrorKind::CorruptBundle, "parameter count does not match configuration");
    }
    for (std::size_t i = 0; i < store_.size(); ++i) {
      const auto& src = params[i];
      auto& dst = store_[i];
      if (src.name != dst.name || src.value.rows() != dst.value.rows() || src.value.cols() != dst.value.cols()) {
        throw Error(ErrorKind::CorruptBundle, "parameter " + src.name + " does not match configuration");
      }
      dst.value = src.value;
    }
  }

  const TrainConfig& config() const noexcept { return config_; }
  const nn::Matrix<T>& embeddings() const noexcept { return embeddings_; }
  nn::ParameterStore<T>& parameters() noexcept { return store_; }
  const nn::ParameterStore<T>& parameters() const noexcept { return store_; }
  T slope() const { return config_.activation == Activation::Relu ? T(0) : static_cast<T>(config_.leaky_slope); }

  nn::Var<T> featurize(nn::Tape<T>& t, const PreparedPage& page) const {
    const std::size_t n = page.size();
    const bool with_domain = page.domain.has_value() && domain_.has_value();
    const std::size_t tokens = with_domain ? n - 1 : n;
    nn::Matrix<T> rows(static_cast<Eigen::Index>(tokens), embeddings_.cols());
    for (std::size_t i = 0; i < tokens; ++i) rows.row(static_cast<Eigen::Index>(i)) = embeddings_.row(static_cast<Eigen::Index>(page.rows[i]));
    nn::Var<T> x = t.constant(std::move(rows));
    if (!with_domain) return x;
    nn::Var<T> d = encode_domain(t, store_, *domain_, *page.domain);
    return tokens == 0 ? d : nn::concat_rows(std::vector<nn::Var<T>>{x, d});
  }

  nn::Var<T> gcn_stack(nn::Tape<T>& t, nn::Var<T> x, const ParentArray& parent) const {
    auto adjacency = normalized_adjacency<T>(parent);
    for (const auto& layer : gcn_) {
      x = nn::leaky_relu(nn::linear(nn::spmm(adjacency, x), t.parameter(store_, layer.weight),
                                    t.parameter(store_, layer.bias)),
                         slope());
    }
    return x;
  }

  nn::Var<T> error_mlp(nn::Tape<T>& t, nn::Var<T> input) const {
    for (std::size_t l = 0; l < mlp_.size(); ++l) {
      input = nn::linear(input, t.parameter(store_, mlp_[l].weight), t.parameter(store_, mlp_[l].bias));
      input = l + 1 < mlp_.size() ? nn::leaky_relu(input, slope()) : nn::sigmoid(input);
    }
    return input;
  }

  ForwardResult<T> forward(nn::Tape<T>& t, const PreparedPage& page, ForwardTrace* trace = nullptr) const {
    const Ablation ablation = config_.ablation;
    nn::Var<T> x = featurize(t, page);
    x = nn::layer_norm(x, t.parameter(store_, norm_gain_), t.parameter(store_, norm_shift_));
    if (ablation != Ablation::NoBaseGnn) x = gcn_stack(t, x, page.parent);

    ForwardResult<T> out;
    if (ablation == Ablation::NoAutoencoder) {
      out.prob2 = error_mlp(t, nn::col_mean(x));
      return out;
    }

    nn::Var<T> scores = nn::projection_score(x, t.parameter(store_, *projection_));
    std::vector<double> s(static_cast<std::size_t>(scores.rows()));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(scores.value()(static_cast<Eigen::Index>(i), 0));
    std::vector<std::size_t> kept = select_topk(s, pool_size(page.size(), config_.pool_ratio));
    std::uint64_t bits = 0;
    for (auto k : kept) bits = bits * 1000003 + k;
    t.note_branch(bits);
    std::vector<Eigen::Index> rows(kept.begin(), kept.end());
    PooledTree pooled = restore_connectivity(page.parent, std::move(kept));
    nn::Var<T> gated = nn::scale_rows(nn::gather_rows(x, rows), nn::tanh(nn::gather_rows(scores, rows)));
    SpecularGraph graph = build_mirror(pooled);

    UpdateLog* enc_log = trace ? &trace->encoder : nullptr;
    UpdateLog* dec_log = trace ? &trace->decoder : nullptr;
    auto encoded = encode(gated, pooled, graph, t.parameter(store_, encoder_->weight),
                          t.parameter(store_, encoder_->bias), slope(), enc_log);
    out.features = gated;
    if (ablation == Ablation::NoDecoder) {
      out.prob2 = error_mlp(t, encoded.root);
    } else {
      nn::Var<T> x_hat = decode(gated, encoded.root, pooled, graph, t.parameter(store_, decoder_->weight),
                                t.parameter(store_, decoder_->bias), slope(), dec_log);
      auto err = reconstruction_error(gated, x_hat, config_.root_in_error);
      out.reconstruction = x_hat;
      out.epsilon = err.epsilon;
      out.delta = err.delta;
      if (has_error_mlp(ablation)) out.prob2 = error_mlp(t, err.delta);
    }
    if (trace) {
      trace->pooled = std::move(pooled);
      trace->graph = std::move(graph);
    }
    return out;
  }

  /// Training objective for one sample under the configured variant.
  nn::Var<T> loss(nn::Tape<T>& t, const ForwardResult<T>& r, InternalLabel y) const {
    switch (config_.ablation) {
      case Ablation::NoClassificationLoss: return loss_reconstruction(*r.epsilon, y);
      case Ablation::NoReconstructionLoss:
      case Ablation::NoDecoder:
      case Ablation::NoAutoencoder: return loss_classification(*r.prob2, y);
      default:
        return multitask_loss(loss_reconstruction(*r.epsilon, y), loss_classification(*r.prob2, y),
                              t.parameter(store_, *w1_), t.parameter(store_, *w2_));
    }
  }

  std::optional<double> loss_weight(int which) const {
    auto idx = which == 1 ? w1_ : w2_;
    if (!idx) return std::nullopt;
    return static_cast<double>(store_[*idx].value(0, 0));
  }

 private:
  void build(Rng& rng) {
    const double a = config_.leaky_slope;
    const int f = config_.feature_dim;
    if (embeddings_.cols() != f) throw Error(ErrorKind::ShapeError, "embedding width must equal feature_dim");
    const Ablation ablation = config_.ablation;
    if (config_.domain_enabled()) {
      domain_ = add_domain_encoder<T>(store_, DomainCharset::shipped().symbols(), config_.char_embedding_dim,
                                      config_.lstm_hidden, config_.lstm_layers, a, rng);
    }
    norm_gain_ = store_.add("norm.gain", nn::Matrix<T>::Ones(1, f));
    norm_shift_ = store_.add("norm.shift", nn::Matrix<T>::Zero(1, f));
    if (ablation != Ablation::NoBaseGnn) {
      int in = f;
      for (int l = 0; l < config_.gcn_layers; ++l) {
        const int out = l + 1 == config_.gcn_layers ? f : config_.gcn_hidden;
        const std::string prefix = "gcn" + std::to_string(l);
        LinearLayer layer;
        layer.weight = store_.add(prefix + ".weight", he_uniform<T>(out, in, in, a, rng));
        layer.bias = store_.add(prefix + ".bias", nn::Matrix<T>::Zero(1, out));
        gcn_.push_back(layer);
        in = out;
      }
    }
    if (ablation != Ablation::NoAutoencoder) {
      projection_ = store_.add("pool.projection", he_uniform<T>(1, f, f, a, rng));
      encoder_ = LinearLayer{store_.add("encoder.weight", he_uniform<T>(f, 2 * f, 2 * f, a, rng)),
                             store_.add("encoder.bias", nn::Matrix<T>::Zero(1, f))};
      if (ablation != Ablation::NoDecoder) {
        decoder_ = LinearLayer{store_.add("decoder.weight", he_uniform<T>(f, 2 * f, 2 * f, a, rng)),
                               store_.add("decoder.bias", nn::Matrix<T>::Zero(1, f))};
      }
    }
    if (has_error_mlp(ablation)) {
      int in = f;
      for (std::size_t l = 0; l < config_.mlp_layers.size(); ++l) {
        const int out = config_.mlp_layers[l];
        const std::string prefix = "mlp" + std::to_string(l);
        mlp_.push_back(LinearLayer{store_.add(prefix + ".weight", he_uniform<T>(out, in, in, a, rng)),
                                   store_.add(prefix + ".bias", nn::Matrix<T>::Zero(1, out))});
        in = out;
      }
    }
    if (decision_rule(ablation) == DecisionRule::Ensemble) {
      w1_ = store_.add("loss.w1", nn::Matrix<T>::Zero(1, 1));
      w2_ = store_.add("loss.w2", nn::Matrix<T>::Zero(1, 1));
    }
  }

  TrainConfig config_;
  nn::Matrix<T> embeddings_;
  nn::ParameterStore<T> store_;
  std::optional<DomainEncoderLayout> domain_;
  std::size_t norm_gain_ = 0;
  std::size_t norm_shift_ = 0;
  std::vector<LinearLayer> gcn_;
  std::optional<std::size_t> projection_;
  std::optional<LinearLayer> encoder_;
  std::optional<LinearLayer> decoder_;
  std::vector<LinearLayer> mlp_;
  std::optional<std::size_t> w1_;
  std::optional<std::size_t> w2_;
};

}  // namespace specnet
