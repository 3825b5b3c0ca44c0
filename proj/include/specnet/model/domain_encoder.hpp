#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "specnet/embeddings.hpp"
#include "specnet/nn/ops.hpp"
#include "specnet/rng.hpp"

namespace specnet {

/// Uniform in +-sqrt(6 / ((1 + slope^2) * fan_in)).
template <class T>
nn::Matrix<T> he_uniform(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, double slope, Rng& rng) {
  const double bound = std::sqrt(6.0 / ((1.0 + slope * slope) * static_cast<double>(fan_in)));
  nn::Matrix<T> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.uniform(-bound, bound));
  return m;
}

template <class T>
nn::Matrix<T> normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  nn::Matrix<T> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(rng.normal());
  return m;
}

struct LstmLayer {
  std::size_t w_ih = 0;  // 4H x in, gate blocks ordered input, forget, cell, output
  std::size_t w_hh = 0;  // 4H x H
  std::size_t bias = 0;  // 1 x 4H
};

struct DomainEncoderLayout {
  std::size_t char_embedding = 0;  // symbols x E
  std::vector<LstmLayer> layers;
  int hidden = 0;
};

template <class T>
DomainEncoderLayout add_domain_encoder(nn::ParameterStore<T>& store, std::size_t symbols, int embed_dim, int hidden,
                                       int layers, double slope, Rng& rng) {
  DomainEncoderLayout layout;
  layout.hidden = hidden;
  layout.char_embedding =
      store.add("domain.char_embedding", normal_matrix<T>(static_cast<Eigen::Index>(symbols), embed_dim, rng));
  int in = embed_dim;
  for (int l = 0; l < layers; ++l) {
    const std::string prefix = "domain.lstm" + std::to_string(l);
    LstmLayer layer;
    layer.w_ih = store.add(prefix + ".w_ih", he_uniform<T>(4 * hidden, in, in, slope, rng));
    layer.w_hh = store.add(prefix + ".w_hh", he_uniform<T>(4 * hidden, hidden, hidden, slope, rng));
    nn::Matrix<T> bias = nn::Matrix<T>::Zero(1, 4 * hidden);
    bias.middleCols(hidden, hidden).setConstant(T(1));
    layer.bias = store.add(prefix + ".bias", std::move(bias));
    layout.layers.push_back(layer);
    in = hidden;
  }
  return layout;
}

/// Final hidden state of the LSTM stack run over the domain's characters,
/// 1 x hidden. The empty domain maps to the zero vector.
template <class T>
nn::Var<T> encode_domain(nn::Tape<T>& t, const nn::ParameterStore<T>& store, const DomainEncoderLayout& layout,
                         std::string_view domain, const DomainCharset& charset = DomainCharset::shipped()) {
  using nn::Var;
  const Eigen::Index h = layout.hidden;
  if (domain.empty()) return t.constant(nn::Matrix<T>::Zero(1, h));
  std::vector<Eigen::Index> chars;
  for (char c : domain) {
    const char lower = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    chars.push_back(static_cast<Eigen::Index>(charset.index(lower)));
  }
  Var<T> sequence = nn::gather_rows(t.parameter(store, layout.char_embedding), chars);
  Var<T> zero_bias = t.constant(nn::Matrix<T>::Zero(1, 4 * h));
  Var<T> last;
  for (const auto& layer : layout.layers) {
    Var<T> projected = nn::linear(sequence, t.parameter(store, layer.w_ih), t.parameter(store, layer.bias));
    Var<T> w_hh = t.parameter(store, layer.w_hh);
    std::vector<Var<T>> outputs;
    Var<T> hidden, cell;
    for (Eigen::Index step = 0; step < projected.rows(); ++step) {
      Var<T> gates = nn::gather_rows(projected, {step});
      if (step > 0) gates = nn::add(gates, nn::linear(hidden, w_hh, zero_bias));
      Var<T> i = nn::sigmoid(nn::slice_cols(gates, 0, h));
      Var<T> f = nn::sigmoid(nn::slice_cols(gates, h, h));
      Var<T> g = nn::tanh(nn::slice_cols(gates, 2 * h, h));
      Var<T> o = nn::sigmoid(nn::slice_cols(gates, 3 * h, h));
      cell = step == 0 ? nn::mul(i, g) : nn::add(nn::mul(f, cell), nn::mul(i, g));
      hidden = nn::mul(o, nn::tanh(cell));
      outputs.push_back(hidden);
    }
    sequence = outputs.size() == 1 ? outputs.front() : nn::concat_rows(outputs);
    last = hidden;
  }
  return last;
}

}  // namespace specnet
