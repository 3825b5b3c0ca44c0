#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "specnet/model/backbone.hpp"
#include "specnet/nn/ops.hpp"

namespace specnet {

/// Pooled tree fused at the root with a mirrored copy of its non-root nodes.
///
/// Encoder nodes keep their pooled indices 0..N-1. The mirror of encoder
/// node v >= 1 is node N + v - 1, and the root is shared.
struct SpecularGraph {
  std::size_t encoder_nodes = 0;
  ParentArray parent;  // over all 2N-1 nodes; mirrored parents are mirrored too
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // directed: source -> target
  std::vector<std::vector<std::size_t>> encoder_levels;    // deepest first, encoder ids
  std::vector<std::vector<std::size_t>> mirror_levels;     // shallowest first, mirrored ids, root excluded

  std::size_t node_count() const noexcept { return parent.size(); }
  std::size_t mirror_of(std::size_t v) const { return v == 0 ? 0 : encoder_nodes + v - 1; }
  std::size_t original_of(std::size_t m) const { return m < encoder_nodes ? m : m - encoder_nodes + 1; }
};

inline SpecularGraph build_mirror(const PooledTree& tree) {
  SpecularGraph g;
  const std::size_t n = tree.size();
  g.encoder_nodes = n;
  if (n == 0) return g;
  g.parent.assign(2 * n - 1, kNoParent);
  std::size_t max_depth = 0;
  for (std::size_t v = 1; v < n; ++v) {
    g.parent[v] = tree.parent[v];
    g.parent[g.mirror_of(v)] = g.mirror_of(tree.parent[v]);
    g.edges.emplace_back(v, tree.parent[v]);
    max_depth = std::max(max_depth, tree.depth[v]);
  }
  for (std::size_t v = 1; v < n; ++v) g.edges.emplace_back(g.mirror_of(tree.parent[v]), g.mirror_of(v));
  std::vector<std::vector<std::size_t>> by_depth(max_depth + 1);
  for (std::size_t v = 0; v < n; ++v) by_depth[tree.depth[v]].push_back(v);
  for (std::size_t d = max_depth + 1; d-- > 0;) g.encoder_levels.push_back(by_depth[d]);
  for (std::size_t d = 1; d <= max_depth; ++d) {
    std::vector<std::size_t> level;
    for (auto v : by_depth[d]) level.push_back(g.mirror_of(v));
    g.mirror_levels.push_back(std::move(level));
  }
  return g;
}

/// Order in which nodes were updated during a pass.
struct UpdateLog {
  std::vector<std::size_t> order;
};

template <class T>
nn::Var<T> activate(nn::Var<T> x, T slope) {
  return nn::leaky_relu(x, slope);
}

template <class T>
struct EncodeResult {
  nn::Var<T> states;  // N x F, encoder-node order
  nn::Var<T> root;    // 1 x F bottleneck
};

/// Bottom-up pass: each level aggregates its children's updated states by
/// attention, then updates from [message | own input features].
template <class T>
EncodeResult<T> encode(nn::Var<T> x, const PooledTree& tree, const SpecularGraph& g, nn::Var<T> w, nn::Var<T> b,
                       T slope, UpdateLog* log = nullptr) {
  using nn::Var;
  nn::detail::require(static_cast<std::size_t>(x.rows()) == tree.size(), "encode", "feature rows must match tree");
  nn::Tape<T>& t = *x.tape;
  const std::size_t n = tree.size();
  std::vector<std::size_t> row_in_level(n, 0);
  std::vector<Var<T>> outputs;
  std::vector<Eigen::Index> position(n, 0);
  Eigen::Index stacked = 0;
  const std::vector<std::size_t>* previous = nullptr;
  for (const auto& level : g.encoder_levels) {
    std::vector<Eigen::Index> rows(level.begin(), level.end());
    Var<T> own = nn::gather_rows(x, rows);
    Var<T> message;
    if (previous == nullptr) {
      message = t.constant(nn::Matrix<T>::Zero(own.rows(), own.cols()));
    } else {
      std::vector<std::vector<Eigen::Index>> groups(level.size());
      std::vector<std::size_t> slot(n, kNoParent);
      for (std::size_t j = 0; j < level.size(); ++j) slot[level[j]] = j;
      for (auto c : *previous) {
        groups[slot[tree.parent[c]]].push_back(static_cast<Eigen::Index>(row_in_level[c]));
      }
      message = nn::attention_mean(outputs.back(), own, std::move(groups));
    }
    Var<T> updated = activate(nn::linear(nn::concat_cols(message, own), w, b), slope);
    for (std::size_t j = 0; j < level.size(); ++j) {
      row_in_level[level[j]] = j;
      position[level[j]] = stacked + static_cast<Eigen::Index>(j);
      if (log) log->order.push_back(level[j]);
    }
    stacked += static_cast<Eigen::Index>(level.size());
    outputs.push_back(updated);
    previous = &level;
  }
  Var<T> all = outputs.size() == 1 ? outputs.front() : nn::concat_rows(outputs);
  Var<T> states = nn::gather_rows(all, position);
  return {states, nn::gather_rows(outputs.back(), {0})};
}

/// Top-down pass over the mirror: each mirrored node is updated from its
/// parent's decoded state and its own pre-encoding features. Returns X-hat in
/// encoder-node order with the root row equal to the bottleneck.
template <class T>
nn::Var<T> decode(nn::Var<T> x, nn::Var<T> root_state, const PooledTree& tree, const SpecularGraph& g,
                  nn::Var<T> w, nn::Var<T> b, T slope, UpdateLog* log = nullptr) {
  using nn::Var;
  const std::size_t n = tree.size();
  std::vector<Var<T>> outputs{root_state};
  std::vector<Eigen::Index> row_in_level(n, 0);
  std::vector<Eigen::Index> position(n, 0);
  Eigen::Index stacked = 1;
  for (const auto& level : g.mirror_levels) {
    std::vector<Eigen::Index> parents;
    std::vector<Eigen::Index> rows;
    for (auto m : level) {
      const std::size_t v = g.original_of(m);
      parents.push_back(row_in_level[tree.parent[v]]);
      rows.push_back(static_cast<Eigen::Index>(v));
    }
    Var<T> from_parent = nn::gather_rows(outputs.back(), parents);
    Var<T> own = nn::gather_rows(x, rows);
    Var<T> updated = activate(nn::linear(nn::concat_cols(from_parent, own), w, b), slope);
    for (std::size_t j = 0; j < level.size(); ++j) {
      const std::size_t v = g.original_of(level[j]);
      row_in_level[v] = static_cast<Eigen::Index>(j);
      position[v] = stacked + static_cast<Eigen::Index>(j);
      if (log) log->order.push_back(level[j]);
    }
    stacked += static_cast<Eigen::Index>(level.size());
    outputs.push_back(updated);
  }
  if (outputs.size() == 1) return root_state;
  return nn::gather_rows(nn::concat_rows(outputs), position);
}

template <class T>
struct ReconstructionError {
  nn::Var<T> errors;   // E, N x F
  nn::Var<T> epsilon;  // 1 x 1
  nn::Var<T> delta;    // 1 x F
};

/// E = (X - X_hat)^2, epsilon = mean(E), delta = column mean of E. With
/// `include_root` false the root row is left out of epsilon and delta.
template <class T>
ReconstructionError<T> reconstruction_error(nn::Var<T> x, nn::Var<T> x_hat, bool include_root = true) {
  nn::detail::require(x.rows() == x_hat.rows() && x.cols() == x_hat.cols(), "reconstruction_error",
                      nn::detail::dims(x) + " vs " + nn::detail::dims(x_hat));
  nn::Var<T> e = nn::square(nn::sub(x, x_hat));
  nn::Var<T> used = e;
  if (!include_root) {
    if (e.rows() == 1) {
      nn::Tape<T>& t = *x.tape;
      return {e, nn::scalar(t, T(0)), t.constant(nn::Matrix<T>::Zero(1, e.cols()))};
    }
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(e.rows() - 1));
    std::iota(rows.begin(), rows.end(), Eigen::Index{1});
    used = nn::gather_rows(e, rows);
  }
  return {e, nn::mean(used), nn::col_mean(used)};
}

}  // namespace specnet
