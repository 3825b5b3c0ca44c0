#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "specnet/nn/ops.hpp"

namespace specnet {

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Parent array of a rooted tree where node 0 is the root and every parent
/// index is smaller than its child's.
using ParentArray = std::vector<std::size_t>;

inline std::vector<std::size_t> depths_of(std::span<const std::size_t> parent) {
  std::vector<std::size_t> depth(parent.size(), 0);
  for (std::size_t v = 1; v < parent.size(); ++v) depth[v] = depth[parent[v]] + 1;
  return depth;
}

inline std::vector<std::vector<std::size_t>> children_of(std::span<const std::size_t> parent) {
  std::vector<std::vector<std::size_t>> children(parent.size());
  for (std::size_t v = 1; v < parent.size(); ++v) children[parent[v]].push_back(v);
  return children;
}

/// Tree over the nodes that survived pooling. Pooled index i refers to
/// original node kept[i]; kept is ascending so kept[0] is the root.
struct PooledTree {
  std::vector<std::size_t> kept;
  ParentArray parent;  // pooled indices, kNoParent for the root
  std::vector<std::size_t> depth;

  std::size_t size() const noexcept { return kept.size(); }
};

/// max(1, ceil(ratio * n)), robust to ratio * n landing a rounding error
/// above an integer.
inline std::size_t pool_size(std::size_t n, double ratio) {
  if (n == 0) return 0;
  double raw = ratio * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(k, 1, n);
}

/// Indices of the k best scores (ties to the lower index), with the root
/// swapped in for the weakest survivor if it was not selected. Ascending.
inline std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  if (!order.empty() && std::find(order.begin(), order.end(), std::size_t{0}) == order.end()) order.back() = 0;
  std::sort(order.begin(), order.end());
  return order;
}

/// Re-parents each kept node to its nearest kept proper ancestor.
inline PooledTree restore_connectivity(std::span<const std::size_t> parent, std::vector<std::size_t> kept) {
  std::vector<std::size_t> pooled_index(parent.size(), kNoParent);
  for (std::size_t i = 0; i < kept.size(); ++i) pooled_index[kept[i]] = i;
  // nearest_kept[v]: pooled index of the closest kept node on the path from
  // v to the root, v included. Parents precede children, so one sweep works.
  std::vector<std::size_t> nearest_kept(parent.size(), kNoParent);
  for (std::size_t v = 0; v < parent.size(); ++v) {
    if (pooled_index[v] != kNoParent) nearest_kept[v] = pooled_index[v];
    else if (v > 0) nearest_kept[v] = nearest_kept[parent[v]];
  }
  PooledTree out;
  out.parent.assign(kept.size(), kNoParent);
  for (std::size_t i = 1; i < kept.size(); ++i) out.parent[i] = nearest_kept[parent[kept[i]]];
  out.depth = depths_of(out.parent);
  out.kept = std::move(kept);
  return out;
}

/// D^-1/2 (A + I) D^-1/2 with tree edges taken as undirected.
template <class T>
std::shared_ptr<const nn::SparseMatrix<T>> normalized_adjacency(std::span<const std::size_t> parent) {
  const std::size_t n = parent.size();
  std::vector<T> degree(n, T(1));
  for (std::size_t v = 1; v < n; ++v) {
    degree[v] += T(1);
    degree[parent[v]] += T(1);
  }
  std::vector<Eigen::Triplet<T>> entries;
  entries.reserve(3 * n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto iv = static_cast<Eigen::Index>(v);
    entries.emplace_back(iv, iv, T(1) / degree[v]);
    if (v == 0) continue;
    const auto ip = static_cast<Eigen::Index>(parent[v]);
    const T w = T(1) / std::sqrt(degree[v] * degree[parent[v]]);
    entries.emplace_back(iv, ip, w);
    entries.emplace_back(ip, iv, w);
  }
  auto a = std::make_shared<nn::SparseMatrix<T>>(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  a->setFromTriplets(entries.begin(), entries.end());
  return a;
}

}  // namespace specnet
