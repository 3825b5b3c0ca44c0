#include <gtest/gtest.h>

#include "specnet/model/model.hpp"
#include "support.hpp"

namespace specnet {
namespace {

using nn::Matrix;
using testing::random_matrix;
using testing::random_parent;

Matrix<double> dense_adjacency(const ParentArray& parent) {
  const auto n = static_cast<Eigen::Index>(parent.size());
  Matrix<double> a = Matrix<double>::Identity(n, n);
  for (std::size_t v = 1; v < parent.size(); ++v) {
    a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(parent[v])) = 1;
    a(static_cast<Eigen::Index>(parent[v]), static_cast<Eigen::Index>(v)) = 1;
  }
  Eigen::VectorXd d = a.rowwise().sum().cwiseSqrt().cwiseInverse();
  return d.asDiagonal() * a * d.asDiagonal();
}

Matrix<double> leaky(const Matrix<double>& m, double slope) {
  return m.unaryExpr([slope](double v) { return v > 0 ? v : slope * v; });
}

TEST(Gcn, PathGraphMatchesDenseEvaluation) {
  const ParentArray path = {kNoParent, 0, 1, 2};
  Rng rng(21);
  Matrix<double> x = random_matrix(4, 3, rng);
  std::vector<Matrix<double>> w = {random_matrix(5, 3, rng), random_matrix(3, 5, rng)};
  std::vector<Matrix<double>> b = {random_matrix(1, 5, rng), random_matrix(1, 3, rng)};

  nn::Tape<double> t;
  auto adjacency = normalized_adjacency<double>(path);
  auto h = t.constant(x);
  for (std::size_t l = 0; l < w.size(); ++l) {
    h = nn::leaky_relu(nn::linear(nn::spmm(adjacency, h), t.constant(w[l]), t.constant(b[l])), 0.01);
  }

  const Matrix<double> a = dense_adjacency(path);
  Matrix<double> expect = x;
  for (std::size_t l = 0; l < w.size(); ++l) {
    Matrix<double> z = a * expect * w[l].transpose();
    z.rowwise() += b[l].row(0);
    expect = leaky(z, 0.01);
  }
  EXPECT_TRUE(h.value().isApprox(expect, 1e-12));
  EXPECT_TRUE(Matrix<double>(*adjacency).isApprox(a, 1e-15));
}

TrainConfig small_config(int f = 4) {
  TrainConfig c;
  c.feature_dim = f;
  c.lstm_hidden = f;
  c.ae_linear_width = f;
  c.gcn_hidden = 6;
  c.char_embedding_dim = 3;
  c.mlp_layers = {3, 1};
  return c;
}

TEST(Gcn, SingleNodeIsThreeLayersOnTheLoneRow) {
  TrainConfig c = small_config();
  Rng rng(1);
  Model<double> model(c, random_matrix(5, 4, rng), 3);
  nn::Tape<double> t;
  Matrix<double> x = random_matrix(1, 4, rng);
  auto out = model.gcn_stack(t, t.constant(x), ParentArray{kNoParent});
  Matrix<double> h = x;
  for (int l = 0; l < 3; ++l) {
    const auto& p = model.parameters();
    const std::string prefix = "gcn" + std::to_string(l);
    Matrix<double> z = h * p[p.index_of(prefix + ".weight")].value.transpose() + p[p.index_of(prefix + ".bias")].value;
    h = leaky(z, c.leaky_slope);
  }
  EXPECT_TRUE(out.value().isApprox(h, 1e-12));
}

TEST(Gcn, PermutationEquivariant) {
  // Star with three leaves; swapping two leaves permutes their output rows.
  TrainConfig c = small_config();
  Rng rng(2);
  Model<double> model(c, random_matrix(5, 4, rng), 4);
  const ParentArray star = {kNoParent, 0, 0, 0};
  Matrix<double> x = random_matrix(4, 4, rng);
  Matrix<double> swapped = x;
  swapped.row(1).swap(swapped.row(3));
  nn::Tape<double> t;
  Matrix<double> a = model.gcn_stack(t, t.constant(x), star).value();
  Matrix<double> b = model.gcn_stack(t, t.constant(swapped), star).value();
  a.row(1).swap(a.row(3));
  EXPECT_TRUE(a.isApprox(b, 1e-12));
}

TEST(Pooling, SizeLaw) {
  EXPECT_EQ(pool_size(5, 0.2), 1u);
  EXPECT_EQ(pool_size(10, 0.2), 2u);
  EXPECT_EQ(pool_size(11, 0.2), 3u);
  EXPECT_EQ(pool_size(1, 0.2), 1u);
  EXPECT_EQ(pool_size(100, 0.3), 30u);
  EXPECT_EQ(pool_size(7, 1.0), 7u);
}

TEST(Pooling, RootForcedAndSwappedIn) {
  std::vector<double> five = {-5, 1, 2, 3, 4};
  EXPECT_EQ(select_topk(five, pool_size(5, 0.2)), (std::vector<std::size_t>{0}));

  std::vector<double> ten = {-9, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(select_topk(ten, pool_size(10, 0.2)), (std::vector<std::size_t>{0, 9}));

  std::vector<double> flat(10, 0.5);
  EXPECT_EQ(select_topk(flat, 3), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Pooling, RestoreConnectivityExamples) {
  const ParentArray chain = {kNoParent, 0, 1};
  EXPECT_EQ(restore_connectivity(chain, {0, 1, 2}).parent, chain);
  EXPECT_EQ(restore_connectivity(chain, {0, 2}).parent, (ParentArray{kNoParent, 0}));
  const ParentArray star = {kNoParent, 0, 0, 0, 0};
  EXPECT_EQ(restore_connectivity(star, {0, 2, 4}).parent, (ParentArray{kNoParent, 0, 0}));
}

TEST(Pooling, RandomTreesMatchAncestorWalk) {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.index(400);
    ParentArray parent = random_parent(n, rng, rng.uniform());
    std::vector<double> scores(n);
    for (auto& s : scores) s = rng.normal();
    auto kept = select_topk(scores, pool_size(n, 0.2));
    ASSERT_EQ(kept.size(), std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.2 * n - 1e-9))));
    ASSERT_EQ(kept.front(), 0u);
    PooledTree pooled = restore_connectivity(parent, kept);
    EXPECT_EQ(pooled.parent, testing::ancestor_walk(parent, kept));
    for (std::size_t i = 1; i < pooled.size(); ++i) EXPECT_LT(pooled.parent[i], i);
  }
}

}  // namespace
}  // namespace specnet
