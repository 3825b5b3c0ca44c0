#include <gtest/gtest.h>

#include "specnet/model/specular.hpp"
#include "support.hpp"

namespace specnet {
namespace {

using nn::Matrix;
using nn::Tape;
using testing::random_matrix;

PooledTree pooled_from(const ParentArray& parent) {
  std::vector<std::size_t> all(parent.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return restore_connectivity(parent, all);
}

Matrix<double> leaky(const Matrix<double>& m, double slope = 0.01) {
  return m.unaryExpr([slope](double v) { return v > 0 ? v : slope * v; });
}

Matrix<double> row(std::initializer_list<double> v) {
  Matrix<double> m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

TEST(Mirror, SizeLawsAndPairing) {
  auto g1 = build_mirror(pooled_from({kNoParent}));
  EXPECT_EQ(g1.node_count(), 1u);
  EXPECT_TRUE(g1.edges.empty());
  EXPECT_TRUE(g1.mirror_levels.empty());

  auto g4 = build_mirror(pooled_from({kNoParent, 0, 0, 1}));
  EXPECT_EQ(g4.node_count(), 7u);
  EXPECT_EQ(g4.edges.size(), 6u);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.index(60);
    auto g = build_mirror(pooled_from(testing::random_parent(n, rng)));
    ASSERT_EQ(g.node_count(), 2 * n - 1);
    ASSERT_EQ(g.edges.size(), 2 * (n - 1));
    for (std::size_t u = n; u < g.node_count(); ++u) EXPECT_EQ(g.mirror_of(g.original_of(u)), u);
  }
}

// Three-node chain 0 <- 1 <- 2 with 2-dim features and hand-set weights.
struct Chain {
  PooledTree tree = pooled_from({kNoParent, 0, 1});
  SpecularGraph graph = build_mirror(tree);
  Matrix<double> x{3, 2};
  Matrix<double> w{2, 4};
  Matrix<double> b = row({0.1, -0.2});

  Chain() {
    x << 0.5, -1.0, 1.0, 2.0, -0.5, 0.25;
    w << 1, 0, 0.5, 0, 0, 1, 0, -0.5;  // [I | diag(0.5, -0.5)]
  }
};

TEST(Encode, ChainMatchesHandUnrolled) {
  Chain c;
  Tape<double> t;
  auto enc = encode(t.constant(c.x), c.tree, c.graph, t.constant(c.w), t.constant(c.b), 0.01);
  // Leaf: zero message.
  Matrix<double> h2 = leaky(row({0 + 0.5 * -0.5 + 0.1, 0 - 0.5 * 0.25 - 0.2}));
  // Single child: softmax weight 1, mean over one child.
  Matrix<double> h1 = leaky(row({h2(0, 0) + 0.5 * 1.0 + 0.1, h2(0, 1) - 0.5 * 2.0 - 0.2}));
  Matrix<double> h0 = leaky(row({h1(0, 0) + 0.5 * 0.5 + 0.1, h1(0, 1) - 0.5 * -1.0 - 0.2}));
  EXPECT_TRUE(enc.root.value().isApprox(h0, 1e-12));
  EXPECT_TRUE(Matrix<double>(enc.states.value().row(2)).isApprox(h2, 1e-12));
}

TEST(Encode, AttentionAggregation) {
  Tape<double> t;
  Matrix<double> parent = row({0.3, -0.7});
  auto single = nn::attention_mean(t.constant(row({1.5, 2.5})), t.constant(parent), {{0}});
  EXPECT_TRUE(single.value().isApprox(row({1.5, 2.5}), 1e-15));

  // Identical children get equal weights; the message is the mean of the
  // weighted rows, so three copies of c give c / 3.
  Matrix<double> same(3, 2);
  same << 1, 2, 1, 2, 1, 2;
  auto shared = nn::attention_mean(t.constant(same), t.constant(parent), {{0, 1, 2}});
  EXPECT_TRUE(shared.value().isApprox(row({1.0 / 3, 2.0 / 3}), 1e-15));
}

TEST(Decode, ChainMatchesHandUnrolled) {
  Chain c;
  Tape<double> t;
  Matrix<double> root = row({0.4, -0.3});
  auto x_hat = decode(t.constant(c.x), t.constant(root), c.tree, c.graph, t.constant(c.w), t.constant(c.b), 0.01);
  Matrix<double> d1 = leaky(row({0.4 + 0.5 * 1.0 + 0.1, -0.3 - 0.5 * 2.0 - 0.2}));
  Matrix<double> d2 = leaky(row({d1(0, 0) + 0.5 * -0.5 + 0.1, d1(0, 1) - 0.5 * 0.25 - 0.2}));
  ASSERT_EQ(x_hat.rows(), 3);
  EXPECT_TRUE(Matrix<double>(x_hat.value().row(0)).isApprox(root, 0));
  EXPECT_TRUE(Matrix<double>(x_hat.value().row(1)).isApprox(d1, 1e-12));
  EXPECT_TRUE(Matrix<double>(x_hat.value().row(2)).isApprox(d2, 1e-12));
}

TEST(Decode, DegenerateCases) {
  Tape<double> t;
  Matrix<double> root = row({0.7, 0.1});
  auto lone = pooled_from({kNoParent});
  auto g = build_mirror(lone);
  auto one = decode(t.constant(row({1, 1})), t.constant(root), lone, g, t.constant(Matrix<double>::Ones(2, 4)),
                    t.constant(row({0, 0})), 0.01);
  EXPECT_TRUE(one.value() == root);

  Chain c;
  auto zero = decode(t.constant(c.x), t.constant(root), c.tree, c.graph, t.constant(Matrix<double>::Zero(2, 4)),
                     t.constant(row({0, 0})), 0.01);
  EXPECT_TRUE(zero.value().bottomRows(2).isZero());
}

TEST(Passes, UpdateOrderIsTopologicalAndSingle) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(80);
    auto tree = pooled_from(testing::random_parent(n, rng));
    auto g = build_mirror(tree);
    Tape<double> t;
    auto x = t.constant(random_matrix(static_cast<Eigen::Index>(n), 3, rng));
    auto w = t.constant(random_matrix(3, 6, rng));
    auto b = t.constant(random_matrix(1, 3, rng));
    UpdateLog enc_log, dec_log;
    auto enc = encode(x, tree, g, w, b, 0.01, &enc_log);
    decode(x, enc.root, tree, g, w, b, 0.01, &dec_log);
    ASSERT_EQ(enc_log.order.size(), n);
    ASSERT_EQ(dec_log.order.size(), n - 1);
    std::vector<std::size_t> enc_at(n, kNoParent), dec_at(g.node_count(), kNoParent);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(enc_at[enc_log.order[i]], kNoParent);
      enc_at[enc_log.order[i]] = i;
    }
    for (std::size_t i = 0; i < dec_log.order.size(); ++i) {
      ASSERT_EQ(dec_at[dec_log.order[i]], kNoParent);
      dec_at[dec_log.order[i]] = i;
    }
    for (std::size_t v = 1; v < n; ++v) {
      EXPECT_GT(enc_at[tree.parent[v]], enc_at[v]);
      const std::size_t m = g.mirror_of(v), mp = g.parent[m];
      if (mp != 0) EXPECT_GT(dec_at[m], dec_at[mp]);
    }
  }
}

TEST(Passes, SiblingPermutationLeavesEpsilonUnchanged) {
  // Root with children 1, 2, 3; node 4 hangs under 2. Relabel 1 <-> 3.
  const ParentArray a = {kNoParent, 0, 0, 0, 2};
  Rng rng(12);
  Matrix<double> x = random_matrix(5, 3, rng);
  Matrix<double> y = x;
  y.row(1).swap(y.row(3));
  Matrix<double> w = random_matrix(3, 6, rng), we = random_matrix(3, 6, rng), b = random_matrix(1, 3, rng);
  auto run = [&](const Matrix<double>& feats) {
    auto tree = pooled_from(a);
    auto g = build_mirror(tree);
    Tape<double> t;
    auto xv = t.constant(feats);
    auto enc = encode(xv, tree, g, t.constant(we), t.constant(b), 0.01);
    auto xh = decode(xv, enc.root, tree, g, t.constant(w), t.constant(b), 0.01);
    return std::make_pair(Matrix<double>(xh.value()), reconstruction_error(xv, xh).epsilon.item());
  };
  auto [ha, ea] = run(x);
  auto [hb, eb] = run(y);
  EXPECT_NEAR(ea, eb, 1e-9);
  ha.row(1).swap(ha.row(3));
  EXPECT_TRUE(ha.isApprox(hb, 1e-9));
}

TEST(ReconstructionError, ClosedForms) {
  Tape<double> t;
  Rng rng(3);
  Matrix<double> x = random_matrix(5, 3, rng), y = random_matrix(5, 3, rng);
  auto same = reconstruction_error(t.constant(x), t.constant(x));
  EXPECT_EQ(same.epsilon.item(), 0.0);
  EXPECT_TRUE(same.delta.value().isZero());

  auto single = reconstruction_error(t.constant(row({2})), t.constant(row({0.5})));
  EXPECT_DOUBLE_EQ(single.epsilon.item(), 2.25);
  EXPECT_DOUBLE_EQ(single.delta.item(), 2.25);

  double total = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) total += (x(i, j) - y(i, j)) * (x(i, j) - y(i, j));
  auto r = reconstruction_error(t.constant(x), t.constant(y));
  EXPECT_NEAR(r.epsilon.item(), total / 15, 1e-12);
  EXPECT_NEAR(r.delta.value().mean(), total / 15, 1e-12);

  auto no_root = reconstruction_error(t.constant(x), t.constant(y), false);
  Matrix<double> e = (x - y).bottomRows(4).array().square();
  EXPECT_NEAR(no_root.epsilon.item(), e.mean(), 1e-12);
}

}  // namespace
}  // namespace specnet
