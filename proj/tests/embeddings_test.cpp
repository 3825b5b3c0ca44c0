#include <gtest/gtest.h>

#include "specnet/corpus.hpp"
#include "specnet/embeddings.hpp"
#include "specnet/model/model.hpp"
#include "specnet/nn/grad_check.hpp"
#include "specnet/vocabulary.hpp"
#include "support.hpp"

namespace specnet {
namespace {

TEST(Vocabulary, StandardTokensPlusTwoUnknowns) {
  std::vector<DomTree> corpus = {parse_html("<div href=x></div>")};
  TokenVocabulary v = build_vocabulary(corpus);
  EXPECT_EQ(v.tags(), (std::vector<std::string>{"body", "div", "html"}));
  EXPECT_EQ(v.attributes(), (std::vector<std::string>{"href"}));
  EXPECT_EQ(v.rows(), 6u);
}

TEST(Vocabulary, NonStandardAndUnseenTokensResolveToUnknown) {
  std::vector<DomTree> corpus = {parse_html("<x-fake-widget></x-fake-widget><p></p>")};
  TokenVocabulary v = build_vocabulary(corpus);
  EXPECT_FALSE(v.contains(NodeKind::Tag, "x-fake-widget"));
  EXPECT_EQ(v.lookup(NodeKind::Tag, "x-fake-widget"), v.unknown_tag_row());
  EXPECT_FALSE(v.contains(NodeKind::Tag, "table"));
  EXPECT_EQ(v.lookup(NodeKind::Tag, "table"), v.unknown_tag_row());
  EXPECT_EQ(v.lookup(NodeKind::Attribute, "nonsense"), v.unknown_attribute_row());
  EXPECT_NE(v.lookup(NodeKind::Tag, "p"), v.unknown_tag_row());
}

TEST(Vocabulary, EmptyCorpusRejected) {
  EXPECT_THROW(build_vocabulary(std::vector<DomTree>{}), Error);
}

double cosine(const nn::Matrix<float>& m, std::size_t a, std::size_t b) {
  const auto x = m.row(static_cast<Eigen::Index>(a)).cast<double>();
  const auto y = m.row(static_cast<Eigen::Index>(b)).cast<double>();
  return x.dot(y) / (x.norm() * y.norm());
}

TEST(Word2Vec, CooccurringTokensEndUpCloser) {
  // Sentences: [a, href] many times, [table] alone, plus the html/body frame.
  std::vector<DomTree> corpus;
  for (int i = 0; i < 50; ++i) {
    std::string html = "<body>";
    for (int k = 0; k < 10; ++k) html += "<a href=x></a><table></table>";
    corpus.push_back(parse_html(html + "</body>"));
  }
  TokenVocabulary v = build_vocabulary(corpus);
  const auto a = v.lookup(NodeKind::Tag, "a");
  const auto href = v.lookup(NodeKind::Attribute, "href");
  const auto table = v.lookup(NodeKind::Tag, "table");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Word2VecOptions options;
    options.seed = seed;
    options.dim = 16;
    EmbeddingTable e = train_embeddings(corpus, v, options);
    EXPECT_GT(cosine(e.vectors, a, href), cosine(e.vectors, a, table)) << "seed " << seed;
    EXPECT_TRUE(e.vectors.allFinite());
  }
}

TEST(Word2Vec, SeededAndTotal) {
  std::vector<DomTree> corpus = {parse_html("<div class=a><p id=b></p></div>")};
  TokenVocabulary v = build_vocabulary(corpus);
  Word2VecOptions options;
  EmbeddingTable a = train_embeddings(corpus, v, options);
  EmbeddingTable b = train_embeddings(corpus, v, options);
  EXPECT_TRUE(a.vectors == b.vectors);
  EXPECT_EQ(a.rows(), v.rows());
  EXPECT_LT(v.lookup(NodeKind::Tag, "never-seen"), a.rows());
}

TEST(Word2Vec, TinyVocabularyFallsBack) {
  std::vector<std::string> tags = {"html"};
  TokenVocabulary v(tags, {}, "test");
  EmbeddingTable e = train_embeddings(std::vector<DomTree>{parse_html("")}, v, Word2VecOptions{});
  EXPECT_TRUE(e.fallback);
  EXPECT_EQ(e.rows(), 3u);
  EXPECT_TRUE(e.vectors.allFinite());
}

struct DomainFixture {
  nn::ParameterStore<double> store;
  DomainEncoderLayout layout;

  explicit DomainFixture(int layers = 1, std::uint64_t seed = 5) {
    Rng rng(seed);
    layout = add_domain_encoder<double>(store, DomainCharset::shipped().symbols(), 4, 3, layers, 0.01, rng);
  }
};

TEST(DomainEncoder, EmptyDomainIsZero) {
  DomainFixture f;
  nn::Tape<double> t;
  auto h = encode_domain(t, f.store, f.layout, "");
  EXPECT_TRUE(h.value().isZero());
  EXPECT_EQ(h.cols(), 3);
}

TEST(DomainEncoder, SingleCharacterIsOneCellStep) {
  DomainFixture f;
  nn::Tape<double> t;
  auto h = encode_domain(t, f.store, f.layout, "a");
  const auto& charset = DomainCharset::shipped();
  Eigen::RowVectorXd e = f.store[f.layout.char_embedding].value.row(static_cast<Eigen::Index>(charset.index('a')));
  const auto& l = f.layout.layers[0];
  Eigen::RowVectorXd z = e * f.store[l.w_ih].value.transpose() + f.store[l.bias].value;
  auto sig = [](double x) { return 1 / (1 + std::exp(-x)); };
  for (int j = 0; j < 3; ++j) {
    const double i = sig(z(j)), g = std::tanh(z(6 + j)), o = sig(z(9 + j));
    EXPECT_NEAR(h.value()(0, j), o * std::tanh(i * g), 1e-12);
  }
}

TEST(DomainEncoder, GradientsMatchFiniteDifferences) {
  for (int layers : {1, 2}) {
    DomainFixture f(layers);
    auto report = nn::grad_check(
        [&](nn::Tape<double>& t) { return nn::sum(encode_domain(t, f.store, f.layout, "ab.cd")); }, f.store, 1e-4);
    EXPECT_TRUE(report.passed) << "layers " << layers << " err " << report.max_relative_error;
  }
}

TEST(Featurize, DomainRowComesFromEncoderAndOovRowsFromUnknown) {
  TrainConfig config;
  config.feature_dim = 4;
  config.lstm_hidden = 4;
  config.ae_linear_width = 4;
  config.gcn_hidden = 4;
  config.char_embedding_dim = 3;
  std::vector<DomTree> corpus = {parse_html("<div class=a><p></p></div>")};
  TokenVocabulary vocab = build_vocabulary(corpus);
  Rng rng(3);
  nn::Matrix<double> emb = testing::random_matrix(static_cast<Eigen::Index>(vocab.rows()), 4, rng);
  Model<double> model(config, emb, 17);

  DomTree tree = attach_domain_node(parse_html("<x-odd></x-odd>"), "evil.example");
  ASSERT_EQ(tree.size(), 4u);
  PreparedPage page = prepare_page(tree, vocab);
  nn::Tape<double> t;
  auto x = model.featurize(t, page);
  ASSERT_EQ(x.rows(), 4);
  ASSERT_EQ(x.cols(), 4);
  EXPECT_TRUE(x.value().row(2) == emb.row(static_cast<Eigen::Index>(vocab.unknown_tag_row())));

  nn::ParameterStore<double> store;
  Rng same(17);
  auto layout = add_domain_encoder<double>(store, DomainCharset::shipped().symbols(), 3, 4, 1, config.leaky_slope, same);
  nn::Tape<double> t2;
  EXPECT_TRUE(x.value().row(3) == encode_domain(t2, store, layout, "evil.example").value());

  config.use_domain = false;
  Model<double> plain(config, emb, 17);
  PreparedPage bare = prepare_page(tree.without_domain(), vocab);
  nn::Tape<double> t3;
  EXPECT_EQ(plain.featurize(t3, bare).rows(), 3);
}

}  // namespace
}  // namespace specnet
