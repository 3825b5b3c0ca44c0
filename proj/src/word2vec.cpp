#include "specnet/embeddings.hpp"

#include <algorithm>
#include <cmath>

#include "specnet/resources.hpp"
#include "specnet/rng.hpp"

namespace specnet {

std::vector<std::vector<std::size_t>> embedding_sentences(const DomTree& tree,
                                                          const TokenVocabulary& vocab) {
  std::vector<std::vector<std::size_t>> sentences;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& node = tree.node(i);
    if (node.kind != NodeKind::Tag) continue;
    std::vector<std::size_t> sentence{vocab.lookup(NodeKind::Tag, node.token)};
    for (auto c : node.children) {
      const auto& child = tree.node(c);
      if (child.kind == NodeKind::Attribute) sentence.push_back(vocab.lookup(NodeKind::Attribute, child.token));
    }
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

namespace {

EmbeddingTable random_table(std::size_t rows, int dim, Rng& rng) {
  EmbeddingTable table;
  table.fallback = true;
  table.vectors.resize(static_cast<Eigen::Index>(rows), dim);
  const double sd = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < table.vectors.size(); ++i) {
    table.vectors.data()[i] = static_cast<float>(sd * rng.normal());
  }
  return table;
}

}  // namespace

EmbeddingTable train_embeddings(std::span<const DomTree> corpus, const TokenVocabulary& vocab,
                                const Word2VecOptions& options) {
  Rng rng(options.seed);
  const std::size_t rows = vocab.rows();
  const int dim = options.dim;
  if (vocab.known_tokens() < 2) return random_table(rows, dim, rng);

  std::vector<std::vector<std::size_t>> sentences;
  for (const auto& tree : corpus) {
    auto s = embedding_sentences(tree, vocab);
    sentences.insert(sentences.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }

  // Negative-sampling distribution: counts^0.75 as a cumulative table.
  std::vector<double> counts(rows, 0.0);
  std::size_t total_words = 0;
  for (const auto& s : sentences) {
    for (auto w : s) counts[w] += 1.0;
    total_words += s.size();
  }
  std::vector<double> cumulative(rows);
  double acc = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    acc += std::pow(counts[i], 0.75);
    cumulative[i] = acc;
  }
  auto sample_negative = [&]() -> std::size_t {
    double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), rows - 1);
  };

  Eigen::MatrixXd input(static_cast<Eigen::Index>(rows), dim);
  for (Eigen::Index i = 0; i < input.size(); ++i) input.data()[i] = (rng.uniform() - 0.5) / dim;
  Eigen::MatrixXd output = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), dim);

  const double planned = static_cast<double>(total_words) * options.epochs;
  double processed = 0;
  Eigen::VectorXd update(dim);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& sentence : sentences) {
      const double lr = options.learning_rate * std::max(1e-4, 1.0 - processed / std::max(1.0, planned));
      processed += static_cast<double>(sentence.size());
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        const auto center = static_cast<Eigen::Index>(sentence[i]);
        for (std::size_t j = 0; j < sentence.size(); ++j) {
          if (j == i) continue;
          update.setZero();
          for (int d = 0; d <= options.negatives; ++d) {
            Eigen::Index target;
            double label;
            if (d == 0) {
              target = static_cast<Eigen::Index>(sentence[j]);
              label = 1.0;
            } else {
              target = static_cast<Eigen::Index>(sample_negative());
              if (target == static_cast<Eigen::Index>(sentence[j])) continue;
              label = 0.0;
            }
            const double f = input.row(center).dot(output.row(target));
            const double sig = f >= 0 ? 1.0 / (1.0 + std::exp(-f)) : std::exp(f) / (1.0 + std::exp(f));
            const double g = (label - sig) * lr;
            update += g * output.row(target).transpose();
            output.row(target) += g * input.row(center);
          }
          input.row(center) += update.transpose();
        }
      }
    }
  }

  EmbeddingTable table;
  table.vectors = (input + output).cast<float>();
  return table;
}

DomainCharset::DomainCharset() : table_(256, 0) {
  auto symbols = resources::parse_token_list(resources::domain_charset());
  version_ = resources::list_version(resources::domain_charset());
  std::vector<std::size_t> assigned(256, static_cast<std::size_t>(-1));
  for (const auto& s : symbols) {
    if (s.size() != 1) continue;
    auto byte = static_cast<unsigned char>(s[0]);
    if (assigned[byte] == static_cast<std::size_t>(-1)) assigned[byte] = count_++;
  }
  for (std::size_t b = 0; b < 256; ++b) table_[b] = assigned[b] == static_cast<std::size_t>(-1) ? count_ : assigned[b];
}

const DomainCharset& DomainCharset::shipped() {
  static const DomainCharset charset;
  return charset;
}

}  // namespace specnet
