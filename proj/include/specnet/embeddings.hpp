#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "specnet/dom.hpp"
#include "specnet/nn/tape.hpp"
#include "specnet/vocabulary.hpp"

namespace specnet {

/// One fixed vector per vocabulary row (tags, attributes, two unknowns).
struct EmbeddingTable {
  nn::Matrix<float> vectors;  // rows() x dim
  bool fallback = false;      // vocabulary too small to train; random normal vectors

  int dim() const { return static_cast<int>(vectors.cols()); }
  std::size_t rows() const { return static_cast<std::size_t>(vectors.rows()); }
};

struct Word2VecOptions {
  int dim = 32;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

/// Sentences of embedding rows: one per tag node, [tag, attr_1, ..., attr_k]
/// in child order, with out-of-vocabulary tokens replaced by unknown rows.
std::vector<std::vector<std::size_t>> embedding_sentences(const DomTree& tree,
                                                          const TokenVocabulary& vocab);

/// Skip-gram with negative sampling over the sentences of `corpus`; the
/// context window is the whole sentence. The returned vector for a token is
/// the sum of its input and output vectors. With fewer than two known
/// tokens the table is drawn from a normal distribution and flagged as a
/// fallback.
EmbeddingTable train_embeddings(std::span<const DomTree> corpus, const TokenVocabulary& vocab,
                                const Word2VecOptions& options);

/// Fixed character alphabet for domains, with one trailing unknown symbol.
class DomainCharset {
 public:
  static const DomainCharset& shipped();

  std::size_t symbols() const noexcept { return count_ + 1; }
  std::size_t unknown() const noexcept { return count_; }
  std::size_t index(char c) const { return table_[static_cast<unsigned char>(c)]; }
  const std::string& version() const noexcept { return version_; }

 private:
  DomainCharset();
  std::vector<std::size_t> table_;
  std::size_t count_ = 0;
  std::string version_;
};

}  // namespace specnet
