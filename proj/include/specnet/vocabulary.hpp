#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "specnet/dom.hpp"

namespace specnet {

/// Tag and attribute tokens admitted to the embedding table.
///
/// Embedding rows are laid out as [tags..., <unk-tag>, attrs..., <unk-attr>].
/// Lookups are kind-qualified, so "title" the tag and "title" the attribute
/// map to different rows.
class TokenVocabulary {
 public:
  static constexpr std::string_view kUnknownTag = "<unk-tag>";
  static constexpr std::string_view kUnknownAttribute = "<unk-attr>";

  TokenVocabulary() = default;
  TokenVocabulary(std::vector<std::string> tags, std::vector<std::string> attributes,
                  std::string standard_list_version);

  /// Embedding row for a token; unknown tokens resolve to the kind's
  /// unknown row. Domain nodes have no row (they are encoded separately).
  std::size_t lookup(NodeKind kind, std::string_view token) const;
  bool contains(NodeKind kind, std::string_view token) const;

  std::size_t unknown_tag_row() const noexcept { return tags_.size(); }
  std::size_t unknown_attribute_row() const noexcept { return tags_.size() + 1 + attributes_.size(); }
  std::size_t rows() const noexcept { return tags_.size() + attributes_.size() + 2; }
  std::size_t known_tokens() const noexcept { return tags_.size() + attributes_.size(); }

  const std::vector<std::string>& tags() const noexcept { return tags_; }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  const std::string& standard_list_version() const noexcept { return version_; }

  /// Token spelled for a row, including the unknown markers.
  std::string row_token(std::size_t row) const;

  friend bool operator==(const TokenVocabulary& a, const TokenVocabulary& b) {
    return a.tags_ == b.tags_ && a.attributes_ == b.attributes_ && a.version_ == b.version_;
  }

 private:
  std::vector<std::string> tags_;
  std::vector<std::string> attributes_;
  std::string version_;
  std::unordered_map<std::string, std::size_t> tag_index_;
  std::unordered_map<std::string, std::size_t> attribute_index_;
};

/// The shipped HTML-standard name lists.
struct StandardNames {
  std::unordered_set<std::string> elements;
  std::unordered_set<std::string> attributes;
  std::string version;

  static const StandardNames& shipped();
};

/// Accumulates observed tokens one tree at a time.
class VocabularyBuilder {
 public:
  explicit VocabularyBuilder(const StandardNames& standard = StandardNames::shipped())
      : standard_(standard) {}

  void observe(const DomTree& tree);

  /// Observed tokens intersected with the standard lists, sorted.
  /// Throws Error(EmptyCorpus) if no tree was observed.
  TokenVocabulary finish() const;

 private:
  const StandardNames& standard_;
  std::unordered_set<std::string> tags_;
  std::unordered_set<std::string> attributes_;
  std::size_t trees_ = 0;
};

TokenVocabulary build_vocabulary(std::span<const DomTree> corpus);

}  // namespace specnet
