#include "specnet/vocabulary.hpp"

#include <algorithm>

#include "specnet/error.hpp"
#include "specnet/resources.hpp"

namespace specnet {

TokenVocabulary::TokenVocabulary(std::vector<std::string> tags, std::vector<std::string> attributes,
                                 std::string standard_list_version)
    : tags_(std::move(tags)), attributes_(std::move(attributes)), version_(std::move(standard_list_version)) {
  for (std::size_t i = 0; i < tags_.size(); ++i) tag_index_.emplace(tags_[i], i);
  for (std::size_t i = 0; i < attributes_.size(); ++i) attribute_index_.emplace(attributes_[i], i);
}

std::size_t TokenVocabulary::lookup(NodeKind kind, std::string_view token) const {
  std::string key(token);
  if (kind == NodeKind::Attribute) {
    auto it = attribute_index_.find(key);
    return it == attribute_index_.end() ? unknown_attribute_row() : tags_.size() + 1 + it->second;
  }
  auto it = tag_index_.find(key);
  return it == tag_index_.end() ? unknown_tag_row() : it->second;
}

bool TokenVocabulary::contains(NodeKind kind, std::string_view token) const {
  std::string key(token);
  return kind == NodeKind::Attribute ? attribute_index_.contains(key) : tag_index_.contains(key);
}

std::string TokenVocabulary::row_token(std::size_t row) const {
  if (row < tags_.size()) return tags_[row];
  if (row == unknown_tag_row()) return std::string(kUnknownTag);
  if (row == unknown_attribute_row()) return std::string(kUnknownAttribute);
  return attributes_.at(row - tags_.size() - 1);
}

const StandardNames& StandardNames::shipped() {
  static const StandardNames names = [] {
    StandardNames n;
    for (auto& t : resources::parse_token_list(resources::html_elements())) n.elements.insert(t);
    for (auto& t : resources::parse_token_list(resources::html_attributes())) n.attributes.insert(t);
    n.version = resources::list_version(resources::html_elements()) + "; " +
                resources::list_version(resources::html_attributes());
    return n;
  }();
  return names;
}

void VocabularyBuilder::observe(const DomTree& tree) {
  ++trees_;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const auto& node = tree.node(i);
    if (node.kind == NodeKind::Tag && standard_.elements.contains(node.token)) {
      tags_.insert(node.token);
    } else if (node.kind == NodeKind::Attribute && standard_.attributes.contains(node.token)) {
      attributes_.insert(node.token);
    }
  }
}

TokenVocabulary VocabularyBuilder::finish() const {
  if (trees_ == 0) throw Error(ErrorKind::EmptyCorpus, "vocabulary needs at least one tree");
  std::vector<std::string> tags(tags_.begin(), tags_.end());
  std::vector<std::string> attributes(attributes_.begin(), attributes_.end());
  std::sort(tags.begin(), tags.end());
  std::sort(attributes.begin(), attributes.end());
  return TokenVocabulary(std::move(tags), std::move(attributes), standard_.version);
}

TokenVocabulary build_vocabulary(std::span<const DomTree> corpus) {
  VocabularyBuilder builder;
  for (const auto& tree : corpus) builder.observe(tree);
  return builder.finish();
}

}  // namespace specnet
