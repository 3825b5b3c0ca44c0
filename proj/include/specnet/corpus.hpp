#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "specnet/config.hpp"
#include "specnet/dom.hpp"
#include "specnet/manifest.hpp"
#include "specnet/model/model.hpp"
#include "specnet/vocabulary.hpp"

namespace specnet {

/// Parses a page and, when domain features are enabled, attaches its domain
/// node. Throws Error(MissingDomain) if the domain is required but absent.
DomTree ingest_page(const RawPage& page, const TrainConfig& config);

ParentArray parent_array(const DomTree& tree);

/// Maps a tree onto embedding rows. The domain node, if any, must be the
/// last node.
PreparedPage prepare_page(const DomTree& tree, const TokenVocabulary& vocab,
                          std::optional<InternalLabel> label = std::nullopt);

/// Ingested trees of a page collection; pages that fail are reported in
/// `errors` and left out.
struct IngestedCorpus {
  std::vector<DomTree> trees;
  std::vector<std::optional<InternalLabel>> labels;
  std::vector<std::string> errors;
};

IngestedCorpus ingest_pages(std::span<const RawPage> pages, const TrainConfig& config);

std::vector<PreparedPage> prepare_pages(const IngestedCorpus& corpus, const TokenVocabulary& vocab);

}  // namespace specnet
