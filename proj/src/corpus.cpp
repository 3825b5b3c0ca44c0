#include "specnet/corpus.hpp"

#include "specnet/error.hpp"

namespace specnet {

DomTree ingest_page(const RawPage& page, const TrainConfig& config) {
  DomTree tree = parse_html(page.html, ParseOptions{config.max_nodes});
  if (!config.domain_enabled()) return tree;
  const std::string domain = page.domain ? normalize_domain(*page.domain) : std::string();
  if (domain.empty()) throw Error(ErrorKind::MissingDomain, "page has no domain: " + page.source);
  return attach_domain_node(std::move(tree), domain);
}

ParentArray parent_array(const DomTree& tree) {
  ParentArray parent(tree.size(), kNoParent);
  for (std::size_t v = 1; v < tree.size(); ++v) parent[v] = tree.parent(v);
  return parent;
}

PreparedPage prepare_page(const DomTree& tree, const TokenVocabulary& vocab, std::optional<InternalLabel> label) {
  PreparedPage page;
  page.parent = parent_array(tree);
  page.rows.resize(tree.size(), 0);
  for (std::size_t v = 0; v < tree.size(); ++v) {
    const auto& node = tree.node(v);
    if (node.kind == NodeKind::Domain) {
      if (v + 1 != tree.size()) throw std::logic_error("domain node must be the last node");
      page.domain = node.token;
    } else {
      page.rows[v] = vocab.lookup(node.kind, node.token);
    }
  }
  page.label = label;
  return page;
}

IngestedCorpus ingest_pages(std::span<const RawPage> pages, const TrainConfig& config) {
  IngestedCorpus out;
  for (const auto& page : pages) {
    try {
      out.trees.push_back(ingest_page(page, config));
      out.labels.push_back(page.label ? std::optional(InternalLabel::from_external(*page.label)) : std::nullopt);
    } catch (const Error& e) {
      out.errors.push_back(page.source + ": " + e.what());
    }
  }
  return out;
}

std::vector<PreparedPage> prepare_pages(const IngestedCorpus& corpus, const TokenVocabulary& vocab) {
  std::vector<PreparedPage> out;
  out.reserve(corpus.trees.size());
  for (std::size_t i = 0; i < corpus.trees.size(); ++i) out.push_back(prepare_page(corpus.trees[i], vocab, corpus.labels[i]));
  return out;
}

}  // namespace specnet
