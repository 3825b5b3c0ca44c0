#include "specnet/dom.hpp"

#include <algorithm>
#include <stdexcept>

#include "specnet/error.hpp"
#include "specnet/tree_construction.hpp"

namespace specnet {

std::size_t DomTree::add_node(NodeKind kind, std::string token, std::size_t parent) {
  std::size_t index = nodes_.size();
  if (parent == kNoParent) {
    if (!nodes_.empty()) throw std::logic_error("DomTree: second root");
    depth_.push_back(0);
  } else {
    if (parent >= index) throw std::logic_error("DomTree: parent out of range");
    nodes_[parent].children.push_back(index);
    depth_.push_back(depth_[parent] + 1);
  }
  nodes_.push_back(DomNode{kind, std::move(token), {}});
  parent_.push_back(parent);
  return index;
}

void DomTree::insert_domain(std::string token) {
  if (domain_) throw Error(ErrorKind::DuplicateDomain, "tree already carries a domain node");
  if (nodes_.empty()) throw std::logic_error("DomTree: insert_domain on empty tree");
  std::size_t index = nodes_.size();
  nodes_.push_back(DomNode{NodeKind::Domain, std::move(token), {}});
  parent_.push_back(0);
  depth_.push_back(1);
  auto& root_children = nodes_[0].children;
  root_children.insert(root_children.begin(), index);
  domain_ = index;
}

DomTree DomTree::without_domain() const {
  if (!domain_) return *this;
  const std::size_t removed = *domain_;
  auto remap = [removed](std::size_t i) { return i > removed ? i - 1 : i; };
  DomTree out;
  out.nodes_.reserve(nodes_.size() - 1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i == removed) continue;
    DomNode node = nodes_[i];
    std::erase(node.children, removed);
    for (auto& c : node.children) c = remap(c);
    out.nodes_.push_back(std::move(node));
    out.parent_.push_back(parent_[i] == kNoParent ? kNoParent : remap(parent_[i]));
    out.depth_.push_back(depth_[i]);
  }
  return out;
}

void DomTree::validate() const {
  if (nodes_.empty()) throw std::logic_error("DomTree: empty");
  if (parent_[0] != kNoParent || depth_[0] != 0) throw std::logic_error("DomTree: bad root");
  std::vector<std::size_t> seen(nodes_.size(), 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.token.empty()) throw std::logic_error("DomTree: empty token");
    if (n.kind != NodeKind::Tag && !n.children.empty()) {
      throw std::logic_error("DomTree: attribute/domain node with children");
    }
    if (i > 0) {
      if (parent_[i] == kNoParent || parent_[i] >= nodes_.size()) {
        throw std::logic_error("DomTree: second root or dangling parent");
      }
      if (depth_[i] != depth_[parent_[i]] + 1) throw std::logic_error("DomTree: depth mismatch");
    }
    for (auto c : n.children) {
      if (c >= nodes_.size() || parent_[c] != i) throw std::logic_error("DomTree: child link");
      ++seen[c];
    }
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (seen[i] != 1) throw std::logic_error("DomTree: node not reachable exactly once");
  }
  // Reachability from the root (catches cycles not containing the root).
  std::vector<std::size_t> stack{0};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    ++visited;
    for (auto c : nodes_[v].children) stack.push_back(c);
    if (visited > nodes_.size()) throw std::logic_error("DomTree: cycle");
  }
  if (visited != nodes_.size()) throw std::logic_error("DomTree: disconnected");
}

std::size_t DomTree::max_depth() const {
  return depth_.empty() ? 0 : *std::max_element(depth_.begin(), depth_.end());
}

bool operator==(const DomNode& a, const DomNode& b) {
  return a.kind == b.kind && a.token == b.token && a.children == b.children;
}

bool operator==(const DomTree& a, const DomTree& b) {
  return a.nodes_ == b.nodes_ && a.parent_ == b.parent_ && a.depth_ == b.depth_ &&
         a.domain_ == b.domain_;
}

std::size_t append_element(DomTree& tree, std::size_t parent, std::string_view tag,
                           std::span<const std::string> attributes) {
  std::size_t node = tree.add_node(NodeKind::Tag, std::string(tag), parent);
  std::vector<std::string_view> kept;
  for (const auto& attr : attributes) {
    if (attr.empty() || std::find(kept.begin(), kept.end(), attr) != kept.end()) continue;
    kept.push_back(attr);
    tree.add_node(NodeKind::Attribute, attr, node);
  }
  return node;
}

DomTree decompose_node(std::string_view tag, std::span<const std::string> attributes) {
  DomTree tree;
  append_element(tree, DomTree::kNoParent, tag, attributes);
  return tree;
}

namespace {

class DomSink final : public html::TreeSink {
 public:
  DomSink(DomTree& tree, std::size_t max_nodes) : tree_(tree), max_nodes_(max_nodes) {}

  void open_element(std::string_view name, const html::Token* start) override {
    std::size_t parent = open_.empty() ? DomTree::kNoParent : open_.back();
    static const std::vector<std::string> kNone;
    const auto& attrs = start ? start->attributes : kNone;
    std::size_t node = append_element(tree_, parent, name, attrs);
    if (tree_.size() > max_nodes_) {
      throw Error(ErrorKind::OversizeDocument,
                  "document exceeds " + std::to_string(max_nodes_) + " nodes");
    }
    open_.push_back(node);
  }

  void close_element(const html::Token*) override { open_.pop_back(); }
  void passthrough(const html::Token&) override {}

 private:
  DomTree& tree_;
  std::size_t max_nodes_;
  std::vector<std::size_t> open_;
};

}  // namespace

DomTree parse_html(std::string_view html, const ParseOptions& options) {
  DomTree tree;
  DomSink sink(tree, options.max_nodes);
  html::construct_tree(html, sink);
  return tree;
}

std::string normalize_domain(std::string_view domain) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (!domain.empty() && is_space(domain.front())) domain.remove_prefix(1);
  while (!domain.empty() && is_space(domain.back())) domain.remove_suffix(1);
  std::string out(domain);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

DomTree attach_domain_node(DomTree tree, std::string_view domain) {
  std::string token = normalize_domain(domain);
  if (token.empty()) throw Error(ErrorKind::MissingDomain, "empty domain");
  tree.insert_domain(std::move(token));
  return tree;
}

}  // namespace specnet
