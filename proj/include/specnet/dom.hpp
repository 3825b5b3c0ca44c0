#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specnet {

enum class NodeKind : std::uint8_t { Tag, Attribute, Domain };

constexpr const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Tag: return "tag";
    case NodeKind::Attribute: return "attribute";
    case NodeKind::Domain: return "domain";
  }
  return "?";
}

struct DomNode {
  NodeKind kind = NodeKind::Tag;
  std::string token;
  std::vector<std::size_t> children;
};

/// Rooted ordered tree of tag, attribute and domain nodes.
///
/// Node 0 is the root. Nodes are stored so that every parent index is
/// smaller than its children's indices; several passes downstream rely on
/// this to process the tree in a single forward or backward sweep.
class DomTree {
 public:
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  DomTree() = default;

  /// Appends a node as the last child of `parent` (or as the root when the
  /// tree is empty and `parent` is kNoParent).
  std::size_t add_node(NodeKind kind, std::string token, std::size_t parent);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t root() const noexcept { return 0; }

  const DomNode& node(std::size_t i) const { return nodes_[i]; }
  std::size_t parent(std::size_t i) const { return parent_[i]; }
  std::size_t depth(std::size_t i) const { return depth_[i]; }
  const std::vector<std::size_t>& children(std::size_t i) const { return nodes_[i].children; }

  std::optional<std::size_t> domain_node() const noexcept { return domain_; }

  /// Inserts the domain node as the first child of the root. The node takes
  /// the next free index, which keeps the parent-before-child ordering.
  void insert_domain(std::string token);

  /// Copy of this tree with the domain node removed (indices above it shift
  /// down by one).
  DomTree without_domain() const;

  /// Checks the tree invariants; throws std::logic_error on violation.
  void validate() const;

  std::size_t max_depth() const;

  friend bool operator==(const DomTree& a, const DomTree& b);

 private:
  std::vector<DomNode> nodes_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> depth_;
  std::optional<std::size_t> domain_;
};

bool operator==(const DomNode& a, const DomNode& b);

struct ParseOptions {
  std::size_t max_nodes = 200'000;
};

/// Parses raw bytes into a tree of tag nodes with attribute children. Text,
/// comments, script/style bodies and attribute values are dropped. Never
/// fails on malformed input; throws Error(OversizeDocument) when the tree
/// would exceed `options.max_nodes`.
DomTree parse_html(std::string_view html, const ParseOptions& options = {});

/// Tag node with one attribute child per distinct attribute name, in source
/// order; later duplicates are dropped.
DomTree decompose_node(std::string_view tag, std::span<const std::string> attributes);

/// Appends `tag` and its deduplicated attributes under `parent` in `tree`.
/// Returns the index of the tag node.
std::size_t append_element(DomTree& tree, std::size_t parent, std::string_view tag,
                           std::span<const std::string> attributes);

/// Lowercased, whitespace-trimmed domain; empty when nothing remains.
std::string normalize_domain(std::string_view domain);

/// Returns `tree` with a domain node attached as the root's first child.
/// Throws Error(MissingDomain) for an empty domain and Error(DuplicateDomain)
/// when the tree already carries one.
DomTree attach_domain_node(DomTree tree, std::string_view domain);

}  // namespace specnet
