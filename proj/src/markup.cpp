#include "specnet/markup.hpp"

#include "specnet/tree_construction.hpp"

namespace specnet {
namespace {

class MarkupSink final : public html::TreeSink {
 public:
  explicit MarkupSink(MarkupNode& document) { path_.push_back(&document); }

  void open_element(std::string_view name, const html::Token* start) override {
    MarkupNode node;
    node.kind = MarkupNode::Kind::Element;
    node.name = std::string(name);
    node.implied = start == nullptr;
    if (start) node.open = std::string(start->raw);
    auto& siblings = path_.back()->children;
    siblings.push_back(std::move(node));
    path_.push_back(&siblings.back());
  }

  void close_element(const html::Token* end) override {
    if (end) path_.back()->close = std::string(end->raw);
    path_.pop_back();
  }

  void passthrough(const html::Token& token) override {
    MarkupNode node;
    node.kind = MarkupNode::Kind::Raw;
    node.raw_type = token.type;
    node.text = std::string(token.raw);
    path_.back()->children.push_back(std::move(node));
  }

 private:
  // Pointers into children vectors stay valid: only the innermost open
  // element's children vector ever grows.
  std::vector<MarkupNode*> path_;
};

void serialize_into(const MarkupNode& node, std::string& out) {
  if (node.kind == MarkupNode::Kind::Raw) {
    out += node.text;
    return;
  }
  out += node.open;
  for (const auto& child : node.children) serialize_into(child, out);
  out += node.close;
}

}  // namespace

MarkupNode parse_markup(std::string_view html) {
  MarkupNode document;
  MarkupSink sink(document);
  html::construct_tree(html, sink);
  return document;
}

std::string serialize(const MarkupNode& node) {
  std::string out;
  serialize_into(node, out);
  return out;
}

}  // namespace specnet
