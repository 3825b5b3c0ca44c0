#include "specnet/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "specnet/error.hpp"
#include "specnet/rng.hpp"

namespace specnet {

namespace {

struct Located {
  MarkupNode* node = nullptr;
  MarkupNode* parent = nullptr;
  std::size_t index = 0;
};

std::size_t number_elements(MarkupNode& node, std::size_t next) {
  for (auto& child : node.children) {
    if (!child.is_element()) continue;
    child.mark = ++next;
    next = number_elements(child, next);
  }
  return next;
}

bool find(MarkupNode& node, std::size_t mark, Located& out) {
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    auto& child = node.children[i];
    if (!child.is_element()) continue;
    if (child.mark == mark) {
      out = {&child, &node, i};
      return true;
    }
    if (find(child, mark, out)) return true;
  }
  return false;
}

std::size_t element_children(const MarkupNode& node) {
  std::size_t n = 0;
  for (const auto& c : node.children) n += c.is_element();
  return n;
}

bool eligible(PerturbationKind kind, const MarkupNode& node) {
  switch (kind) {
    case PerturbationKind::ShuffleSiblings: return element_children(node) >= 2;
    case PerturbationKind::InsertRedundant:
      return !html::is_void_element(node.name) && !html::is_raw_text_element(node.name);
    case PerturbationKind::WrapSubtree: return !node.implied && node.name != "body";
  }
  return false;
}

void collect_sites(const MarkupNode& node, PerturbationKind kind, std::vector<std::size_t>& out) {
  for (const auto& child : node.children) {
    if (!child.is_element()) continue;
    // The document element and the head section stay untouched.
    if (child.name == "head") continue;
    if (child.name != "html" && eligible(kind, child)) out.push_back(child.mark);
    collect_sites(child, kind, out);
  }
}

MarkupNode make_element(std::string name) {
  MarkupNode n;
  n.kind = MarkupNode::Kind::Element;
  n.open = "<" + name + ">";
  n.close = "</" + name + ">";
  n.name = std::move(name);
  return n;
}

void build_dom(const MarkupNode& node, std::size_t parent, DomTree& tree) {
  for (const auto& child : node.children) {
    if (!child.is_element()) continue;
    std::vector<std::string> attributes;
    if (!child.open.empty()) {
      html::Tokenizer tokenizer(child.open);
      if (auto t = tokenizer.next(); t && t->type == html::TokenType::StartTag) attributes = t->attributes;
    }
    std::size_t index = append_element(tree, parent, child.name, attributes);
    build_dom(child, index, tree);
  }
}

// Mutates the located site; returns the log detail.
std::string apply(PerturbationKind kind, const Located& at, Rng& rng) {
  switch (kind) {
    case PerturbationKind::ShuffleSiblings: {
      auto& children = at.node->children;
      std::vector<std::size_t> slots;
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (children[i].is_element()) slots.push_back(i);
      }
      std::vector<std::size_t> perm(slots.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      rng.shuffle(perm.begin(), perm.end());
      bool identity = true;
      for (std::size_t i = 0; i < perm.size(); ++i) identity = identity && perm[i] == i;
      if (identity) std::rotate(perm.begin(), perm.begin() + 1, perm.end());
      std::vector<MarkupNode> moved;
      for (auto p : perm) moved.push_back(children[slots[p]]);
      std::string detail = "order=";
      for (std::size_t i = 0; i < slots.size(); ++i) {
        children[slots[i]] = std::move(moved[i]);
        detail += (i ? "," : "") + std::to_string(perm[i]);
      }
      return detail;
    }
    case PerturbationKind::InsertRedundant: {
      auto& children = at.node->children;
      const std::size_t slot = rng.index(children.size() + 1);
      children.insert(children.begin() + static_cast<std::ptrdiff_t>(slot), make_element("span"));
      return "span@" + std::to_string(slot);
    }
    case PerturbationKind::WrapSubtree: {
      std::string tag = at.parent->name == "p" ? "span" : "div";
      MarkupNode wrapper = make_element(tag);
      wrapper.children.push_back(std::move(*at.node));
      at.parent->children[at.index] = std::move(wrapper);
      return tag;
    }
  }
  return {};
}

}  // namespace

std::string_view to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::ShuffleSiblings: return "shuffle_siblings";
    case PerturbationKind::InsertRedundant: return "insert_redundant";
    case PerturbationKind::WrapSubtree: return "wrap_subtree";
  }
  return "?";
}

PerturbationKind parse_perturbation_kind(std::string_view name) {
  for (auto k : {PerturbationKind::ShuffleSiblings, PerturbationKind::InsertRedundant, PerturbationKind::WrapSubtree}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::ConfigError, "unknown perturbation kind '" + std::string(name) + "'");
}

DomTree markup_to_dom(const MarkupNode& document) {
  DomTree tree;
  build_dom(document, DomTree::kNoParent, tree);
  return tree;
}

PerturbationResult perturb(std::string_view html, const PerturbationSpec& spec) {
  if (!(spec.intensity >= 0 && spec.intensity <= 1)) {
    throw Error(ErrorKind::ConfigError, "intensity must lie in [0, 1]");
  }
  PerturbationResult result;
  MarkupNode doc = parse_markup(html);
  number_elements(doc, 0);
  std::vector<std::size_t> sites;
  collect_sites(doc, spec.kind, sites);
  result.eligible_sites = sites.size();
  result.planned = static_cast<std::size_t>(std::floor(spec.intensity * static_cast<double>(sites.size()) + 0.5));

  Rng rng(spec.seed);
  rng.shuffle(sites.begin(), sites.end());
  for (std::size_t mark : sites) {
    if (result.log.size() >= result.planned) break;
    MarkupNode candidate = doc;
    Located at;
    if (!find(candidate, mark, at)) continue;
    std::string detail = apply(spec.kind, at, rng);
    if (!(parse_html(serialize(candidate)) == markup_to_dom(candidate))) continue;
    doc = std::move(candidate);
    result.log.push_back({spec.kind, mark - 1, std::move(detail)});
  }
  result.html = result.log.empty() ? std::string(html) : serialize(doc);
  return result;
}

}  // namespace specnet
