#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "specnet/html_tokenizer.hpp"

namespace specnet {

/// Byte-preserving element tree: serialize(parse_markup(x)) == x.
///
/// Elements keep their exact start/end tag bytes; everything else (text,
/// comments, raw script bodies, ignored tags) is kept as Raw children. Used
/// to rewrite structure without touching text or attribute values.
struct MarkupNode {
  enum class Kind { Document, Element, Raw };

  Kind kind = Kind::Document;
  std::string name;
  std::string open;   // start tag bytes; empty for implied elements
  std::string close;  // end tag bytes; empty when implied or auto-closed
  std::string text;   // Raw nodes only
  html::TokenType raw_type = html::TokenType::Text;
  bool implied = false;
  std::size_t mark = 0;  // free for callers to tag nodes
  std::vector<MarkupNode> children;

  bool is_element() const noexcept { return kind == Kind::Element; }
};

MarkupNode parse_markup(std::string_view html);
std::string serialize(const MarkupNode& node);

}  // namespace specnet
