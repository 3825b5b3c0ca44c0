#pragma once

#include <string_view>

#include "specnet/html_tokenizer.hpp"

namespace specnet::html {

/// Receives the element structure recovered from a token stream.
///
/// Implied elements (html, head, body inserted by recovery) arrive with a
/// null token. Implied closes (end of input, auto-closing) arrive with a null
/// end token. Every token that does not open or close an element is passed
/// through unchanged, so a sink can reproduce the input byte-for-byte.
class TreeSink {
 public:
  virtual ~TreeSink() = default;
  virtual void open_element(std::string_view name, const Token* start) = 0;
  virtual void close_element(const Token* end) = 0;
  virtual void passthrough(const Token& token) = 0;
};

/// Runs a tolerant tree construction over `html`: implies html/body (and
/// head for head-only content), closes unclosed tags, applies the usual
/// auto-close pairs (p, li, dt/dd, option, table rows and cells) and drops
/// stray end tags. Never throws on malformed input; exceptions thrown by the
/// sink propagate.
void construct_tree(std::string_view html, TreeSink& sink);

}  // namespace specnet::html
