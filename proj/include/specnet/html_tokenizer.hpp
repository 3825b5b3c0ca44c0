#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specnet::html {

enum class TokenType { StartTag, EndTag, Text, Comment, Doctype, RawText };

/// A lexical unit of an HTML byte stream. `raw` always points at the exact
/// source bytes the token was produced from, so concatenating the raw views
/// of every token reproduces the input.
struct Token {
  TokenType type = TokenType::Text;
  std::string name;                     // lowercase, tags only
  std::vector<std::string> attributes;  // lowercase names in source order, values dropped
  bool self_closing = false;
  std::string_view raw;
};

/// Lowercases ASCII and spells every non-ASCII byte as %HH so names are
/// canonical regardless of source encoding.
std::string normalize_name(std::string_view name);

bool is_void_element(std::string_view name);
bool is_raw_text_element(std::string_view name);

/// Tolerant byte-level tokenizer. Never fails: anything it cannot read as
/// markup is returned as text.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view input) : input_(input) {}

  std::optional<Token> next();

 private:
  std::optional<Token> lex_markup();
  std::optional<Token> lex_start_tag(std::size_t start);
  Token lex_end_tag(std::size_t start);
  Token until_gt(std::size_t start, TokenType type);
  Token make(TokenType type, std::size_t start, std::size_t end);

  std::string_view input_;
  std::size_t pos_ = 0;
  std::string raw_text_end_;  // set while inside script/style/... bodies
};

}  // namespace specnet::html
