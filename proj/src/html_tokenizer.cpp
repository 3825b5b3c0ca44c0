#include "specnet/html_tokenizer.hpp"

#include <algorithm>
#include <array>

namespace specnet::html {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool iequals_prefix(std::string_view haystack, std::size_t at, std::string_view needle) {
  if (at + needle.size() > haystack.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i) {
    if (lower(haystack[at + i]) != needle[i]) return false;
  }
  return true;
}

constexpr std::array kVoidElements = {
    "area", "base", "basefont", "bgsound", "br", "col", "embed", "frame", "hr", "img",
    "input", "keygen", "link", "meta", "param", "source", "track", "wbr"};

constexpr std::array kRawTextElements = {"script", "style",   "textarea", "title",
                                         "xmp",    "iframe",  "noembed",  "noframes"};

}  // namespace

std::string normalize_name(std::string_view name) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    auto byte = static_cast<unsigned char>(c);
    if (byte >= 0x80 || byte < 0x20) {
      out.push_back('%');
      out.push_back(kHex[byte >> 4]);
      out.push_back(kHex[byte & 0xF]);
    } else {
      out.push_back(lower(c));
    }
  }
  return out;
}

bool is_void_element(std::string_view name) {
  return std::find(kVoidElements.begin(), kVoidElements.end(), name) != kVoidElements.end();
}

bool is_raw_text_element(std::string_view name) {
  return std::find(kRawTextElements.begin(), kRawTextElements.end(), name) !=
         kRawTextElements.end();
}

Token Tokenizer::make(TokenType type, std::size_t start, std::size_t end) {
  Token token;
  token.type = type;
  token.raw = input_.substr(start, end - start);
  pos_ = end;
  return token;
}

Token Tokenizer::until_gt(std::size_t start, TokenType type) {
  std::size_t gt = input_.find('>', start);
  std::size_t end = gt == std::string_view::npos ? input_.size() : gt + 1;
  return make(type, start, end);
}

std::optional<Token> Tokenizer::next() {
  if (pos_ >= input_.size()) return std::nullopt;

  if (!raw_text_end_.empty()) {
    // Body of script/style/...: opaque until the matching end tag.
    std::size_t at = pos_;
    while (true) {
      at = input_.find("</", at);
      if (at == std::string_view::npos) {
        at = input_.size();
        break;
      }
      std::size_t after = at + 2 + raw_text_end_.size();
      if (iequals_prefix(input_, at + 2, raw_text_end_) &&
          (after >= input_.size() || is_space(input_[after]) || input_[after] == '>' ||
           input_[after] == '/')) {
        break;
      }
      at += 2;
    }
    raw_text_end_.clear();
    if (at > pos_) return make(TokenType::RawText, pos_, at);
    if (pos_ >= input_.size()) return std::nullopt;
  }

  if (input_[pos_] == '<') {
    if (auto token = lex_markup()) return token;
  }
  // Text runs to the next '<' that can start markup.
  std::size_t start = pos_;
  std::size_t at = pos_ + 1;
  while (true) {
    at = input_.find('<', at);
    if (at == std::string_view::npos || at + 1 >= input_.size()) {
      at = input_.size();
      break;
    }
    char c = input_[at + 1];
    if (is_alpha(c) || c == '/' || c == '!' || c == '?') break;
    ++at;
  }
  return make(TokenType::Text, start, at);
}

std::optional<Token> Tokenizer::lex_markup() {
  std::size_t start = pos_;
  if (start + 1 >= input_.size()) return std::nullopt;
  char c = input_[start + 1];
  if (c == '!') {
    if (input_.compare(start, 4, "<!--") == 0) {
      std::size_t close = input_.find("-->", start + 4);
      std::size_t end = close == std::string_view::npos ? input_.size() : close + 3;
      return make(TokenType::Comment, start, end);
    }
    return until_gt(start, iequals_prefix(input_, start + 2, "doctype") ? TokenType::Doctype
                                                                         : TokenType::Comment);
  }
  if (c == '?') return until_gt(start, TokenType::Comment);
  if (c == '/') {
    if (start + 2 < input_.size() && is_alpha(input_[start + 2])) return lex_end_tag(start);
    return until_gt(start, TokenType::Comment);
  }
  if (is_alpha(c)) return lex_start_tag(start);
  return std::nullopt;
}

Token Tokenizer::lex_end_tag(std::size_t start) {
  std::size_t at = start + 2;
  std::size_t name_begin = at;
  while (at < input_.size() && !is_space(input_[at]) && input_[at] != '>' && input_[at] != '/') {
    ++at;
  }
  std::string name = normalize_name(input_.substr(name_begin, at - name_begin));
  Token token = until_gt(at, TokenType::EndTag);
  token.raw = input_.substr(start, pos_ - start);
  token.name = std::move(name);
  return token;
}

std::optional<Token> Tokenizer::lex_start_tag(std::size_t start) {
  const std::size_t n = input_.size();
  std::size_t at = start + 1;
  std::size_t name_begin = at;
  while (at < n && !is_space(input_[at]) && input_[at] != '>' && input_[at] != '/') ++at;

  Token token;
  token.type = TokenType::StartTag;
  token.name = normalize_name(input_.substr(name_begin, at - name_begin));

  bool slash_pending = false;
  while (true) {
    while (at < n && (is_space(input_[at]) || input_[at] == '/')) {
      slash_pending = input_[at] == '/';
      ++at;
    }
    if (at >= n) return std::nullopt;  // unterminated tag: treated as text
    if (input_[at] == '>') {
      token.self_closing = slash_pending;
      ++at;
      break;
    }
    slash_pending = false;
    std::size_t attr_begin = at;
    ++at;  // the first character is part of the name even if it is '='
    while (at < n && !is_space(input_[at]) && input_[at] != '>' && input_[at] != '/' &&
           input_[at] != '=') {
      ++at;
    }
    token.attributes.push_back(normalize_name(input_.substr(attr_begin, at - attr_begin)));
    std::size_t look = at;
    while (look < n && is_space(input_[look])) ++look;
    if (look < n && input_[look] == '=') {
      at = look + 1;
      while (at < n && is_space(input_[at])) ++at;
      if (at < n && (input_[at] == '"' || input_[at] == '\'')) {
        std::size_t close = input_.find(input_[at], at + 1);
        if (close == std::string_view::npos) return std::nullopt;
        at = close + 1;
      } else {
        while (at < n && !is_space(input_[at]) && input_[at] != '>') ++at;
      }
    }
  }

  token.raw = input_.substr(start, at - start);
  pos_ = at;
  if (!token.self_closing && is_raw_text_element(token.name)) raw_text_end_ = token.name;
  return token;
}

}  // namespace specnet::html
