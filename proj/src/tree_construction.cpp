#include "specnet/tree_construction.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

namespace specnet::html {
namespace {

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& set, std::string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

constexpr std::array<std::string_view, 7> kHeadContent = {
    "title", "meta", "link", "base", "style", "script", "noscript"};

constexpr std::array<std::string_view, 31> kClosesParagraph = {
    "address", "article", "aside",  "blockquote", "center", "details", "dialog", "dir",
    "div",     "dl",      "fieldset", "figcaption", "figure", "footer", "form",  "h1",
    "h2",      "h3",      "h4",     "h5",         "h6",     "header",  "hgroup", "hr",
    "main",    "menu",    "nav",    "ol",         "p",      "pre",     "section"};

constexpr std::array<std::string_view, 2> kParagraphTail = {"table", "ul"};

// Whether starting `incoming` implicitly ends the element `current`.
bool auto_closes(std::string_view current, std::string_view incoming) {
  if (current == "p") return contains(kClosesParagraph, incoming) || contains(kParagraphTail, incoming);
  if (current == "li") return incoming == "li";
  if (current == "a") return incoming == "a";
  if (current == "dt" || current == "dd") return incoming == "dt" || incoming == "dd";
  if (current == "option") return incoming == "option" || incoming == "optgroup";
  if (current == "optgroup") return incoming == "optgroup";
  if (current == "td" || current == "th") {
    return incoming == "td" || incoming == "th" || incoming == "tr" || incoming == "tbody" ||
           incoming == "thead" || incoming == "tfoot";
  }
  if (current == "tr") {
    return incoming == "tr" || incoming == "tbody" || incoming == "thead" || incoming == "tfoot";
  }
  if (current == "thead" || current == "tbody" || current == "tfoot") {
    return incoming == "tbody" || incoming == "thead" || incoming == "tfoot";
  }
  return false;
}

class Builder {
 public:
  explicit Builder(TreeSink& sink) : sink_(sink) {}

  void start_tag(const Token& token) {
    const std::string& name = token.name;
    if (name == "html") {
      if (!stack_.empty()) return sink_.passthrough(token);
      open(name, &token);
      return;
    }
    ensure_root();
    if (name == "head") {
      if (head_seen_ || body_started_) return sink_.passthrough(token);
      head_seen_ = true;
      open(name, &token);
      return;
    }
    if (name == "body") {
      if (body_started_) return sink_.passthrough(token);
      close_head();
      body_started_ = true;
      open(name, &token);
      return;
    }
    if (!body_started_ && contains(kHeadContent, name)) {
      if (!head_seen_) {
        head_seen_ = true;
        open("head", nullptr);
      }
    } else if (!body_started_) {
      close_head();
      body_started_ = true;
      open("body", nullptr);
    }
    while (stack_.size() > 1 && auto_closes(stack_.back(), name)) close(nullptr);
    open(name, &token);
    if (token.self_closing || is_void_element(name)) close(nullptr);
  }

  void end_tag(const Token& token) {
    const std::string& name = token.name;
    if (name == "html" || name == "body") return sink_.passthrough(token);
    auto it = std::find(stack_.rbegin(), stack_.rend(), name);
    if (it == stack_.rend()) return sink_.passthrough(token);
    std::size_t depth = static_cast<std::size_t>(std::distance(stack_.rbegin(), it));
    for (std::size_t i = 0; i < depth; ++i) close(nullptr);
    close(&token);
  }

  void finish() {
    ensure_root();
    while (!stack_.empty()) close(nullptr);
  }

 private:
  void ensure_root() {
    if (stack_.empty() && !root_done_) open("html", nullptr);
  }

  void close_head() {
    if (!stack_.empty() && stack_.back() == "head") close(nullptr);
    // Head content left open (e.g. an unterminated <title>) is closed with it.
    auto it = std::find(stack_.begin(), stack_.end(), "head");
    if (it != stack_.end()) {
      while (stack_.back() != "head") close(nullptr);
      close(nullptr);
    }
  }

  void open(std::string_view name, const Token* token) {
    stack_.emplace_back(name);
    sink_.open_element(name, token);
  }

  void close(const Token* token) {
    stack_.pop_back();
    if (stack_.empty()) root_done_ = true;
    sink_.close_element(token);
  }

  TreeSink& sink_;
  std::vector<std::string> stack_;
  bool head_seen_ = false;
  bool body_started_ = false;
  bool root_done_ = false;
};

}  // namespace

void construct_tree(std::string_view html, TreeSink& sink) {
  Builder builder(sink);
  Tokenizer tokenizer(html);
  while (auto token = tokenizer.next()) {
    switch (token->type) {
      case TokenType::StartTag: builder.start_tag(*token); break;
      case TokenType::EndTag: builder.end_tag(*token); break;
      default: sink.passthrough(*token); break;
    }
  }
  builder.finish();
}

}  // namespace specnet::html
