#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace specnet::resources {

// Contents of data/*.txt, embedded at build time.
std::string_view html_elements();
std::string_view html_attributes();
std::string_view domain_charset();

/// One token per line; lines starting with "# " are comments and blank lines
/// are skipped.
inline std::vector<std::string> parse_token_list(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && !line.starts_with("# ")) tokens.emplace_back(line);
    pos = end + 1;
  }
  return tokens;
}

/// The first comment line, used as the list's version identifier.
inline std::string list_version(std::string_view text) {
  if (!text.starts_with("# ")) return "unversioned";
  auto end = text.find('\n');
  return std::string(text.substr(2, end == std::string_view::npos ? text.size() - 2 : end - 2));
}

}  // namespace specnet::resources
