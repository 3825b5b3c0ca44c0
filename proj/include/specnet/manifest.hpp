#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "specnet/error.hpp"

namespace specnet {

/// External label convention: 0 = benign, 1 = phishing.
struct RawPage {
  std::string html;
  std::optional<std::string> domain;
  std::optional<int> label;
  std::string source;  // where the page came from, for diagnostics
};

/// Reads raw bytes of a file. Throws Error(FileMissing) if it does not exist
/// and Error(IoFailure) if it cannot be read.
std::string read_file_bytes(const std::filesystem::path& path);

/// Line-delimited JSON manifest reader:
///   {"html_path": "...", "domain": "..." | null, "label": 0 | 1 | null}
///
/// Relative html paths resolve against the manifest's directory. Malformed
/// lines are skipped and counted; a page whose HTML file is missing is
/// reported as an item carrying the error, and reading continues.
class ManifestReader {
 public:
  struct Item {
    std::size_t line = 0;
    std::string html_path;
    std::optional<RawPage> page;
    std::optional<ErrorKind> error;
    std::string message;
  };

  explicit ManifestReader(const std::filesystem::path& path);

  std::optional<Item> next();

  std::size_t skipped() const noexcept { return skipped_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  std::ifstream in_;
  std::filesystem::path base_dir_;
  std::size_t line_no_ = 0;
  std::size_t skipped_ = 0;
  std::vector<std::string> warnings_;
};

struct LoadedPages {
  std::vector<RawPage> pages;
  std::vector<std::string> errors;  // missing files, malformed lines
  std::size_t skipped = 0;
};

/// Drains a manifest; pages that fail to load are listed in `errors`.
LoadedPages load_manifest(const std::filesystem::path& path);

void write_manifest_line(std::ostream& out, const std::string& html_path,
                         const std::optional<std::string>& domain, std::optional<int> label);

}  // namespace specnet
