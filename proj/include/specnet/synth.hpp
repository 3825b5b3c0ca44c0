#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specnet {

/// Desk-scale stand-in corpus. Even-numbered templates are benign-like
/// (deep, heterogeneous trees, plausible domains); odd-numbered templates
/// are kit-like (shallow, form-heavy, long noisy domains).
struct SynthOptions {
  int templates = 2;
  int pages_per_template = 10;
  double noise = 0.0;  // per-element probability of a structural mutation
  std::uint64_t seed = 1;
  std::size_t target_nodes = 0;  // 0 keeps each family's natural size
};

struct SynthPage {
  std::string html;
  std::string domain;
  int label = 0;  // external: 0 benign, 1 phishing
  int template_index = 0;
};

/// Pages interleaved by template: page i belongs to template i % templates.
std::vector<SynthPage> synthesize(const SynthOptions& options);

/// Per-class page counts for the split manifests.
struct SplitCounts {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

struct WrittenCorpus {
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> splits;  // train, val, test when requested
  std::size_t pages = 0;
};

/// Writes pages/NNNNN.html and manifest.jsonl under `dir`; with `splits`
/// also train.jsonl, val.jsonl and test.jsonl, filled per class in page
/// order. Throws Error(ConfigError) if a class has too few pages.
WrittenCorpus write_corpus(const std::vector<SynthPage>& pages, const std::filesystem::path& dir,
                           const std::optional<SplitCounts>& splits = std::nullopt);

}  // namespace specnet
