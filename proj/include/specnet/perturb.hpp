#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "specnet/dom.hpp"
#include "specnet/markup.hpp"

namespace specnet {

enum class PerturbationKind { ShuffleSiblings, InsertRedundant, WrapSubtree };

std::string_view to_string(PerturbationKind kind);
/// Throws Error(ConfigError) for an unknown name.
PerturbationKind parse_perturbation_kind(std::string_view name);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::ShuffleSiblings;
  double intensity = 0.1;  // fraction of eligible sites, in [0, 1]
  std::uint64_t seed = 1;
};

struct PerturbationRecord {
  PerturbationKind kind;
  std::size_t site = 0;  // pre-order element index in the input page
  std::string detail;    // permutation, insertion slot or wrapper tag
};

struct PerturbationResult {
  std::string html;
  std::vector<PerturbationRecord> log;
  std::size_t eligible_sites = 0;
  std::size_t planned = 0;  // floor(intensity * eligible + 0.5)
};

/// Tree the parser should produce for a markup tree, built directly from
/// its element structure.
DomTree markup_to_dom(const MarkupNode& document);

/// Applies one perturbation kind. Text, comments and every attribute
/// value keep their exact bytes; only element structure changes. A site
/// whose rewrite would be re-parsed into a different structure than
/// intended is passed over for the next candidate. Throws Error(ConfigError)
/// for an intensity outside [0, 1].
PerturbationResult perturb(std::string_view html, const PerturbationSpec& spec);

}  // namespace specnet
