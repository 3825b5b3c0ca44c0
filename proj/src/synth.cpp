#include "specnet/synth.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>

#include "specnet/error.hpp"
#include "specnet/html_tokenizer.hpp"
#include "specnet/manifest.hpp"
#include "specnet/rng.hpp"

namespace specnet {

namespace {

struct Element {
  std::string tag;
  std::vector<std::string> attributes;
  bool text = false;
  std::vector<Element> children;
};

struct Style {
  std::vector<std::string> containers;
  std::vector<std::string> leaves;
  std::vector<std::string> attributes;
  int max_depth = 4;
  double deepen = 0.5;        // chance a new element goes under the newest container
  double container_share = 0.4;
  std::size_t min_elements = 20;
  std::size_t max_elements = 40;
  int max_attributes = 2;
};

const std::vector<std::string> kWords = {
    "river", "stone", "garden", "market", "signal", "harbor", "maple", "orbit",  "pixel", "summit",
    "cedar", "lumen", "atlas",  "meadow", "vector", "ember",  "quartz", "delta", "forge", "willow"};

Style benign_family() {
  Style s;
  s.containers = {"div", "section", "article", "header", "footer", "nav", "main", "aside",
                  "ul",  "ol",      "figure",  "blockquote", "details", "dl"};
  s.leaves = {"a", "p", "span", "img", "h1", "h2", "h3", "h4", "em", "strong", "code",
              "time", "small", "abbr", "cite", "picture", "video", "hr", "br", "q"};
  s.attributes = {"class", "id", "title", "role", "aria-label", "lang", "style", "dir",
                  "hidden", "tabindex", "itemprop", "itemscope", "data-track"};
  s.max_depth = 12;
  s.deepen = 0.75;
  s.container_share = 0.45;
  s.min_elements = 45;
  s.max_elements = 90;
  s.max_attributes = 3;
  return s;
}

Style kit_family() {
  Style s;
  s.containers = {"div", "form", "fieldset"};
  s.leaves = {"input", "input", "input", "label", "button", "img", "a", "span", "select", "p"};
  s.attributes = {"class", "id", "name", "type", "placeholder", "required", "autocomplete",
                  "value", "action", "method"};
  s.max_depth = 3;
  s.deepen = 0.2;
  s.container_share = 0.2;
  s.min_elements = 18;
  s.max_elements = 40;
  s.max_attributes = 4;
  return s;
}

// Each template draws its own subset of the family's vocabulary, so
// templates of one family differ in composition as well as shape.
Style template_style(const Style& family, Rng& rng) {
  Style s = family;
  auto subset = [&rng](std::vector<std::string> items, std::size_t keep) {
    rng.shuffle(items.begin(), items.end());
    items.resize(std::min(keep, items.size()));
    return items;
  };
  s.containers = subset(family.containers, std::max<std::size_t>(1, family.containers.size() * 2 / 3 + 1));
  s.leaves = subset(family.leaves, std::max<std::size_t>(2, family.leaves.size() * 2 / 3 + 1));
  s.attributes = subset(family.attributes, std::max<std::size_t>(2, family.attributes.size() * 2 / 3 + 1));
  return s;
}

bool is_text_leaf(const std::string& tag) {
  static const std::array<std::string_view, 16> kText = {"a",  "p",  "span", "h1",    "h2",    "h3",
                                                         "h4", "em", "strong", "code", "small", "abbr",
                                                         "cite", "label", "button", "q"};
  return std::find(kText.begin(), kText.end(), tag) != kText.end();
}

Element make_element(const Style& s, const std::string& tag, Rng& rng) {
  Element e;
  e.tag = tag;
  const int n = static_cast<int>(rng.index(static_cast<std::size_t>(s.max_attributes) + 1));
  for (int i = 0; i < n; ++i) {
    const auto& attr = rng.pick(s.attributes);
    if (std::find(e.attributes.begin(), e.attributes.end(), attr) == e.attributes.end()) e.attributes.push_back(attr);
  }
  if (tag == "a") e.attributes.insert(e.attributes.begin(), "href");
  if (tag == "img") {
    e.attributes.insert(e.attributes.begin(), "alt");
    e.attributes.insert(e.attributes.begin(), "src");
  }
  e.text = is_text_leaf(tag);
  return e;
}

std::size_t node_cost(const Element& e) { return 1 + e.attributes.size(); }

// Grows a body subtree until the element budget or node target is met.
Element grow(const Style& s, Rng& rng, std::size_t elements, std::size_t target_nodes) {
  Element body;
  body.tag = "body";
  struct Open {
    std::vector<std::size_t> path;
    int depth;
  };
  std::vector<Open> open = {{{}, 1}};
  std::size_t nodes = 0;
  std::size_t made = 0;
  auto at = [&body](const std::vector<std::size_t>& path) -> Element& {
    Element* e = &body;
    for (auto i : path) e = &e->children[i];
    return *e;
  };
  while (target_nodes ? nodes < target_nodes : made < elements) {
    const Open chosen = rng.chance(s.deepen) ? open.back() : open[rng.index(open.size())];
    const bool container = chosen.depth < s.max_depth && rng.chance(s.container_share);
    const std::string& tag = container ? rng.pick(s.containers) : rng.pick(s.leaves);
    Element e = make_element(s, tag, rng);
    nodes += node_cost(e);
    ++made;
    Element& host = at(chosen.path);
    host.children.push_back(std::move(e));
    if (container) {
      auto path = chosen.path;
      path.push_back(host.children.size() - 1);
      open.push_back({std::move(path), chosen.depth + 1});
    }
  }
  return body;
}

void mutate(Element& e, const Style& s, double noise, Rng& rng) {
  for (std::size_t i = 0; i < e.children.size(); ++i) mutate(e.children[i], s, noise, rng);
  if (noise <= 0) return;
  std::vector<Element> out;
  for (auto& child : e.children) {
    if (!rng.chance(noise)) {
      out.push_back(std::move(child));
      continue;
    }
    switch (rng.index(3)) {
      case 0: break;  // drop
      case 1:
        out.push_back(child);
        out.push_back(std::move(child));
        break;
      default:
        out.push_back(std::move(child));
        out.push_back(make_element(s, rng.pick(s.leaves), rng));
        break;
    }
  }
  e.children = std::move(out);
}

std::string words(Rng& rng, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " " : "") + rng.pick(kWords);
  return out;
}

std::string attribute_value(const std::string& attr, Rng& rng) {
  if (attr == "href") return "https://" + rng.pick(kWords) + ".example/" + rng.pick(kWords);
  if (attr == "src") return "/static/" + rng.pick(kWords) + ".png";
  if (attr == "type") return rng.chance(0.5) ? "password" : "text";
  return words(rng, 1 + static_cast<int>(rng.index(2)));
}

void render(const Element& e, Rng& rng, std::string& out) {
  out += "<" + e.tag;
  for (const auto& attr : e.attributes) out += " " + attr + "=\"" + attribute_value(attr, rng) + "\"";
  out += ">";
  if (html::is_void_element(e.tag)) return;
  if (e.text) out += words(rng, 1 + static_cast<int>(rng.index(4)));
  for (const auto& c : e.children) render(c, rng, out);
  out += "</" + e.tag + ">";
}

std::string benign_domain(Rng& rng) {
  static const std::vector<std::string> tlds = {"com", "org", "net", "io", "co.uk", "de"};
  std::string d = rng.pick(kWords);
  if (rng.chance(0.4)) d += rng.pick(kWords);
  if (rng.chance(0.2)) d = "www." + d;
  return d + "." + rng.pick(tlds);
}

std::string kit_domain(Rng& rng) {
  static const std::vector<std::string> bait = {"secure", "login", "verify", "account", "update", "signin", "auth"};
  static const std::vector<std::string> tlds = {"xyz", "top", "info", "online", "site", "click"};
  std::string d = rng.pick(bait) + "-" + rng.pick(kWords) + std::to_string(rng.index(10)) + "-" + rng.pick(bait);
  d += "-" + std::to_string(1000 + rng.index(9000));
  if (rng.chance(0.5)) d += "." + rng.pick(bait) + "-" + rng.pick(bait);
  return d + "." + rng.pick(tlds);
}

std::string render_page(const Element& body, bool kit, Rng& rng) {
  std::string out = "<!DOCTYPE html>\n<html lang=\"en\"><head><meta charset=\"utf-8\"><title>" + words(rng, 3) +
                    "</title>";
  if (kit) out += "<script>var t = \"" + words(rng, 2) + "\";</script>";
  else out += "<link rel=\"stylesheet\" href=\"/site.css\"><meta name=\"viewport\" content=\"width=device-width\">";
  out += "</head>";
  render(body, rng, out);
  out += "</html>\n";
  return out;
}

}  // namespace

std::vector<SynthPage> synthesize(const SynthOptions& options) {
  if (options.templates < 1 || options.pages_per_template < 0 || !(options.noise >= 0 && options.noise <= 1)) {
    throw Error(ErrorKind::ConfigError, "synth: templates >= 1, pages >= 0 and noise in [0, 1] required");
  }
  Rng master(options.seed);
  std::vector<Style> styles;
  std::vector<Element> skeletons;
  for (int t = 0; t < options.templates; ++t) {
    Rng rng = master.fork();
    const bool kit = t % 2 == 1;
    Style style = template_style(kit ? kit_family() : benign_family(), rng);
    const std::size_t budget = style.min_elements + rng.index(style.max_elements - style.min_elements + 1);
    skeletons.push_back(grow(style, rng, budget, options.target_nodes));
    styles.push_back(std::move(style));
  }
  std::vector<SynthPage> pages;
  for (int p = 0; p < options.pages_per_template; ++p) {
    for (int t = 0; t < options.templates; ++t) {
      Rng rng = master.fork();
      const bool kit = t % 2 == 1;
      Element body = skeletons[static_cast<std::size_t>(t)];
      mutate(body, styles[static_cast<std::size_t>(t)], options.noise, rng);
      SynthPage page;
      page.html = render_page(body, kit, rng);
      page.domain = kit ? kit_domain(rng) : benign_domain(rng);
      page.label = kit ? 1 : 0;
      page.template_index = t;
      pages.push_back(std::move(page));
    }
  }
  return pages;
}

WrittenCorpus write_corpus(const std::vector<SynthPage>& pages, const std::filesystem::path& dir,
                           const std::optional<SplitCounts>& splits) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "pages", ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + (dir / "pages").string());

  auto open = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
    return out;
  };

  WrittenCorpus written;
  written.manifest = dir / "manifest.jsonl";
  std::ofstream manifest = open(written.manifest);
  std::vector<std::string> relative;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "pages/%05zu.html", i);
    std::ofstream html = open(dir / name);
    html << pages[i].html;
    write_manifest_line(manifest, name, pages[i].domain, pages[i].label);
    relative.emplace_back(name);
  }
  written.pages = pages.size();
  if (!splits) return written;

  const std::array<std::size_t, 3> want = {splits->train, splits->validation, splits->test};
  const std::array<const char*, 3> names = {"train.jsonl", "val.jsonl", "test.jsonl"};
  std::array<std::ofstream, 3> outs;
  for (std::size_t s = 0; s < 3; ++s) {
    written.splits.push_back(dir / names[s]);
    outs[s] = open(written.splits.back());
  }
  std::array<std::size_t, 2> seen = {0, 0};
  for (std::size_t i = 0; i < pages.size(); ++i) {
    const auto label = static_cast<std::size_t>(pages[i].label);
    std::size_t k = seen[label]++;
    for (std::size_t s = 0; s < 3; ++s) {
      if (k < want[s]) {
        write_manifest_line(outs[s], relative[i], pages[i].domain, pages[i].label);
        break;
      }
      k -= want[s];
    }
  }
  const std::size_t need = want[0] + want[1] + want[2];
  if (seen[0] < need || seen[1] < need) {
    throw Error(ErrorKind::ConfigError, "synth: not enough pages per class for the requested splits");
  }
  return written;
}

}  // namespace specnet
