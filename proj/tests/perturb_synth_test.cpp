#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "specnet/manifest.hpp"
#include "specnet/perturb.hpp"
#include "specnet/synth.hpp"
#include "support.hpp"

namespace specnet {
namespace {

std::map<std::string, int> tag_counts(const DomTree& t) {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < t.size(); ++i) ++out[std::string(to_string(t.node(i).kind)) + ":" + t.node(i).token];
  return out;
}

SynthOptions options(int templates, int pages, std::uint64_t seed = 1, double noise = 0) {
  SynthOptions o;
  o.templates = templates;
  o.pages_per_template = pages;
  o.seed = seed;
  o.noise = noise;
  return o;
}

TEST(Synth, WritesPagesAndManifest) {
  testing::TempDir dir("synth");
  auto pages = synthesize(options(2, 10));
  ASSERT_EQ(pages.size(), 20u);
  auto written = write_corpus(pages, dir.path(), SplitCounts{5, 2, 3});
  EXPECT_EQ(written.pages, 20u);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir / "pages")) files += e.is_regular_file();
  EXPECT_EQ(files, 20u);
  EXPECT_EQ(testing::lines_of(testing::slurp(written.manifest)).size(), 20u);
  ASSERT_EQ(written.splits.size(), 3u);
  EXPECT_EQ(testing::lines_of(testing::slurp(written.splits[0])).size(), 10u);
  EXPECT_EQ(testing::lines_of(testing::slurp(written.splits[2])).size(), 6u);
  auto loaded = load_manifest(written.manifest);
  EXPECT_TRUE(loaded.errors.empty());
  ASSERT_EQ(loaded.pages.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(*loaded.pages[i].label, static_cast<int>(i % 2));
    EXPECT_EQ(loaded.pages[i].html, pages[i].html);
  }
  try {
    write_corpus(pages, dir / "too-many", SplitCounts{8, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
  }
}

TEST(Synth, NoiselessTemplatesAreIsomorphic) {
  auto pages = synthesize(options(4, 6, 9));
  for (int tpl = 0; tpl < 4; ++tpl) {
    std::string shape;
    for (const auto& p : pages) {
      if (p.template_index != tpl) continue;
      EXPECT_EQ(p.label, tpl % 2);
      const std::string s = testing::tag_shape(parse_html(p.html));
      if (shape.empty()) shape = s;
      EXPECT_EQ(s, shape);
    }
  }
  auto noisy = synthesize(options(4, 6, 9, 0.3));
  std::set<std::string> shapes;
  for (const auto& p : noisy)
    if (p.template_index == 0) shapes.insert(testing::tag_shape(parse_html(p.html)));
  EXPECT_GT(shapes.size(), 1u);
}

TEST(Synth, SameSeedSameBytes) {
  testing::TempDir a("synth-a"), b("synth-b");
  write_corpus(synthesize(options(3, 5, 77, 0.1)), a.path());
  write_corpus(synthesize(options(3, 5, 77, 0.1)), b.path());
  for (const auto& e : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    auto rel = std::filesystem::relative(e.path(), a.path());
    EXPECT_EQ(testing::slurp(e.path()), testing::slurp(b / rel.string())) << rel;
  }
  EXPECT_NE(synthesize(options(3, 5, 78, 0.1)).front().html, synthesize(options(3, 5, 77, 0.1)).front().html);
}

TEST(Synth, TargetSizeIsApproached) {
  SynthOptions o = options(2, 2, 5);
  o.target_nodes = 1000;
  for (const auto& p : synthesize(o)) {
    const double n = static_cast<double>(parse_html(p.html).size());
    EXPECT_GT(n, 700);
    EXPECT_LT(n, 1300);
  }
}

std::string sample_page() {
  auto pages = synthesize(options(2, 1, 3));
  return pages.front().html;
}

TEST(Perturb, ZeroIntensityIsIdentity) {
  const std::string html = sample_page();
  for (auto kind : {PerturbationKind::ShuffleSiblings, PerturbationKind::InsertRedundant, PerturbationKind::WrapSubtree}) {
    auto r = perturb(html, {kind, 0.0, 5});
    EXPECT_EQ(r.html, html);
    EXPECT_TRUE(r.log.empty());
    EXPECT_EQ(r.planned, 0u);
  }
}

TEST(Perturb, ShufflePermutesSiblingsReproducibly) {
  const std::string html = sample_page();
  auto a = perturb(html, {PerturbationKind::ShuffleSiblings, 1.0, 11});
  auto b = perturb(html, {PerturbationKind::ShuffleSiblings, 1.0, 11});
  EXPECT_EQ(a.html, b.html);
  EXPECT_GT(a.eligible_sites, 0u);
  EXPECT_FALSE(a.log.empty());
  const DomTree before = parse_html(html), after = parse_html(a.html);
  EXPECT_EQ(after.size(), before.size());
  EXPECT_EQ(tag_counts(after), tag_counts(before));
  EXPECT_NE(perturb(html, {PerturbationKind::ShuffleSiblings, 1.0, 12}).html, a.html);
}

TEST(Perturb, ThreeChildShuffleFollowsRecordedPermutation) {
  const std::string html = "<html><body><div><a></a><b></b><i></i></div></body></html>";
  auto r = perturb(html, {PerturbationKind::ShuffleSiblings, 1.0, 7});
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.log[0].detail, perturb(html, {PerturbationKind::ShuffleSiblings, 1.0, 7}).log[0].detail);
  ASSERT_EQ(r.log[0].detail.rfind("order=", 0), 0u);
  const std::vector<std::string> before = {"a", "b", "i"};
  std::string expect = "html(body(div(";
  std::stringstream order(r.log[0].detail.substr(6));
  int slot = 0;
  for (std::string item; std::getline(order, item, ','); ++slot) expect += (slot ? "," : "") + before[std::stoul(item)];
  EXPECT_EQ(testing::tag_shape(parse_html(r.html)), expect + ")))");
  EXPECT_NE(expect, "html(body(div(a,b,i");
}

TEST(Perturb, InsertionsAtLowIntensityMatchLog) {
  auto pages = synthesize(options(2, 2, 13));
  for (const auto& page : pages) {
    auto r = perturb(page.html, {PerturbationKind::InsertRedundant, 0.1, 21});
    EXPECT_EQ(r.log.size(), r.planned);
    EXPECT_EQ(parse_html(r.html).size(), parse_html(page.html).size() + r.log.size());
  }
}

TEST(Perturb, InsertRedundantAddsBareSpans) {
  const std::string html = sample_page();
  auto r = perturb(html, {PerturbationKind::InsertRedundant, 0.5, 4});
  ASSERT_FALSE(r.log.empty());
  EXPECT_EQ(r.planned, static_cast<std::size_t>(std::floor(0.5 * static_cast<double>(r.eligible_sites) + 0.5)));
  const DomTree before = parse_html(html), after = parse_html(r.html);
  EXPECT_EQ(after.size(), before.size() + r.log.size());
  auto grown = tag_counts(after);
  auto base = tag_counts(before);
  EXPECT_EQ(grown["tag:span"], base["tag:span"] + static_cast<int>(r.log.size()));
}

TEST(Perturb, WrapAddsOneElementPerSite) {
  const std::string html = sample_page();
  auto r = perturb(html, {PerturbationKind::WrapSubtree, 0.3, 8});
  ASSERT_FALSE(r.log.empty());
  EXPECT_EQ(parse_html(r.html).size(), parse_html(html).size() + r.log.size());
}

TEST(Perturb, TextAndAttributeBytesSurvive) {
  const std::string html =
      "<html><head><title>KEEP-title-7</title></head><body>"
      "<div class=\"KEEP-class\"><p>KEEP text one</p><p>KEEP text two</p><span>KEEP three</span></div>"
      "<ul><li data-x='KEEP &amp; 9'>a</li><li>b</li><li>c</li></ul><!-- KEEP comment -->"
      "<script>var s = '<div>KEEP</div>';</script></body></html>";
  auto markers = [](const std::string& s) {
    std::multiset<std::string> out;
    for (std::size_t at = s.find("KEEP"); at != std::string::npos; at = s.find("KEEP", at + 1))
      out.insert(s.substr(at, s.find_first_of("<'\"", at) - at));
    return out;
  };
  for (auto kind : {PerturbationKind::ShuffleSiblings, PerturbationKind::InsertRedundant, PerturbationKind::WrapSubtree}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto r = perturb(html, {kind, 1.0, seed});
      EXPECT_EQ(markers(r.html), markers(html)) << to_string(kind);
      EXPECT_NE(r.html.find("var s = '<div>KEEP</div>';"), std::string::npos);
    }
  }
}

TEST(Perturb, RejectsBadIntensityAndKind) {
  EXPECT_THROW(perturb("<p>x</p>", {PerturbationKind::WrapSubtree, 1.5, 1}), Error);
  EXPECT_THROW(parse_perturbation_kind("shake"), Error);
  EXPECT_EQ(parse_perturbation_kind("insert_redundant"), PerturbationKind::InsertRedundant);
}

}  // namespace
}  // namespace specnet
