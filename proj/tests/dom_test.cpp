#include <gtest/gtest.h>

#include <set>

#include "specnet/corpus.hpp"
#include "specnet/dom.hpp"
#include "specnet/error.hpp"
#include "specnet/manifest.hpp"
#include "support.hpp"

namespace specnet {
namespace {

using testing::tag_shape;

std::vector<std::string> tokens_of(const DomTree& t) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t.node(i).token);
  return out;
}

TEST(ParseHtml, AnchorKeepsStructureDropsContent) {
  DomTree t = parse_html(R"(<html><body><a href="x">hi</a></body></html>)");
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(tokens_of(t), (std::vector<std::string>{"html", "body", "a", "href"}));
  EXPECT_EQ(t.node(3).kind, NodeKind::Attribute);
  EXPECT_EQ(t.parent(3), 2u);
  EXPECT_EQ(t.depth(3), 3u);
}

TEST(ParseHtml, EmptyInputIsLoneHtmlNode) {
  DomTree t = parse_html("");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.node(0).token, "html");
}

TEST(ParseHtml, OversizeDocumentRejected) {
  std::string html;
  for (int i = 0; i < 100; ++i) html += "<div>";
  ParseOptions options;
  options.max_nodes = 50;
  try {
    parse_html(html, options);
    FAIL() << "expected OversizeDocument";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OversizeDocument);
  }
}

// Element trees libxml2's HTML parser (through lxml) recovers from the same
// bytes, recorded once and frozen here.
struct RecoveryCase {
  const char* html;
  const char* shape;
};

const RecoveryCase kRecovery[] = {
    {"<html><body><a href=\"x\">hi</a></body></html>", "html(body(a))"},
    {"<div><p></div>", "html(body(div(p)))"},
    {"<p>one<p>two", "html(body(p,p))"},
    {"<ul><li>a<li>b</ul>", "html(body(ul(li,li)))"},
    {"<table><tr><td>x</td></tr></table>", "html(body(table(tr(td))))"},
    {"<b><i>x</b>y</i>", "html(body(b(i)))"},
    {"<title>t</title><div>x</div>", "html(head(title),body(div))"},
    {"<p><div>x</div></p>", "html(body(p,div))"},
    {"<select><option>a<option>b</select>", "html(body(select(option,option)))"},
    {"<dl><dt>a<dd>b<dt>c</dl>", "html(body(dl(dt,dd,dt)))"},
    {"<a><a>x</a></a>", "html(body(a,a))"},
    {"<h1><h2>x</h2></h1>", "html(body(h1(h2)))"},
    {"<table><div>x</div></table>", "html(body(table(div)))"},
    {"<div><span></div></span>", "html(body(div(span)))"},
    {"<script>var a=\"<div>\";</script><p>x</p>", "html(head(script),body(p))"},
    {"<body><frameset></frameset>", "html(body(frameset))"},
    {"<img src=a><br><hr>", "html(body(img,br,hr))"},
    {"<table><td>x</table>", "html(body(table(td)))"},
    {"<p><table></table>", "html(body(p,table))"},
    {"<button><button>x</button>", "html(body(button(button)))"},
    {"<li>a<div>b<li>c", "html(body(li(div(li))))"},
    {"<svg><circle r=1></circle></svg>", "html(body(svg(circle)))"},
};

TEST(ParseHtml, MatchesReferenceRecovery) {
  for (const auto& c : kRecovery) EXPECT_EQ(tag_shape(parse_html(c.html)), c.shape) << c.html;
}

TEST(ParseHtml, DeterministicAndValidOnRandomBytes) {
  Rng rng(11);
  const std::string alphabet = "<>/=\"' abcdivpx-!\n&;";
  for (int i = 0; i < 300; ++i) {
    std::string bytes;
    const std::size_t n = rng.index(200);
    for (std::size_t k = 0; k < n; ++k) {
      bytes += rng.chance(0.2) ? static_cast<char>(rng.index(256)) : alphabet[rng.index(alphabet.size())];
    }
    DomTree a = parse_html(bytes);
    EXPECT_NO_THROW(a.validate());
    EXPECT_TRUE(a == parse_html(bytes));
  }
}

TEST(ParseHtml, TextAndValueSentinelsNeverBecomeTokens) {
  const std::string sentinel = "zq9sentinel";
  const std::string html = "<div class=\"" + sentinel + "1\" data-x='" + sentinel + "2'>" + sentinel +
                           "3<!-- " + sentinel + "4 --><script>var " + sentinel + "5;</script><p title=" +
                           sentinel + "6>" + sentinel + "7</p></div>";
  for (const auto& token : tokens_of(parse_html(html))) EXPECT_EQ(token.find(sentinel), std::string::npos);
}

TEST(DecomposeNode, AttributesBecomeChildren) {
  std::vector<std::string> img = {"src", "alt"};
  DomTree t = decompose_node("img", img);
  EXPECT_EQ(tokens_of(t), (std::vector<std::string>{"img", "src", "alt"}));
  EXPECT_EQ(t.children(0).size(), 2u);

  DomTree br = decompose_node("br", std::vector<std::string>{});
  EXPECT_EQ(br.size(), 1u);

  std::vector<std::string> dup = {"href", "href", "rel"};
  EXPECT_EQ(tokens_of(decompose_node("a", dup)), (std::vector<std::string>{"a", "href", "rel"}));
}

TEST(AttachDomain, AddsFirstChildOfRoot) {
  DomTree t = parse_html(R"(<a href="x"></a>)");
  ASSERT_EQ(t.size(), 4u);
  DomTree d = attach_domain_node(t, "paypa1-login.com");
  ASSERT_EQ(d.size(), 5u);
  const std::size_t first = d.children(0).front();
  EXPECT_EQ(d.node(first).kind, NodeKind::Domain);
  EXPECT_EQ(d.node(first).token, "paypa1-login.com");
  EXPECT_EQ(d.domain_node(), first);
  EXPECT_NO_THROW(d.validate());

  EXPECT_EQ(attach_domain_node(parse_html(""), "a.com").size(), 2u);
}

TEST(AttachDomain, RejectsDuplicateAndEmpty) {
  DomTree d = attach_domain_node(parse_html(""), "a.com");
  try {
    attach_domain_node(d, "b.com");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DuplicateDomain);
  }
  try {
    attach_domain_node(parse_html(""), "  ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingDomain);
  }
}

TEST(AttachDomain, WithoutDomainRestoresTree) {
  DomTree t = parse_html("<div><p class=a></p></div>");
  EXPECT_TRUE(attach_domain_node(t, "x.org").without_domain() == t);
}

TEST(Manifest, ReadsInOrderAndSkipsMalformed) {
  testing::TempDir dir("manifest");
  testing::spit(dir / "a.html", "<p>a</p>");
  testing::spit(dir / "b.html", "<p>b</p>");
  testing::spit(dir / "c.html", "<p>c</p>");
  {
    std::ofstream m(dir / "m.jsonl");
    write_manifest_line(m, "a.html", "a.com", 0);
    write_manifest_line(m, "b.html", std::nullopt, 1);
    write_manifest_line(m, "c.html", "c.com", std::nullopt);
  }
  auto loaded = load_manifest(dir / "m.jsonl");
  ASSERT_EQ(loaded.pages.size(), 3u);
  EXPECT_EQ(loaded.pages[0].html, "<p>a</p>");
  EXPECT_EQ(*loaded.pages[0].domain, "a.com");
  EXPECT_FALSE(loaded.pages[1].domain);
  EXPECT_EQ(*loaded.pages[1].label, 1);
  EXPECT_FALSE(loaded.pages[2].label);

  {
    std::ofstream m(dir / "bad.jsonl");
    write_manifest_line(m, "a.html", "a.com", 0);
    m << "{not json\n";
  }
  auto partial = load_manifest(dir / "bad.jsonl");
  EXPECT_EQ(partial.pages.size(), 1u);
  EXPECT_EQ(partial.skipped, 1u);
}

TEST(Manifest, MissingFileReportedAndStreamContinues) {
  testing::TempDir dir("manifest-missing");
  testing::spit(dir / "a.html", "<p>a</p>");
  {
    std::ofstream m(dir / "m.jsonl");
    write_manifest_line(m, "gone.html", "x.com", 1);
    write_manifest_line(m, "a.html", "a.com", 0);
  }
  ManifestReader reader(dir / "m.jsonl");
  auto first = reader.next();
  ASSERT_TRUE(first);
  EXPECT_EQ(first->error, ErrorKind::FileMissing);
  auto second = reader.next();
  ASSERT_TRUE(second && second->page);
  EXPECT_FALSE(reader.next());
}

TEST(Ingest, MissingDomainWhenRequired) {
  TrainConfig config;
  RawPage page{"<p></p>", std::nullopt, 0, "p"};
  try {
    ingest_page(page, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingDomain);
  }
  config.use_domain = false;
  EXPECT_FALSE(ingest_page(page, config).domain_node());
}

}  // namespace
}  // namespace specnet
