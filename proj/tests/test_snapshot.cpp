#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "phishscan/errors.hpp"
#include "phishscan/snapshot.hpp"
#include "test_support.hpp"

namespace phishscan {
namespace {

using testing::official_suffixes;

PageSnapshot parse(const std::string& json) { return parse_snapshot(json, official_suffixes()); }

TEST(Snapshot, MinimalFile) {
  const auto s = parse(R"({"starting_url": "http://a.com", "landing_url": "http://a.com"})");
  ASSERT_EQ(s.redirection_chain.size(), 1u);
  EXPECT_EQ(s.redirection_chain[0], "http://a.com");
  EXPECT_TRUE(s.text.empty());
  EXPECT_TRUE(s.href_links.empty());
  EXPECT_FALSE(s.image_terms.has_value());
}

TEST(Snapshot, RawHtmlIsDigested) {
  const auto s = parse(R"({"starting_url": "http://a.com", "landing_url": "http://a.com",
      "raw_html": "<title>Pay</title><body>hi <a href='http://b.com'>x</a></body>"})");
  EXPECT_EQ(s.title, "Pay");
  EXPECT_EQ(s.text, "hi x");
  EXPECT_EQ(s.href_links, std::vector<std::string>{"http://b.com"});
}

TEST(Snapshot, ExplicitFieldsWinOverDigest) {
  const auto s = parse(R"({"starting_url": "http://a.com", "landing_url": "http://a.com",
      "title": "Explicit", "raw_html": "<title>Pay</title><body>hi</body>"})");
  EXPECT_EQ(s.title, "Explicit");
  EXPECT_EQ(s.text, "hi");
}

TEST(Snapshot, MissingLandingUrl) {
  try {
    parse(R"({"starting_url": "http://a.com"})");
    FAIL() << "expected MalformedSnapshot";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedSnapshot);
  }
}

TEST(Snapshot, ChainMustRunFromStartToLanding) {
  EXPECT_THROW(parse(R"({"starting_url": "http://a.com", "landing_url": "http://b.com",
      "redirection_chain": ["http://b.com", "http://a.com"]})"),
               Error);
  const auto s = parse(R"({"starting_url": "http://a.com", "landing_url": "http://b.com"})");
  EXPECT_EQ(s.redirection_chain, (std::vector<std::string>{"http://a.com", "http://b.com"}));
}

TEST(Snapshot, NegativeCountsRejected) {
  EXPECT_THROW(parse(R"({"starting_url": "http://a.com", "landing_url": "http://a.com", "input_count": -1})"), Error);
}

TEST(Snapshot, JsonRoundTrip) {
  const auto s = testing::corpus_snapshot("target_phish_globalpay.json");
  const auto again = parse(snapshot_to_json(s));
  EXPECT_EQ(again.starting_url, s.starting_url);
  EXPECT_EQ(again.redirection_chain, s.redirection_chain);
  EXPECT_EQ(again.logged_links, s.logged_links);
  EXPECT_EQ(again.href_links, s.href_links);
  EXPECT_EQ(again.title, s.title);
  EXPECT_EQ(again.image_terms, s.image_terms);
  EXPECT_EQ(again.input_count, s.input_count);
  EXPECT_EQ(again.label, s.label);
}

TEST(DigestHtml, Copyright) {
  EXPECT_EQ(digest_html("<body>© 2015 Examplecorp</body>", "http://a.com").copyright, "© 2015 Examplecorp");
  EXPECT_EQ(digest_html("<body><p>Home</p><p>&copy; 2016 Foo Ltd</p></body>", "http://a.com").copyright,
            "© 2016 Foo Ltd");
  EXPECT_EQ(digest_html("<body><div>Copyright 2014 Bar</div></body>", "http://a.com").copyright, "Copyright 2014 Bar");
  EXPECT_EQ(digest_html("<body>nothing here</body>", "http://a.com").copyright, "");
}

TEST(DigestHtml, Counts) {
  const auto d = digest_html("<body><input/><input/><img/><iframe/></body>", "http://a.com");
  EXPECT_EQ(d.input_count, 2u);
  EXPECT_EQ(d.image_count, 1u);
  EXPECT_EQ(d.iframe_count, 1u);
}

TEST(DigestHtml, RelativeHref) {
  const auto d = digest_html("<body><a href=\"/ap/x\">go</a></body>", "http://a.com");
  EXPECT_EQ(d.href_links, std::vector<std::string>{"http://a.com/ap/x"});
}

TEST(DigestHtml, SkipsScriptStyleAndComments) {
  const auto d = digest_html(
      "<html><head><title>T &amp; C</title><style>p{}</style></head><body><!-- hidden -->"
      "<script>var x = '<a href=\"http://evil\">';</script><p>Visible</p></body></html>",
      "http://a.com");
  EXPECT_EQ(d.title, "T & C");
  EXPECT_EQ(d.text, "Visible");
  EXPECT_TRUE(d.href_links.empty());
}

TEST(DigestHtml, BaseTagAndNonHierarchicalLinks) {
  const auto d = digest_html(
      "<head><base href='http://cdn.b.com/dir/'></head><body><a href='page.html'>a</a>"
      "<a href='mailto:x@y.com'>m</a><a href='javascript:void(0)'>j</a></body>",
      "http://a.com/");
  EXPECT_EQ(d.href_links, std::vector<std::string>{"http://cdn.b.com/dir/page.html"});
}

TEST(DigestHtml, NeverThrowsOnFuzz) {
  std::mt19937_64 rng(11);
  const std::string pieces[] = {"<", ">", "</", "<a href='", "'", "\"", "<script>", "</script>", "<!--", "-->",
                                "&", "&#", "&#x", ";", "<title>", "<iframe srcdoc=\"", "=", " ", "x", "\xc3",
                                "\xa9", "\xff", "<body>", "<input", "/>", "<base href=", "http://", "//", "?"};
  for (int i = 0; i < 2000; ++i) {
    std::string html;
    const auto n = rng() % 60;
    for (std::size_t k = 0; k < n; ++k) {
      if (rng() % 3 == 0) html += static_cast<char>(rng() % 256);
      else html += pieces[rng() % std::size(pieces)];
    }
    EXPECT_NO_THROW(digest_html(html, "http://a.com/"));
  }
}

TEST(SplitLinks, ByChainRdns) {
  PageSnapshot s;
  s.starting_url = s.landing_url = "http://a.com";
  s.redirection_chain = {"http://a.com"};
  s.logged_links = {"http://x.a.com/i.png", "http://cdn.b.com/j.js"};
  const auto split = split_links(s, official_suffixes());
  ASSERT_EQ(split.internal_logged.size(), 1u);
  ASSERT_EQ(split.external_logged.size(), 1u);
  EXPECT_EQ(split.internal_logged[0].url, "http://x.a.com/i.png");
  EXPECT_EQ(split.external_logged[0].url, "http://cdn.b.com/j.js");
}

TEST(SplitLinks, ChainRdnsAllCountAsInternal) {
  PageSnapshot s;
  s.starting_url = "http://a.com";
  s.landing_url = "http://b.com";
  s.redirection_chain = {"http://a.com", "http://b.com"};
  s.href_links = {"http://b.com/p"};
  const auto split = split_links(s, official_suffixes());
  EXPECT_EQ(split.internal_href.size(), 1u);
  EXPECT_TRUE(split.external_href.empty());
  EXPECT_EQ(split.internal_rdns, (std::set<std::string>{"a.com", "b.com"}));
}

TEST(SplitLinks, NoLinks) {
  PageSnapshot s;
  s.starting_url = s.landing_url = "http://a.com";
  s.redirection_chain = {"http://a.com"};
  const auto split = split_links(s, official_suffixes());
  EXPECT_TRUE(split.internal_logged.empty());
  EXPECT_TRUE(split.external_logged.empty());
  EXPECT_TRUE(split.internal_href.empty());
  EXPECT_TRUE(split.external_href.empty());
}

TEST(SplitLinks, PartitionAndDeterminismOverCorpus) {
  for (const auto& entry : list_corpus(testing::corpus_dir(), std::nullopt)) {
    const auto s = testing::corpus_snapshot(entry.filename);
    const auto split = split_links(s, official_suffixes());
    std::size_t parseable_logged = 0;
    std::size_t parseable_href = 0;
    for (const auto& u : s.logged_links) {
      try {
        parse_url(u, official_suffixes());
        ++parseable_logged;
      } catch (const Error&) {
      }
    }
    for (const auto& u : s.href_links) {
      try {
        parse_url(u, official_suffixes());
        ++parseable_href;
      } catch (const Error&) {
      }
    }
    EXPECT_EQ(split.internal_logged.size() + split.external_logged.size(), parseable_logged) << entry.filename;
    EXPECT_EQ(split.internal_href.size() + split.external_href.size(), parseable_href) << entry.filename;
    EXPECT_EQ(split.dropped, s.logged_links.size() + s.href_links.size() - parseable_logged - parseable_href);

    const auto again = split_links(testing::corpus_snapshot(entry.filename), official_suffixes());
    EXPECT_EQ(again.internal_logged, split.internal_logged);
    EXPECT_EQ(again.external_href, split.external_href);
    EXPECT_EQ(again.internal_rdns, split.internal_rdns);
  }
}

TEST(SplitLinks, UnparseableLinksAreDropped) {
  PageSnapshot s;
  s.starting_url = s.landing_url = "http://a.com";
  s.redirection_chain = {"http://a.com"};
  s.href_links = {"not a url", "http://a.com/ok", "http://..bad/"};
  const auto split = split_links(s, official_suffixes());
  EXPECT_EQ(split.internal_href.size(), 1u);
  EXPECT_EQ(split.dropped, 2u);
}

TEST(Corpus, ManifestAndListing) {
  const auto entries = list_corpus(testing::corpus_dir(), testing::test_data_dir() / "manifest_classifier.csv");
  EXPECT_EQ(entries.size(), 20u);
  EXPECT_TRUE(std::is_sorted(entries.begin(), entries.end(),
                             [](const auto& a, const auto& b) { return a.filename < b.filename; }));
  for (const auto& e : entries) {
    ASSERT_TRUE(e.label.has_value());
    EXPECT_EQ(*e.label, e.filename.rfind("phish", 0) == 0 ? Label::Phish : Label::Legitimate);
  }
  EXPECT_EQ(list_corpus(testing::corpus_dir(), std::nullopt).size(), 30u);
}

TEST(Corpus, Labels) {
  EXPECT_EQ(parse_label("phish"), Label::Phish);
  EXPECT_EQ(parse_label("legit"), Label::Legitimate);
  EXPECT_EQ(parse_label("legitimate"), Label::Legitimate);
  EXPECT_FALSE(parse_label("maybe").has_value());
  EXPECT_EQ(label_name(Label::Phish), "phish");
}

}  // namespace
}  // namespace phishscan
