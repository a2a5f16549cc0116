#include <gtest/gtest.h>

#include <algorithm>

#include "phishscan/target_id.hpp"
#include "test_support.hpp"

namespace phishscan {
namespace {

using testing::official_suffixes;

PageSnapshot simple_page(const std::string& url) {
  PageSnapshot s;
  s.starting_url = s.landing_url = url;
  s.redirection_chain = {url};
  return s;
}

FixtureSearchClient fixture_client() {
  return FixtureSearchClient::load(testing::test_data_dir() / "search_index.json");
}

// Returns nothing for every query.
class EmptyClient : public SearchClient {
 public:
  std::vector<SearchResult> query(const std::string&, std::size_t) override { return {}; }
};

TEST(Keyterms, BoostedEligibility) {
  auto s = simple_page("http://qq.example.com/");
  s.title = "Northwind deals";
  s.text = "Northwind has deals. Lonely word here.";
  const PageTerms page(s, official_suffixes());
  const auto terms = keyterms_boosted(page).terms;
  EXPECT_NE(std::find(terms.begin(), terms.end(), "northwind"), terms.end());
  EXPECT_NE(std::find(terms.begin(), terms.end(), "deals"), terms.end());
  EXPECT_EQ(std::find(terms.begin(), terms.end(), "lonely"), terms.end());
}

TEST(Keyterms, FixtureBrandRankedFirst) {
  const auto s = testing::corpus_snapshot("target_phish_examplebank.json");
  const PageTerms page(s, official_suffixes());
  const auto boosted = keyterms_boosted(page);
  // visible counts: examplebank 5, then banking/online/sign 2 each
  EXPECT_EQ(boosted.terms, (std::vector<std::string>{"examplebank", "banking", "online", "sign"}));
  EXPECT_EQ(boosted.query(), "examplebank banking online sign");
}

TEST(Keyterms, ProminentExcludesTextHrefOnly) {
  auto s = simple_page("http://qq.example.com/");
  s.text = "Politics and sports today";
  s.href_links = {"http://qq.example.com/politics", "http://qq.example.com/sports"};
  s.title = "Sports";
  const PageTerms page(s, official_suffixes());
  const auto prominent = keyterms_prominent(page).terms;
  const auto boosted = keyterms_boosted(page).terms;
  EXPECT_EQ(prominent, std::vector<std::string>{"sports"});
  EXPECT_NE(std::find(boosted.begin(), boosted.end(), "politics"), boosted.end());
}

TEST(Keyterms, NewsPageProminentSubsetOfBoosted) {
  const auto s = testing::corpus_snapshot("target_legit_dailyherald.json");
  const PageTerms page(s, official_suffixes());
  const auto boosted = keyterms_boosted(page, 50).terms;
  const auto prominent = keyterms_prominent(page, 50).terms;
  for (const auto& t : prominent) EXPECT_NE(std::find(boosted.begin(), boosted.end(), t), boosted.end()) << t;
  EXPECT_LT(prominent.size(), boosted.size());
  EXPECT_EQ(std::find(prominent.begin(), prominent.end(), "politics"), prominent.end());
}

TEST(Keyterms, Ocr) {
  auto s = simple_page("http://qq.example.com/");
  s.title = "PayPal";
  const PageTerms no_image(s, official_suffixes());
  EXPECT_TRUE(keyterms_ocr(no_image).terms.empty());
  s.image_terms = std::vector<std::string>{"PayPal", "xqzv"};
  const PageTerms with_image(s, official_suffixes());
  EXPECT_EQ(keyterms_ocr(with_image).terms, std::vector<std::string>{"paypal"});
}

TEST(Keyterms, OcrFixtureOrder) {
  const auto s = testing::corpus_snapshot("target_phish_globalpay.json");
  const PageTerms page(s, official_suffixes());
  EXPECT_EQ(keyterms_ocr(page).query(), "login secure globalpay");
  EXPECT_EQ(keyterms_prominent(page).query(), "login");
}

TEST(Keyterms, LimitIsHonored) {
  const auto s = testing::corpus_snapshot("target_legit_nwtraders.json");
  const PageTerms page(s, official_suffixes());
  EXPECT_EQ(keyterms_boosted(page, 2).terms, (std::vector<std::string>{"northwind", "traders"}));
  EXPECT_EQ(keyterms_prominent(page).query(), "northwind traders fine foods store");
}

TEST(Composability, Examples) {
  EXPECT_TRUE(mld_composable("bankofamerica", {"bank", "america"}));
  EXPECT_TRUE(mld_composable("secure-paypal2", {"paypal", "secure"}));
  EXPECT_FALSE(mld_composable("xyzqqq", {"paypal", "secure"}));
  EXPECT_FALSE(mld_composable("bankofamerica", {"bank"}));
  EXPECT_FALSE(mld_composable("nwtraders", {"northwind", "traders"}));
  EXPECT_TRUE(mld_composable("dailyherald-news", {"daily", "herald", "news"}));
  EXPECT_FALSE(mld_composable("", {"bank"}));
  EXPECT_FALSE(mld_composable("bank", {}));
}

TEST(Composability, GuessedFqdns) {
  const auto s = testing::corpus_snapshot("target_phish_mailhub.json");
  const PageTerms page(s, official_suffixes());
  EXPECT_EQ(guess_fqdns(page, keyterms_boosted(page)), std::vector<std::string>{"cdn.mailhub.com"});
}

TEST(FixtureClient, ParseAndLookup) {
  auto client = FixtureSearchClient::parse(R"({"q": [{"rdn": "a.com"}, {"rdn": "b.co.uk", "mld": "b"}, {"rdn": "c.org"}]})");
  const auto results = client.query("q", 2);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0], (SearchResult{"a.com", "a"}));
  EXPECT_EQ(results[1], (SearchResult{"b.co.uk", "b"}));
  EXPECT_TRUE(client.query("unknown", 10).empty());
  EXPECT_THROW(FixtureSearchClient::parse("[1, 2"), std::exception);
}

struct Expected {
  const char* file;
  TargetStatus status;
  int step;
  std::vector<std::string> queries;
  std::vector<std::string> top;
};

TEST(IdentifyTarget, FixtureSuite) {
  auto fixture = fixture_client();
  const std::vector<Expected> cases = {
      {"target_phish_examplebank.json", TargetStatus::PhishWithTargets, 5,
       {"www.examplebank.com", "examplebank banking online sign"}, {"examplebank"}},
      {"target_phish_globalpay.json", TargetStatus::PhishWithTargets, 5,
       {"login", "login", "login secure globalpay"}, {"globalpay"}},
      {"target_phish_mailhub.json", TargetStatus::PhishWithTargets, 5,
       {"cdn.mailhub.com", "mailhub document shared"}, {"mailhub", "cloudstore"}},
      {"target_phish_cloudstore.json", TargetStatus::PhishWithTargets, 5,
       {"www.cloudstore.com", "cloudstore sign"}, {"cloudstore"}},
      {"target_legit_examplebank.json", TargetStatus::LegitimateConfirmed, 1, {"www.examplebank.com"}, {}},
      {"target_legit_nwtraders.json", TargetStatus::LegitimateConfirmed, 2, {"northwind traders fine foods store"}, {}},
      {"target_legit_mailhub.json", TargetStatus::LegitimateConfirmed, 1, {"mail.mailhub.com"}, {}},
      {"target_legit_dailyherald.json", TargetStatus::LegitimateConfirmed, 1, {"www.dailyherald-news.com"}, {}},
      {"target_harvest_blank.json", TargetStatus::SuspiciousNoTarget, 5, {}, {}},
      {"target_harvest_generic.json", TargetStatus::SuspiciousNoTarget, 5, {"login", "login"}, {}},
  };
  for (const auto& c : cases) {
    RecordingSearchClient recorder(fixture);
    const auto verdict = identify_target(testing::corpus_snapshot(c.file), official_suffixes(), recorder);
    EXPECT_EQ(verdict.status, c.status) << c.file;
    EXPECT_EQ(verdict.decided_at_step, c.step) << c.file;
    EXPECT_EQ(recorder.queries(), c.queries) << c.file;
    EXPECT_EQ(verdict.top_k_targets(3), c.top) << c.file;
  }
}

TEST(IdentifyTarget, CandidateFrequencies) {
  auto fixture = fixture_client();
  const auto verdict =
      identify_target(testing::corpus_snapshot("target_phish_mailhub.json"), official_suffixes(), fixture);
  ASSERT_EQ(verdict.candidates.size(), 2u);
  // mailhub: text 3, title, copyright, start, land, ext rdn
  EXPECT_EQ(verdict.candidates[0].frequency, 8u);
  EXPECT_EQ(verdict.candidates[1].frequency, 1u);
}

TEST(IdentifyTarget, RankingAndTopKProperties) {
  auto fixture = fixture_client();
  for (const auto& e : list_corpus(testing::corpus_dir(), std::nullopt)) {
    const auto verdict = identify_target(testing::corpus_snapshot(e.filename), official_suffixes(), fixture);
    for (std::size_t i = 1; i < verdict.candidates.size(); ++i) {
      EXPECT_GE(verdict.candidates[i - 1].frequency, verdict.candidates[i].frequency);
    }
    std::set<std::string> unique;
    for (const auto& c : verdict.candidates) unique.insert(c.mld);
    EXPECT_EQ(unique.size(), verdict.candidates.size());
    const auto t1 = verdict.top_k_targets(1);
    const auto t2 = verdict.top_k_targets(2);
    const auto t3 = verdict.top_k_targets(3);
    EXPECT_TRUE(std::equal(t1.begin(), t1.end(), t2.begin()));
    EXPECT_TRUE(std::equal(t2.begin(), t2.end(), t3.begin()));
  }
}

TEST(IdentifyTarget, EmptyResultsNeverConfirm) {
  EmptyClient empty;
  for (const auto& e : list_corpus(testing::corpus_dir(), std::nullopt)) {
    const auto verdict = identify_target(testing::corpus_snapshot(e.filename), official_suffixes(), empty);
    EXPECT_EQ(verdict.status, TargetStatus::SuspiciousNoTarget) << e.filename;
  }
}

TEST(IdentifyTarget, NoQueriesAfterConfirmation) {
  auto fixture = fixture_client();
  for (const auto& e : list_corpus(testing::corpus_dir(), std::nullopt)) {
    RecordingSearchClient recorder(fixture);
    const auto verdict = identify_target(testing::corpus_snapshot(e.filename), official_suffixes(), recorder);
    if (verdict.status != TargetStatus::LegitimateConfirmed) continue;
    // the confirming query is the last one issued
    ASSERT_FALSE(recorder.queries().empty());
    const auto last = fixture.query(recorder.queries().back(), kDefaultMaxResults);
    const auto s = testing::corpus_snapshot(e.filename);
    const auto start_rdn = parse_url(s.starting_url, official_suffixes()).rdn;
    const auto land_rdn = parse_url(s.landing_url, official_suffixes()).rdn;
    EXPECT_TRUE(std::any_of(last.begin(), last.end(),
                            [&](const SearchResult& r) { return r.rdn == start_rdn || r.rdn == land_rdn; }))
        << e.filename;
  }
}

}  // namespace
}  // namespace phishscan
