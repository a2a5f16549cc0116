#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "phishscan/snapshot.hpp"
#include "phishscan/terms.hpp"
#include "test_support.hpp"

namespace phishscan {
namespace {

// Hand-written decomposition for the characters used below: base letter
// followed by combining marks, which are then discarded.
std::string decompose_oracle(const std::u32string& word) {
  const std::map<char32_t, std::u32string> decomposition = {
      {U'\u00DC', U"U\u0308"}, {U'\u00EF', U"i\u0308"}, {U'\u00E9', U"e\u0301"}, {U'\u00C7', U"C\u0327"}};
  std::string out;
  for (char32_t c : word) {
    const auto it = decomposition.find(c);
    const std::u32string parts = it == decomposition.end() ? std::u32string(1, c) : it->second;
    for (char32_t p : parts) {
      if (p >= 0x300 && p <= 0x36F) continue;
      out += static_cast<char>(p >= 'A' && p <= 'Z' ? p - 'A' + 'a' : p);
    }
  }
  return out;
}

TEST(Canonicalize, Examples) {
  EXPECT_EQ(canonicalize("B"), "b");
  EXPECT_EQ(canonicalize("β"), "b");
  EXPECT_EQ(canonicalize("b̀"), "b");
  EXPECT_EQ(canonicalize("b̂"), "b");
  EXPECT_EQ(canonicalize("ḃ"), "b");
  EXPECT_EQ(canonicalize("Ｂ"), "b");
  EXPECT_EQ(canonicalize("abc"), "abc");
}

TEST(Canonicalize, DecomposedAccents) {
  EXPECT_EQ(canonicalize("Ünïted"), decompose_oracle(U"Ünïted"));
  EXPECT_EQ(canonicalize("Ünïted"), "united");
  EXPECT_EQ(canonicalize("Çafé"), decompose_oracle(U"Çafé"));
}

TEST(Canonicalize, Lookalikes) {
  EXPECT_EQ(canonicalize("\u0440\u0430ypal"), "paypal");  // Cyrillic р and а
  EXPECT_EQ(canonicalize("Straße"), "strasse");
  EXPECT_EQ(canonicalize("\U0001D41A\U0001D41B"), "ab");  // mathematical bold
}

TEST(ExtractTerms, Examples) {
  EXPECT_EQ(extract_terms("www.amazon.co.uk"), (std::vector<std::string>{"www", "amazon"}));
  EXPECT_EQ(extract_terms("PayPal-Secure1Login"), (std::vector<std::string>{"paypal", "secure", "login"}));
  EXPECT_TRUE(extract_terms("a.b.c").empty());
  EXPECT_EQ(extract_terms("Sign in to PayPal"), (std::vector<std::string>{"sign", "paypal"}));
}

TEST(ExtractTerms, AlphabetAndLength) {
  std::mt19937_64 rng(3);
  const std::string pool[] = {"a", "Z", "é", "1", "-", ".", " ", "β", "\xff", "ß", "ƒ", "ǅ", "/", "\xe2\x80"};
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    for (int k = 0; k < 40; ++k) s += pool[rng() % std::size(pool)];
    for (const auto& t : extract_terms(s)) {
      EXPECT_GE(t.size(), 3u);
      for (char c : t) EXPECT_TRUE(c >= 'a' && c <= 'z') << t;
    }
  }
}

TEST(TermDistribution, Frequencies) {
  const std::vector<std::string> texts = {"foo foo bar"};
  const auto d = build_distribution(Source::Text, texts);
  EXPECT_DOUBLE_EQ(d.probability("foo"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(d.probability("bar"), 1.0 / 3.0);
  EXPECT_EQ(d.probability("baz"), 0.0);
  EXPECT_TRUE(build_distribution(Source::Text, {}).empty());
}

TEST(TermDistribution, StartSourceUsesFreeUrlOnly) {
  auto s = testing::corpus_snapshot("target_phish_examplebank.json");
  const auto start = parse_url(s.starting_url, testing::official_suffixes());
  const auto split = split_links(s, testing::official_suffixes());
  const auto dists = build_all_distributions(s, split, start, start);
  const auto& d = get(dists, Source::Start);
  // login-update.secure-host.kz/examplebank/signin.php: subdomain and path only
  EXPECT_EQ(d.counts(), (std::map<std::string, std::size_t>{
                            {"examplebank", 1}, {"login", 1}, {"php", 1}, {"signin", 1}, {"update", 1}}));
  EXPECT_FALSE(d.contains("secure"));
  EXPECT_TRUE(get(dists, Source::StartRdn).contains("secure"));
}

TEST(TermDistribution, NoExternalLinks) {
  PageSnapshot s;
  s.starting_url = s.landing_url = "http://a.com/x";
  s.redirection_chain = {s.starting_url};
  s.logged_links = {"http://img.a.com/logo.png"};
  s.href_links = {"http://a.com/about"};
  const auto start = parse_url(s.starting_url, testing::official_suffixes());
  const auto dists = build_all_distributions(s, split_links(s, testing::official_suffixes()), start, start);
  EXPECT_TRUE(get(dists, Source::ExtLog).empty());
  EXPECT_TRUE(get(dists, Source::ExtLink).empty());
  EXPECT_TRUE(get(dists, Source::ExtRdn).empty());
}

TEST(TermDistribution, IntRdnMergesLoggedAndHref) {
  PageSnapshot s;
  s.starting_url = "http://start.com/";
  s.landing_url = "http://land.net/";
  s.redirection_chain = {s.starting_url, s.landing_url};
  s.logged_links = {"http://cdn.start.com/a.js"};
  s.href_links = {"http://www.land.net/about"};
  const auto start = parse_url(s.starting_url, testing::official_suffixes());
  const auto land = parse_url(s.landing_url, testing::official_suffixes());
  const auto dists = build_all_distributions(s, split_links(s, testing::official_suffixes()), start, land);
  const auto& d = get(dists, Source::IntRdn);
  EXPECT_TRUE(d.contains("start"));
  EXPECT_TRUE(d.contains("land"));
  EXPECT_TRUE(d.contains("net"));
}

TEST(TermDistribution, ImageTerms) {
  PageSnapshot s;
  s.starting_url = s.landing_url = "http://a.com/";
  s.redirection_chain = {s.starting_url};
  s.image_terms = std::vector<std::string>{"PayPal", "Login"};
  const auto start = parse_url(s.starting_url, testing::official_suffixes());
  const auto dists = build_all_distributions(s, split_links(s, testing::official_suffixes()), start, start);
  EXPECT_EQ(get(dists, Source::Image).entries(), (std::map<std::string, double>{{"login", 0.5}, {"paypal", 0.5}}));
}

TEST(TermDistribution, NormalizedOverCorpus) {
  for (const auto& e : list_corpus(testing::corpus_dir(), std::nullopt)) {
    const auto s = testing::corpus_snapshot(e.filename);
    const auto start = parse_url(s.starting_url, testing::official_suffixes());
    const auto land = parse_url(s.landing_url, testing::official_suffixes());
    const auto dists = build_all_distributions(s, split_links(s, testing::official_suffixes()), start, land);
    for (const auto& d : dists) {
      if (d.empty()) continue;
      double sum = 0.0;
      for (const auto& [term, p] : d.entries()) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-9) << e.filename << ' ' << source_name(d.source());
    }
  }
}

TEST(Hellinger, Examples) {
  TermDistribution p;
  p.add_term("a");
  TermDistribution q;
  q.add_term("a");
  q.add_term("b");
  const double expected = 0.5 * (std::pow(1.0 - std::sqrt(0.5), 2) + std::pow(std::sqrt(0.5), 2));
  EXPECT_NEAR(hellinger(p, q), expected, 1e-15);
  EXPECT_NEAR(hellinger(p, q), 0.2928932188134524, 1e-15);
  EXPECT_EQ(hellinger(q, q), 0.0);

  TermDistribution r;
  r.add_term("zzz");
  EXPECT_NEAR(hellinger(p, r), 1.0, 1e-12);
  EXPECT_EQ(hellinger(TermDistribution{}, TermDistribution{}), 0.0);
  EXPECT_EQ(hellinger(p, TermDistribution{}), 1.0);
}

// Independent formula evaluation from raw counts: normalize each side,
// collect the union support, then sum.
double hellinger_oracle(const std::map<std::string, int>& a, const std::map<std::string, int>& b) {
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [k, v] : a) na += v;
  for (const auto& [k, v] : b) nb += v;
  if (na == 0.0 && nb == 0.0) return 0.0;
  if (na == 0.0 || nb == 0.0) return 1.0;
  std::set<std::string> support;
  for (const auto& [k, v] : a) support.insert(k);
  for (const auto& [k, v] : b) support.insert(k);
  double sum = 0.0;
  for (const auto& k : support) {
    const double pa = a.count(k) ? a.at(k) / na : 0.0;
    const double pb = b.count(k) ? b.at(k) / nb : 0.0;
    sum += (std::sqrt(pa) - std::sqrt(pb)) * (std::sqrt(pa) - std::sqrt(pb));
  }
  return sum / 2.0;
}

TEST(Hellinger, RandomPairsAgainstOracle) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    std::map<std::string, int> ca;
    std::map<std::string, int> cb;
    TermDistribution p;
    TermDistribution q;
    const auto fill = [&](std::map<std::string, int>& counts, TermDistribution& d, int offset) {
      const auto n = rng() % 12;
      for (std::size_t k = 0; k < n; ++k) {
        const std::string term = "t" + std::to_string(offset + static_cast<int>(rng() % 10));
        ++counts[term];
        d.add_term(term);
      }
    };
    fill(ca, p, 0);
    fill(cb, q, i % 5 == 0 ? 100 : 0);  // every fifth pair is disjoint
    const double h = hellinger(p, q);
    EXPECT_NEAR(h, hellinger_oracle(ca, cb), 1e-12);
    EXPECT_EQ(h, hellinger(q, p));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0);
    EXPECT_EQ(hellinger(p, p), 0.0);
    if (i % 5 == 0 && !p.empty() && !q.empty()) EXPECT_NEAR(h, 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace phishscan
