#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "phishscan/snapshot.hpp"
#include "phishscan/terms.hpp"
#include "phishscan/url_model.hpp"

namespace phishscan {

inline constexpr std::size_t kDefaultKeyterms = 5;
inline constexpr std::size_t kDefaultMaxResults = 10;

enum class KeytermKind { BoostedProminent, Prominent, OcrProminent };

struct KeytermList {
  KeytermKind kind = KeytermKind::BoostedProminent;
  std::vector<std::string> terms;  // most frequent first
  std::size_t limit = kDefaultKeyterms;

  // Keyterms joined by single spaces, the form sent to the search client.
  std::string query() const;
};

// Everything the keyterm and identification steps read from one page,
// computed once.
class PageTerms {
 public:
  PageTerms(const PageSnapshot& snap, const SuffixList& suffixes);

  const PageSnapshot& snapshot() const { return *snap_; }
  const UrlParts& start() const { return start_; }
  const UrlParts& land() const { return land_; }
  const LinkSplit& split() const { return split_; }
  const Distributions& distributions() const { return dists_; }

 private:
  const PageSnapshot* snap_;
  UrlParts start_;
  UrlParts land_;
  LinkSplit split_;
  Distributions dists_;
};

KeytermList keyterms_boosted(const PageTerms& page, std::size_t n = kDefaultKeyterms);
KeytermList keyterms_prominent(const PageTerms& page, std::size_t n = kDefaultKeyterms);
KeytermList keyterms_ocr(const PageTerms& page, std::size_t n = kDefaultKeyterms);

// True if `mld` is a concatenation of keyterms separated by optional '-' or
// digit runs, allowing short (< 3 letter) connectors between keyterms, as in
// bank+of+america.
bool mld_composable(std::string_view mld, const std::vector<std::string>& keyterms);

// FQDNs (one per distinct composable mld, first seen) from the starting and
// landing URLs, logged links and HREF links, in that order.
std::vector<std::string> guess_fqdns(const PageTerms& page, const KeytermList& keyterms);

struct SearchResult {
  std::string rdn;
  std::string mld;

  friend bool operator==(const SearchResult&, const SearchResult&) = default;
};

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SearchClient {
 public:
  virtual ~SearchClient() = default;
  // Throws SearchError when the backend fails.
  virtual std::vector<SearchResult> query(const std::string& text, std::size_t max_results) = 0;
};

// Offline backend: a JSON object mapping exact query strings to ordered
// result lists of {"rdn": ..., "mld": ...}. Unknown queries return nothing.
class FixtureSearchClient : public SearchClient {
 public:
  static FixtureSearchClient parse(std::string_view json_text);
  static FixtureSearchClient load(const std::filesystem::path& path);

  std::vector<SearchResult> query(const std::string& text, std::size_t max_results) override;

 private:
  std::map<std::string, std::vector<SearchResult>> index_;
};

// Forwards to another client and records every query issued.
class RecordingSearchClient : public SearchClient {
 public:
  explicit RecordingSearchClient(SearchClient& inner) : inner_(inner) {}

  std::vector<SearchResult> query(const std::string& text, std::size_t max_results) override;
  const std::vector<std::string>& queries() const { return queries_; }

 private:
  SearchClient& inner_;
  std::vector<std::string> queries_;
};

enum class TargetStatus { LegitimateConfirmed, PhishWithTargets, SuspiciousNoTarget };

std::string_view status_name(TargetStatus status);

struct TargetCandidate {
  std::string mld;
  std::size_t frequency = 0;
};

struct TargetVerdict {
  TargetStatus status = TargetStatus::SuspiciousNoTarget;
  std::vector<TargetCandidate> candidates;  // by descending frequency
  int decided_at_step = 0;

  std::vector<std::string> top_k_targets(std::size_t k) const;
};

struct IdentifyOptions {
  std::size_t keyterms = kDefaultKeyterms;
  std::size_t max_results = kDefaultMaxResults;
};

TargetVerdict identify_target(const PageSnapshot& snap, const SuffixList& suffixes, SearchClient& client,
                              const IdentifyOptions& options = {});

}  // namespace phishscan
