#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>

namespace phishscan {

// Public-suffix rules in the publicsuffix.org text format. Read-only after
// construction, so a single instance can be shared across threads.
class SuffixList {
 public:
  static SuffixList parse(std::istream& in);

  std::size_t rule_count() const { return plain_.size() + wildcard_.size() + exception_.size(); }
  const std::string& source_version() const { return version_; }

  // Longest matching public suffix of a lowercase host. Exception rules
  // override wildcards; when nothing matches the last label is used.
  std::string public_suffix(std::string_view host) const;

 private:
  std::unordered_set<std::string> plain_;
  std::unordered_set<std::string> wildcard_;   // stored without the leading "*."
  std::unordered_set<std::string> exception_;  // stored without the leading '!'
  std::string version_;
};

SuffixList load_suffix_list(const std::filesystem::path& path);

struct UrlParts {
  std::string url;  // the string as given, trimmed
  std::string protocol;
  std::string fqdn;
  std::string subdomains;
  std::string rdn;
  std::string mld;
  std::string ps;
  std::string path;
  std::string query;
  bool has_query = false;
  bool is_ip = false;

  // The two phisher-controlled strings: subdomain prefix and path[?query].
  std::array<std::string, 2> free_url() const;
  std::string path_and_query() const;

  friend bool operator==(const UrlParts&, const UrlParts&) = default;
};

UrlParts parse_url(std::string_view url, const SuffixList& suffixes);

// Canonical string form: protocol://fqdn path[?query]. Userinfo, port and
// fragment are not preserved.
std::string format_url(const UrlParts& parts);

int count_level_domains(const UrlParts& parts);

// Resolves a (possibly relative) link against an absolute base URL. Returns
// an empty string for links that are not hierarchical URLs (mailto:,
// javascript:, ...).
std::string resolve_url(std::string_view base, std::string_view href);

}  // namespace phishscan
