#include "phishscan/target_id.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishscan/errors.hpp"

namespace phishscan {
namespace {

// The five visible-data term sets keyterms are drawn from.
enum KeySet : unsigned { kUrl = 1u << 0, kTitle = 1u << 1, kText = 1u << 2, kCopyright = 1u << 3, kHref = 1u << 4 };

using TermMasks = std::map<std::string, unsigned>;

TermMasks keyterm_masks(const Distributions& d) {
  TermMasks masks;
  auto mark = [&](Source s, unsigned bit) {
    for (const auto& [term, n] : get(d, s).counts()) masks[term] |= bit;
  };
  mark(Source::Start, kUrl);
  mark(Source::StartRdn, kUrl);
  mark(Source::Land, kUrl);
  mark(Source::LandRdn, kUrl);
  mark(Source::Title, kTitle);
  mark(Source::Text, kText);
  mark(Source::Copyright, kCopyright);
  mark(Source::IntLink, kHref);
  mark(Source::ExtLink, kHref);
  return masks;
}

std::size_t visible_frequency(const Distributions& d, const std::string& term) {
  return get(d, Source::Text).count(term) + get(d, Source::Title).count(term) + get(d, Source::Copyright).count(term);
}

int set_count(unsigned mask) { return __builtin_popcount(mask); }

template <typename Eligible>
KeytermList rank_keyterms(const PageTerms& page, KeytermKind kind, std::size_t n, Eligible eligible) {
  const auto& d = page.distributions();
  struct Ranked {
    std::string term;
    std::size_t visible;
    std::size_t image;
  };
  std::vector<Ranked> ranked;
  for (const auto& [term, mask] : keyterm_masks(d)) {
    if (eligible(term, mask)) ranked.push_back({term, visible_frequency(d, term), get(d, Source::Image).count(term)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.visible != b.visible) return a.visible > b.visible;
    if (a.image != b.image) return a.image > b.image;
    return a.term < b.term;
  });
  KeytermList list{kind, {}, n};
  for (std::size_t i = 0; i < ranked.size() && i < n; ++i) list.terms.push_back(ranked[i].term);
  return list;
}

bool is_separator(char c) { return c == '-' || (c >= '0' && c <= '9'); }

bool all_separators(std::string_view s) { return std::all_of(s.begin(), s.end(), is_separator); }

std::vector<SearchResult> parse_results(const nlohmann::json& list, const std::string& key) {
  if (!list.is_array()) throw Error(Errc::Corrupt, "fixture results for '" + key + "' must be a list");
  std::vector<SearchResult> out;
  for (const auto& item : list) {
    if (!item.is_object() || !item.contains("rdn") || !item["rdn"].is_string()) {
      throw Error(Errc::Corrupt, "fixture result for '" + key + "' needs an 'rdn' string");
    }
    SearchResult r;
    r.rdn = item["rdn"].get<std::string>();
    if (item.contains("mld") && item["mld"].is_string()) {
      r.mld = item["mld"].get<std::string>();
    } else {
      r.mld = r.rdn.substr(0, r.rdn.find('.'));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::string KeytermList::query() const {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

PageTerms::PageTerms(const PageSnapshot& snap, const SuffixList& suffixes)
    : snap_(&snap),
      start_(parse_url(snap.starting_url, suffixes)),
      land_(parse_url(snap.landing_url, suffixes)),
      split_(split_links(snap, suffixes)),
      dists_(build_all_distributions(snap, split_, start_, land_)) {}

KeytermList keyterms_boosted(const PageTerms& page, std::size_t n) {
  return rank_keyterms(page, KeytermKind::BoostedProminent, n,
                       [](const std::string&, unsigned mask) { return set_count(mask) >= 2; });
}

KeytermList keyterms_prominent(const PageTerms& page, std::size_t n) {
  return rank_keyterms(page, KeytermKind::Prominent, n, [](const std::string&, unsigned mask) {
    return set_count(mask) >= 2 && mask != (kText | kHref);
  });
}

KeytermList keyterms_ocr(const PageTerms& page, std::size_t n) {
  const auto& image = get(page.distributions(), Source::Image);
  if (image.empty()) return {KeytermKind::OcrProminent, {}, n};
  return rank_keyterms(page, KeytermKind::OcrProminent, n,
                       [&image](const std::string& term, unsigned mask) { return mask != 0 && image.contains(term); });
}

bool mld_composable(std::string_view mld, const std::vector<std::string>& keyterms) {
  const std::size_t n = mld.size();
  if (n == 0 || keyterms.empty()) return false;
  // after_keyterm[i]: some parse consumes mld[0, i) ending on a keyterm.
  std::vector<char> after_keyterm(n + 1, 0);
  auto place_keyterms_at = [&](std::size_t pos) {
    for (const auto& k : keyterms) {
      if (!k.empty() && mld.substr(pos, k.size()) == k) after_keyterm[pos + k.size()] = 1;
    }
  };
  for (std::size_t j = 0; j < n && (j == 0 || is_separator(mld[j - 1])); ++j) place_keyterms_at(j);

  for (std::size_t i = 1; i <= n; ++i) {
    if (!after_keyterm[i]) continue;
    if (all_separators(mld.substr(i))) return true;
    // Gap of separators plus at most two connector letters.
    std::size_t letters = 0;
    for (std::size_t j = i; j < n; ++j) {
      place_keyterms_at(j);
      if (!is_separator(mld[j]) && ++letters > 2) break;
    }
  }
  return false;
}

std::vector<std::string> guess_fqdns(const PageTerms& page, const KeytermList& keyterms) {
  std::vector<const UrlParts*> urls = {&page.start(), &page.land()};
  const auto& split = page.split();
  for (const auto* list : {&split.internal_logged, &split.external_logged, &split.internal_href, &split.external_href}) {
    for (const auto& u : *list) urls.push_back(&u);
  }
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto* u : urls) {
    if (u->is_ip || u->mld.empty() || !seen.insert(u->mld).second) continue;
    if (mld_composable(canonicalize(u->mld), keyterms.terms)) out.push_back(u->fqdn);
  }
  return out;
}

FixtureSearchClient FixtureSearchClient::parse(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::Corrupt, std::string("fixture index is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::Corrupt, "fixture index must map query strings to result lists");
  FixtureSearchClient client;
  for (const auto& [key, value] : doc.items()) client.index_[key] = parse_results(value, key);
  return client;
}

FixtureSearchClient FixtureSearchClient::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read fixture index " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<SearchResult> FixtureSearchClient::query(const std::string& text, std::size_t max_results) {
  const auto it = index_.find(text);
  if (it == index_.end()) return {};
  const auto count = std::min(max_results, it->second.size());
  return {it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(count)};
}

std::vector<SearchResult> RecordingSearchClient::query(const std::string& text, std::size_t max_results) {
  queries_.push_back(text);
  return inner_.query(text, max_results);
}

std::string_view status_name(TargetStatus status) {
  switch (status) {
    case TargetStatus::LegitimateConfirmed: return "legitimate_confirmed";
    case TargetStatus::PhishWithTargets: return "phish_with_targets";
    case TargetStatus::SuspiciousNoTarget: return "suspicious_no_target";
  }
  return "unknown";
}

std::vector<std::string> TargetVerdict::top_k_targets(std::size_t k) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k && i < candidates.size(); ++i) out.push_back(candidates[i].mld);
  return out;
}

TargetVerdict identify_target(const PageSnapshot& snap, const SuffixList& suffixes, SearchClient& client,
                              const IdentifyOptions& options) {
  const PageTerms page(snap, suffixes);
  const auto& d = page.distributions();
  const std::set<std::string> suspect = {page.start().rdn, page.land().rdn};
  const std::string canonical_title = canonicalize(snap.title);

  auto confirms = [&](const std::vector<SearchResult>& results) {
    return std::any_of(results.begin(), results.end(), [&](const SearchResult& r) { return suspect.count(r.rdn) != 0; });
  };
  auto in_controlled_source = [&](const std::string& mld) {
    for (auto s : {Source::Text, Source::Title, Source::Start, Source::Land, Source::IntLog, Source::IntLink}) {
      if (get(d, s).contains(mld)) return true;
    }
    return canonical_title.find(mld) != std::string::npos;
  };

  TargetVerdict verdict;
  const auto boosted = keyterms_boosted(page, options.keyterms);

  // Step 1: guessed FQDNs.
  for (const auto& fqdn : guess_fqdns(page, boosted)) {
    if (confirms(client.query(fqdn, options.max_results))) {
      verdict.status = TargetStatus::LegitimateConfirmed;
      verdict.decided_at_step = 1;
      return verdict;
    }
  }

  // Steps 2-4: keyterm queries; the first one producing candidates wins.
  std::vector<std::string> candidates;
  const KeytermList lists[] = {keyterms_prominent(page, options.keyterms), boosted,
                               keyterms_ocr(page, options.keyterms)};
  int step = 2;
  for (const auto& list : lists) {
    verdict.decided_at_step = step;
    if (!list.terms.empty()) {
      const auto results = client.query(list.query(), options.max_results);
      if (confirms(results)) {
        verdict.status = TargetStatus::LegitimateConfirmed;
        return verdict;
      }
      for (const auto& r : results) {
        const auto mld = canonicalize(r.mld);
        if (mld.empty() || !in_controlled_source(mld)) continue;
        if (std::find(candidates.begin(), candidates.end(), mld) == candidates.end()) candidates.push_back(mld);
      }
      if (!candidates.empty()) break;
    }
    ++step;
  }

  // Step 5: rank candidates by occurrences across all data sources.
  verdict.decided_at_step = 5;
  for (const auto& mld : candidates) {
    std::size_t freq = 0;
    for (const auto& dist : d) freq += dist.count(mld);
    verdict.candidates.push_back({mld, freq});
  }
  std::stable_sort(verdict.candidates.begin(), verdict.candidates.end(),
                   [](const TargetCandidate& a, const TargetCandidate& b) { return a.frequency > b.frequency; });
  verdict.status = verdict.candidates.empty() ? TargetStatus::SuspiciousNoTarget : TargetStatus::PhishWithTargets;
  return verdict;
}

}  // namespace phishscan
