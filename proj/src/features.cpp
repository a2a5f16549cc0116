#include "phishscan/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "phishscan/errors.hpp"

namespace phishscan {
namespace {

constexpr std::array<std::string_view, kUrlFeatureCount> kUrlFeatureNames = {
    "protocol", "freeurl_dots", "level_domains", "url_length", "fqdn_length",
    "mld_length", "url_terms", "mld_terms", "rdn_rank"};

constexpr std::array<std::string_view, 4> kLinkSets = {"intlog", "extlog", "intlink", "extlink"};

constexpr std::array<Source, 6> kMldFlagSources = {Source::Text,    Source::Title,   Source::IntLog,
                                                   Source::ExtLog,  Source::IntLink, Source::ExtLink};
constexpr std::array<Source, 5> kMldMassSources = {Source::Title, Source::IntLog, Source::ExtLog, Source::IntLink,
                                                   Source::ExtLink};

constexpr std::array<std::string_view, kF4Count> kRdnFeatureNames = {
    "rdn_redirect_count",      "rdn_chain_distinct",       "rdn_start_land_same",  "rdn_internal_count",
    "rdn_ext_logged_distinct", "rdn_ext_href_distinct",    "rdn_logged_internal_ratio",
    "rdn_href_internal_ratio", "rdn_logged_count",         "rdn_href_count",       "rdn_land_in_href",
    "rdn_ext_overlap_ratio",   "rdn_internal_link_fraction"};

constexpr std::array<std::string_view, kF5Count> kContentFeatureNames = {
    "content_text_terms", "content_title_terms", "content_inputs", "content_images", "content_iframes"};

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Population standard deviation.
double stdev_of(const std::vector<double>& v, double mean) {
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

std::vector<std::string> build_names() {
  std::vector<std::string> names;
  names.reserve(kFeatureCount);
  for (std::string_view url : {"start", "land"}) {
    for (auto f : kUrlFeatureNames) names.push_back(std::string(url) + "_" + std::string(f));
  }
  for (auto set : kLinkSets) {
    names.push_back(std::string(set) + "_https_ratio");
    for (std::size_t f = 2; f < kUrlFeatureCount; ++f) {
      for (std::string_view stat : {"mean", "median", "stdev"}) {
        names.push_back(std::string(set) + "_" + std::string(kUrlFeatureNames[f]) + "_" + std::string(stat));
      }
    }
  }
  const auto& sources = consistency_sources();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) {
      names.push_back("hd_" + std::string(source_name(sources[i])) + "_" + std::string(source_name(sources[j])));
    }
  }
  for (std::string_view which : {"start", "land"}) {
    for (auto s : kMldFlagSources) names.push_back("mld_" + std::string(which) + "_in_" + std::string(source_name(s)));
  }
  for (std::string_view which : {"start", "land"}) {
    for (auto s : kMldMassSources) {
      names.push_back("mld_" + std::string(which) + "_substr_mass_" + std::string(source_name(s)));
    }
  }
  for (auto n : kRdnFeatureNames) names.emplace_back(n);
  for (auto n : kContentFeatureNames) names.emplace_back(n);
  return names;
}

}  // namespace

AlexaRanks AlexaRanks::parse(std::istream& in) {
  AlexaRanks ranks;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double rank = 0.0;
    const char* first = line.data();
    const char* last = line.data() + (comma == std::string::npos ? 0 : comma);
    const auto [ptr, ec] = std::from_chars(first, last, rank);
    if (comma == std::string::npos || ec != std::errc() || ptr != last || rank < 1.0 || comma + 1 >= line.size()) {
      ++ranks.skipped_;
      continue;
    }
    std::string domain = line.substr(comma + 1);
    std::transform(domain.begin(), domain.end(), domain.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    ranks.ranks_.emplace(std::move(domain), rank);
  }
  return ranks;
}

double AlexaRanks::rank(const std::string& rdn) const {
  const auto it = ranks_.find(rdn);
  return it == ranks_.end() ? kUnrankedDomain : it->second;
}

AlexaRanks load_alexa(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read domain rank list " + path.string());
  return AlexaRanks::parse(in);
}

std::array<double, kUrlFeatureCount> url_features_single(const UrlParts& parts, const AlexaRanks& alexa) {
  const auto free = parts.free_url();
  const auto dots = std::count(free[0].begin(), free[0].end(), '.') + std::count(free[1].begin(), free[1].end(), '.');
  return {
      parts.protocol == "https" ? 1.0 : 0.0,
      static_cast<double>(dots),
      static_cast<double>(count_level_domains(parts)),
      static_cast<double>(parts.url.size()),
      static_cast<double>(parts.fqdn.size()),
      static_cast<double>(parts.mld.size()),
      static_cast<double>(extract_terms(parts.url).size()),
      static_cast<double>(extract_terms(parts.mld).size()),
      alexa.rank(parts.rdn),
  };
}

std::array<double, kUrlSetFeatureCount> url_features_set(std::span<const UrlParts> urls, const AlexaRanks& alexa) {
  std::array<double, kUrlSetFeatureCount> out{};
  if (urls.empty()) return out;
  std::array<std::vector<double>, kUrlFeatureCount> columns;
  for (const auto& u : urls) {
    const auto row = url_features_single(u, alexa);
    for (std::size_t f = 0; f < kUrlFeatureCount; ++f) columns[f].push_back(row[f]);
  }
  out[0] = mean_of(columns[0]);
  std::size_t k = 1;
  for (std::size_t f = 2; f < kUrlFeatureCount; ++f) {
    const double m = mean_of(columns[f]);
    out[k++] = m;
    out[k++] = median_of(columns[f]);
    out[k++] = stdev_of(columns[f], m);
  }
  return out;
}

std::vector<double> f1_url(const UrlParts& start, const UrlParts& land, const LinkSplit& split,
                           const AlexaRanks& alexa) {
  std::vector<double> out;
  out.reserve(kF1Count);
  for (const auto* parts : {&start, &land}) {
    const auto single = url_features_single(*parts, alexa);
    out.insert(out.end(), single.begin(), single.end());
  }
  for (const auto* set : {&split.internal_logged, &split.external_logged, &split.internal_href, &split.external_href}) {
    const auto stats = url_features_set(*set, alexa);
    out.insert(out.end(), stats.begin(), stats.end());
  }
  return out;
}

const std::array<Source, 12>& consistency_sources() {
  static constexpr std::array<Source, 12> kSources = {
      Source::Text,     Source::Title,   Source::Start,   Source::Land,   Source::IntLog, Source::IntLink,
      Source::StartRdn, Source::LandRdn, Source::IntRdn, Source::ExtRdn, Source::ExtLog, Source::ExtLink};
  return kSources;
}

std::vector<double> f2_term_consistency(const Distributions& dists) {
  const auto& sources = consistency_sources();
  std::vector<double> out;
  out.reserve(kF2Count);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    for (std::size_t j = i + 1; j < sources.size(); ++j) out.push_back(hellinger(get(dists, sources[i]), get(dists, sources[j])));
  }
  return out;
}

std::vector<double> f3_mld_usage(const Distributions& dists, const std::string& start_mld, const std::string& land_mld) {
  const std::string mlds[2] = {canonicalize(start_mld), canonicalize(land_mld)};
  std::vector<double> out;
  out.reserve(kF3Count);
  for (const auto& mld : mlds) {
    for (auto s : kMldFlagSources) out.push_back(!mld.empty() && get(dists, s).contains(mld) ? 1.0 : 0.0);
  }
  for (const auto& mld : mlds) {
    for (auto s : kMldMassSources) {
      double mass = 0.0;
      if (!mld.empty()) {
        for (const auto& [term, p] : get(dists, s).entries()) {
          if (mld.find(term) != std::string::npos) mass += p;
        }
      }
      out.push_back(mass);
    }
  }
  return out;
}

std::vector<double> f4_rdn_usage(const PageSnapshot& snap, const LinkSplit& split, const UrlParts& land,
                                 const SuffixList& suffixes) {
  std::set<std::string> chain_rdns;
  for (const auto& url : snap.redirection_chain) {
    try {
      chain_rdns.insert(parse_url(url, suffixes).rdn);
    } catch (const Error&) {
    }
  }
  const auto start_rdn = parse_url(snap.starting_url, suffixes).rdn;

  std::set<std::string> ext_logged;
  std::set<std::string> ext_href;
  for (const auto& u : split.external_logged) ext_logged.insert(u.rdn);
  for (const auto& u : split.external_href) ext_href.insert(u.rdn);
  std::set<std::string> ext_union = ext_logged;
  ext_union.insert(ext_href.begin(), ext_href.end());
  std::size_t overlap = 0;
  for (const auto& r : ext_logged) overlap += ext_href.count(r);

  const bool land_in_href =
      std::any_of(split.internal_href.begin(), split.internal_href.end(), [&](const UrlParts& u) { return u.rdn == land.rdn; }) ||
      std::any_of(split.external_href.begin(), split.external_href.end(), [&](const UrlParts& u) { return u.rdn == land.rdn; });

  const auto logged = split.internal_logged.size() + split.external_logged.size();
  const auto href = split.internal_href.size() + split.external_href.size();
  return {
      static_cast<double>(snap.redirection_chain.size() - 1),
      static_cast<double>(chain_rdns.size()),
      start_rdn == land.rdn ? 1.0 : 0.0,
      static_cast<double>(split.internal_rdns.size()),
      static_cast<double>(ext_logged.size()),
      static_cast<double>(ext_href.size()),
      ratio(split.internal_logged.size(), logged),
      ratio(split.internal_href.size(), href),
      static_cast<double>(logged),
      static_cast<double>(href),
      land_in_href ? 1.0 : 0.0,
      ratio(overlap, ext_union.size()),
      ratio(split.internal_logged.size() + split.internal_href.size(), logged + href),
  };
}

std::vector<double> f5_content(const PageSnapshot& snap) {
  return {
      static_cast<double>(extract_terms(snap.text).size()),
      static_cast<double>(extract_terms(snap.title).size()),
      static_cast<double>(snap.input_count),
      static_cast<double>(snap.image_count),
      static_cast<double>(snap.iframe_count),
  };
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> kNames = build_names();
  return kNames;
}

const std::vector<std::string>& FeatureVector::names() const { return feature_names(); }

FeatureVector extract_features(const PageSnapshot& snap, const SuffixList& suffixes, const AlexaRanks& alexa) {
  const auto start = parse_url(snap.starting_url, suffixes);
  const auto land = parse_url(snap.landing_url, suffixes);
  const auto split = split_links(snap, suffixes);
  const auto dists = build_all_distributions(snap, split, start, land);

  FeatureVector fv;
  fv.values.reserve(kFeatureCount);
  for (auto&& block : {f1_url(start, land, split, alexa), f2_term_consistency(dists),
                       f3_mld_usage(dists, start.mld, land.mld), f4_rdn_usage(snap, split, land, suffixes),
                       f5_content(snap)}) {
    fv.values.insert(fv.values.end(), block.begin(), block.end());
  }
  return fv;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace phishscan
