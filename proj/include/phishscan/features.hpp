#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phishscan/snapshot.hpp"
#include "phishscan/terms.hpp"
#include "phishscan/url_model.hpp"

namespace phishscan {

inline constexpr std::size_t kUrlFeatureCount = 9;
inline constexpr std::size_t kUrlSetFeatureCount = 22;
inline constexpr std::size_t kF1Count = 106;
inline constexpr std::size_t kF2Count = 66;
inline constexpr std::size_t kF3Count = 22;
inline constexpr std::size_t kF4Count = 13;
inline constexpr std::size_t kF5Count = 5;
inline constexpr std::size_t kFeatureCount = kF1Count + kF2Count + kF3Count + kF4Count + kF5Count;
static_assert(kFeatureCount == 212);

inline constexpr double kUnrankedDomain = 1000001.0;

class AlexaRanks {
 public:
  AlexaRanks() = default;
  static AlexaRanks parse(std::istream& in);

  double rank(const std::string& rdn) const;
  std::size_t size() const { return ranks_.size(); }
  std::size_t skipped_lines() const { return skipped_; }

 private:
  std::unordered_map<std::string, double> ranks_;
  std::size_t skipped_ = 0;
};

AlexaRanks load_alexa(const std::filesystem::path& path);

// Per-URL lexical features: protocol, FreeURL dots, level domains,
// URL length, FQDN length, mld length, URL terms, mld terms, domain rank.
std::array<double, kUrlFeatureCount> url_features_single(const UrlParts& parts, const AlexaRanks& alexa);

// https ratio, then mean/median/stdev of per-URL features 3..9.
std::array<double, kUrlSetFeatureCount> url_features_set(std::span<const UrlParts> urls, const AlexaRanks& alexa);

std::vector<double> f1_url(const UrlParts& start, const UrlParts& land, const LinkSplit& split, const AlexaRanks& alexa);
std::vector<double> f2_term_consistency(const Distributions& dists);
std::vector<double> f3_mld_usage(const Distributions& dists, const std::string& start_mld, const std::string& land_mld);
std::vector<double> f4_rdn_usage(const PageSnapshot& snap, const LinkSplit& split, const UrlParts& land,
                                 const SuffixList& suffixes);
std::vector<double> f5_content(const PageSnapshot& snap);

// The twelve distributions compared pairwise by f2, in feature order.
const std::array<Source, 12>& consistency_sources();

struct FeatureVector {
  std::vector<double> values;
  const std::vector<std::string>& names() const;
};

// Stable identifiers of all 212 features, in vector order.
const std::vector<std::string>& feature_names();

FeatureVector extract_features(const PageSnapshot& snap, const SuffixList& suffixes, const AlexaRanks& alexa);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace phishscan
