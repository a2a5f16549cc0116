#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phishscan {

struct PageSnapshot;
struct LinkSplit;
struct UrlParts;

// The fourteen per-page term sources. Order is part of the feature layout.
enum class Source : std::size_t {
  Text,
  Title,
  Copyright,
  Image,
  Start,
  Land,
  IntLog,
  IntLink,
  StartRdn,
  LandRdn,
  IntRdn,
  ExtRdn,
  ExtLog,
  ExtLink,
};

inline constexpr std::size_t kSourceCount = 14;

std::string_view source_name(Source source);

// Lowercases and folds accented, compatibility and lookalike letterforms
// onto a..z. Code points without such a mapping are passed through.
std::string canonicalize(std::string_view input);

std::vector<std::string> extract_terms(std::string_view input);

class TermDistribution {
 public:
  TermDistribution() = default;
  explicit TermDistribution(Source source) : source_(source) {}

  // Adds every term extracted from `text`.
  void add_text(std::string_view text);
  void add_term(const std::string& term);

  Source source() const { return source_; }
  bool empty() const { return total_ == 0; }
  std::size_t size() const { return counts_.size(); }
  std::size_t total() const { return total_; }

  double probability(const std::string& term) const;
  std::size_t count(const std::string& term) const;
  bool contains(const std::string& term) const { return counts_.count(term) != 0; }

  // term -> probability, ordered by term.
  std::map<std::string, double> entries() const;
  const std::map<std::string, std::size_t>& counts() const { return counts_; }

 private:
  Source source_ = Source::Text;
  std::map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

TermDistribution build_distribution(Source source, std::span<const std::string> texts);

using Distributions = std::array<TermDistribution, kSourceCount>;

inline const TermDistribution& get(const Distributions& d, Source s) { return d[static_cast<std::size_t>(s)]; }

Distributions build_all_distributions(const PageSnapshot& snap, const LinkSplit& split, const UrlParts& start,
                                      const UrlParts& land);

// Squared Hellinger distance, H^2 = 1/2 sum (sqrt p - sqrt q)^2 over the
// union support. Both empty -> 0, exactly one empty -> 1.
double hellinger(const TermDistribution& p, const TermDistribution& q);

}  // namespace phishscan
