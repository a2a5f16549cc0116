#include "phishscan/terms.hpp"

#include <algorithm>
#include <cmath>

#include "phishscan/snapshot.hpp"

namespace phishscan {
namespace {

struct LetterMapping {
  char32_t code_point;
  const char* letters;
};

constexpr LetterMapping kLetterTable[] = {
#include "canonical_table.inc"
};

const char* lookup_letters(char32_t cp) {
  const auto* end = std::end(kLetterTable);
  const auto* it = std::lower_bound(std::begin(kLetterTable), end, cp,
                                    [](const LetterMapping& m, char32_t value) { return m.code_point < value; });
  return it != end && it->code_point == cp ? it->letters : nullptr;
}

// Decodes one UTF-8 sequence at `i`. Returns the code point and advances `i`;
// invalid bytes come back as themselves (one byte consumed) with ok=false.
char32_t next_code_point(std::string_view s, std::size_t& i, bool& ok) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  ok = true;
  std::size_t len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++i;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  }
  if (len == 0 || i + len > s.size()) {
    ok = false;
    ++i;
    return b0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ok = false;
      ++i;
      return b0;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

}  // namespace

std::string_view source_name(Source source) {
  static constexpr std::string_view kNames[kSourceCount] = {
      "text",     "title",    "copyright", "image",  "start",  "land",   "intlog",
      "intlink",  "startrdn", "landrdn",   "intrdn", "extrdn", "extlog", "extlink"};
  return kNames[static_cast<std::size_t>(source)];
}

std::string canonicalize(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  std::size_t i = 0;
  while (i < input.size()) {
    const auto begin = i;
    bool ok = true;
    const char32_t cp = next_code_point(input, i, ok);
    if (cp < 0x80) {
      out += (cp >= 'A' && cp <= 'Z') ? static_cast<char>(cp - 'A' + 'a') : static_cast<char>(cp);
      continue;
    }
    const char* letters = ok ? lookup_letters(cp) : nullptr;
    if (letters != nullptr) {
      out += letters;
    } else {
      out.append(input.substr(begin, i - begin));
    }
  }
  return out;
}

std::vector<std::string> extract_terms(std::string_view input) {
  const std::string canonical = canonicalize(input);
  std::vector<std::string> terms;
  std::size_t run_start = 0;
  for (std::size_t i = 0; i <= canonical.size(); ++i) {
    const bool letter = i < canonical.size() && canonical[i] >= 'a' && canonical[i] <= 'z';
    if (letter) continue;
    if (i - run_start >= 3) terms.emplace_back(canonical.substr(run_start, i - run_start));
    run_start = i + 1;
  }
  return terms;
}

void TermDistribution::add_text(std::string_view text) {
  for (auto& term : extract_terms(text)) add_term(term);
}

void TermDistribution::add_term(const std::string& term) {
  ++counts_[term];
  ++total_;
}

double TermDistribution::probability(const std::string& term) const {
  const auto it = counts_.find(term);
  if (it == counts_.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(total_);
}

std::size_t TermDistribution::count(const std::string& term) const {
  const auto it = counts_.find(term);
  return it == counts_.end() ? 0 : it->second;
}

std::map<std::string, double> TermDistribution::entries() const {
  std::map<std::string, double> out;
  for (const auto& [term, n] : counts_) out.emplace(term, static_cast<double>(n) / static_cast<double>(total_));
  return out;
}

TermDistribution build_distribution(Source source, std::span<const std::string> texts) {
  TermDistribution d(source);
  for (const auto& text : texts) d.add_text(text);
  return d;
}

Distributions build_all_distributions(const PageSnapshot& snap, const LinkSplit& split, const UrlParts& start,
                                      const UrlParts& land) {
  Distributions d;
  for (std::size_t i = 0; i < kSourceCount; ++i) d[i] = TermDistribution(static_cast<Source>(i));
  auto at = [&d](Source s) -> TermDistribution& { return d[static_cast<std::size_t>(s)]; };
  auto add_free = [](TermDistribution& dist, const UrlParts& parts) {
    for (const auto& piece : parts.free_url()) dist.add_text(piece);
  };

  at(Source::Text).add_text(snap.text);
  at(Source::Title).add_text(snap.title);
  at(Source::Copyright).add_text(snap.copyright);
  if (snap.image_terms) {
    for (const auto& t : *snap.image_terms) at(Source::Image).add_text(t);
  }
  add_free(at(Source::Start), start);
  add_free(at(Source::Land), land);
  for (const auto& u : split.internal_logged) add_free(at(Source::IntLog), u);
  for (const auto& u : split.internal_href) add_free(at(Source::IntLink), u);
  for (const auto& u : split.external_logged) add_free(at(Source::ExtLog), u);
  for (const auto& u : split.external_href) add_free(at(Source::ExtLink), u);
  at(Source::StartRdn).add_text(start.rdn);
  at(Source::LandRdn).add_text(land.rdn);
  for (const auto& u : split.internal_logged) at(Source::IntRdn).add_text(u.rdn);
  for (const auto& u : split.internal_href) at(Source::IntRdn).add_text(u.rdn);
  for (const auto& u : split.external_logged) at(Source::ExtRdn).add_text(u.rdn);
  return d;
}

double hellinger(const TermDistribution& p, const TermDistribution& q) {
  if (p.empty() && q.empty()) return 0.0;
  if (p.empty() || q.empty()) return 1.0;
  const auto& a = p.counts();
  const auto& b = q.counts();
  const double pn = static_cast<double>(p.total());
  const double qn = static_cast<double>(q.total());
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    double pa = 0.0;
    double qb = 0.0;
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      pa = static_cast<double>(ia->second) / pn;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      qb = static_cast<double>(ib->second) / qn;
      ++ib;
    } else {
      pa = static_cast<double>(ia->second) / pn;
      qb = static_cast<double>(ib->second) / qn;
      ++ia;
      ++ib;
    }
    const double diff = std::sqrt(pa) - std::sqrt(qb);
    sum += diff * diff;
  }
  return std::clamp(0.5 * sum, 0.0, 1.0);
}

}  // namespace phishscan
