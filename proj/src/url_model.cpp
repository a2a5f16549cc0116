#include "phishscan/url_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <vector>

#include "phishscan/errors.hpp"

namespace phishscan {
namespace {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

// Byte offsets at which each label of a dotted name starts.
std::vector<std::size_t> label_starts(std::string_view host) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < host.size(); ++i) {
    if (host[i] == '.') starts.push_back(i + 1);
  }
  return starts;
}

bool is_numeric_host(std::string_view host) {
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') return true;
  std::size_t begin = 0;
  while (begin <= host.size()) {
    auto end = host.find('.', begin);
    if (end == std::string_view::npos) end = host.size();
    if (!all_digits(host.substr(begin, end - begin))) return false;
    begin = end + 1;
  }
  return true;
}

// Length of the scheme if `s` starts with "scheme:", else 0.
std::size_t scheme_length(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == ':') return i;
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return 0;
  }
  return 0;
}

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> out;
  std::size_t begin = 1;  // path always starts with '/'
  bool trailing_slash = false;
  while (begin <= path.size()) {
    auto end = path.find('/', begin);
    if (end == std::string_view::npos) end = path.size();
    const auto seg = path.substr(begin, end - begin);
    trailing_slash = false;
    if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing_slash = true;
    } else if (seg == ".") {
      trailing_slash = true;
    } else {
      out.push_back(seg);
    }
    begin = end + 1;
  }
  std::string result;
  for (const auto seg : out) {
    result += '/';
    result += seg;
  }
  if (trailing_slash || result.empty()) result += '/';
  return result;
}

}  // namespace

SuffixList SuffixList::parse(std::istream& in) {
  SuffixList list;
  std::string line;
  while (std::getline(in, line)) {
    const auto view = trim(line);
    if (view.empty()) continue;
    if (view.starts_with("//")) {
      constexpr std::string_view kVersion = "// VERSION:";
      if (list.version_.empty() && view.starts_with(kVersion)) {
        list.version_ = std::string(trim(view.substr(kVersion.size())));
      }
      continue;
    }
    // A rule is the first whitespace-delimited token on the line.
    auto token = view.substr(0, view.find_first_of(" \t"));
    auto rule = to_lower_ascii(token);
    if (rule.starts_with('!')) {
      list.exception_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      list.wildcard_.insert(rule.substr(2));
    } else {
      list.plain_.insert(std::move(rule));
    }
  }
  if (list.rule_count() == 0) throw Error(Errc::ZeroRules, "public suffix list contains no rules");
  return list;
}

std::string SuffixList::public_suffix(std::string_view host) const {
  const auto starts = label_starts(host);
  const std::size_t n = starts.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (exception_.count(std::string(host.substr(starts[i])))) return std::string(host.substr(starts[i + 1]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::string candidate(host.substr(starts[i]));
    if (plain_.count(candidate)) return candidate;
    if (i + 1 < n && wildcard_.count(std::string(host.substr(starts[i + 1])))) return candidate;
  }
  return std::string(host.substr(starts.back()));
}

SuffixList load_suffix_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read suffix list " + path.string());
  return SuffixList::parse(in);
}

std::string UrlParts::path_and_query() const { return has_query ? path + "?" + query : path; }

std::array<std::string, 2> UrlParts::free_url() const { return {subdomains, path_and_query()}; }

UrlParts parse_url(std::string_view url, const SuffixList& suffixes) {
  url = trim(url);
  UrlParts parts;
  parts.url = std::string(url);

  const auto scheme_len = scheme_length(url);
  if (scheme_len == 0) throw Error(Errc::MissingScheme, "no scheme in '" + parts.url + "'");
  parts.protocol = to_lower_ascii(url.substr(0, scheme_len));
  auto rest = url.substr(scheme_len + 1);
  if (!rest.starts_with("//")) throw Error(Errc::MissingHost, "no authority in '" + parts.url + "'");
  rest.remove_prefix(2);

  const auto authority_end = std::min(rest.find_first_of("/?#"), rest.size());
  auto authority = rest.substr(0, authority_end);
  rest.remove_prefix(authority_end);

  if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  std::string_view host;
  if (authority.starts_with('[')) {
    const auto close = authority.find(']');
    host = close == std::string_view::npos ? authority : authority.substr(0, close + 1);
  } else {
    host = authority.substr(0, authority.find(':'));
  }
  if (host.ends_with('.')) host.remove_suffix(1);
  if (host.empty()) throw Error(Errc::MissingHost, "empty host in '" + parts.url + "'");
  parts.fqdn = to_lower_ascii(host);

  if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  if (const auto q = rest.find('?'); q != std::string_view::npos) {
    parts.path = std::string(rest.substr(0, q));
    parts.query = std::string(rest.substr(q + 1));
    parts.has_query = true;
  } else {
    parts.path = std::string(rest);
  }

  if (is_numeric_host(parts.fqdn)) {
    parts.is_ip = true;
    parts.rdn = parts.fqdn;
    return parts;
  }
  if (parts.fqdn.front() == '.' || parts.fqdn.find("..") != std::string::npos) {
    throw Error(Errc::EmptyLabel, "empty label in host of '" + parts.url + "'");
  }

  std::string ps = suffixes.public_suffix(parts.fqdn);
  if (ps == parts.fqdn) {
    // The whole host is itself a listed suffix: treat its first label as mld.
    const auto dot = parts.fqdn.find('.');
    ps = dot == std::string::npos ? std::string() : parts.fqdn.substr(dot + 1);
  }
  const std::string_view head = std::string_view(parts.fqdn).substr(0, parts.fqdn.size() - ps.size() - (ps.empty() ? 0 : 1));
  const auto dot = head.rfind('.');
  parts.mld = std::string(dot == std::string_view::npos ? head : head.substr(dot + 1));
  parts.subdomains = dot == std::string_view::npos ? std::string() : std::string(head.substr(0, dot));
  parts.ps = std::move(ps);
  parts.rdn = parts.ps.empty() ? parts.mld : parts.mld + "." + parts.ps;
  return parts;
}

std::string format_url(const UrlParts& parts) { return parts.protocol + "://" + parts.fqdn + parts.path_and_query(); }

int count_level_domains(const UrlParts& parts) {
  if (parts.is_ip) return 0;
  return static_cast<int>(std::count(parts.fqdn.begin(), parts.fqdn.end(), '.')) + 1;
}

std::string resolve_url(std::string_view base, std::string_view href) {
  href = trim(href);
  if (const auto hash = href.find('#'); hash != std::string_view::npos) href = href.substr(0, hash);

  if (const auto len = scheme_length(href); len > 0) {
    if (href.substr(len + 1).starts_with("//")) return std::string(href);
    return {};
  }

  base = trim(base);
  if (const auto hash = base.find('#'); hash != std::string_view::npos) base = base.substr(0, hash);
  const auto base_scheme = scheme_length(base);
  if (base_scheme == 0 || !base.substr(base_scheme + 1).starts_with("//")) return {};
  if (href.starts_with("//")) return std::string(base.substr(0, base_scheme + 1)) + std::string(href);

  const auto authority_begin = base_scheme + 3;
  const auto authority_end = std::min(base.find_first_of("/?", authority_begin), base.size());
  const std::string origin(base.substr(0, authority_end));
  const auto base_path_query = base.substr(authority_end);
  const auto base_path = base_path_query.substr(0, base_path_query.find('?'));

  if (href.empty()) return std::string(base);
  if (href.starts_with('?')) return origin + std::string(base_path) + std::string(href);

  std::string target;
  if (href.starts_with('/')) {
    target = std::string(href);
  } else {
    const auto slash = base_path.rfind('/');
    const std::string dir = slash == std::string_view::npos ? "/" : std::string(base_path.substr(0, slash + 1));
    target = dir + std::string(href);
  }
  const auto q = target.find('?');
  const std::string path = target.substr(0, q);
  const std::string query = q == std::string::npos ? std::string() : target.substr(q);
  return origin + remove_dot_segments(path) + query;
}

}  // namespace phishscan
