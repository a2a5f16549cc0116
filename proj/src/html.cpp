#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "phishscan/snapshot.hpp"
#include "phishscan/terms.hpp"

namespace phishscan {
namespace {

constexpr int kMaxSrcdocDepth = 3;

bool ieq_prefix(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  }
  return true;
}

std::size_t ifind(std::string_view s, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (ieq_prefix(s, i, needle)) return i;
  }
  return std::string_view::npos;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::optional<char32_t> named_entity(std::string_view name) {
  struct Entity {
    std::string_view name;
    char32_t cp;
  };
  static constexpr Entity kEntities[] = {
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
      {"nbsp", ' '},     {"copy", 0xA9},    {"reg", 0xAE},     {"trade", 0x2122}, {"hellip", 0x2026},
      {"mdash", 0x2014}, {"ndash", 0x2013}, {"laquo", 0xAB},   {"raquo", 0xBB},   {"euro", 0x20AC},
      {"middot", 0xB7},  {"bull", 0x2022},  {"eacute", 0xE9},  {"egrave", 0xE8},  {"agrave", 0xE0},
      {"auml", 0xE4},    {"ouml", 0xF6},    {"uuml", 0xFC},    {"szlig", 0xDF},   {"ccedil", 0xE7},
  };
  for (const auto& e : kEntities) {
    if (e.name == name) return e.cp;
  }
  return std::nullopt;
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += s[i++];
      continue;
    }
    const auto body = s.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (body.size() > 1 && body[0] == '#') {
      char32_t value = 0;
      bool valid = true;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const auto digits = body.substr(hex ? 2 : 1);
      valid = !digits.empty();
      for (char c : digits) {
        const auto uc = static_cast<unsigned char>(c);
        if (hex && std::isxdigit(uc)) {
          value = value * 16 + static_cast<char32_t>(std::isdigit(uc) ? c - '0' : std::tolower(uc) - 'a' + 10);
        } else if (!hex && std::isdigit(uc)) {
          value = value * 10 + static_cast<char32_t>(c - '0');
        } else {
          valid = false;
          break;
        }
        if (value > 0x10FFFF) {
          valid = false;
          break;
        }
      }
      if (valid && value != 0) cp = value;
    } else {
      cp = named_entity(body);
    }
    if (cp) {
      append_utf8(out, *cp);
      i = semi + 1;
    } else {
      out += s[i++];
    }
  }
  return out;
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

bool is_block_tag(std::string_view name) {
  static constexpr std::array<std::string_view, 36> kBlock = {
      "address", "article", "aside",   "blockquote", "br",     "dd",    "div",   "dl",    "dt",
      "fieldset", "figure", "footer",  "form",       "h1",     "h2",    "h3",    "h4",    "h5",
      "h6",      "header",  "hr",      "legend",     "li",     "main",  "nav",   "ol",    "option",
      "p",       "pre",     "section", "select",     "table",  "td",    "th",    "tr",    "ul"};
  return std::find(kBlock.begin(), kBlock.end(), name) != kBlock.end();
}

struct Tag {
  std::string name;
  bool closing = false;
  std::vector<std::pair<std::string, std::string>> attributes;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

// Parses a tag starting at s[pos] == '<'. Returns the position after '>'.
std::size_t parse_tag(std::string_view s, std::size_t pos, Tag& tag) {
  std::size_t i = pos + 1;
  if (i < s.size() && s[i] == '/') {
    tag.closing = true;
    ++i;
  }
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-' || s[i] == ':')) {
    tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    ++i;
  }
  while (i < s.size() && s[i] != '>') {
    if (is_space(s[i]) || s[i] == '/') {
      ++i;
      continue;
    }
    std::string key;
    while (i < s.size() && !is_space(s[i]) && s[i] != '=' && s[i] != '>' && s[i] != '/') {
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
      ++i;
    }
    if (key.empty()) {
      ++i;
      continue;
    }
    while (i < s.size() && is_space(s[i])) ++i;
    std::string value;
    if (i < s.size() && s[i] == '=') {
      ++i;
      while (i < s.size() && is_space(s[i])) ++i;
      if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
        const char quote = s[i++];
        const auto end = s.find(quote, i);
        const auto stop = end == std::string_view::npos ? s.size() : end;
        value = decode_entities(s.substr(i, stop - i));
        i = end == std::string_view::npos ? s.size() : end + 1;
      } else {
        const auto begin = i;
        while (i < s.size() && !is_space(s[i]) && s[i] != '>') ++i;
        value = decode_entities(s.substr(begin, i - begin));
      }
    }
    tag.attributes.emplace_back(std::move(key), std::move(value));
  }
  return i < s.size() ? i + 1 : s.size();
}

bool line_is_copyright(std::string_view line) {
  if (line.find("\xC2\xA9") != std::string_view::npos) return true;
  const auto terms = extract_terms(line);
  return std::find(terms.begin(), terms.end(), "copyright") != terms.end();
}

void digest_into(std::string_view s, std::string_view base_url, int depth, HtmlDigest& out, std::string& text_lines) {
  std::string body_text;
  std::string loose_text;
  std::string title;
  bool seen_body = false;
  bool in_body = false;
  bool in_head = false;
  std::string base(base_url);

  auto emit_text = [&](std::string_view chunk) {
    if (in_body) body_text.append(chunk);
    if (!in_head) loose_text.append(chunk);
  };

  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '<') {
      const auto next = std::min(s.find('<', i), s.size());
      emit_text(decode_entities(s.substr(i, next - i)));
      i = next;
      continue;
    }
    if (s.substr(i).starts_with("<!--")) {
      const auto end = s.find("-->", i + 4);
      i = end == std::string_view::npos ? s.size() : end + 3;
      continue;
    }
    if (i + 1 < s.size() && (s[i + 1] == '!' || s[i + 1] == '?')) {
      const auto end = s.find('>', i);
      i = end == std::string_view::npos ? s.size() : end + 1;
      continue;
    }
    const bool tag_start = i + 1 < s.size() &&
                           (std::isalpha(static_cast<unsigned char>(s[i + 1])) ||
                            (s[i + 1] == '/' && i + 2 < s.size() && std::isalpha(static_cast<unsigned char>(s[i + 2]))));
    if (!tag_start) {
      emit_text("<");
      ++i;
      continue;
    }

    Tag tag;
    i = parse_tag(s, i, tag);
    const auto& name = tag.name;

    if (!tag.closing && (name == "script" || name == "style")) {
      const auto end = ifind(s, "</" + name, i);
      if (end == std::string_view::npos) {
        i = s.size();
      } else {
        const auto close = s.find('>', end);
        i = close == std::string_view::npos ? s.size() : close + 1;
      }
      continue;
    }
    if (!tag.closing && name == "title") {
      const auto end = ifind(s, "</title", i);
      const auto stop = end == std::string_view::npos ? s.size() : end;
      if (!title.empty()) title += ' ';
      title += decode_entities(s.substr(i, stop - i));
      if (end == std::string_view::npos) {
        i = s.size();
      } else {
        const auto close = s.find('>', end);
        i = close == std::string_view::npos ? s.size() : close + 1;
      }
      continue;
    }

    if (name == "head") {
      in_head = !tag.closing;
    } else if (name == "body") {
      if (!tag.closing) {
        seen_body = true;
        in_body = true;
        in_head = false;
      } else {
        in_body = false;
      }
    }
    if (is_block_tag(name)) emit_text("\n");
    if (tag.closing) continue;

    if (name == "base") {
      if (const auto* href = tag.attribute("href")) {
        auto resolved = resolve_url(base_url, *href);
        if (!resolved.empty()) base = std::move(resolved);
      }
    } else if (name == "a" || name == "area") {
      if (const auto* href = tag.attribute("href")) {
        auto resolved = resolve_url(base, *href);
        if (!resolved.empty()) out.href_links.push_back(std::move(resolved));
      }
    } else if (name == "input") {
      ++out.input_count;
    } else if (name == "img") {
      ++out.image_count;
    } else if (name == "iframe") {
      ++out.iframe_count;
      if (const auto* srcdoc = tag.attribute("srcdoc"); srcdoc && depth < kMaxSrcdocDepth) {
        std::string nested_lines;
        HtmlDigest nested;
        digest_into(*srcdoc, base, depth + 1, nested, nested_lines);
        emit_text("\n");
        emit_text(nested_lines);
        emit_text("\n");
        out.href_links.insert(out.href_links.end(), nested.href_links.begin(), nested.href_links.end());
        out.input_count += nested.input_count;
        out.image_count += nested.image_count;
        out.iframe_count += nested.iframe_count;
      }
    }
  }

  text_lines = seen_body ? std::move(body_text) : std::move(loose_text);
  if (!title.empty()) out.title = collapse_whitespace(title);
}

}  // namespace

HtmlDigest digest_html(std::string_view raw_html, std::string_view base_url) {
  HtmlDigest out;
  std::string text_lines;
  digest_into(raw_html, base_url, 0, out, text_lines);

  std::size_t begin = 0;
  while (begin <= text_lines.size()) {
    auto end = text_lines.find('\n', begin);
    if (end == std::string::npos) end = text_lines.size();
    const auto line = collapse_whitespace(std::string_view(text_lines).substr(begin, end - begin));
    if (!line.empty() && line_is_copyright(line)) {
      out.copyright = line;
      break;
    }
    begin = end + 1;
  }
  out.text = collapse_whitespace(text_lines);
  return out;
}

}  // namespace phishscan
