#include "phishscan/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishscan/errors.hpp"

namespace phishscan {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedSnapshot, what); }

std::optional<std::string> opt_string(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) malformed(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::vector<std::string>> opt_string_list(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_array()) malformed(std::string("field '") + key + "' must be a list of strings");
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& item : *it) {
    if (!item.is_string()) malformed(std::string("field '") + key + "' must be a list of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::optional<std::size_t> opt_count(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    malformed(std::string("field '") + key + "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::string trimmed(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string_view label_name(Label label) { return label == Label::Phish ? "phish" : "legit"; }

std::optional<Label> parse_label(std::string_view text) {
  if (text == "phish" || text == "1") return Label::Phish;
  if (text == "legit" || text == "legitimate" || text == "0") return Label::Legitimate;
  return std::nullopt;
}

PageSnapshot parse_snapshot(std::string_view json_text, const SuffixList& suffixes) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) malformed("snapshot document must be an object");

  PageSnapshot snap;
  auto start = opt_string(doc, "starting_url");
  auto land = opt_string(doc, "landing_url");
  if (!start) malformed("missing starting_url");
  if (!land) malformed("missing landing_url");
  snap.starting_url = std::move(*start);
  snap.landing_url = std::move(*land);
  for (const auto* url : {&snap.starting_url, &snap.landing_url}) {
    try {
      (void)parse_url(*url, suffixes);
    } catch (const Error& e) {
      malformed("unparseable URL '" + *url + "': " + e.what());
    }
  }

  if (auto chain = opt_string_list(doc, "redirection_chain")) {
    if (chain->empty()) malformed("empty redirection_chain");
    if (chain->front() != snap.starting_url) malformed("redirection_chain must start with starting_url");
    if (chain->back() != snap.landing_url) malformed("redirection_chain must end with landing_url");
    snap.redirection_chain = std::move(*chain);
  } else {
    snap.redirection_chain.push_back(snap.starting_url);
    if (snap.landing_url != snap.starting_url) snap.redirection_chain.push_back(snap.landing_url);
  }

  snap.logged_links = opt_string_list(doc, "logged_links").value_or(std::vector<std::string>{});
  snap.image_terms = opt_string_list(doc, "image_terms");

  HtmlDigest digest;
  if (auto raw = opt_string(doc, "raw_html")) digest = digest_html(*raw, snap.landing_url);
  snap.text = opt_string(doc, "text").value_or(digest.text);
  snap.title = opt_string(doc, "title").value_or(digest.title);
  snap.copyright = opt_string(doc, "copyright").value_or(digest.copyright);
  snap.href_links = opt_string_list(doc, "href_links").value_or(digest.href_links);
  snap.input_count = opt_count(doc, "input_count").value_or(digest.input_count);
  snap.image_count = opt_count(doc, "image_count").value_or(digest.image_count);
  snap.iframe_count = opt_count(doc, "iframe_count").value_or(digest.iframe_count);

  if (auto label = opt_string(doc, "label")) {
    snap.label = parse_label(*label);
    if (!snap.label) malformed("unknown label '" + *label + "'");
  }
  return snap;
}

PageSnapshot load_snapshot(const std::filesystem::path& path, const SuffixList& suffixes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read snapshot " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_snapshot(buf.str(), suffixes);
  } catch (const Error& e) {
    throw Error(e.code(), path.filename().string() + ": " + e.what());
  }
}

std::string snapshot_to_json(const PageSnapshot& snap) {
  json doc = {
      {"starting_url", snap.starting_url},
      {"landing_url", snap.landing_url},
      {"redirection_chain", snap.redirection_chain},
      {"logged_links", snap.logged_links},
      {"href_links", snap.href_links},
      {"text", snap.text},
      {"title", snap.title},
      {"copyright", snap.copyright},
      {"input_count", snap.input_count},
      {"image_count", snap.image_count},
      {"iframe_count", snap.iframe_count},
  };
  if (snap.image_terms) doc["image_terms"] = *snap.image_terms;
  if (snap.label) doc["label"] = label_name(*snap.label);
  return doc.dump(2);
}

LinkSplit split_links(const PageSnapshot& snap, const SuffixList& suffixes) {
  LinkSplit split;
  for (const auto& url : snap.redirection_chain) {
    try {
      split.internal_rdns.insert(parse_url(url, suffixes).rdn);
    } catch (const Error&) {
      ++split.dropped;
    }
  }
  auto assign = [&](const std::vector<std::string>& links, std::vector<UrlParts>& internal,
                    std::vector<UrlParts>& external) {
    for (const auto& url : links) {
      try {
        auto parts = parse_url(url, suffixes);
        auto& bucket = split.internal_rdns.count(parts.rdn) ? internal : external;
        bucket.push_back(std::move(parts));
      } catch (const Error&) {
        ++split.dropped;
      }
    }
  };
  assign(snap.logged_links, split.internal_logged, split.external_logged);
  assign(snap.href_links, split.internal_href, split.external_href);
  return split;
}

std::vector<CorpusEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read manifest " + path.string());
  std::vector<CorpusEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trimmed(line);
    if (line.empty() || line.starts_with('#')) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(Errc::Config, "manifest line " + std::to_string(line_no) + ": expected filename,label");
    auto name = trimmed(line.substr(0, comma));
    const auto label_text = trimmed(line.substr(comma + 1));
    if (line_no == 1 && name == "filename") continue;
    auto label = parse_label(label_text);
    if (!label) throw Error(Errc::Config, "manifest line " + std::to_string(line_no) + ": unknown label '" + label_text + "'");
    entries.push_back({std::move(name), label});
  }
  return entries;
}

std::vector<CorpusEntry> list_corpus(const std::filesystem::path& dir,
                                     const std::optional<std::filesystem::path>& manifest) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw Error(Errc::Io, "corpus directory not found: " + dir.string());
  std::vector<CorpusEntry> entries;
  if (manifest) {
    entries = read_manifest(*manifest);
  } else {
    for (const auto& item : std::filesystem::directory_iterator(dir)) {
      if (!item.is_regular_file() || item.path().extension() != ".json") continue;
      entries.push_back({item.path().filename().string(), std::nullopt});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.filename < b.filename; });
  return entries;
}

}  // namespace phishscan
