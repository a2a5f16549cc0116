#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "phishscan/url_model.hpp"

namespace phishscan {

enum class Label { Phish, Legitimate };

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view text);

struct PageSnapshot {
  std::string starting_url;
  std::string landing_url;
  std::vector<std::string> redirection_chain;  // starting_url first, landing_url last
  std::vector<std::string> logged_links;
  std::vector<std::string> href_links;
  std::string text;
  std::string title;
  std::string copyright;
  std::optional<std::vector<std::string>> image_terms;
  std::size_t input_count = 0;
  std::size_t image_count = 0;
  std::size_t iframe_count = 0;
  std::optional<Label> label;
};

// Result of digesting raw HTML. Never fails; malformed markup is handled
// on a best-effort basis.
struct HtmlDigest {
  std::string text;
  std::string title;
  std::vector<std::string> href_links;
  std::string copyright;
  std::size_t input_count = 0;
  std::size_t image_count = 0;
  std::size_t iframe_count = 0;
};

HtmlDigest digest_html(std::string_view raw_html, std::string_view base_url);

// Parses a snapshot document (JSON). Fields given explicitly win over the
// ones digested from "raw_html".
PageSnapshot parse_snapshot(std::string_view json_text, const SuffixList& suffixes);
PageSnapshot load_snapshot(const std::filesystem::path& path, const SuffixList& suffixes);

std::string snapshot_to_json(const PageSnapshot& snap);

struct LinkSplit {
  std::vector<UrlParts> internal_logged;
  std::vector<UrlParts> external_logged;
  std::vector<UrlParts> internal_href;
  std::vector<UrlParts> external_href;
  std::set<std::string> internal_rdns;
  std::size_t dropped = 0;  // unparseable member URLs
};

LinkSplit split_links(const PageSnapshot& snap, const SuffixList& suffixes);

// A corpus is a directory of snapshot files plus a "filename,label" manifest.
struct CorpusEntry {
  std::string filename;
  std::optional<Label> label;
};

std::vector<CorpusEntry> read_manifest(const std::filesystem::path& path);

// Corpus entries sorted by filename: the files listed in `manifest` when
// given, else every *.json file in `dir` (labels then come from each
// file's own label field).
std::vector<CorpusEntry> list_corpus(const std::filesystem::path& dir,
                                     const std::optional<std::filesystem::path>& manifest);

}  // namespace phishscan
