#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "phishscan/errors.hpp"
#include "phishscan/evalharness.hpp"
#include "phishscan/features.hpp"
#include "phishscan/gbm.hpp"
#include "phishscan/snapshot.hpp"
#include "phishscan/target_id.hpp"

namespace phishscan::cli {
namespace {

namespace fs = std::filesystem;

struct Config {
  std::string corpus_dir;
  std::string manifest_path;
  std::string suffix_list_path;
  std::string alexa_path;
  std::string model_path;
  std::string features_path;
  std::string fixture_index_path;
  std::string output_path;
  std::optional<double> threshold;
  std::uint64_t seed = 0;
  std::size_t keyterms_n = kDefaultKeyterms;
  unsigned jobs = 1;
  TrainConfig train;
  std::size_t step_legit = 10000;
  std::size_t step_phish = 100;
  std::size_t steps = 0;
};

// A processed corpus row; `features` is empty when the file was skipped.
struct CorpusRow {
  std::string file;
  std::optional<Label> label;
  std::optional<PageSnapshot> snapshot;
  std::vector<double> features;
  double millis = 0.0;
};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::EmptyInput:
    case Errc::SingleClass:
    case Errc::DimensionMismatch:
    case Errc::PoolExhausted:
    case Errc::MalformedSnapshot:
      return kExitData;
    default:
      return kExitConfig;
  }
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(Errc::Config, std::string("missing required flag ") + flag);
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

// Opens --out, or falls back to the report stream.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary | std::ios::trunc);
    if (!file_) throw Error(Errc::Io, "cannot write " + path);
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<CorpusRow> process_corpus(const Config& cfg, bool need_features, std::ostream& err, std::size_t& skipped) {
  require(cfg.corpus_dir, "--corpus");
  require(cfg.suffix_list_path, "--suffixes");
  const auto suffixes = load_suffix_list(cfg.suffix_list_path);
  AlexaRanks alexa;
  if (need_features) {
    require(cfg.alexa_path, "--alexa");
    alexa = load_alexa(cfg.alexa_path);
  }
  const auto manifest = cfg.manifest_path.empty() ? std::nullopt : std::optional<fs::path>(cfg.manifest_path);
  const auto entries = list_corpus(cfg.corpus_dir, manifest);

  std::vector<CorpusRow> rows(entries.size());
  std::vector<std::string> failures(entries.size());
  parallel_for(entries.size(), cfg.jobs, [&](std::size_t i) {
    auto& row = rows[i];
    row.file = entries[i].filename;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto snap = load_snapshot(fs::path(cfg.corpus_dir) / row.file, suffixes);
      if (need_features) row.features = extract_features(snap, suffixes, alexa).values;
      row.label = entries[i].label ? entries[i].label : snap.label;
      row.snapshot = std::move(snap);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
    row.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  skipped = 0;
  std::vector<CorpusRow> kept;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!failures[i].empty()) {
      err << "skipped " << rows[i].file << ": " << failures[i] << '\n';
      ++skipped;
      continue;
    }
    kept.push_back(std::move(rows[i]));
  }
  return kept;
}

void write_feature_csv(std::ostream& out, const std::vector<CorpusRow>& rows) {
  const auto& names = feature_names();
  for (const auto& n : names) out << n << ',';
  out << "label\n";
  for (const auto& row : rows) {
    for (double v : row.features) out << format_double(v) << ',';
    out << (row.label ? label_name(*row.label) : "") << '\n';
  }
}

std::vector<CorpusRow> read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read feature CSV " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::EmptyInput, "feature CSV is empty");
  std::vector<std::string> header;
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  auto expected = feature_names();
  expected.push_back("label");
  if (header != expected) throw Error(Errc::Config, "feature CSV header does not match the feature manifest");

  std::vector<CorpusRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    CorpusRow row;
    row.file = "row" + std::to_string(line_no - 1);
    std::stringstream ls(line);
    std::string cell;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      if (!std::getline(ls, cell, ',')) throw Error(Errc::DimensionMismatch, "short row at line " + std::to_string(line_no));
      try {
        row.features.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(Errc::Config, "bad number '" + cell + "' at line " + std::to_string(line_no));
      }
    }
    std::getline(ls, cell);
    if (!cell.empty()) {
      row.label = parse_label(cell);
      if (!row.label) throw Error(Errc::Config, "bad label '" + cell + "' at line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CorpusRow> feature_rows(const Config& cfg, std::ostream& err) {
  if (!cfg.features_path.empty()) return read_feature_csv(cfg.features_path);
  std::size_t skipped = 0;
  auto rows = process_corpus(cfg, true, err, skipped);
  if (skipped > 0) err << "skipped " << skipped << " snapshot(s)\n";
  return rows;
}

std::vector<LabeledRow> labeled(const std::vector<CorpusRow>& rows) {
  std::vector<LabeledRow> out;
  for (const auto& r : rows) {
    if (r.label) out.push_back({r.features, *r.label == Label::Phish});
  }
  return out;
}

GbmModel load_model_for(const Config& cfg) {
  require(cfg.model_path, "--model");
  auto model = load_model(cfg.model_path);
  if (cfg.threshold) model.threshold = *cfg.threshold;
  return model;
}

int cmd_extract(const Config& cfg, std::ostream& out, std::ostream& err) {
  std::size_t skipped = 0;
  const auto rows = process_corpus(cfg, true, err, skipped);
  Output dest(cfg.output_path, out);
  write_feature_csv(*dest, rows);

  std::vector<double> ms;
  for (const auto& r : rows) ms.push_back(r.millis);
  double median = 0.0;
  double mean = 0.0;
  double stdev = 0.0;
  if (!ms.empty()) {
    std::sort(ms.begin(), ms.end());
    median = ms.size() % 2 ? ms[ms.size() / 2] : 0.5 * (ms[ms.size() / 2 - 1] + ms[ms.size() / 2]);
    mean = std::accumulate(ms.begin(), ms.end(), 0.0) / static_cast<double>(ms.size());
    for (double x : ms) stdev += (x - mean) * (x - mean);
    stdev = std::sqrt(stdev / static_cast<double>(ms.size()));
  }
  err << "extracted " << rows.size() << " snapshot(s), skipped " << skipped << '\n';
  err << "extraction ms: median " << median << " mean " << mean << " stdev " << stdev << '\n';
  return kExitOk;
}

int cmd_train(const Config& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.output_path, "--out");
  const auto data = labeled(feature_rows(cfg, err));
  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& r : data) {
    x.push_back(r.features);
    y.push_back(r.phish ? 1 : 0);
  }
  auto tc = cfg.train;
  tc.seed = cfg.seed;
  double final_loss = 0.0;
  TrainObserver observer{[&](int, double loss) { final_loss = loss; }};
  auto model = train(x, y, tc, observer);
  if (model.n_features == kFeatureCount) model.feature_names = feature_names();
  model.threshold = cfg.threshold.value_or(kDefaultThreshold);
  save_model(model, cfg.output_path);
  out << "trained " << model.trees.size() << " rounds on " << x.size() << " rows, final log-loss "
      << format_double(final_loss) << '\n';
  return kExitOk;
}

int cmd_predict(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto model = load_model_for(cfg);
  const auto rows = feature_rows(cfg, err);
  Output dest(cfg.output_path, out);
  *dest << "file,confidence,class\n";
  for (const auto& r : rows) {
    const double c = predict_confidence(model, r.features);
    *dest << r.file << ',' << format_double(c) << ',' << (verdict_for(c, model.threshold) == Verdict::Phish ? "phish" : "legit") << '\n';
  }
  return kExitOk;
}

int cmd_evaluate(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto model = load_model_for(cfg);
  const auto rows = labeled(feature_rows(cfg, err));
  const MetricsReport report = evaluate(model, rows, model.threshold);
  Output dest(cfg.output_path, out);
  write_metrics_csv(*dest, std::span<const MetricsReport>(&report, 1));
  return kExitOk;
}

int cmd_roc(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto model = load_model_for(cfg);
  const auto rows = labeled(feature_rows(cfg, err));
  const auto curve = roc(model, rows);
  Output dest(cfg.output_path, out);
  write_curve_csv(*dest, curve);
  err << "auc " << format_double(curve.auc) << " rank_auc " << format_double(rank_auc(score_rows(model, rows))) << '\n';
  return kExitOk;
}

int cmd_sweep(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto model = load_model_for(cfg);
  std::vector<std::vector<double>> legit;
  std::vector<std::vector<double>> phish;
  for (const auto& r : labeled(feature_rows(cfg, err))) (r.phish ? phish : legit).push_back(r.features);
  SweepOptions opts;
  opts.step_legit = cfg.step_legit;
  opts.step_phish = cfg.step_phish;
  opts.steps = cfg.steps;
  opts.seed = cfg.seed;
  opts.threshold = model.threshold;
  const auto reports = scalability_sweep(model, legit, phish, opts);
  Output dest(cfg.output_path, out);
  write_metrics_csv(*dest, reports);
  return kExitOk;
}

int cmd_identify(const Config& cfg, std::ostream& out, std::ostream& err) {
  require(cfg.fixture_index_path, "--fixture-index");
  auto client = FixtureSearchClient::load(cfg.fixture_index_path);
  require(cfg.suffix_list_path, "--suffixes");
  const auto suffixes = load_suffix_list(cfg.suffix_list_path);
  std::size_t skipped = 0;
  const auto rows = process_corpus(cfg, false, err, skipped);
  Output dest(cfg.output_path, out);
  *dest << "file,status,top1,top2,top3\n";
  IdentifyOptions opts;
  opts.keyterms = cfg.keyterms_n;
  for (const auto& r : rows) {
    const auto verdict = identify_target(*r.snapshot, suffixes, client, opts);
    const auto top = verdict.top_k_targets(3);
    *dest << r.file << ',' << status_name(verdict.status);
    for (std::size_t k = 0; k < 3; ++k) *dest << ',' << (k < top.size() ? top[k] : "");
    *dest << '\n';
  }
  if (skipped > 0) err << "skipped " << skipped << " snapshot(s)\n";
  return kExitOk;
}

int cmd_pipeline(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto model = load_model_for(cfg);
  require(cfg.fixture_index_path, "--fixture-index");
  auto client = FixtureSearchClient::load(cfg.fixture_index_path);
  std::size_t skipped = 0;
  auto rows = process_corpus(cfg, true, err, skipped);
  std::vector<PipelinePage> pages;
  for (auto& r : rows) {
    if (!r.label) continue;
    pages.push_back({r.file, std::move(*r.snapshot), std::move(r.features), *r.label == Label::Phish});
  }
  const auto suffixes = load_suffix_list(cfg.suffix_list_path);
  IdentifyOptions opts;
  opts.keyterms = cfg.keyterms_n;
  const auto rep = pipeline_eval(model, pages, suffixes, client, opts);
  Output dest(cfg.output_path, out);
  *dest << "pages,detector_positives,false_positives,legitimate_confirmed,rescued_false_positives,"
           "lost_true_positives,phish_with_targets,suspicious\n"
        << rep.pages << ',' << rep.detector_positives << ',' << rep.false_positives << ','
        << rep.legitimate_confirmed << ',' << rep.rescued_false_positives << ',' << rep.lost_true_positives << ','
        << rep.phish_with_targets << ',' << rep.suspicious << '\n';
  return kExitOk;
}

int cmd_names(const Config& cfg, std::ostream& out) {
  Output dest(cfg.output_path, out);
  *dest << "# phishscan feature manifest v1 (" << kFeatureCount << " features)\n";
  for (const auto& n : feature_names()) *dest << n << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phishing webpage feature extraction, classification and target identification", "phishscan"};
  app.require_subcommand(1);
  Config cfg;

  auto add_corpus = [&](CLI::App* cmd) {
    cmd->add_option("--corpus", cfg.corpus_dir, "Directory of snapshot files");
    cmd->add_option("--manifest", cfg.manifest_path, "CSV filename,label (phish|legit)");
    cmd->add_option("--suffixes", cfg.suffix_list_path, "Public suffix list file");
    cmd->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
  };
  auto add_features = [&](CLI::App* cmd) {
    add_corpus(cmd);
    cmd->add_option("--alexa", cfg.alexa_path, "Domain popularity list, lines rank,domain");
    cmd->add_option("--features", cfg.features_path, "Feature CSV (instead of --corpus)");
  };
  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", cfg.model_path, "Model file");
    cmd->add_option("--threshold", cfg.threshold, "Discrimination threshold")->check(CLI::Range(0.0, 1.0));
  };

  auto* extract = app.add_subcommand("extract", "Write the feature CSV for a corpus");
  add_features(extract);
  auto* trainc = app.add_subcommand("train", "Train a gradient-boosted model");
  add_features(trainc);
  trainc->add_option("--threshold", cfg.threshold, "Discrimination threshold stored in the model")->check(CLI::Range(0.0, 1.0));
  trainc->add_option("--trees", cfg.train.n_trees, "Boosting rounds");
  trainc->add_option("--max-depth", cfg.train.max_depth, "Tree depth");
  trainc->add_option("--learning-rate", cfg.train.learning_rate, "Shrinkage");
  trainc->add_option("--min-leaf", cfg.train.min_leaf, "Minimum rows per leaf");
  trainc->add_option("--subsample", cfg.train.subsample, "Row fraction per round");
  auto* predict = app.add_subcommand("predict", "Score a corpus: file,confidence,class");
  add_features(predict);
  add_model(predict);
  auto* evaluatec = app.add_subcommand("evaluate", "Precision, recall, F1, FPR at the threshold");
  add_features(evaluatec);
  add_model(evaluatec);
  auto* rocc = app.add_subcommand("roc", "ROC curve (fpr,tpr) and AUC");
  add_features(rocc);
  add_model(rocc);
  auto* sweep = app.add_subcommand("sweep", "Metrics on a growing random test set");
  add_features(sweep);
  add_model(sweep);
  sweep->add_option("--step-legit", cfg.step_legit, "Legitimate rows added per step");
  sweep->add_option("--step-phish", cfg.step_phish, "Phishing rows added per step");
  sweep->add_option("--steps", cfg.steps, "Number of steps (0: as many as fit)");
  auto* identify = app.add_subcommand("identify", "Target identification: file,status,top1,top2,top3");
  add_corpus(identify);
  identify->add_option("--fixture-index", cfg.fixture_index_path, "Offline search index (JSON)");
  identify->add_option("--keyterms-n", cfg.keyterms_n, "Keyterms per list")->check(CLI::Range(1, 100));
  auto* pipeline = app.add_subcommand("pipeline", "Detector followed by target identification");
  add_features(pipeline);
  add_model(pipeline);
  pipeline->add_option("--fixture-index", cfg.fixture_index_path, "Offline search index (JSON)");
  pipeline->add_option("--keyterms-n", cfg.keyterms_n, "Keyterms per list")->check(CLI::Range(1, 100));
  auto* names = app.add_subcommand("names", "Write the feature name manifest");

  for (auto* cmd : app.get_subcommands({})) {
    cmd->add_option("--out", cfg.output_path, "Output file (default stdout)");
    cmd->add_option("--seed", cfg.seed, "Random seed");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (extract->parsed()) return cmd_extract(cfg, out, err);
    if (trainc->parsed()) return cmd_train(cfg, out, err);
    if (predict->parsed()) return cmd_predict(cfg, out, err);
    if (evaluatec->parsed()) return cmd_evaluate(cfg, out, err);
    if (rocc->parsed()) return cmd_roc(cfg, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, out, err);
    if (identify->parsed()) return cmd_identify(cfg, out, err);
    if (pipeline->parsed()) return cmd_pipeline(cfg, out, err);
    if (names->parsed()) return cmd_names(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const SearchError& e) {
    err << "search error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace phishscan::cli
