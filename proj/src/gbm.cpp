#include "phishscan/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishscan/errors.hpp"
#include "random_util.hpp"

namespace phishscan {
namespace {

using nlohmann::json;

constexpr double kMaxLeafValue = 10.0;
constexpr double kMinHessian = 1e-12;
constexpr double kMinGain = 1e-12;
constexpr std::string_view kFormatTag = "phishscan-gbm";

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = kMinGain;
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const std::vector<double>> rows, const std::vector<std::vector<std::size_t>>& sorted,
              const std::vector<double>& residual, const std::vector<double>& hessian, const TrainConfig& cfg)
      : rows_(rows), sorted_(sorted), residual_(residual), hessian_(hessian), cfg_(cfg), node_of_(rows.size(), -1) {}

  RegressionTree build(const std::vector<std::size_t>& sample) {
    tree_.nodes.clear();
    std::fill(node_of_.begin(), node_of_.end(), -1);
    tree_.nodes.emplace_back();
    for (auto i : sample) node_of_[i] = 0;
    grow(0, 1, sample);
    return std::move(tree_);
  }

 private:
  void grow(int node, int depth, const std::vector<std::size_t>& members) {
    const auto split = depth > cfg_.max_depth ? SplitCandidate{} : best_split(node, members);
    if (split.feature < 0) {
      double sum_r = 0.0;
      double sum_h = 0.0;
      for (auto i : members) {
        sum_r += residual_[i];
        sum_h += hessian_[i];
      }
      tree_.nodes[node].leaf_value = std::clamp(sum_r / std::max(sum_h, kMinHessian), -kMaxLeafValue, kMaxLeafValue);
      return;
    }
    const int left = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const int right = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    auto& n = tree_.nodes[node];
    n.feature = split.feature;
    n.threshold = split.threshold;
    n.left = left;
    n.right = right;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (auto i : members) {
      const bool go_left = rows_[i][static_cast<std::size_t>(split.feature)] <= split.threshold;
      (go_left ? left_rows : right_rows).push_back(i);
      node_of_[i] = go_left ? left : right;
    }
    grow(left, depth + 1, left_rows);
    grow(right, depth + 1, right_rows);
  }

  // Exact greedy search for the split maximizing squared-error reduction of
  // the residuals. Strict improvement keeps the lowest feature index and the
  // lowest threshold on ties.
  SplitCandidate best_split(int node, const std::vector<std::size_t>& members) const {
    SplitCandidate best;
    const auto n = members.size();
    const auto min_leaf = static_cast<std::size_t>(std::max(cfg_.min_leaf, 1));
    if (n < 2 * min_leaf) return best;
    double total = 0.0;
    for (auto i : members) total += residual_[i];
    const double parent = total * total / static_cast<double>(n);

    for (std::size_t f = 0; f < sorted_.size(); ++f) {
      std::size_t left_n = 0;
      double left_sum = 0.0;
      double prev_value = 0.0;
      for (auto i : sorted_[f]) {
        if (node_of_[i] != node) continue;
        const double value = rows_[i][f];
        if (left_n >= min_leaf && n - left_n >= min_leaf && value > prev_value) {
          const double right_sum = total - left_sum;
          const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                              right_sum * right_sum / static_cast<double>(n - left_n) - parent;
          if (gain > best.gain) {
            double threshold = prev_value + (value - prev_value) / 2.0;
            if (threshold >= value) threshold = prev_value;
            best = {static_cast<int>(f), threshold, gain};
          }
        }
        ++left_n;
        left_sum += residual_[i];
        prev_value = value;
        if (n - left_n < min_leaf) break;
      }
    }
    return best;
  }

  std::span<const std::vector<double>> rows_;
  const std::vector<std::vector<std::size_t>>& sorted_;
  const std::vector<double>& residual_;
  const std::vector<double>& hessian_;
  const TrainConfig& cfg_;
  std::vector<int> node_of_;
  RegressionTree tree_;
};

void check_rows(std::span<const std::vector<double>> rows, std::size_t n_features) {
  for (const auto& row : rows) {
    if (row.size() != n_features) throw Error(Errc::DimensionMismatch, "rows have inconsistent lengths");
  }
}

template <typename T>
T require(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw Error(Errc::Corrupt, std::string("model file lacks '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::Corrupt, std::string("model field '") + key + "' has the wrong type");
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (n_trees < 1) throw Error(Errc::Config, "n_trees must be >= 1");
  if (max_depth < 1) throw Error(Errc::Config, "max_depth must be >= 1");
  if (min_leaf < 1) throw Error(Errc::Config, "min_leaf must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(Errc::Config, "learning_rate must be > 0");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw Error(Errc::Config, "subsample must be in (0,1]");
}

double RegressionTree::predict(std::span<const double> row) const {
  if (nodes.empty()) return 0.0;
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].leaf_value;
}

double GbmModel::raw_score(std::span<const double> row) const {
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict(row);
  return initial_score + learning_rate * sum;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_loss(double label, double score) {
  const double softplus = score > 0.0 ? score + std::log1p(std::exp(-score)) : std::log1p(std::exp(score));
  return softplus - label * score;
}

double pseudo_residual(double label, double score) { return label - sigmoid(score); }

GbmModel train(std::span<const std::vector<double>> rows, std::span<const int> labels, const TrainConfig& cfg,
               const TrainObserver& observer) {
  cfg.validate();
  if (rows.empty()) throw Error(Errc::EmptyInput, "no training rows");
  if (rows.size() != labels.size()) throw Error(Errc::DimensionMismatch, "rows and labels differ in length");
  const std::size_t n = rows.size();
  const std::size_t n_features = rows.front().size();
  check_rows(rows, n_features);
  std::size_t positives = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw Error(Errc::Config, "labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == n) throw Error(Errc::SingleClass, "training data contains a single class");

  GbmModel model;
  model.config = cfg;
  model.learning_rate = cfg.learning_rate;
  model.n_features = n_features;
  const double prior = static_cast<double>(positives) / static_cast<double>(n);
  model.initial_score = std::log(prior / (1.0 - prior));

  std::vector<std::vector<std::size_t>> sorted(n_features, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < n_features; ++f) {
    auto& idx = sorted[f];
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rows[a][f] < rows[b][f]; });
  }

  std::vector<double> score(n, model.initial_score);
  std::vector<double> residual(n);
  std::vector<double> hessian(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto sample_size = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.subsample * static_cast<double>(n))));
  std::mt19937_64 rng(cfg.seed);
  TreeBuilder builder(rows, sorted, residual, hessian, cfg);

  model.trees.reserve(static_cast<std::size_t>(cfg.n_trees));
  for (int round = 0; round < cfg.n_trees; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(score[i]);
      residual[i] = static_cast<double>(labels[i]) - p;
      hessian[i] = p * (1.0 - p);
    }
    std::vector<std::size_t> sample;
    if (sample_size < n) {
      std::vector<std::size_t> pool = all;
      for (std::size_t k = 0; k < sample_size; ++k) {
        const auto j = k + detail::bounded(rng, n - k);
        std::swap(pool[k], pool[j]);
      }
      sample.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sample_size));
      std::sort(sample.begin(), sample.end());
    } else {
      sample = all;
    }

    auto tree = builder.build(sample);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      score[i] += cfg.learning_rate * tree.predict(rows[i]);
      loss += logistic_loss(static_cast<double>(labels[i]), score[i]);
    }
    model.trees.push_back(std::move(tree));
    if (observer.on_round) observer.on_round(round, loss / static_cast<double>(n));
  }
  return model;
}

double mean_log_loss(const GbmModel& model, std::span<const std::vector<double>> rows, std::span<const int> labels) {
  if (rows.empty()) throw Error(Errc::EmptyInput, "no rows");
  if (rows.size() != labels.size()) throw Error(Errc::DimensionMismatch, "rows and labels differ in length");
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) loss += logistic_loss(labels[i], model.raw_score(rows[i]));
  return loss / static_cast<double>(rows.size());
}

double predict_confidence(const GbmModel& model, std::span<const double> row) {
  if (row.size() != model.n_features) {
    throw Error(Errc::DimensionMismatch, "row has " + std::to_string(row.size()) + " features, model expects " +
                                             std::to_string(model.n_features));
  }
  return sigmoid(model.raw_score(row));
}

Verdict verdict_for(double confidence, double threshold) {
  return confidence >= threshold ? Verdict::Phish : Verdict::Legitimate;
}

Verdict classify(const GbmModel& model, std::span<const double> row) {
  return verdict_for(predict_confidence(model, row), model.threshold);
}

std::string model_to_json(const GbmModel& model) {
  json trees = json::array();
  for (const auto& tree : model.trees) {
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"leaf_value", n.leaf_value}});
    }
    trees.push_back(std::move(nodes));
  }
  const auto& c = model.config;
  json doc = {
      {"format", kFormatTag},
      {"version", kModelFormatVersion},
      {"config",
       {{"n_trees", c.n_trees},
        {"max_depth", c.max_depth},
        {"learning_rate", c.learning_rate},
        {"min_leaf", c.min_leaf},
        {"subsample", c.subsample},
        {"seed", c.seed}}},
      {"n_features", model.n_features},
      {"feature_names", model.feature_names},
      {"learning_rate", model.learning_rate},
      {"initial_score", model.initial_score},
      {"threshold", model.threshold},
      {"trees", std::move(trees)},
  };
  return doc.dump(1) + "\n";
}

GbmModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Corrupt, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || require<std::string>(doc, "format") != kFormatTag) {
    throw Error(Errc::Corrupt, "not a phishscan model file");
  }
  const auto version = require<int>(doc, "version");
  if (version != kModelFormatVersion) {
    throw Error(Errc::Version, "model version " + std::to_string(version) + " unsupported (expected " +
                                   std::to_string(kModelFormatVersion) + ")");
  }
  GbmModel model;
  const auto config = doc.find("config");
  if (config == doc.end() || !config->is_object()) throw Error(Errc::Corrupt, "model file lacks 'config'");
  model.config.n_trees = require<int>(*config, "n_trees");
  model.config.max_depth = require<int>(*config, "max_depth");
  model.config.learning_rate = require<double>(*config, "learning_rate");
  model.config.min_leaf = require<int>(*config, "min_leaf");
  model.config.subsample = require<double>(*config, "subsample");
  model.config.seed = require<std::uint64_t>(*config, "seed");
  model.n_features = require<std::size_t>(doc, "n_features");
  model.feature_names = require<std::vector<std::string>>(doc, "feature_names");
  model.learning_rate = require<double>(doc, "learning_rate");
  model.initial_score = require<double>(doc, "initial_score");
  model.threshold = require<double>(doc, "threshold");
  if (!(model.threshold >= 0.0 && model.threshold <= 1.0)) throw Error(Errc::Corrupt, "threshold outside [0,1]");
  if (!model.feature_names.empty() && model.feature_names.size() != model.n_features) {
    throw Error(Errc::Corrupt, "feature name manifest does not match n_features");
  }

  const auto trees = doc.find("trees");
  if (trees == doc.end() || !trees->is_array()) throw Error(Errc::Corrupt, "model file lacks 'trees'");
  for (const auto& nodes : *trees) {
    if (!nodes.is_array() || nodes.empty()) throw Error(Errc::Corrupt, "tree must be a non-empty node list");
    RegressionTree tree;
    const auto count = static_cast<int>(nodes.size());
    for (const auto& rec : nodes) {
      TreeNode n;
      n.feature = require<int>(rec, "feature");
      n.threshold = require<double>(rec, "threshold");
      n.left = require<int>(rec, "left");
      n.right = require<int>(rec, "right");
      n.leaf_value = require<double>(rec, "leaf_value");
      tree.nodes.push_back(n);
    }
    // Children must point forward, which also rules out cycles.
    for (int i = 0; i < count; ++i) {
      const auto& n = tree.nodes[static_cast<std::size_t>(i)];
      if (n.is_leaf()) continue;
      if (static_cast<std::size_t>(n.feature) >= model.n_features || n.left <= i || n.right <= i || n.left >= count ||
          n.right >= count) {
        throw Error(Errc::Corrupt, "tree node " + std::to_string(i) + " is inconsistent");
      }
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

void save_model(const GbmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write model " + path.string());
  out << model_to_json(model);
  if (!out) throw Error(Errc::Io, "failed writing model " + path.string());
}

GbmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace phishscan
