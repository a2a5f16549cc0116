#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace phishscan {

inline constexpr int kModelFormatVersion = 1;
inline constexpr double kDefaultThreshold = 0.7;

struct TrainConfig {
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_leaf = 5;
  double subsample = 1.0;
  std::uint64_t seed = 0;

  // Throws Errc::Config on an invalid combination.
  void validate() const;
};

// Flat node record. Leaves have feature == -1; internal nodes send rows with
// x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double leaf_value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> row) const;
};

struct GbmModel {
  TrainConfig config;
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double initial_score = 0.0;
  double threshold = kDefaultThreshold;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;

  // Raw additive score before the logistic link.
  double raw_score(std::span<const double> row) const;
};

enum class Verdict { Legitimate, Phish };

double sigmoid(double x);

// Binomial deviance -[y log p + (1-y) log(1-p)] at raw score `score`.
double logistic_loss(double label, double score);

// Negative gradient of logistic_loss with respect to the raw score.
double pseudo_residual(double label, double score);

struct TrainObserver {
  // Called after every boosting round with the mean training log-loss.
  std::function<void(int round, double loss)> on_round;
};

GbmModel train(std::span<const std::vector<double>> rows, std::span<const int> labels, const TrainConfig& cfg,
               const TrainObserver& observer = {});

double mean_log_loss(const GbmModel& model, std::span<const std::vector<double>> rows, std::span<const int> labels);

// Phish confidence in (0,1); the legitimate confidence is its complement.
double predict_confidence(const GbmModel& model, std::span<const double> row);

// Phish iff confidence >= threshold: [0, t) is legitimate, [t, 1] phish.
Verdict verdict_for(double confidence, double threshold = kDefaultThreshold);

// verdict_for(predict_confidence(model, row), model.threshold).
Verdict classify(const GbmModel& model, std::span<const double> row);

std::string model_to_json(const GbmModel& model);
GbmModel model_from_json(const std::string& text);

void save_model(const GbmModel& model, const std::filesystem::path& path);
GbmModel load_model(const std::filesystem::path& path);

}  // namespace phishscan
