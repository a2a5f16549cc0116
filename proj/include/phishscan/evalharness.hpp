#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "phishscan/gbm.hpp"
#include "phishscan/snapshot.hpp"
#include "phishscan/target_id.hpp"

namespace phishscan {

// One scored example: phish confidence and ground truth.
struct Scored {
  double confidence = 0.0;
  bool phish = false;
};

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double accuracy = 0.0;
  double threshold = kDefaultThreshold;
};

// Metrics with phish as the positive class. Any metric whose denominator is
// zero is reported as 0.
MetricsReport metrics_at(std::span<const Scored> scored, double threshold);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending fpr, then tpr
  double auc = 0.0;              // trapezoid rule
};

// Threshold sweep over midpoints between consecutive distinct confidences,
// plus one sentinel below the minimum and one above the maximum.
RocCurve roc_curve(std::span<const Scored> scored);

// Probability that a random phish outranks a random legitimate example,
// ties counting one half.
double rank_auc(std::span<const Scored> scored);

struct LabeledRow {
  std::vector<double> features;
  bool phish = false;
};

std::vector<Scored> score_rows(const GbmModel& model, std::span<const LabeledRow> rows);

MetricsReport evaluate(const GbmModel& model, std::span<const LabeledRow> rows, double threshold);
RocCurve roc(const GbmModel& model, std::span<const LabeledRow> rows);

struct SweepOptions {
  std::size_t step_legit = 10000;
  std::size_t step_phish = 100;
  std::size_t steps = 0;  // 0: as many full steps as the pools allow
  std::uint64_t seed = 0;
  double threshold = kDefaultThreshold;
};

// Grows a random test set by step_legit + step_phish examples per step,
// drawn without replacement, and reports metrics for each cumulative set.
std::vector<MetricsReport> scalability_sweep(const GbmModel& model, std::span<const std::vector<double>> legit_pool,
                                             std::span<const std::vector<double>> phish_pool,
                                             const SweepOptions& options);

struct PipelinePage {
  std::string name;
  PageSnapshot snapshot;
  std::vector<double> features;
  bool phish = false;
};

struct PipelineReport {
  std::size_t pages = 0;
  std::size_t detector_positives = 0;
  std::size_t legitimate_confirmed = 0;
  std::size_t phish_with_targets = 0;
  std::size_t suspicious = 0;
  std::size_t rescued_false_positives = 0;  // legit pages the detector flagged, confirmed legitimate
  std::size_t false_positives = 0;
  std::size_t lost_true_positives = 0;  // phish pages the identifier called legitimate
};

// Runs target identification on every page the detector flags as phish.
PipelineReport pipeline_eval(const GbmModel& model, std::span<const PipelinePage> pages, const SuffixList& suffixes,
                             SearchClient& client, const IdentifyOptions& options = {});

// Deterministic k-fold split: fold index per row, shuffled by `seed`.
std::vector<std::size_t> kfold_assignments(std::size_t n, std::size_t k, std::uint64_t seed);

void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> reports);
void write_curve_csv(std::ostream& out, const RocCurve& curve);

}  // namespace phishscan
