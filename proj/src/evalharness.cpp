#include "phishscan/evalharness.hpp"

#include <algorithm>
#include <random>

#include "phishscan/errors.hpp"
#include "phishscan/features.hpp"
#include "random_util.hpp"

namespace phishscan {
namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

void require_both_classes(std::span<const Scored> scored) {
  if (scored.empty()) throw Error(Errc::EmptyInput, "no scored examples");
  const auto positives = std::count_if(scored.begin(), scored.end(), [](const Scored& s) { return s.phish; });
  if (positives == 0 || static_cast<std::size_t>(positives) == scored.size()) {
    throw Error(Errc::SingleClass, "ROC analysis needs both classes");
  }
}

std::vector<Scored> sorted_descending(std::span<const Scored> scored) {
  std::vector<Scored> sorted(scored.begin(), scored.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const Scored& a, const Scored& b) { return a.confidence > b.confidence; });
  return sorted;
}

}  // namespace

MetricsReport metrics_at(std::span<const Scored> scored, double threshold) {
  MetricsReport r;
  r.threshold = threshold;
  for (const auto& s : scored) {
    const bool predicted = verdict_for(s.confidence, threshold) == Verdict::Phish;
    if (predicted && s.phish) ++r.tp;
    else if (predicted) ++r.fp;
    else if (s.phish) ++r.fn;
    else ++r.tn;
  }
  const auto tp = static_cast<double>(r.tp);
  const auto fp = static_cast<double>(r.fp);
  const auto tn = static_cast<double>(r.tn);
  const auto fn = static_cast<double>(r.fn);
  r.precision = safe_div(tp, tp + fp);
  r.recall = safe_div(tp, tp + fn);
  r.fpr = safe_div(fp, fp + tn);
  r.f1 = safe_div(2.0 * r.precision * r.recall, r.precision + r.recall);
  r.accuracy = safe_div(tp + tn, tp + fp + tn + fn);
  return r;
}

RocCurve roc_curve(std::span<const Scored> scored) {
  require_both_classes(scored);
  const auto sorted = sorted_descending(scored);
  double positives = 0.0;
  double negatives = 0.0;
  for (const auto& s : sorted) (s.phish ? positives : negatives) += 1.0;

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, sorted.front().confidence + 1.0});
  double tp = 0.0;
  double fp = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double c = sorted[i].confidence;
    while (i < sorted.size() && sorted[i].confidence == c) {
      (sorted[i].phish ? tp : fp) += 1.0;
      ++i;
    }
    const double threshold = i < sorted.size() ? c + (sorted[i].confidence - c) / 2.0 : c - 1.0;
    curve.points.push_back({fp / negatives, tp / positives, threshold});
  }
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    curve.auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return curve;
}

double rank_auc(std::span<const Scored> scored) {
  require_both_classes(scored);
  auto sorted = sorted_descending(scored);
  std::reverse(sorted.begin(), sorted.end());
  double negatives_below = 0.0;
  double wins = 0.0;
  double positives = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double c = sorted[i].confidence;
    double group_pos = 0.0;
    double group_neg = 0.0;
    while (i < sorted.size() && sorted[i].confidence == c) {
      (sorted[i].phish ? group_pos : group_neg) += 1.0;
      ++i;
    }
    wins += group_pos * (negatives_below + 0.5 * group_neg);
    negatives_below += group_neg;
    positives += group_pos;
  }
  return wins / (positives * negatives_below);
}

std::vector<Scored> score_rows(const GbmModel& model, std::span<const LabeledRow> rows) {
  std::vector<Scored> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({predict_confidence(model, r.features), r.phish});
  return out;
}

MetricsReport evaluate(const GbmModel& model, std::span<const LabeledRow> rows, double threshold) {
  if (rows.empty()) throw Error(Errc::EmptyInput, "empty corpus");
  const auto scored = score_rows(model, rows);
  return metrics_at(scored, threshold);
}

RocCurve roc(const GbmModel& model, std::span<const LabeledRow> rows) {
  if (rows.empty()) throw Error(Errc::EmptyInput, "empty corpus");
  return roc_curve(score_rows(model, rows));
}

std::vector<MetricsReport> scalability_sweep(const GbmModel& model, std::span<const std::vector<double>> legit_pool,
                                             std::span<const std::vector<double>> phish_pool,
                                             const SweepOptions& options) {
  if (options.step_legit == 0 && options.step_phish == 0) throw Error(Errc::Config, "sweep step sizes are both zero");
  auto fits = [&](std::size_t pool, std::size_t step) {
    return step == 0 ? std::numeric_limits<std::size_t>::max() : pool / step;
  };
  const auto max_steps = std::min(fits(legit_pool.size(), options.step_legit), fits(phish_pool.size(), options.step_phish));
  const auto steps = options.steps == 0 ? max_steps : options.steps;
  if (steps == 0 || steps > max_steps) {
    throw Error(Errc::PoolExhausted, "pools hold " + std::to_string(legit_pool.size()) + " legit / " +
                                         std::to_string(phish_pool.size()) + " phish rows, too few for the sweep");
  }

  std::mt19937_64 rng(options.seed);
  const auto legit_order = detail::shuffled_indices(legit_pool.size(), rng);
  const auto phish_order = detail::shuffled_indices(phish_pool.size(), rng);

  std::vector<Scored> test_set;
  std::vector<MetricsReport> reports;
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t k = s * options.step_legit; k < (s + 1) * options.step_legit; ++k) {
      test_set.push_back({predict_confidence(model, legit_pool[legit_order[k]]), false});
    }
    for (std::size_t k = s * options.step_phish; k < (s + 1) * options.step_phish; ++k) {
      test_set.push_back({predict_confidence(model, phish_pool[phish_order[k]]), true});
    }
    reports.push_back(metrics_at(test_set, options.threshold));
  }
  return reports;
}

PipelineReport pipeline_eval(const GbmModel& model, std::span<const PipelinePage> pages, const SuffixList& suffixes,
                             SearchClient& client, const IdentifyOptions& options) {
  PipelineReport report;
  report.pages = pages.size();
  for (const auto& page : pages) {
    if (classify(model, page.features) != Verdict::Phish) continue;
    ++report.detector_positives;
    if (!page.phish) ++report.false_positives;
    const auto verdict = identify_target(page.snapshot, suffixes, client, options);
    switch (verdict.status) {
      case TargetStatus::LegitimateConfirmed:
        ++report.legitimate_confirmed;
        if (page.phish) ++report.lost_true_positives;
        else ++report.rescued_false_positives;
        break;
      case TargetStatus::PhishWithTargets: ++report.phish_with_targets; break;
      case TargetStatus::SuspiciousNoTarget: ++report.suspicious; break;
    }
  }
  return report;
}

std::vector<std::size_t> kfold_assignments(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) throw Error(Errc::Config, "k-fold needs 2 <= k <= n");
  std::mt19937_64 rng(seed);
  const auto order = detail::shuffled_indices(n, rng);
  std::vector<std::size_t> fold(n);
  for (std::size_t pos = 0; pos < n; ++pos) fold[order[pos]] = pos % k;
  return fold;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsReport> reports) {
  out << "threshold,size,tp,fp,tn,fn,precision,recall,f1,fpr,accuracy\n";
  for (const auto& r : reports) {
    out << format_double(r.threshold) << ',' << (r.tp + r.fp + r.tn + r.fn) << ',' << r.tp << ',' << r.fp << ','
        << r.tn << ',' << r.fn << ',' << format_double(r.precision) << ',' << format_double(r.recall) << ','
        << format_double(r.f1) << ',' << format_double(r.fpr) << ',' << format_double(r.accuracy) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const RocCurve& curve) {
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

}  // namespace phishscan
