#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corelr/dataset.hpp"

namespace corelr {

struct FitOptions {
  double lambda = 1.0;  // L2 strength on the weights; the intercept is unpenalized
  bool standardize = true;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-8;  // infinity norm
};

struct LogisticModel {
  FeatureSet features;
  std::vector<double> weights;
  double intercept = 0.0;
  // Per-feature z-score parameters from the training data. A zero scale
  // maps the feature to 0.
  std::vector<double> means;
  std::vector<double> scales;
  double lambda = 1.0;
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;  // objective after each accepted iterate, starting at the initial point
};

/// Minimizes sum of cross-entropy + (lambda/2)|w|^2 with damped Newton steps.
LogisticModel fit(const Dataset& d, const FeatureSet& features, const FitOptions& options = {});

/// Objective value at (weights, intercept) on the already standardized design.
double logistic_objective(std::span<const std::vector<double>> x, std::span<const int> y,
                          std::span<const double> weights, double intercept, double lambda);

/// Throws FeatureKeyMismatch when keys differ from the model's features.
double predict_proba(const LogisticModel& m, const FeatureSet& keys, std::span<const double> values);
double predict_proba(const LogisticModel& m, const CaseRecord& r);
inline int predict_class(double p) { return p >= 0.5 ? 1 : 0; }

struct EvalReport {
  FeatureSet features;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;
  std::vector<double> probabilities;  // leave-one-out probability per record, dataset order
  int tp = 0, fp = 0, tn = 0, fn = 0;
};

/// Mann-Whitney statistic with ties scoring 0.5; empty when one class is absent.
std::optional<double> auc_score(std::span<const double> scores, std::span<const int> labels);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
  int tp = 0, fp = 0, tn = 0, fn = 0;
};
ClassificationMetrics classification_metrics(std::span<const double> probabilities, std::span<const int> labels);

/// One fit per held-out record; folds run concurrently, results in record order.
EvalReport loo_evaluate(const Dataset& d, const FeatureSet& features, const FitOptions& options = {});

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0, 0) origin
};
/// Empty when one class is absent.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels);

struct AblationResult {
  std::vector<EvalReport> grid;     // every evaluated subset, evaluation order
  std::vector<Feature> eliminated;  // removal order
  std::vector<FeatureSet> path;     // baseline, then the subset after each removal
};

inline constexpr const char* kEliminationRule =
    "drop the feature whose removal maximizes LOO AUC; ties by higher accuracy, then the later feature in "
    "B_HCZ, N_Les, V_Les, V_Liv order";

/// Backward elimination down to one feature, plus every single-feature subset.
AblationResult ablate(const Dataset& d, const FeatureSet& initial, const FitOptions& options = {});

}  // namespace corelr
