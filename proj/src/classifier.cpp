#include "corelr/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "corelr/error.hpp"

namespace corelr {

namespace {

double log1pexp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double standardize_value(double v, double mean, double scale) { return scale > 0.0 ? (v - mean) / scale : 0.0; }

// Solves A x = b in place for a small dense system (Gaussian elimination
// with partial pivoting). Returns false when singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r * n + c)]) > std::abs(a[static_cast<std::size_t>(piv * n + c)])) piv = r;
    if (std::abs(a[static_cast<std::size_t>(piv * n + c)]) < 1e-300) return false;
    if (piv != c) {
      for (int k = 0; k < n; ++k) std::swap(a[static_cast<std::size_t>(c * n + k)], a[static_cast<std::size_t>(piv * n + k)]);
      std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(piv)]);
    }
    for (int r = c + 1; r < n; ++r) {
      const double f = a[static_cast<std::size_t>(r * n + c)] / a[static_cast<std::size_t>(c * n + c)];
      for (int k = c; k < n; ++k) a[static_cast<std::size_t>(r * n + k)] -= f * a[static_cast<std::size_t>(c * n + k)];
      b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[static_cast<std::size_t>(r)];
    for (int k = r + 1; k < n; ++k) s -= a[static_cast<std::size_t>(r * n + k)] * b[static_cast<std::size_t>(k)];
    b[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r * n + r)];
  }
  return true;
}

// Objective at theta + dtheta minus objective at theta, theta = (w, b).
double objective_change(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        const std::vector<double>& theta, const std::vector<double>& dtheta, double lambda) {
  const std::size_t p = theta.size() - 1;
  double j = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = theta[p], dz = dtheta[p];
    for (std::size_t k = 0; k < p; ++k) {
      z += theta[k] * x[i][k];
      dz += dtheta[k] * x[i][k];
    }
    // softplus(z + dz) - softplus(z) = log1p(sigmoid(z) * expm1(dz))
    const double d = std::abs(dz) < 30.0 ? std::log1p(sigmoid(z) * std::expm1(dz)) : log1pexp(z + dz) - log1pexp(z);
    j += d - y[i] * dz;
  }
  for (std::size_t k = 0; k < p; ++k) j += 0.5 * lambda * dtheta[k] * (2.0 * theta[k] + dtheta[k]);
  return j;
}

}  // namespace

double logistic_objective(std::span<const std::vector<double>> x, std::span<const int> y,
                          std::span<const double> weights, double intercept, double lambda) {
  double j = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = intercept;
    for (std::size_t k = 0; k < weights.size(); ++k) z += weights[k] * x[i][k];
    j += log1pexp(z) - y[i] * z;
  }
  double w2 = 0.0;
  for (double w : weights) w2 += w * w;
  return j + 0.5 * lambda * w2;
}

LogisticModel fit(const Dataset& d, const FeatureSet& features, const FitOptions& options) {
  if (d.records.empty()) throw Error(ErrorKind::EmptyDataset, "cannot fit on an empty dataset");
  if (features.empty()) throw Error(ErrorKind::InvalidArgument, "no active features");
  const std::size_t n = d.records.size();
  const std::size_t p = features.size();

  LogisticModel m;
  m.features = features;
  m.lambda = options.lambda;
  m.means.assign(p, 0.0);
  m.scales.assign(p, 1.0);
  for (const auto& r : d.records) {
    for (Feature f : features) {
      if (!std::isfinite(r.feature(f))) {
        throw Error(ErrorKind::NonFiniteFeature, "case " + r.case_id + " has non-finite " + std::string(feature_name(f)));
      }
    }
  }
  if (options.standardize) {
    for (std::size_t k = 0; k < p; ++k) {
      double mean = 0.0;
      for (const auto& r : d.records) mean += r.feature(features[k]);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (const auto& r : d.records) {
        const double dv = r.feature(features[k]) - mean;
        var += dv * dv;
      }
      m.means[k] = mean;
      m.scales[k] = std::sqrt(var / static_cast<double>(n));
    }
  }

  std::vector<std::vector<double>> x(n, std::vector<double>(p));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      x[i][k] = standardize_value(d.records[i].feature(features[k]), m.means[k], m.scales[k]);
    }
    y[i] = d.records[i].label;
  }

  const int dim = static_cast<int>(p) + 1;  // weights then intercept
  std::vector<double> theta(static_cast<std::size_t>(dim), 0.0);
  double current = logistic_objective(x, y, std::span<const double>(theta.data(), p), 0.0, options.lambda);
  m.objective_trace.push_back(current);

  std::vector<double> grad(static_cast<std::size_t>(dim)), hess(static_cast<std::size_t>(dim * dim));
  for (int it = 0; it < options.max_iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double z = theta[p];
      for (std::size_t k = 0; k < p; ++k) z += theta[k] * x[i][k];
      const double pr = sigmoid(z);
      const double r = pr - y[i];
      const double w = pr * (1.0 - pr);
      for (int a = 0; a < dim; ++a) {
        const double xa = static_cast<std::size_t>(a) < p ? x[i][static_cast<std::size_t>(a)] : 1.0;
        grad[static_cast<std::size_t>(a)] += r * xa;
        for (int b = 0; b < dim; ++b) {
          const double xb = static_cast<std::size_t>(b) < p ? x[i][static_cast<std::size_t>(b)] : 1.0;
          hess[static_cast<std::size_t>(a * dim + b)] += w * xa * xb;
        }
      }
    }
    for (std::size_t k = 0; k < p; ++k) {
      grad[k] += options.lambda * theta[k];
      hess[k * static_cast<std::size_t>(dim) + k] += options.lambda;
    }
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    m.gradient_norm = gmax;
    m.iterations = it;
    if (gmax <= options.gradient_tolerance) break;

    std::vector<double> step(grad);
    std::vector<double> h(hess);
    for (int a = 0; a < dim; ++a) h[static_cast<std::size_t>(a * dim + a)] += 1e-12;
    if (!solve_dense(h, step, dim)) step = grad;  // fall back to steepest descent
    double slope = 0.0;
    for (int a = 0; a < dim; ++a) slope += grad[static_cast<std::size_t>(a)] * step[static_cast<std::size_t>(a)];
    if (slope <= 0.0) {
      step = grad;
      slope = 0.0;
      for (double g : grad) slope += g * g;
    }

    // Backtracking (Armijo) along -step keeps the objective nonincreasing. The
    // change is summed termwise so it stays resolvable near the optimum, where
    // it is far below the rounding error of the objective itself.
    std::vector<double> dtheta(theta.size());
    double t = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, t *= 0.5) {
      for (int a = 0; a < dim; ++a) dtheta[static_cast<std::size_t>(a)] = -t * step[static_cast<std::size_t>(a)];
      const double delta = objective_change(x, y, theta, dtheta, options.lambda);
      if (delta <= -1e-4 * t * slope) {
        for (int a = 0; a < dim; ++a) theta[static_cast<std::size_t>(a)] += dtheta[static_cast<std::size_t>(a)];
        current += delta;
        accepted = true;
        break;
      }
    }
    m.iterations = it + 1;
    if (!accepted) break;  // no representable decrease left
    m.objective_trace.push_back(current);
  }

  m.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(p));
  m.intercept = theta[p];
  return m;
}

double predict_proba(const LogisticModel& m, const FeatureSet& keys, std::span<const double> values) {
  if (keys != m.features || values.size() != keys.size()) {
    throw Error(ErrorKind::FeatureKeyMismatch, "features " + feature_set_name(keys) + " do not match model " +
                                                   feature_set_name(m.features));
  }
  double z = m.intercept;
  for (std::size_t k = 0; k < keys.size(); ++k) z += m.weights[k] * standardize_value(values[k], m.means[k], m.scales[k]);
  return sigmoid(z);
}

double predict_proba(const LogisticModel& m, const CaseRecord& r) {
  std::vector<double> values;
  for (Feature f : m.features) values.push_back(r.feature(f));
  return predict_proba(m, m.features, values);
}

std::optional<double> auc_score(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int l : labels) pos += l == 1 ? 1 : 0;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Average ranks over ties.
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      if (labels[order[k]] == 1) rank_sum += avg_rank;
    i = j + 1;
  }
  const double u = rank_sum - static_cast<double>(pos) * static_cast<double>(pos + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

ClassificationMetrics classification_metrics(std::span<const double> probabilities, std::span<const int> labels) {
  ClassificationMetrics c;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const int pred = predict_class(probabilities[i]);
    if (pred == 1 && labels[i] == 1) ++c.tp;
    else if (pred == 1) ++c.fp;
    else if (labels[i] == 1) ++c.fn;
    else ++c.tn;
  }
  const double n = static_cast<double>(probabilities.size());
  c.accuracy = n > 0 ? (c.tp + c.tn) / n : 0.0;
  const double denom = 2.0 * c.tp + c.fp + c.fn;
  c.f1 = c.tp > 0 ? 2.0 * c.tp / denom : 0.0;
  return c;
}

EvalReport loo_evaluate(const Dataset& d, const FeatureSet& features, const FitOptions& options) {
  if (d.records.size() < 2) throw Error(ErrorKind::SingleRecord, "leave-one-out needs at least 2 records");
  const auto n = static_cast<std::ptrdiff_t>(d.records.size());
  EvalReport rep;
  rep.features = features;
  rep.probabilities.assign(d.records.size(), 0.0);
  // Validate up front so worker threads never throw.
  for (const auto& r : d.records)
    for (Feature f : features)
      if (!std::isfinite(r.feature(f))) {
        throw Error(ErrorKind::NonFiniteFeature, "case " + r.case_id + " has non-finite " + std::string(feature_name(f)));
      }
  if (features.empty()) throw Error(ErrorKind::InvalidArgument, "no active features");

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    Dataset train;
    train.records.reserve(d.records.size() - 1);
    for (std::ptrdiff_t j = 0; j < n; ++j)
      if (j != i) train.records.push_back(d.records[static_cast<std::size_t>(j)]);
    const LogisticModel m = fit(train, features, options);
    rep.probabilities[static_cast<std::size_t>(i)] = predict_proba(m, d.records[static_cast<std::size_t>(i)]);
  }

  std::vector<int> labels;
  for (const auto& r : d.records) labels.push_back(r.label);
  const auto c = classification_metrics(rep.probabilities, labels);
  rep.accuracy = c.accuracy;
  rep.f1 = c.f1;
  rep.tp = c.tp;
  rep.fp = c.fp;
  rep.tn = c.tn;
  rep.fn = c.fn;
  rep.auc = auc_score(rep.probabilities, labels);
  return rep;
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  std::size_t pos = 0;
  for (int l : labels) pos += l == 1 ? 1 : 0;
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) return {};
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<RocPoint> out{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double t = scores[order[i]];
    while (i < order.size() && scores[order[i]] == t) {
      if (labels[order[i]] == 1) ++tp;
      else ++fp;
      ++i;
    }
    out.push_back({static_cast<double>(fp) / static_cast<double>(neg), static_cast<double>(tp) / static_cast<double>(pos), t});
  }
  return out;
}

AblationResult ablate(const Dataset& d, const FeatureSet& initial, const FitOptions& options) {
  const FeatureSet start = make_feature_set(initial);
  if (start.size() < 2) throw Error(ErrorKind::InvalidArgument, "ablation needs at least 2 features");
  AblationResult out;
  std::map<FeatureSet, std::size_t> done;
  auto evaluate = [&](const FeatureSet& s) -> const EvalReport& {
    auto it = done.find(s);
    if (it == done.end()) {
      out.grid.push_back(loo_evaluate(d, s, options));
      it = done.emplace(s, out.grid.size() - 1).first;
    }
    return out.grid[it->second];
  };

  FeatureSet current = start;
  evaluate(current);
  out.path.push_back(current);
  while (current.size() > 1) {
    int best = -1;
    double best_auc = 0.0, best_acc = 0.0;
    for (std::size_t k = 0; k < current.size(); ++k) {
      FeatureSet reduced = current;
      reduced.erase(reduced.begin() + static_cast<std::ptrdiff_t>(k));
      const EvalReport& r = evaluate(reduced);
      const double auc = r.auc.value_or(-std::numeric_limits<double>::infinity());
      // Candidates come in canonical order, so >= lets later keys win ties.
      if (best < 0 || auc > best_auc || (auc == best_auc && r.accuracy >= best_acc)) {
        best = static_cast<int>(k);
        best_auc = auc;
        best_acc = r.accuracy;
      }
    }
    out.eliminated.push_back(current[static_cast<std::size_t>(best)]);
    current.erase(current.begin() + best);
    out.path.push_back(current);
  }
  for (Feature f : start) evaluate(FeatureSet{f});
  return out;
}

}  // namespace corelr
