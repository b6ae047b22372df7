#pragma once

#include <aeroclass/boosting.hpp>
#include <aeroclass/rng.hpp>
#include <aeroclass/tree.hpp>

#include <cmath>
#include <numeric>
#include <vector>

namespace aeroclass {

// ---------------------------------------------------------------------------
// Logistic regression

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Mean negative log-likelihood plus (l2 / 2) * |w|^2 over the non-intercept
/// weights. `weights` has dim + 1 entries; the last one is the intercept.
inline LossAndGradient logistic_loss_and_gradient(std::span<const double> weights, const DenseMatrix& x,
                                                  std::span<const double> y, double l2) {
  const std::size_t d = x.cols();
  if (weights.size() != d + 1) throw ValidationError("logistic: weight vector must have dim + 1 entries");
  LossAndGradient out;
  out.gradient.assign(d + 1, 0.0);
  const double intercept = weights[d];
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = x.row(i);
    const double z = std::inner_product(row.begin(), row.end(), weights.begin(), intercept);
    out.loss += softplus(z) - y[i] * z;
    const double r = sigmoid(z) - y[i];
    for (std::size_t j = 0; j < d; ++j) out.gradient[j] += r * row[j];
    out.gradient[d] += r;
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  out.loss *= inv_n;
  double norm2 = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    out.gradient[j] = out.gradient[j] * inv_n + l2 * weights[j];
    norm2 += weights[j] * weights[j];
  }
  out.gradient[d] *= inv_n;
  out.loss += 0.5 * l2 * norm2;
  return out;
}

inline LossAndGradient logistic_loss_and_gradient(std::span<const double> weights, const Dataset& data, double l2) {
  const DenseMatrix x(data);
  const auto y = binary_targets(data);
  return logistic_loss_and_gradient(weights, x, y, l2);
}

struct LogisticParams {
  double l2 = 0.01;
  std::size_t max_iterations = 5000;
  double tolerance = 1e-6;  ///< stop once the gradient's max-norm falls below this
};

/// L2-regularized logistic regression trained by full-batch gradient descent
/// with Armijo backtracking. Each iteration starts its line search from twice
/// the previously accepted step.
class LogisticModel {
public:
  LogisticModel() = default;
  explicit LogisticModel(std::vector<double> weights) : weights_(std::move(weights)) {}

  static LogisticModel fit(const Dataset& train, const LogisticParams& params) {
    if (params.l2 < 0.0) throw ValidationError("logr: l2 must be non-negative");
    const DenseMatrix x(train);
    const auto y = binary_targets(train);
    std::vector<double> w(x.cols() + 1, 0.0), candidate(w.size());
    auto current = logistic_loss_and_gradient(w, x, y, params.l2);
    double step = 1.0;
    for (std::size_t it = 0; it < params.max_iterations; ++it) {
      double gnorm_inf = 0.0, gnorm2 = 0.0;
      for (double g : current.gradient) {
        gnorm_inf = std::max(gnorm_inf, std::fabs(g));
        gnorm2 += g * g;
      }
      if (gnorm_inf < params.tolerance) break;
      step = std::min(step * 2.0, 1e4);
      for (;;) {
        for (std::size_t j = 0; j < w.size(); ++j) candidate[j] = w[j] - step * current.gradient[j];
        auto next = logistic_loss_and_gradient(candidate, x, y, params.l2);
        if (next.loss <= current.loss - 0.5 * step * gnorm2) {
          w.swap(candidate);
          current = std::move(next);
          break;
        }
        step *= 0.5;
        if (step < 1e-20) return LogisticModel(std::move(w));
      }
    }
    return LogisticModel(std::move(w));
  }

  double margin(std::span<const double> x) const noexcept {
    return std::inner_product(x.begin(), x.end(), weights_.begin(), weights_.back());
  }
  double score(std::span<const double> x) const noexcept { return sigmoid(margin(x)); }

  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t n_features() const noexcept { return weights_.empty() ? 0 : weights_.size() - 1; }

private:
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Linear SVM

struct SvmParams {
  double lambda = 1e-3;
  std::size_t epochs = 200;
};

/// Linear soft-margin SVM: Pegasos stochastic subgradient steps with step
/// size 1 / (lambda * t), projection onto the ball of radius 1 / sqrt(lambda),
/// an unregularized bias, and the returned solution is the average of all
/// iterates. Samples are visited in a freshly shuffled order every epoch.
class LinearSvm {
public:
  LinearSvm() = default;
  LinearSvm(std::vector<double> weights, double bias) : weights_(std::move(weights)), bias_(bias) {}

  static LinearSvm fit(const Dataset& train, const SvmParams& params, std::uint64_t seed) {
    if (!(params.lambda > 0.0)) throw ValidationError("svm: lambda must be positive");
    const DenseMatrix x(train);
    const auto targets = binary_targets(train);
    const std::size_t n = x.rows(), d = x.cols();
    std::vector<double> w(d, 0.0), w_sum(d, 0.0);
    double b = 0.0, b_sum = 0.0;
    const double radius = 1.0 / std::sqrt(params.lambda);

    SplitMix64 rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      rng.shuffle(std::span(order));
      for (auto i : order) {
        ++t;
        const double eta = 1.0 / (params.lambda * static_cast<double>(t));
        const double yi = targets[i] > 0.5 ? 1.0 : -1.0;
        const auto row = x.row(i);
        const double m = yi * (std::inner_product(row.begin(), row.end(), w.begin(), 0.0) + b);
        const double shrink = 1.0 - eta * params.lambda;
        for (auto& wj : w) wj *= shrink;
        if (m < 1.0) {
          for (std::size_t j = 0; j < d; ++j) w[j] += eta * yi * row[j];
          b += eta * yi;
        }
        const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        if (norm > radius) {
          const double s = radius / norm;
          for (auto& wj : w) wj *= s;
        }
        for (std::size_t j = 0; j < d; ++j) w_sum[j] += w[j];
        b_sum += b;
      }
    }
    if (t == 0) return LinearSvm(std::move(w), b);
    for (auto& v : w_sum) v /= static_cast<double>(t);
    return LinearSvm(std::move(w_sum), b_sum / static_cast<double>(t));
  }

  double margin(std::span<const double> x) const noexcept {
    return std::inner_product(x.begin(), x.end(), weights_.begin(), bias_);
  }
  /// Logistic squashing of the raw margin (uncalibrated).
  double score(std::span<const double> x) const noexcept { return sigmoid(margin(x)); }

  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  std::size_t n_features() const noexcept { return weights_.size(); }

private:
  std::vector<double> weights_;
  double bias_ = 0.0;
};

/// Mean hinge loss max(0, 1 - y * margin) with y in {-1, +1}.
inline double mean_hinge_loss(const LinearSvm& svm, const Dataset& data) {
  double s = 0.0;
  for (const auto& r : data.records) {
    const double y = r.label == Label::SeriousIncident ? 1.0 : -1.0;
    s += std::max(0.0, 1.0 - y * svm.margin(r.features));
  }
  return s / static_cast<double>(data.size());
}

} // namespace aeroclass
