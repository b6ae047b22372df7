#pragma once

#include <aeroclass/dataset.hpp>
#include <aeroclass/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

namespace aeroclass {

/// Binary confusion matrix with SeriousIncident as the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> pred) {
  if (truth.size() != pred.size())
    throw ValidationError("confusion: length mismatch (" + std::to_string(truth.size()) + " vs " +
                          std::to_string(pred.size()) + ")");
  if (truth.empty()) throw ValidationError("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == Label::SeriousIncident;
    const bool predicted = pred[i] == Label::SeriousIncident;
    if (actual && predicted) ++cm.tp;
    else if (!actual && predicted) ++cm.fp;
    else if (!actual) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ValidationError("accuracy: empty confusion matrix");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

// Zero denominators yield 0 for precision, recall, f1 and mcc.

inline double precision(const ConfusionMatrix& cm) noexcept {
  const auto d = cm.tp + cm.fp;
  return d == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(d);
}

inline double recall(const ConfusionMatrix& cm) noexcept {
  const auto d = cm.tp + cm.fn;
  return d == 0 ? 0.0 : static_cast<double>(cm.tp) / static_cast<double>(d);
}

/// TP / (TP + 0.5 (FP + FN)).
inline double f1(const ConfusionMatrix& cm) noexcept {
  const double d = static_cast<double>(cm.tp) + 0.5 * static_cast<double>(cm.fp + cm.fn);
  return d == 0.0 ? 0.0 : static_cast<double>(cm.tp) / d;
}

/// 2PR / (P + R); agrees with f1() wherever both are defined.
inline double f1_harmonic(const ConfusionMatrix& cm) noexcept {
  const double p = precision(cm);
  const double r = recall(cm);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

inline double mcc(const ConfusionMatrix& cm) noexcept {
  const auto a = cm.tp + cm.fp;
  const auto b = cm.tp + cm.fn;
  const auto c = cm.tn + cm.fp;
  const auto d = cm.tn + cm.fn;
  if (a == 0 || b == 0 || c == 0 || d == 0) return 0.0;
  const double numerator = static_cast<double>(cm.tp) * static_cast<double>(cm.tn) -
                           static_cast<double>(cm.fp) * static_cast<double>(cm.fn);
  // Pairwise roots keep the radicand in range for large counts.
  const double denominator = std::sqrt(static_cast<double>(a) * static_cast<double>(b)) *
                             std::sqrt(static_cast<double>(c) * static_cast<double>(d));
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

struct MetricSample {
  double accuracy = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

inline MetricSample evaluate(const ConfusionMatrix& cm) {
  return {accuracy(cm), f1(cm), mcc(cm)};
}

// ---------------------------------------------------------------------------
// Significance testing

/// Regularized incomplete beta I_x(a, b), evaluated with the modified Lentz
/// continued fraction on whichever side of the mean converges fastest.
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("incomplete beta: a and b must be positive");
  if (x < 0.0 || x > 1.0 || std::isnan(x)) throw ValidationError("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const auto continued_fraction = [](double a, double b, double x) {
    constexpr int kMaxIterations = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
      const double m2 = 2.0 * m;
      double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::fabs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      h *= d * c;
      aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
      d = 1.0 + aa * d;
      if (std::fabs(d) < kTiny) d = kTiny;
      c = 1.0 + aa / c;
      if (std::fabs(c) < kTiny) c = kTiny;
      d = 1.0 / d;
      const double del = d * c;
      h *= del;
      if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
  };

  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * continued_fraction(a, b, x) / a;
  return 1.0 - front * continued_fraction(b, a, 1.0 - x) / b;
}

/// Two-sided p-value of Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
  if (t == 0.0) return 1.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_and_variance(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(xs.size() - 1)};
}

} // namespace detail

/// Unpaired two-sided Welch test of mean(a) against mean(b), with
/// Welch-Satterthwaite degrees of freedom.
inline TTestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("welch_t_test: each sample needs at least 2 values");
  const auto [ma, va] = detail::mean_and_variance(a);
  const auto [mb, vb] = detail::mean_and_variance(b);
  const double sa = va / static_cast<double>(a.size());
  const double sb = vb / static_cast<double>(b.size());
  const double se2 = sa + sb;
  if (!(se2 > 0.0)) throw ValidationError("welch_t_test: zero variance");
  TTestResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 /
         (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

/// Paired two-sided t-test on the differences a[i] - b[i].
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("paired_t_test: samples differ in length");
  if (a.size() < 2) throw ValidationError("paired_t_test: need at least 2 pairs");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const auto [md, vd] = detail::mean_and_variance(diff);
  TTestResult r;
  r.df = static_cast<double>(a.size() - 1);
  if (!(vd > 0.0)) {
    if (md == 0.0) return {0.0, 1.0, r.df};
    throw ValidationError("paired_t_test: zero variance");
  }
  r.t = md / std::sqrt(vd / static_cast<double>(a.size()));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

} // namespace aeroclass
