#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wqpt {

// Thrown when an iterative procedure (eigensolve, truncation growth, grid
// refinement) runs out of budget. Carries the best figure of merit reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best = 0.0)
      : std::runtime_error(what), best_achieved(best) {}
  double best_achieved;
};

// Pairwise (cascade) summation over a fixed-order range. The split points
// depend only on the length, so the result is bit-reproducible.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(xs.first(h)) + pairwise_sum(xs.subspan(h));
}

// Streaming accumulator: terms are buffered in arrival order, each full chunk
// is reduced pairwise, and chunk totals are reduced pairwise at the end.
// Feeding the same terms in the same order always yields the same bits.
class ChunkedSum {
 public:
  static constexpr std::size_t kChunk = 4096;

  void add(double term) {
    buf_.push_back(term);
    if (buf_.size() == kChunk) flush();
  }

  double total() const {
    std::vector<double> parts = chunk_totals_;
    if (!buf_.empty()) parts.push_back(pairwise_sum(buf_));
    return pairwise_sum(parts);
  }

 private:
  void flush() {
    chunk_totals_.push_back(pairwise_sum(buf_));
    buf_.clear();
  }
  std::vector<double> buf_;
  std::vector<double> chunk_totals_;
};

// ln(n!) via a cached lgamma table. All binomial/multinomial square roots in
// the coherent-state code go through this; no raw factorials anywhere.
inline double log_factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(4096);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = std::lgamma(double(k) + 1.0);
    return t;
  }();
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (std::size_t(n) < table.size()) return table[std::size_t(n)];
  return std::lgamma(double(n) + 1.0);
}

inline double log_binomial(int n, int k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Real roots of x^3 + p x + q = 0, ascending. Trigonometric form for the
// three-real-root case, Cardano otherwise.
inline std::vector<double> solve_depressed_cubic(double p, double q) {
  std::vector<double> roots;
  if (p == 0.0 && q == 0.0) {
    roots.push_back(0.0);
    return roots;
  }
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    // three distinct real roots (requires p < 0)
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = 3.0 * q / (p * m);
    const double acos_arg = std::clamp(arg, -1.0, 1.0);
    const double t = std::acos(acos_arg) / 3.0;
    constexpr double two_pi_3 = 2.0943951023931953;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(t - two_pi_3 * k));
  } else {
    const double half_q = 0.5 * q;
    const double r = std::sqrt(half_q * half_q + p * p * p / 27.0);
    const double a = std::cbrt(-half_q + r);
    const double b = std::cbrt(-half_q - r);
    roots.push_back(a + b);
    if (disc == 0.0 && p != 0.0) roots.push_back(-0.5 * (a + b));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

inline std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("linspace: n < 1");
  std::vector<double> xs(static_cast<std::size_t>(n), 0.0);
  if (n == 1) {
    xs[0] = a;
    return xs;
  }
  const double h = (b - a) / double(n - 1);
  for (int i = 0; i < n; ++i) xs[std::size_t(i)] = a + h * double(i);
  xs.back() = b;
  return xs;
}

}  // namespace wqpt
