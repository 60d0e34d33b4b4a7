#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace localfrac::extrapolation {

struct AccelResult {
  double value = 0.0;
  double error_estimate = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Richardson/Neville acceleration of q_j sampled at steps h_j = h0 * ratio^-j,
// assuming an error expansion in powers h^{p0}, h^{p0+dp}, h^{p0+2dp}, ...
// Keeps the tableau entry with the smallest error bracket, so roundoff-
// dominated deep columns do not spoil the answer.
inline AccelResult richardson(std::span<const double> q, double ratio, int p0, int dp,
                              double rel_tol) {
  const std::size_t n = q.size();
  if (n == 0) return {};
  if (n == 1) return {q[0], std::numeric_limits<double>::infinity(), false};

  std::vector<double> prev(q.begin(), q.begin() + 1), cur;
  AccelResult best{q[0], std::numeric_limits<double>::infinity(), false};
  for (std::size_t j = 1; j < n; ++j) {
    cur.assign(1, q[j]);
    double factor = std::pow(ratio, p0);
    for (std::size_t m = 1; m <= j; ++m) {
      const double t = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (factor - 1.0);
      cur.push_back(t);
      const double err =
          std::max(std::abs(t - cur[m - 1]), std::abs(t - prev[m - 1]));
      if (err < best.error_estimate) {
        best.value = t;
        best.error_estimate = err;
      }
      factor *= std::pow(ratio, dp);
    }
    prev = cur;
  }
  best.converged =
      best.error_estimate <= rel_tol * std::max(1.0, std::abs(best.value));
  return best;
}

// Iterated Aitken delta-squared acceleration.  Suited to sequences with a
// dominant geometric error mode of unknown ratio (fractional-power limits).
inline AccelResult aitken(std::span<const double> q, double rel_tol) {
  const std::size_t n = q.size();
  if (n == 0) return {};
  if (n < 3) return {q[n - 1], n == 2 ? std::abs(q[1] - q[0])
                                      : std::numeric_limits<double>::infinity(),
                     false};

  std::vector<double> cur(q.begin(), q.end());
  AccelResult best{cur.back(), std::abs(cur[n - 1] - cur[n - 2]), false};
  while (cur.size() >= 3) {
    std::vector<double> next;
    next.reserve(cur.size() - 2);
    for (std::size_t i = 0; i + 2 < cur.size(); ++i) {
      const double d1 = cur[i + 1] - cur[i];
      const double d2 = cur[i + 2] - cur[i + 1];
      const double denom = d2 - d1;
      const double scale = std::max({std::abs(cur[i]), std::abs(cur[i + 1]),
                                     std::abs(cur[i + 2]), 1.0});
      if (std::abs(denom) <= 1e-15 * scale) {
        next.push_back(cur[i + 2]);
      } else {
        next.push_back(cur[i + 2] - d2 * d2 / denom);
      }
    }
    const double err = std::abs(next.back() - cur.back());
    if (err < best.error_estimate) {
      best.value = next.back();
      best.error_estimate = err;
    }
    cur = std::move(next);
  }
  best.converged =
      best.error_estimate <= rel_tol * std::max(1.0, std::abs(best.value));
  return best;
}

// True when the tail of |q| has been strictly growing for at least `run`
// steps and has grown substantially overall.
inline bool diverging_tail(std::span<const double> q, int run = 3, double growth = 4.0) {
  const std::size_t n = q.size();
  if (n < static_cast<std::size_t>(run) + 1) return false;
  for (std::size_t i = n - run; i < n; ++i)
    if (!(std::abs(q[i]) > std::abs(q[i - 1]))) return false;
  return std::abs(q[n - 1]) > growth * std::abs(q[n - 1 - run]);
}

}  // namespace localfrac::extrapolation
