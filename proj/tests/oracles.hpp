#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

// I(T;S|L) in nats by direct double summation, grouping texts by length.
inline double conditional_mi(const std::vector<double>& pmf, const std::vector<int>& lengths,
                             const Matrix& kernel) {
  std::map<int, double> weight;
  for (std::size_t t = 0; t < pmf.size(); ++t) weight[lengths[t]] += pmf[t];
  double total = 0.0;
  for (const auto& [len, w] : weight) {
    if (w <= 0.0) continue;
    const std::size_t ns = kernel[0].size();
    std::vector<double> r(ns, 0.0);
    for (std::size_t t = 0; t < pmf.size(); ++t)
      if (lengths[t] == len)
        for (std::size_t s = 0; s < ns; ++s) r[s] += pmf[t] / w * kernel[t][s];
    for (std::size_t t = 0; t < pmf.size(); ++t) {
      if (lengths[t] != len) continue;
      for (std::size_t s = 0; s < ns; ++s) {
        const double q = kernel[t][s];
        if (q > 0.0) total += pmf[t] * q * std::log(q / r[s]);
      }
    }
  }
  return total;
}

// D_max by scanning every admissible summary in every length class.
inline double d_max(const std::vector<double>& pmf, const std::vector<int>& lengths,
                    const std::vector<int>& summary_lengths, const Matrix& dist) {
  std::map<int, double> weight;
  for (std::size_t t = 0; t < pmf.size(); ++t) weight[lengths[t]] += pmf[t];
  double total = 0.0;
  for (const auto& [len, w] : weight) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < summary_lengths.size(); ++s) {
      if (summary_lengths[s] > len) continue;
      double e = 0.0;
      for (std::size_t t = 0; t < pmf.size(); ++t)
        if (lengths[t] == len) e += pmf[t] * dist[t][s];
      best = std::min(best, e);
    }
    total += best;  // sum_l p(l) * E[d | l] = sum over t in class of p(t) d
  }
  return total;
}

// Rate of a single Gaussian bin at total distortion `target`, minimized by
// brute force over per-component allocations on a grid of spacing `step`.
// Handles up to three components.
inline double waterfill_grid(const std::vector<double>& lambda, double target,
                             double mean_length, double base, double step) {
  const std::size_t m = lambda.size();
  auto rate_of = [&](const std::vector<double>& alloc) {
    double r = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (alloc[i] <= 0.0) return std::numeric_limits<double>::infinity();
      if (alloc[i] < lambda[i]) r += 0.5 * std::log(lambda[i] / alloc[i]);
    }
    return r / (mean_length * std::log(base));
  };
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> alloc(m);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double left) {
    if (i + 1 == m) {
      if (left > lambda[i] + 1e-12 || left <= 0.0) return;
      alloc[i] = left;
      best = std::min(best, rate_of(alloc));
      return;
    }
    for (double a = step; a <= std::min(lambda[i], left) + 1e-12; a += step) {
      alloc[i] = a;
      rec(i + 1, left - a);
    }
  };
  rec(0, target);
  return best;
}

// Reverse water-filling by scanning the sorted breakpoints: on each segment
// between consecutive distinct eigenvalues D(c) is linear, so the level is
// found exactly.
struct WeightedBin {
  double weight;
  std::vector<double> eigenvalues;
};

inline double waterfill_breakpoints(const std::vector<WeightedBin>& bins, double target,
                                    double mean_length, double base) {
  std::vector<double> points{0.0};
  for (const auto& b : bins)
    for (double v : b.eigenvalues)
      if (v > 0.0) points.push_back(v);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto dist_at = [&](double c) {
    double d = 0.0;
    for (const auto& b : bins)
      for (double v : b.eigenvalues) d += b.weight * std::min(c, v);
    return d;
  };
  double level = points.back();
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double lo = points[k], hi = points[k + 1];
    const double dlo = dist_at(lo), dhi = dist_at(hi);
    if (target <= dhi) {
      level = lo + (target - dlo) / (dhi - dlo) * (hi - lo);
      break;
    }
  }
  double r = 0.0;
  for (const auto& b : bins)
    for (double v : b.eigenvalues)
      if (v > level) r += b.weight * 0.5 * std::log(v / level);
  return r / (mean_length * std::log(base));
}

}  // namespace oracle
