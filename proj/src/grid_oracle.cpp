#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "srd/blahut.hpp"

namespace srd {

namespace {

// All vectors of `parts` nonnegative integers summing to `total`.
void compositions(int total, std::size_t parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = total; k >= 0; --k) {
    cur.push_back(k);
    compositions(total - k, parts, cur, out);
    cur.pop_back();
  }
}

double binomial(double n, double k) {
  return std::exp(std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1));
}

struct RowOption {
  std::vector<double> q;   // over class admissible summaries
  double expected = 0.0;   // sum_s q d(t,s)
  double neg_entropy = 0.0;  // sum_s q log q
};

}  // namespace

GridOracleCurve grid_oracle_curve(const DiscreteSource& source,
                                  const DistortionMatrix& dmat,
                                  double resolution, double max_points) {
  if (!(resolution > 0.0) || resolution > 1.0)
    throw StructuralError("resolution must lie in (0, 1]");
  const int steps = static_cast<int>(std::lround(1.0 / resolution));
  if (std::abs(steps * resolution - 1.0) > 1e-9)
    throw StructuralError("resolution must divide 1 evenly");

  const auto problems = class_problems(source, dmat);

  double count = 1.0;
  for (const auto& p : problems)
    count *= std::pow(binomial(steps + p.summaries.size() - 1.0, p.summaries.size() - 1.0),
                      static_cast<double>(p.texts.size()));
  if (count > max_points) {
    std::ostringstream os;
    os << "grid oracle would enumerate " << count << " kernels (limit " << max_points << ")";
    throw StructuralError(os.str());
  }

  // Flatten rows: every text of every class, each with its option list.
  struct Row {
    std::size_t cls;
    double weight;       // p(l) p(t|l)
    double conditional;  // p(t|l)
    std::vector<RowOption> options;
  };
  std::vector<Row> rows;
  for (std::size_t c = 0; c < problems.size(); ++c) {
    const auto& p = problems[c];
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    compositions(steps, p.summaries.size(), cur, comps);
    for (Eigen::Index t = 0; t < p.distortion.rows(); ++t) {
      Row row{c, p.weight * p.pmf(t), p.pmf(t), {}};
      row.options.reserve(comps.size());
      for (const auto& comp : comps) {
        RowOption opt;
        opt.q.resize(comp.size());
        for (std::size_t s = 0; s < comp.size(); ++s) {
          const double v = comp[s] * resolution;
          opt.q[s] = v;
          opt.expected += v * p.distortion(t, static_cast<Eigen::Index>(s));
          if (v > 0.0) opt.neg_entropy += v * std::log(v);
        }
        row.options.push_back(std::move(opt));
      }
      rows.push_back(std::move(row));
    }
  }

  const double base = static_cast<double>(source.alphabet_size());
  const double rate_scale = 1.0 / (source.mean_length() * std::log(base));

  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> pick(rows.size(), 0);
  std::vector<std::vector<double>> marginal(problems.size());
  for (std::size_t c = 0; c < problems.size(); ++c)
    marginal[c].resize(problems[c].summaries.size());

  while (true) {
    double distortion = 0.0;
    double info = 0.0;
    for (auto& m : marginal) std::fill(m.begin(), m.end(), 0.0);
    std::vector<double> cond_neg_entropy(problems.size(), 0.0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& opt = rows[r].options[pick[r]];
      distortion += rows[r].weight * opt.expected;
      cond_neg_entropy[rows[r].cls] += rows[r].conditional * opt.neg_entropy;
      for (std::size_t s = 0; s < opt.q.size(); ++s)
        marginal[rows[r].cls][s] += rows[r].conditional * opt.q[s];
    }
    for (std::size_t c = 0; c < problems.size(); ++c) {
      double h = 0.0;  // H(S | L = l)
      for (double m : marginal[c])
        if (m > 0.0) h -= m * std::log(m);
      info += problems[c].weight * std::max(0.0, h + cond_neg_entropy[c]);
    }
    pairs.emplace_back(distortion, info * rate_scale);

    std::size_t r = 0;
    while (r < rows.size() && ++pick[r] == rows[r].options.size()) pick[r++] = 0;
    if (r == rows.size()) break;
  }

  std::sort(pairs.begin(), pairs.end());
  GridOracleCurve out;
  out.enumerated = pairs.size();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [d, rate] : pairs) {
    if (rate < best) {
      best = rate;
      out.distortion.push_back(d);
      out.rate.push_back(rate);
    }
  }
  return out;
}

double grid_oracle_rd(const GridOracleCurve& oracle, double target_distortion) {
  auto it = std::upper_bound(oracle.distortion.begin(), oracle.distortion.end(),
                             target_distortion + 1e-12);
  if (it == oracle.distortion.begin()) return std::numeric_limits<double>::infinity();
  return oracle.rate[static_cast<std::size_t>(std::prev(it) - oracle.distortion.begin())];
}

double grid_oracle_rd(const DiscreteSource& source, const DistortionMatrix& dmat,
                      double target_distortion, double resolution) {
  return grid_oracle_rd(grid_oracle_curve(source, dmat, resolution), target_distortion);
}

}  // namespace srd
