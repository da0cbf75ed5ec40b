#include "srd/blahut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace srd {

std::vector<double> default_beta_grid(std::size_t points, double lo, double hi) {
  if (points == 0 || !(lo > 0.0) || !(hi >= lo))
    throw StructuralError("beta grid needs points > 0 and 0 < lo <= hi");
  std::vector<double> grid(points);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = -std::pow(10.0, a + f * (b - a));
  }
  return grid;
}

void BAOptions::validate() const {
  if (!(tol > 0.0)) throw StructuralError("tol must be positive");
  if (max_iters <= 0) throw StructuralError("max_iters must be positive");
  for (double b : beta_grid)
    if (!(b < 0.0)) throw StructuralError("every beta must be strictly negative");
}

std::vector<ClassProblem> class_problems(const DiscreteSource& source,
                                         const DistortionMatrix& dmat) {
  if (dmat.num_texts() != source.size())
    throw StructuralError("distortion rows must match the source");
  std::vector<ClassProblem> out;
  for (const auto& cls : source.length_classes()) {
    ClassProblem p;
    p.length = cls.length;
    p.weight = cls.weight;
    p.texts = cls.texts;
    p.summaries = admissible_summaries(dmat, cls.length);
    if (p.summaries.empty())
      throw StructuralError("no summary is short enough for length class " +
                            std::to_string(cls.length));
    const auto nt = static_cast<Eigen::Index>(p.texts.size());
    const auto ns = static_cast<Eigen::Index>(p.summaries.size());
    p.pmf = Eigen::Map<const Eigen::VectorXd>(cls.conditional.data(), nt);
    p.distortion.resize(nt, ns);
    for (Eigen::Index i = 0; i < nt; ++i)
      for (Eigen::Index j = 0; j < ns; ++j)
        p.distortion(i, j) = dmat(p.texts[static_cast<std::size_t>(i)],
                                  p.summaries[static_cast<std::size_t>(j)]);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

// q(s|t) proportional to r(s) exp(slope * d(t,s)). Row minima of d are
// subtracted before exponentiating so large |slope| cannot underflow a row.
Eigen::MatrixXd update_kernel(const Eigen::VectorXd& marginal,
                              const Eigen::MatrixXd& dist, double slope) {
  Eigen::MatrixXd q(dist.rows(), dist.cols());
  for (Eigen::Index t = 0; t < dist.rows(); ++t) {
    // Offset by the smallest distortion among summaries still in the support.
    double offset = std::numeric_limits<double>::infinity();
    for (Eigen::Index s = 0; s < dist.cols(); ++s)
      if (marginal(s) > 0.0) offset = std::min(offset, dist(t, s));
    double z = 0.0;
    for (Eigen::Index s = 0; s < dist.cols(); ++s) {
      q(t, s) = marginal(s) > 0.0 ? marginal(s) * std::exp(slope * (dist(t, s) - offset)) : 0.0;
      z += q(t, s);
    }
    q.row(t) /= z;
  }
  return q;
}

struct Evaluation {
  double info = 0.0;
  double distortion = 0.0;
};

Evaluation evaluate(const Eigen::VectorXd& pmf, const Eigen::MatrixXd& dist,
                    const Eigen::MatrixXd& q) {
  const Eigen::VectorXd marginal = q.transpose() * pmf;
  Evaluation e;
  for (Eigen::Index t = 0; t < q.rows(); ++t) {
    for (Eigen::Index s = 0; s < q.cols(); ++s) {
      const double v = q(t, s);
      if (v <= 0.0) continue;
      e.info += pmf(t) * v * std::log(v / marginal(s));
      e.distortion += pmf(t) * v * dist(t, s);
    }
  }
  e.info = std::max(0.0, e.info);
  return e;
}

// Summaries that some other summary matches or beats on every text of
// positive probability. Moving their mass onto the dominating summary cannot
// raise the information and does not raise the distortion, so an optimum
// exists without them; keeping them only adds flat directions that BA
// crawls along. Exact duplicates keep their lowest index.
std::vector<Eigen::Index> undominated(const Eigen::VectorXd& pmf, const Eigen::MatrixXd& dist) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index s = 0; s < dist.cols(); ++s) {
    bool dominated = false;
    for (Eigen::Index o = 0; o < dist.cols() && !dominated; ++o) {
      if (o == s) continue;
      bool all_le = true, any_lt = false;
      for (Eigen::Index t = 0; t < dist.rows(); ++t) {
        if (pmf(t) <= 0.0) continue;
        if (dist(t, o) > dist(t, s)) all_le = false;
        if (dist(t, o) < dist(t, s)) any_lt = true;
      }
      dominated = all_le && (any_lt || o < s);
    }
    if (!dominated) keep.push_back(s);
  }
  return keep;
}

ClassSolution solve_reduced(const Eigen::VectorXd& class_pmf,
                            const Eigen::MatrixXd& class_distortion, double slope,
                            const BAOptions& opts) {
  const Eigen::Index nt = class_distortion.rows();
  const Eigen::Index ns = class_distortion.cols();
  ClassSolution sol;

  // Point-mass check: r = delta(s*) is optimal iff
  // sum_t p(t) exp(slope * (d(t,s) - d(t,s*))) <= 1 for every s.
  {
    const Eigen::VectorXd expected = class_distortion.transpose() * class_pmf;
    Eigen::Index best = 0;
    for (Eigen::Index s = 1; s < ns; ++s)
      if (expected(s) < expected(best)) best = s;
    bool optimal = true;
    for (Eigen::Index s = 0; s < ns && optimal; ++s) {
      double c = 0.0;
      for (Eigen::Index t = 0; t < nt; ++t)
        c += class_pmf(t) * std::exp(slope * (class_distortion(t, s) - class_distortion(t, best)));
      if (c > 1.0 + 1e-15) optimal = false;
    }
    if (optimal) {
      sol.kernel = Eigen::MatrixXd::Zero(nt, ns);
      sol.kernel.col(best).setOnes();
      sol.info = 0.0;
      sol.distortion = expected(best);
      sol.converged = true;
      if (opts.record_objective) sol.objective.push_back(-slope * sol.distortion);
      return sol;
    }
  }

  // The iteration runs on the output marginal r: one BA step is
  // r <- r * c(r) with c(s) = sum_t p(t) e(t,s) / sum_s' r(s') e(t,s').
  // Plain steps crawl near the slope where the optimum leaves a point mass,
  // so each cycle extrapolates two steps (SQUAREM) and falls back toward the
  // plain double step whenever the result leaves the simplex or raises
  // phi(r) = -sum_t p(t) log sum_s r(s) e(t,s), which BA never increases.
  Eigen::MatrixXd weights(nt, ns);
  for (Eigen::Index t = 0; t < nt; ++t) {
    const double lo = class_distortion.row(t).minCoeff();
    for (Eigen::Index s = 0; s < ns; ++s)
      weights(t, s) = std::exp(slope * (class_distortion(t, s) - lo));
  }
  auto phi = [&](const Eigen::VectorXd& r) {
    const Eigen::VectorXd z = weights * r;
    double v = 0.0;
    for (Eigen::Index t = 0; t < nt; ++t) v -= class_pmf(t) * std::log(z(t));
    return v;
  };
  auto step = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
    return update_kernel(r, class_distortion, slope).transpose() * class_pmf;
  };

  Eigen::VectorXd marginal = Eigen::VectorXd::Constant(ns, 1.0 / static_cast<double>(ns));
  Eigen::MatrixXd q = update_kernel(marginal, class_distortion, slope);
  int evals = 0;
  // Each cycle spends two plain steps, any extrapolation trials and one
  // residual step; all count against max_iters.
  while (evals + 3 <= opts.max_iters) {
    const Eigen::VectorXd r1 = step(marginal);
    const Eigen::VectorXd r2 = step(r1);
    evals += 2;
    Eigen::VectorXd r_next = r2;
    const Eigen::VectorXd u = r1 - marginal;
    const Eigen::VectorXd v = r2 - r1 - u;
    if (v.norm() > 0.0) {
      const double phi2 = phi(r2);
      double alpha = std::min(-1.0, -u.norm() / v.norm());
      while (alpha < -1.0) {
        Eigen::VectorXd trial = marginal - 2.0 * alpha * u + alpha * alpha * v;
        if (evals + 2 > opts.max_iters) break;
        if ((trial.array() >= 0.0).all()) {
          trial /= trial.sum();
          trial = step(trial);
          ++evals;
          if (phi(trial) <= phi2) {
            r_next = trial;
            break;
          }
        }
        alpha = 0.5 * (alpha - 1.0);
        if (alpha > -1.01) break;
      }
    }
    marginal = r_next;

    // Blahut's bound: the optimum is no lower than the current value minus
    // max_s log c(s). The kernel change is the fixed-point residual.
    q = update_kernel(marginal, class_distortion, slope);
    const Eigen::MatrixXd next = update_kernel(q.transpose() * class_pmf, class_distortion, slope);
    const Eigen::VectorXd z = weights * marginal;
    double gap = -std::numeric_limits<double>::infinity();
    for (Eigen::Index s = 0; s < ns; ++s) {
      double c = 0.0;
      for (Eigen::Index t = 0; t < nt; ++t) c += class_pmf(t) * weights(t, s) / z(t);
      gap = std::max(gap, std::log(c));
    }
    const double change = (next - q).cwiseAbs().maxCoeff();
    ++evals;
    sol.iterations = evals;

    if (opts.record_objective) {
      const auto e = evaluate(class_pmf, class_distortion, q);
      sol.objective.push_back(e.info - slope * e.distortion);
    }
    if (gap <= opts.tol && change <= opts.tol) {
      sol.converged = true;
      break;
    }
  }

  const auto e = evaluate(class_pmf, class_distortion, q);
  sol.kernel = std::move(q);
  sol.info = e.info;
  sol.distortion = e.distortion;
  return sol;
}

}  // namespace

ClassSolution ba_solve_length_class(const Eigen::VectorXd& class_pmf,
                                    const Eigen::MatrixXd& class_distortion,
                                    double slope, const BAOptions& opts) {
  const Eigen::Index nt = class_distortion.rows();
  const Eigen::Index ns = class_distortion.cols();
  if (class_pmf.size() != nt || nt == 0 || ns == 0)
    throw StructuralError("class pmf and distortion shapes disagree");
  if (std::abs(class_pmf.sum() - 1.0) > kProbabilityTolerance || (class_pmf.array() < 0.0).any())
    throw StructuralError("class pmf must be a probability vector");
  if (!(slope < 0.0)) throw StructuralError("slope must be strictly negative");
  if (!(opts.tol > 0.0) || opts.max_iters <= 0)
    throw StructuralError("invalid solver options");

  const auto keep = undominated(class_pmf, class_distortion);
  if (static_cast<Eigen::Index>(keep.size()) == ns)
    return solve_reduced(class_pmf, class_distortion, slope, opts);

  Eigen::MatrixXd reduced(nt, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) reduced.col(static_cast<Eigen::Index>(j)) = class_distortion.col(keep[j]);
  auto sol = solve_reduced(class_pmf, reduced, slope, opts);
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(nt, ns);
  for (std::size_t j = 0; j < keep.size(); ++j) full.col(keep[j]) = sol.kernel.col(static_cast<Eigen::Index>(j));
  sol.kernel = std::move(full);
  return sol;
}

double ba_fixed_point_residual(const ClassSolution& solution, double slope,
                               const Eigen::VectorXd& class_pmf,
                               const Eigen::MatrixXd& class_distortion) {
  if (solution.kernel.rows() != class_distortion.rows() ||
      solution.kernel.cols() != class_distortion.cols() ||
      class_pmf.size() != class_distortion.rows())
    throw StructuralError("solution does not match the class problem");
  const Eigen::VectorXd marginal = solution.kernel.transpose() * class_pmf;
  const Eigen::MatrixXd next = update_kernel(marginal, class_distortion, slope);
  return (next - solution.kernel).cwiseAbs().maxCoeff();
}

BAResult ba_solve(const DiscreteSource& source, const DistortionMatrix& dmat,
                  double beta, const BAOptions& opts) {
  if (!(beta < 0.0)) throw StructuralError("beta must be strictly negative");
  BAResult result;
  result.beta = beta;
  const double base = static_cast<double>(source.alphabet_size());
  result.slope = beta * source.mean_length() * std::log(base);
  result.problems = class_problems(source, dmat);

  // Ascending length order fixes the summation order.
  double info = 0.0, distortion = 0.0;
  for (const auto& problem : result.problems) {
    auto sol = ba_solve_length_class(problem.pmf, problem.distortion, result.slope, opts);
    info += problem.weight * sol.info;
    distortion += problem.weight * sol.distortion;
    result.converged = result.converged && sol.converged;
    result.classes.push_back(std::move(sol));
  }
  result.point.beta = beta;
  result.point.distortion = distortion;
  result.point.rate = info / (source.mean_length() * std::log(base));
  result.point.log_base = base;
  return result;
}

RDCurve ba_curve(const DiscreteSource& source, const DistortionMatrix& dmat,
                 const BAOptions& opts) {
  opts.validate();
  if (opts.beta_grid.empty()) throw StructuralError("beta grid is empty");
  RDCurve curve;
  curve.log_base = static_cast<double>(source.alphabet_size());
  for (double beta : opts.beta_grid) {
    auto res = ba_solve(source, dmat, beta, opts);
    if (!res.converged) ++curve.unconverged;
    curve.points.push_back(res.point);
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const RDPoint& a, const RDPoint& b) {
                     if (a.distortion != b.distortion) return a.distortion < b.distortion;
                     return a.rate > b.rate;
                   });
  return curve;
}

}  // namespace srd
