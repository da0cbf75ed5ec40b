#pragma once

// Summarizer rate-distortion for finite sources. The Lagrangian separates over
// length classes, so each class is solved with its own Blahut-Arimoto
// iteration and the results are recombined with the class weights p(l).

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "srd/core.hpp"

namespace srd {

/// `points` tangent slopes -10^k for k evenly spaced in [log10(lo), log10(hi)].
std::vector<double> default_beta_grid(std::size_t points = 40, double lo = 1e-4,
                                      double hi = 1e2);

struct BAOptions {
  int max_iters = 5000;
  double tol = 1e-10;
  std::vector<double> beta_grid = default_beta_grid();
  bool record_objective = false;

  /// Throws StructuralError unless tol > 0, max_iters > 0 and all betas < 0.
  void validate() const;
};

/// The slice of a discrete instance that one length class sees: its texts,
/// their conditional pmf, and the admissible summaries (no longer than the
/// class length).
struct ClassProblem {
  int length = 0;
  double weight = 0.0;
  std::vector<std::size_t> texts;
  std::vector<std::size_t> summaries;
  Eigen::VectorXd pmf;
  Eigen::MatrixXd distortion;  // texts x admissible summaries
};

std::vector<ClassProblem> class_problems(const DiscreteSource& source,
                                         const DistortionMatrix& dmat);

struct ClassSolution {
  Eigen::MatrixXd kernel;  // q_l(s|t), texts x admissible summaries
  double info = 0.0;       // I_l in nats
  double distortion = 0.0; // D_l
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective;  // I - slope * D per iteration, if recorded
};

/// Solves min I(T;S) - slope * E[d] for one length class. `slope` is the
/// coefficient applied to distortion inside the exponential, in nats per unit
/// distortion; ba_curve passes beta * mean_length * ln(log_base).
///
/// Starts from the uniform kernel. Stops once the Blahut lower bound on the
/// objective is within `tol` of the current value and no kernel entry moved
/// by more than `tol` in the last update. If the single best summary is
/// already optimal for this slope (a KKT check), that point mass is returned
/// directly.
ClassSolution ba_solve_length_class(const Eigen::VectorXd& class_pmf,
                                    const Eigen::MatrixXd& class_distortion,
                                    double slope, const BAOptions& opts);

/// Largest change of any kernel entry under one more update.
double ba_fixed_point_residual(const ClassSolution& solution, double slope,
                               const Eigen::VectorXd& class_pmf,
                               const Eigen::MatrixXd& class_distortion);

/// All class solutions for one tangent slope, aggregated into a curve point.
struct BAResult {
  double beta = 0.0;
  double slope = 0.0;  // natural-unit exponent coefficient used per class
  std::vector<ClassProblem> problems;
  std::vector<ClassSolution> classes;
  RDPoint point;
  bool converged = true;
};

BAResult ba_solve(const DiscreteSource& source, const DistortionMatrix& dmat,
                  double beta, const BAOptions& opts);

/// One point per beta in opts.beta_grid, sorted by ascending distortion, with
/// rates in base alphabet_size.
RDCurve ba_curve(const DiscreteSource& source, const DistortionMatrix& dmat,
                 const BAOptions& opts);

/// Lower staircase of (distortion, rate) over every kernel on a simplex grid.
struct GridOracleCurve {
  std::vector<double> distortion;  // ascending
  std::vector<double> rate;        // running minimum, base alphabet_size
  std::size_t enumerated = 0;
};

/// Exhaustive enumeration of row-stochastic kernels whose entries are
/// multiples of `resolution`. Refuses (StructuralError) when more than
/// `max_points` kernels would be visited. Test oracle only.
GridOracleCurve grid_oracle_curve(const DiscreteSource& source,
                                  const DistortionMatrix& dmat,
                                  double resolution,
                                  double max_points = 1e7);

/// Smallest grid-kernel rate with expected distortion <= target_distortion,
/// or +inf when no grid kernel qualifies.
double grid_oracle_rd(const GridOracleCurve& oracle, double target_distortion);
double grid_oracle_rd(const DiscreteSource& source, const DistortionMatrix& dmat,
                      double target_distortion, double resolution);

}  // namespace srd
