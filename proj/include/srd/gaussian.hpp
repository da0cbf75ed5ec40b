#pragma once

// Summarizer rate-distortion for Gaussian embedding sources under squared
// Euclidean distortion: reverse water-filling over the eigenvalues of every
// length bin with one global water level.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "srd/core.hpp"

namespace srd {

class NotPositiveSemidefinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Eigenvalues of a symmetric matrix, sorted nonincreasing. Small negative
/// eigenvalues (>= -1e-8 * trace) are clipped to zero.
std::vector<double> eig_spectrum(const Eigen::MatrixXd& covariance);

struct SpectrumBin {
  double weight = 0.0;
  std::vector<double> eigenvalues;
};

/// Per-bin weights and covariance eigenvalues. On construction eigenvalues are
/// sorted nonincreasing, negatives are clipped and anything at or below
/// 1e-12 times the largest eigenvalue of the set becomes exactly zero.
class SpectrumSet {
 public:
  SpectrumSet(std::vector<SpectrumBin> bins, double mean_length, double log_base);

  const std::vector<SpectrumBin>& bins() const { return bins_; }
  double mean_length() const { return mean_length_; }
  double log_base() const { return log_base_; }
  std::size_t dimension() const { return bins_.front().eigenvalues.size(); }
  double max_eigenvalue() const { return max_eigenvalue_; }

  /// sum_l p(l) sum_i lambda_{l,i}; the distortion at zero rate.
  double total_mass() const { return total_mass_; }

 private:
  std::vector<SpectrumBin> bins_;
  double mean_length_;
  double log_base_;
  double max_eigenvalue_ = 0.0;
  double total_mass_ = 0.0;
};

struct LevelResult {
  double distortion = 0.0;
  double rate = 0.0;
};

/// D(c) = sum_l p(l) sum_i min(c, lambda), and R(c) in base log_base.
LevelResult water_fill_at_level(const SpectrumSet& spectra, double level);

struct WaterFillSolution {
  double level = 0.0;
  std::vector<std::vector<double>> allocations;  // D_{l,i} = min(c, lambda_{l,i})
  double distortion = 0.0;
  double rate = 0.0;
  bool saturated = false;  // target at or above the eigenvalue mass
};

/// Bisection on the water level until |D(c) - target| <= 1e-9 max(1, target).
/// Throws std::domain_error for target <= 0, where the rate diverges.
WaterFillSolution solve_for_distortion(const SpectrumSet& spectra,
                                       double target_distortion);

/// One point per grid value, sorted by distortion; beta is left empty.
RDCurve gaussian_curve(const SpectrumSet& spectra,
                       const std::vector<double>& distortion_grid);

/// `points` log-spaced distortions from `lo_fraction` of the eigenvalue mass
/// up to the full mass.
std::vector<double> default_distortion_grid(const SpectrumSet& spectra,
                                            std::size_t points = 50,
                                            double lo_fraction = 1e-3);

}  // namespace srd
