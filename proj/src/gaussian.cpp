#include "srd/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace srd {

std::vector<double> eig_spectrum(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0)
    throw StructuralError("covariance must be a nonempty square matrix");
  if (!covariance.allFinite()) throw StructuralError("covariance has non-finite entries");

  const double scale = std::max(covariance.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) throw StructuralError("covariance is not symmetric");

  const Eigen::MatrixXd sym = 0.5 * (covariance + covariance.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");

  std::vector<double> values(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(values.begin(), values.end(), std::greater<>());
  const double floor = -1e-8 * std::abs(sym.trace());
  for (double& v : values) {
    if (v < 0.0) {
      if (v < floor) {
        std::ostringstream os;
        os << "covariance is not positive semidefinite (eigenvalue " << v << ")";
        throw NotPositiveSemidefinite(os.str());
      }
      v = 0.0;
    }
  }
  return values;
}

SpectrumSet::SpectrumSet(std::vector<SpectrumBin> bins, double mean_length,
                         double log_base)
    : bins_(std::move(bins)), mean_length_(mean_length), log_base_(log_base) {
  if (bins_.empty()) throw StructuralError("spectrum set has no bins");
  if (!(mean_length_ > 0.0)) throw StructuralError("mean_length must be positive");
  if (!(log_base_ > 1.0)) throw StructuralError("log_base must exceed 1");

  const std::size_t m = bins_.front().eigenvalues.size();
  if (m == 0) throw StructuralError("spectra must have dimension at least 1");
  double weight_sum = 0.0;
  for (auto& bin : bins_) {
    if (bin.eigenvalues.size() != m)
      throw StructuralError("all bins must share one dimension");
    if (!std::isfinite(bin.weight) || bin.weight < 0.0)
      throw StructuralError("bin weights must be nonnegative");
    weight_sum += bin.weight;
    for (double& v : bin.eigenvalues) {
      if (!std::isfinite(v)) throw StructuralError("eigenvalues must be finite");
      v = std::max(v, 0.0);
    }
    std::sort(bin.eigenvalues.begin(), bin.eigenvalues.end(), std::greater<>());
    max_eigenvalue_ = std::max(max_eigenvalue_, bin.eigenvalues.front());
  }
  if (std::abs(weight_sum - 1.0) > kProbabilityTolerance)
    throw StructuralError("bin weights must sum to 1");

  const double cutoff = 1e-12 * max_eigenvalue_;
  for (auto& bin : bins_) {
    bin.weight /= weight_sum;
    for (double& v : bin.eigenvalues)
      if (v <= cutoff) v = 0.0;
    double mass = 0.0;
    for (double v : bin.eigenvalues) mass += v;
    total_mass_ += bin.weight * mass;
  }
}

LevelResult water_fill_at_level(const SpectrumSet& spectra, double level) {
  if (!(level > 0.0)) throw std::domain_error("water level must be positive");
  LevelResult out;
  double nats = 0.0;
  for (const auto& bin : spectra.bins()) {
    double d = 0.0, r = 0.0;
    for (double lambda : bin.eigenvalues) {
      d += std::min(level, lambda);
      if (lambda > level) r += 0.5 * std::log(lambda / level);
    }
    out.distortion += bin.weight * d;
    nats += bin.weight * r;
  }
  out.rate = nats / (spectra.mean_length() * std::log(spectra.log_base()));
  return out;
}

WaterFillSolution solve_for_distortion(const SpectrumSet& spectra,
                                       double target_distortion) {
  if (!(target_distortion > 0.0))
    throw std::domain_error("rate diverges at zero distortion");

  WaterFillSolution sol;
  const double top = spectra.max_eigenvalue();
  if (top <= 0.0 || target_distortion >= spectra.total_mass()) {
    sol.level = top > 0.0 ? top : target_distortion;
    sol.saturated = true;
  } else {
    // D(c) is continuous and strictly increasing on (0, top].
    const double tol = 1e-9 * std::max(1.0, target_distortion);
    double lo = 0.0, hi = top;
    double c = 0.5 * (lo + hi);
    for (int i = 0; i < 2000; ++i) {
      c = 0.5 * (lo + hi);
      const double d = water_fill_at_level(spectra, c).distortion;
      if (std::abs(d - target_distortion) <= tol) break;
      (d < target_distortion ? lo : hi) = c;
      if (hi - lo <= 0.0) break;
    }
    sol.level = c;
  }

  const auto at = water_fill_at_level(spectra, sol.level);
  sol.distortion = at.distortion;
  sol.rate = at.rate;
  sol.allocations.reserve(spectra.bins().size());
  for (const auto& bin : spectra.bins()) {
    std::vector<double> alloc(bin.eigenvalues.size());
    for (std::size_t i = 0; i < alloc.size(); ++i)
      alloc[i] = std::min(sol.level, bin.eigenvalues[i]);
    sol.allocations.push_back(std::move(alloc));
  }
  return sol;
}

RDCurve gaussian_curve(const SpectrumSet& spectra,
                       const std::vector<double>& distortion_grid) {
  RDCurve curve;
  curve.log_base = spectra.log_base();
  curve.points.reserve(distortion_grid.size());
  for (double target : distortion_grid) {
    if (!(target > 0.0) || target > spectra.total_mass() * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "distortion grid value " << target << " outside (0, "
         << spectra.total_mass() << "]";
      throw std::domain_error(os.str());
    }
    WaterFillSolution sol;
    try {
      sol = solve_for_distortion(spectra, target);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "distortion grid value " << target << ": " << e.what();
      throw std::domain_error(os.str());
    }
    RDPoint p;
    p.distortion = sol.distortion;
    p.rate = sol.rate;
    p.log_base = spectra.log_base();
    curve.points.push_back(p);
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const RDPoint& a, const RDPoint& b) { return a.distortion < b.distortion; });
  return curve;
}

std::vector<double> default_distortion_grid(const SpectrumSet& spectra,
                                            std::size_t points, double lo_fraction) {
  if (points == 0 || !(lo_fraction > 0.0) || lo_fraction > 1.0)
    throw StructuralError("distortion grid needs points > 0 and 0 < lo_fraction <= 1");
  const double mass = spectra.total_mass();
  if (!(mass > 0.0)) throw StructuralError("spectrum has zero mass");
  std::vector<double> grid(points);
  const double a = std::log(lo_fraction * mass), b = std::log(mass);
  for (std::size_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = std::exp(a + f * (b - a));
  }
  grid.back() = mass;
  return grid;
}

}  // namespace srd
