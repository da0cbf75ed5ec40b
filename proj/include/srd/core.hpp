#pragma once

// Domain types for finite text sources and one-shot summarizers, plus direct
// evaluation of a summarizer's rate, expected distortion and conditional
// mutual information.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace srd {

/// Tolerance used to validate that probability vectors sum to one.
inline constexpr double kProbabilityTolerance = 1e-12;

/// Thrown when inputs are malformed: mismatched dimensions, invalid pmfs,
/// kernels that violate the length constraint.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A set of texts of the same length together with its conditional pmf.
struct LengthClass {
  int length = 0;
  double weight = 0.0;               // p(l)
  std::vector<std::size_t> texts;    // indices into the source
  std::vector<double> conditional;   // p(t | l), aligned with `texts`
};

/// Finite text source p_T over strings of a declared alphabet. Each character
/// of a text counts as one symbol.
class DiscreteSource {
 public:
  DiscreteSource(std::vector<std::string> texts, std::vector<double> pmf,
                 int alphabet_size);

  const std::vector<std::string>& texts() const { return texts_; }
  const std::vector<int>& lengths() const { return lengths_; }
  const std::vector<double>& pmf() const { return pmf_; }
  int alphabet_size() const { return alphabet_size_; }
  double mean_length() const { return mean_length_; }
  std::size_t size() const { return texts_.size(); }

  /// Length classes with positive probability, ordered by ascending length.
  const std::vector<LengthClass>& length_classes() const { return classes_; }

 private:
  std::vector<std::string> texts_;
  std::vector<int> lengths_;
  std::vector<double> pmf_;
  int alphabet_size_;
  double mean_length_ = 0.0;
  std::vector<LengthClass> classes_;
};

/// Pairwise distortion d(t, s). Rows index texts, columns index summaries.
class DistortionMatrix {
 public:
  DistortionMatrix(Eigen::MatrixXd values, std::vector<std::string> summaries);

  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(std::size_t text, std::size_t summary) const {
    return values_(static_cast<Eigen::Index>(text),
                   static_cast<Eigen::Index>(summary));
  }
  const std::vector<std::string>& summaries() const { return summaries_; }
  const std::vector<int>& summary_lengths() const { return summary_lengths_; }
  std::size_t num_texts() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t num_summaries() const { return static_cast<std::size_t>(values_.cols()); }

  /// True iff every text row has at least one zero entry.
  bool is_normal() const { return normal_; }

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> summaries_;
  std::vector<int> summary_lengths_;
  bool normal_ = false;
};

/// Conditional distribution k(s | t). Rows are validated to sum to one and
/// renormalized once; mass on a summary longer than its text is rejected.
class SummarizerKernel {
 public:
  SummarizerKernel(Eigen::MatrixXd cond, const DiscreteSource& source,
                   const DistortionMatrix& dmat);

  /// Kernel that maps text i to summary choice[i] with probability one.
  static SummarizerKernel deterministic(const std::vector<std::size_t>& choice,
                                        const DiscreteSource& source,
                                        const DistortionMatrix& dmat);

  const Eigen::MatrixXd& cond() const { return cond_; }
  double operator()(std::size_t text, std::size_t summary) const {
    return cond_(static_cast<Eigen::Index>(text),
                 static_cast<Eigen::Index>(summary));
  }

 private:
  Eigen::MatrixXd cond_;
};

/// One point of a rate-distortion curve. `rate` is expressed in units of
/// log base `log_base`; `beta` is the tangent slope when the point came from
/// a parametric sweep.
struct RDPoint {
  std::optional<double> beta;
  double distortion = 0.0;
  double rate = 0.0;
  double log_base = 2.0;
};

struct RDCurve {
  std::vector<RDPoint> points;  // sorted by ascending distortion
  double log_base = 2.0;
  std::size_t unconverged = 0;  // sweep points whose solver hit max_iters
};

/// Piecewise-linear evaluation of a curve sorted by distortion. Beyond the
/// largest swept distortion the last rate is returned; below the smallest
/// one this throws std::out_of_range.
double rate_at(const RDCurve& curve, double distortion);

/// Sum over t of p(t) sum over s of k(s|t) d(t,s).
double expected_distortion(const DiscreteSource& source,
                           const SummarizerKernel& kernel,
                           const DistortionMatrix& dmat);

/// Largest conditional expected summary/text length ratio over the length
/// classes in the source support.
double summarizer_rate(const DiscreteSource& source,
                       const SummarizerKernel& kernel,
                       const DistortionMatrix& dmat);

/// I(T; S | l(T)) in nats.
double conditional_mutual_information(const DiscreteSource& source,
                                      const SummarizerKernel& kernel);

/// Summaries with length at most `length`, in index order.
std::vector<std::size_t> admissible_summaries(const DistortionMatrix& dmat,
                                              int length);

struct DMaxResult {
  double d_max = 0.0;
  std::map<int, std::size_t> best_summary;   // length -> s_l*
  std::map<int, double> per_class;           // length -> D_max,l
};

/// Per length class, the single admissible summary with the lowest expected
/// distortion (lowest index wins ties), and the resulting weighted distortion.
DMaxResult d_max(const DiscreteSource& source, const DistortionMatrix& dmat);

struct ConverseEstimate {
  double distortion = 0.0;
  double rate = 0.0;
  double distortion_stderr = 0.0;
  double rate_stderr = 0.0;
};

/// Draws `trials` blocks of `block_length` i.i.d. texts, summarizes each text
/// independently and returns the sample means of the block distortion and the
/// block length ratio. Deterministic given `seed`.
ConverseEstimate simulate_block_converse(const DiscreteSource& source,
                                         const SummarizerKernel& kernel,
                                         const DistortionMatrix& dmat,
                                         std::size_t block_length,
                                         std::size_t trials,
                                         std::uint64_t seed);

}  // namespace srd
