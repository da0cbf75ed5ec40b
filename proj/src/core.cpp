#include "srd/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace srd {

namespace {

void check_pmf(std::vector<double>& p, const char* what) {
  if (p.empty()) throw StructuralError(std::string(what) + ": empty");
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0)
      throw StructuralError(std::string(what) + ": negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    std::ostringstream os;
    os << what << ": entries sum to " << total << ", not 1";
    throw StructuralError(os.str());
  }
  for (double& v : p) v /= total;
}

// Inverse-CDF draw; `u` in [0, 1).
std::size_t draw(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_shapes(const DiscreteSource& source, const SummarizerKernel& kernel,
                  const DistortionMatrix& dmat) {
  if (kernel.cond().rows() != static_cast<Eigen::Index>(source.size()) ||
      dmat.num_texts() != source.size() ||
      kernel.cond().cols() != static_cast<Eigen::Index>(dmat.num_summaries()))
    throw StructuralError("source, kernel and distortion dimensions disagree");
}

}  // namespace

DiscreteSource::DiscreteSource(std::vector<std::string> texts,
                               std::vector<double> pmf, int alphabet_size)
    : texts_(std::move(texts)), pmf_(std::move(pmf)), alphabet_size_(alphabet_size) {
  if (alphabet_size_ < 2) throw StructuralError("alphabet_size must be at least 2");
  if (texts_.size() != pmf_.size())
    throw StructuralError("texts and pmf have different sizes");
  check_pmf(pmf_, "source pmf");

  lengths_.reserve(texts_.size());
  for (const auto& t : texts_) {
    if (t.empty()) throw StructuralError("texts must have length at least 1");
    lengths_.push_back(static_cast<int>(t.size()));
  }

  std::map<int, LengthClass> by_length;
  for (std::size_t i = 0; i < texts_.size(); ++i) {
    mean_length_ += pmf_[i] * lengths_[i];
    if (pmf_[i] <= 0.0) continue;
    auto& cls = by_length[lengths_[i]];
    cls.length = lengths_[i];
    cls.weight += pmf_[i];
    cls.texts.push_back(i);
    cls.conditional.push_back(pmf_[i]);
  }
  for (auto& [len, cls] : by_length) {
    for (double& p : cls.conditional) p /= cls.weight;
    classes_.push_back(std::move(cls));
  }
}

DistortionMatrix::DistortionMatrix(Eigen::MatrixXd values,
                                   std::vector<std::string> summaries)
    : values_(std::move(values)), summaries_(std::move(summaries)) {
  if (values_.cols() != static_cast<Eigen::Index>(summaries_.size()))
    throw StructuralError("distortion columns must match the summary list");
  if (values_.rows() == 0 || values_.cols() == 0)
    throw StructuralError("distortion matrix is empty");
  if (!values_.allFinite() || (values_.array() < 0.0).any())
    throw StructuralError("distortion entries must be finite and nonnegative");
  for (const auto& s : summaries_) {
    if (s.empty()) throw StructuralError("summaries must have length at least 1");
    summary_lengths_.push_back(static_cast<int>(s.size()));
  }
  normal_ = true;
  for (Eigen::Index t = 0; t < values_.rows(); ++t)
    if (!(values_.row(t).array() == 0.0).any()) normal_ = false;
}

SummarizerKernel::SummarizerKernel(Eigen::MatrixXd cond,
                                   const DiscreteSource& source,
                                   const DistortionMatrix& dmat)
    : cond_(std::move(cond)) {
  if (cond_.rows() != static_cast<Eigen::Index>(source.size()) ||
      cond_.cols() != static_cast<Eigen::Index>(dmat.num_summaries()) ||
      dmat.num_texts() != source.size())
    throw StructuralError("kernel shape must be texts x summaries");
  for (Eigen::Index t = 0; t < cond_.rows(); ++t) {
    std::vector<double> row(static_cast<std::size_t>(cond_.cols()));
    for (Eigen::Index s = 0; s < cond_.cols(); ++s) row[static_cast<std::size_t>(s)] = cond_(t, s);
    check_pmf(row, "kernel row");
    for (Eigen::Index s = 0; s < cond_.cols(); ++s) {
      cond_(t, s) = row[static_cast<std::size_t>(s)];
      if (cond_(t, s) > 0.0 &&
          dmat.summary_lengths()[static_cast<std::size_t>(s)] >
              source.lengths()[static_cast<std::size_t>(t)]) {
        std::ostringstream os;
        os << "kernel puts mass on summary " << s << " longer than text " << t;
        throw StructuralError(os.str());
      }
    }
  }
}

SummarizerKernel SummarizerKernel::deterministic(
    const std::vector<std::size_t>& choice, const DiscreteSource& source,
    const DistortionMatrix& dmat) {
  if (choice.size() != source.size())
    throw StructuralError("one summary choice per text is required");
  Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(source.size()),
      static_cast<Eigen::Index>(dmat.num_summaries()));
  for (std::size_t t = 0; t < choice.size(); ++t) {
    if (choice[t] >= dmat.num_summaries())
      throw StructuralError("summary choice out of range");
    cond(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(choice[t])) = 1.0;
  }
  return SummarizerKernel(std::move(cond), source, dmat);
}

double rate_at(const RDCurve& curve, double distortion) {
  const auto& pts = curve.points;
  if (pts.empty()) throw std::out_of_range("rate_at: empty curve");
  if (distortion < pts.front().distortion)
    throw std::out_of_range("rate_at: distortion below the swept range");
  if (distortion >= pts.back().distortion) return pts.back().rate;
  auto hi = std::upper_bound(
      pts.begin(), pts.end(), distortion,
      [](double d, const RDPoint& p) { return d < p.distortion; });
  auto lo = std::prev(hi);
  const double span = hi->distortion - lo->distortion;
  if (span <= 0.0) return std::min(lo->rate, hi->rate);
  const double w = (distortion - lo->distortion) / span;
  return (1.0 - w) * lo->rate + w * hi->rate;
}

double expected_distortion(const DiscreteSource& source,
                           const SummarizerKernel& kernel,
                           const DistortionMatrix& dmat) {
  check_shapes(source, kernel, dmat);
  double total = 0.0;
  for (std::size_t t = 0; t < source.size(); ++t) {
    double row = 0.0;
    for (std::size_t s = 0; s < dmat.num_summaries(); ++s)
      row += kernel(t, s) * dmat(t, s);
    total += source.pmf()[t] * row;
  }
  return total;
}

double summarizer_rate(const DiscreteSource& source,
                       const SummarizerKernel& kernel,
                       const DistortionMatrix& dmat) {
  check_shapes(source, kernel, dmat);
  double rate = 0.0;
  for (const auto& cls : source.length_classes()) {
    double expected_len = 0.0;
    for (std::size_t k = 0; k < cls.texts.size(); ++k) {
      const std::size_t t = cls.texts[k];
      double row = 0.0;
      for (std::size_t s = 0; s < dmat.num_summaries(); ++s)
        row += kernel(t, s) * dmat.summary_lengths()[s];
      expected_len += cls.conditional[k] * row;
    }
    rate = std::max(rate, expected_len / cls.length);
  }
  return rate;
}

double conditional_mutual_information(const DiscreteSource& source,
                                      const SummarizerKernel& kernel) {
  const auto num_summaries = static_cast<std::size_t>(kernel.cond().cols());
  if (kernel.cond().rows() != static_cast<Eigen::Index>(source.size()))
    throw StructuralError("kernel rows must match the source");
  double info = 0.0;
  std::vector<double> marginal(num_summaries);
  for (const auto& cls : source.length_classes()) {
    std::fill(marginal.begin(), marginal.end(), 0.0);
    for (std::size_t k = 0; k < cls.texts.size(); ++k)
      for (std::size_t s = 0; s < num_summaries; ++s)
        marginal[s] += cls.conditional[k] * kernel(cls.texts[k], s);

    double class_info = 0.0;
    for (std::size_t k = 0; k < cls.texts.size(); ++k) {
      for (std::size_t s = 0; s < num_summaries; ++s) {
        const double q = kernel(cls.texts[k], s);
        if (q <= 0.0) continue;  // 0 log 0 = 0
        class_info += cls.conditional[k] * q * std::log(q / marginal[s]);
      }
    }
    info += cls.weight * std::max(0.0, class_info);
  }
  return info;
}

std::vector<std::size_t> admissible_summaries(const DistortionMatrix& dmat,
                                              int length) {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < dmat.num_summaries(); ++s)
    if (dmat.summary_lengths()[s] <= length) out.push_back(s);
  return out;
}

DMaxResult d_max(const DiscreteSource& source, const DistortionMatrix& dmat) {
  if (dmat.num_texts() != source.size())
    throw StructuralError("distortion rows must match the source");
  DMaxResult result;
  for (const auto& cls : source.length_classes()) {
    const auto candidates = admissible_summaries(dmat, cls.length);
    if (candidates.empty())
      throw StructuralError("no summary is short enough for length class " +
                            std::to_string(cls.length));
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_s = candidates.front();
    for (std::size_t s : candidates) {
      double e = 0.0;
      for (std::size_t k = 0; k < cls.texts.size(); ++k)
        e += cls.conditional[k] * dmat(cls.texts[k], s);
      if (e < best) {
        best = e;
        best_s = s;
      }
    }
    result.best_summary[cls.length] = best_s;
    result.per_class[cls.length] = best;
    result.d_max += cls.weight * best;
  }
  return result;
}

ConverseEstimate simulate_block_converse(const DiscreteSource& source,
                                         const SummarizerKernel& kernel,
                                         const DistortionMatrix& dmat,
                                         std::size_t block_length,
                                         std::size_t trials,
                                         std::uint64_t seed) {
  check_shapes(source, kernel, dmat);
  if (block_length == 0 || trials == 0)
    throw StructuralError("block length and trial count must be positive");

  std::vector<double> text_cdf(source.size());
  std::partial_sum(source.pmf().begin(), source.pmf().end(), text_cdf.begin());
  std::vector<std::vector<double>> kernel_cdf(source.size());
  for (std::size_t t = 0; t < source.size(); ++t) {
    kernel_cdf[t].resize(dmat.num_summaries());
    double acc = 0.0;
    for (std::size_t s = 0; s < dmat.num_summaries(); ++s) {
      acc += kernel(t, s);
      kernel_cdf[t][s] = acc;
    }
  }

  // One generator per batch of trials so that batches can be processed in
  // any order without changing the stream each trial sees.
  constexpr std::size_t kBatch = 1024;
  double sum_d = 0.0, sum_d2 = 0.0, sum_r = 0.0, sum_r2 = 0.0;
  for (std::size_t start = 0; start < trials; start += kBatch) {
    const std::size_t batch = start / kBatch;
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch),
                      static_cast<std::uint32_t>(batch >> 32)};
    std::mt19937_64 rng(seq);
    const std::size_t stop = std::min(trials, start + kBatch);
    for (std::size_t trial = start; trial < stop; ++trial) {
      double block_d = 0.0;
      double text_len = 0.0, summary_len = 0.0;
      for (std::size_t i = 0; i < block_length; ++i) {
        const std::size_t t = draw(text_cdf, uniform01(rng));
        const std::size_t s = draw(kernel_cdf[t], uniform01(rng));
        block_d += dmat(t, s);
        text_len += source.lengths()[t];
        summary_len += dmat.summary_lengths()[s];
      }
      block_d /= static_cast<double>(block_length);
      const double ratio = summary_len / text_len;
      sum_d += block_d;
      sum_d2 += block_d * block_d;
      sum_r += ratio;
      sum_r2 += ratio * ratio;
    }
  }

  const auto n = static_cast<double>(trials);
  ConverseEstimate est;
  est.distortion = sum_d / n;
  est.rate = sum_r / n;
  if (trials > 1) {
    const double var_d = std::max(0.0, (sum_d2 - n * est.distortion * est.distortion) / (n - 1));
    const double var_r = std::max(0.0, (sum_r2 - n * est.rate * est.rate) / (n - 1));
    est.distortion_stderr = std::sqrt(var_d / n);
    est.rate_stderr = std::sqrt(var_r / n);
  }
  return est;
}

}  // namespace srd
