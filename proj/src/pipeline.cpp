#include "srd/pipeline.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace srd {

std::size_t LengthGrid::bin_of(std::uint32_t length) const {
  auto it = std::upper_bound(edges.begin(), edges.end(), length);
  if (it == edges.begin()) return 0;
  return static_cast<std::size_t>(std::prev(it) - edges.begin());
}

LengthGrid build_length_grid(const std::vector<std::uint32_t>& lengths,
                             std::size_t min_bin) {
  if (lengths.empty()) throw StructuralError("length grid needs at least one record");
  if (min_bin == 0) throw StructuralError("min_bin must be positive");

  std::map<std::uint32_t, std::size_t> histogram;
  for (auto len : lengths) ++histogram[len];

  LengthGrid grid;
  if (lengths.size() < min_bin) {
    grid.edges.push_back(histogram.begin()->first);
    grid.counts.push_back(lengths.size());
    grid.undersized = true;
    return grid;
  }

  std::size_t open = 0;
  for (const auto& [len, n] : histogram) {
    if (open == 0) {
      grid.edges.push_back(len);
      grid.counts.push_back(0);
    }
    grid.counts.back() += n;
    open += n;
    if (open >= min_bin) open = 0;
  }
  if (grid.counts.size() > 1 && grid.counts.back() < min_bin) {
    grid.counts[grid.counts.size() - 2] += grid.counts.back();
    grid.counts.pop_back();
    grid.edges.pop_back();
  }
  return grid;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& vectors) {
  if (vectors.rows() < 2) throw StructuralError("sample covariance needs at least 2 vectors");
  const Eigen::RowVectorXd mean = vectors.colwise().mean();
  const Eigen::MatrixXd centered = vectors.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(vectors.rows() - 1);
  return 0.5 * (cov + cov.transpose());
}

ApproxResult approx_rs_curve(const EmbeddingSet& set, std::size_t min_bin,
                             const std::vector<double>& distortion_grid,
                             double log_base) {
  if (set.size() == 0) throw StructuralError("embedding set is empty");
  auto grid = build_length_grid(set.lengths(), min_bin);

  const auto m = static_cast<Eigen::Index>(set.dimension());
  std::vector<Eigen::MatrixXd> members(grid.counts.size());
  std::vector<Eigen::Index> filled(grid.counts.size(), 0);
  for (std::size_t b = 0; b < grid.counts.size(); ++b)
    members[b].resize(static_cast<Eigen::Index>(grid.counts[b]), m);

  double total_length = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::size_t b = grid.bin_of(set.lengths()[i]);
    const auto v = set.vector(i);
    for (Eigen::Index j = 0; j < m; ++j)
      members[b](filled[b], j) = static_cast<double>(v[static_cast<std::size_t>(j)]);
    ++filled[b];
    total_length += set.lengths()[i];
  }

  std::vector<SpectrumBin> bins;
  for (std::size_t b = 0; b < members.size(); ++b) {
    SpectrumBin bin;
    bin.weight = static_cast<double>(grid.counts[b]) / static_cast<double>(set.size());
    bin.eigenvalues = eig_spectrum(sample_covariance(members[b]));
    bins.push_back(std::move(bin));
  }
  SpectrumSet spectra(std::move(bins), total_length / static_cast<double>(set.size()), log_base);

  auto curve = gaussian_curve(spectra, distortion_grid.empty()
                                           ? default_distortion_grid(spectra)
                                           : distortion_grid);
  return ApproxResult{std::move(curve), std::move(spectra), std::move(grid)};
}

EvalPoint eval_summarizer_embeddings(const EmbeddingSet& texts,
                                     const EmbeddingSet& summaries,
                                     const std::vector<std::optional<std::size_t>>& pairing,
                                     std::size_t min_bin, double log_base) {
  if (texts.size() == 0) throw StructuralError("no text records");
  if (texts.dimension() != summaries.dimension())
    throw StructuralError("text and summary embeddings have different dimensions");
  if (pairing.size() != texts.size())
    throw StructuralError("pairing must have one entry per text record");

  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < pairing.size(); ++i)
    if (!pairing[i] || *pairing[i] >= summaries.size()) missing.push_back(i);
  if (!missing.empty()) {
    std::ostringstream os;
    os << "pairing incomplete; unpaired text records:";
    for (auto i : missing) os << ' ' << i;
    throw StructuralError(os.str());
  }

  const auto grid = build_length_grid(texts.lengths(), min_bin);
  std::vector<double> ratio_sum(grid.counts.size(), 0.0);
  std::vector<std::size_t> ratio_n(grid.counts.size(), 0);

  EvalPoint out;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const std::size_t j = *pairing[i];
    const auto t = texts.vector(i);
    const auto s = summaries.vector(j);
    double d = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double diff = static_cast<double>(t[k]) - static_cast<double>(s[k]);
      d += diff * diff;
    }
    sq_sum += d;

    const auto text_len = texts.lengths()[i];
    const auto summary_len = summaries.lengths()[j];
    if (summary_len > text_len) ++out.violations;
    const std::size_t b = grid.bin_of(text_len);
    ratio_sum[b] += static_cast<double>(summary_len) / static_cast<double>(text_len);
    ++ratio_n[b];
  }

  out.point.distortion = sq_sum / static_cast<double>(texts.size());
  out.point.log_base = log_base;
  for (std::size_t b = 0; b < ratio_sum.size(); ++b)
    if (ratio_n[b] > 0)
      out.point.rate = std::max(out.point.rate, ratio_sum[b] / static_cast<double>(ratio_n[b]));
  return out;
}

EvalPoint eval_summarizer_embeddings(const EmbeddingSet& texts,
                                     const EmbeddingSet& summaries,
                                     std::size_t min_bin, double log_base) {
  if (texts.size() != summaries.size())
    throw StructuralError("identity pairing needs equal record counts");
  std::vector<std::optional<std::size_t>> pairing(texts.size());
  for (std::size_t i = 0; i < pairing.size(); ++i) pairing[i] = i;
  return eval_summarizer_embeddings(texts, summaries, pairing, min_bin, log_base);
}

}  // namespace srd
