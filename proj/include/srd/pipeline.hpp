#pragma once

// Dataset-level approximation: bin records by token length, estimate one
// covariance per bin, and hand the spectra to reverse water-filling. Also
// scores a real summarizer from paired text/summary embeddings.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "srd/core.hpp"
#include "srd/gaussian.hpp"
#include "srd/srde.hpp"

namespace srd {

inline constexpr std::size_t kDefaultMinBin = 2000;

/// Bins [edges[i], edges[i+1]) over token lengths; the last bin is open
/// ended and lengths below edges[0] fall into the first bin.
struct LengthGrid {
  std::vector<std::uint32_t> edges;
  std::vector<std::size_t> counts;
  bool undersized = false;  // fewer records than min_bin overall

  std::size_t bin_of(std::uint32_t length) const;
};

/// Walks the sorted lengths, closing a bin once it holds at least `min_bin`
/// records and the next distinct length begins. A trailing remainder smaller
/// than `min_bin` is merged into the previous bin.
LengthGrid build_length_grid(const std::vector<std::uint32_t>& lengths,
                             std::size_t min_bin);

/// Unbiased (n - 1) sample covariance of the rows of `vectors`.
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& vectors);

struct ApproxResult {
  RDCurve curve;
  SpectrumSet spectra;
  LengthGrid grid;
};

/// Length grid, per-bin covariance spectra weighted by bin counts and the
/// mean token length, then the water-filling curve. An empty
/// `distortion_grid` uses default_distortion_grid.
ApproxResult approx_rs_curve(const EmbeddingSet& set, std::size_t min_bin,
                             const std::vector<double>& distortion_grid,
                             double log_base);

struct EvalPoint {
  RDPoint point;
  std::size_t violations = 0;  // pairs with a summary longer than its text
};

/// `pairing[i]` is the summary record paired with text record i. Distortion
/// is the mean squared Euclidean distance over pairs; rate is the largest
/// per-bin mean summary/text length ratio, with bins from the text lengths.
EvalPoint eval_summarizer_embeddings(const EmbeddingSet& texts,
                                     const EmbeddingSet& summaries,
                                     const std::vector<std::optional<std::size_t>>& pairing,
                                     std::size_t min_bin, double log_base);

/// Record i of `texts` paired with record i of `summaries`.
EvalPoint eval_summarizer_embeddings(const EmbeddingSet& texts,
                                     const EmbeddingSet& summaries,
                                     std::size_t min_bin, double log_base);

}  // namespace srd
