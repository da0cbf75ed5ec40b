#include "srd/example1.hpp"

namespace srd {

Example1 make_example1() {
  DiscreteSource source({"0000", "0010", "0110", "0111"}, {0.25, 0.25, 0.25, 0.25}, 2);

  // Rows are texts, columns are summaries.
  Eigen::MatrixXd d(4, 4);
  d << 0, 5, 5, 5,
       1, 0, 5, 5,
       2, 1, 0, 5,
       3, 2, 1, 0;
  DistortionMatrix dmat(std::move(d), {"0", "10", "110", "111"});

  auto shortest = SummarizerKernel::deterministic({0, 0, 0, 0}, source, dmat);
  auto diagonal = SummarizerKernel::deterministic({0, 1, 2, 3}, source, dmat);
  auto two_way = SummarizerKernel::deterministic({0, 0, 0, 3}, source, dmat);
  return Example1{std::move(source), std::move(dmat), {shortest, diagonal, two_way}};
}

}  // namespace srd
