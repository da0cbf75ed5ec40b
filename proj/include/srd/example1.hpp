#pragma once

#include <array>

#include "srd/core.hpp"

namespace srd {

/// Four equiprobable binary texts of length 4, summaries {0, 10, 110, 111}
/// and the three one-shot summarizers built on them: always "0", the
/// zero-distortion diagonal, and "111" for 0111 with "0" otherwise.
struct Example1 {
  DiscreteSource source;
  DistortionMatrix distortion;
  std::array<SummarizerKernel, 3> kernels;
};

Example1 make_example1();

}  // namespace srd
