#pragma once

// Shape checks on swept curves. Each returns a description of the first
// violation found, or an empty string.

#include <string>

#include "srd/core.hpp"

namespace srd {

/// D_i < D_j implies R_i >= R_j - tol.
std::string check_nonincreasing(const RDCurve& curve, double tol = 1e-9);

/// Every point lies at or below the chord of its neighbours, plus tol.
/// Neighbours closer than `min_gap` in distortion are skipped.
std::string check_convex(const RDCurve& curve, double tol = 1e-8, double min_gap = 1e-9);

/// Consecutive points with distinct distortion (more than `min_gap` apart)
/// and positive rate have strictly decreasing rate.
std::string check_strictly_decreasing(const RDCurve& curve, double min_gap = 1e-9);

}  // namespace srd
