#include "srd/checks.hpp"

#include <sstream>

namespace srd {

namespace {

std::string at(const char* what, const RDPoint& a, const RDPoint& b) {
  std::ostringstream os;
  os.precision(12);
  os << what << " between (" << a.distortion << ", " << a.rate << ") and ("
     << b.distortion << ", " << b.rate << ")";
  return os.str();
}

}  // namespace

std::string check_nonincreasing(const RDCurve& curve, double tol) {
  const auto& p = curve.points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (p[i].distortion < p[i + 1].distortion && p[i].rate < p[i + 1].rate - tol)
      return at("rate increases", p[i], p[i + 1]);
  return {};
}

std::string check_convex(const RDCurve& curve, double tol, double min_gap) {
  const auto& p = curve.points;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const auto& a = p[i - 1];
    const auto& b = p[i];
    const auto& c = p[i + 1];
    if (b.distortion - a.distortion < min_gap || c.distortion - b.distortion < min_gap) continue;
    const double w = (b.distortion - a.distortion) / (c.distortion - a.distortion);
    const double chord = (1.0 - w) * a.rate + w * c.rate;
    if (b.rate > chord + tol) return at("point above chord", a, c);
  }
  return {};
}

std::string check_strictly_decreasing(const RDCurve& curve, double min_gap) {
  const auto& p = curve.points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i + 1].distortion - p[i].distortion <= min_gap) continue;
    if (p[i].rate <= 0.0) continue;
    if (!(p[i].rate > p[i + 1].rate)) return at("rate not strictly decreasing", p[i], p[i + 1]);
  }
  return {};
}

}  // namespace srd
