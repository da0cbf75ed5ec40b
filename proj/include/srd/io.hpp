#pragma once

// Text formats shared by the CLI and the Python module.
//
// Discrete instance (JSON):
//   {"alphabet_size": 2, "texts": [...], "pmf": [...], "summaries": [...],
//    "distortion": [[d(t0,s0), d(t0,s1), ...], ...],   // one row per text
//    "kernel": [[k(s0|t0), ...], ...]}                  // optional
//
// Curve (CSV): header "beta,distortion,rate,log_base"; beta is blank for
// points without a tangent slope. The JSON mirror is
//   {"log_base": b, "points": [{"beta": x|null, "distortion", "rate", "log_base"}]}
//
// Spectrum (JSON): {"mean_length", "log_base", "bins": [{"weight", "eigenvalues"}]}

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "srd/core.hpp"
#include "srd/gaussian.hpp"
#include "srd/pipeline.hpp"

namespace srd {

/// Raised for malformed input files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiscreteInstance {
  DiscreteSource source;
  DistortionMatrix distortion;
  std::optional<SummarizerKernel> kernel;
};

DiscreteInstance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const DiscreteSource& source, const DistortionMatrix& dmat,
                                const SummarizerKernel* kernel = nullptr);
DiscreteInstance load_instance(const std::filesystem::path& path);

std::string curve_to_csv(const RDCurve& curve);
nlohmann::json curve_to_json(const RDCurve& curve);
RDCurve curve_from_csv(const std::string& text);
RDCurve load_curve(const std::filesystem::path& path);

SpectrumSet spectrum_from_json(const nlohmann::json& j);
nlohmann::json spectrum_to_json(const SpectrumSet& spectra);
SpectrumSet load_spectrum(const std::filesystem::path& path);

nlohmann::json eval_point_to_json(const EvalPoint& point);

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_number(double v);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace srd
