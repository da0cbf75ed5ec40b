#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "srd/blahut.hpp"
#include "srd/checks.hpp"
#include "srd/example1.hpp"
#include "srd/gaussian.hpp"
#include "srd/io.hpp"
#include "srd/pipeline.hpp"

namespace srd::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string instance;
  std::string embeddings;
  std::string summaries;
  std::string spectrum;
  std::string curve;
  std::string out;
  std::string format;
  std::optional<std::string> beta_grid;
  std::optional<std::string> distortion_grid;
  std::size_t min_bin = kDefaultMinBin;
  std::optional<double> log_base;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int max_iters = 5000;
  double max_unconverged = 0.05;
  bool check = false;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t"));
    cell.erase(cell.find_last_not_of(" \t") + 1);
    if (cell.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size()) throw UsageError(std::string(flag) + ": not a number: " + cell);
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(std::string(flag) + " is empty");
  return values;
}

std::string output_format(const Config& cfg) {
  if (!cfg.format.empty()) return cfg.format;
  if (cfg.out.size() >= 5 && cfg.out.ends_with(".json")) return "json";
  return "csv";
}

void emit(const Config& cfg, const std::string& payload, std::ostream& out) {
  if (cfg.out.empty()) {
    out << payload;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open " + cfg.out + " for writing");
  f << payload;
}

void emit_curve(const Config& cfg, const RDCurve& curve, std::ostream& out) {
  if (output_format(cfg) == "json")
    emit(cfg, curve_to_json(curve).dump(2) + "\n", out);
  else
    emit(cfg, curve_to_csv(curve), out);
}

BAOptions ba_options(const Config& cfg) {
  BAOptions opts;
  opts.tol = cfg.tol;
  opts.max_iters = cfg.max_iters;
  if (cfg.beta_grid) opts.beta_grid = parse_list(*cfg.beta_grid, "--beta-grid");
  try {
    opts.validate();
  } catch (const StructuralError& e) {
    throw UsageError(e.what());
  }
  return opts;
}

std::vector<std::string> curve_problems(const RDCurve& curve) {
  std::vector<std::string> problems;
  for (auto msg : {check_nonincreasing(curve), check_convex(curve), check_strictly_decreasing(curve)})
    if (!msg.empty()) problems.push_back(msg);
  return problems;
}

void require_convergence(const Config& cfg, const RDCurve& curve, std::ostream& err) {
  if (curve.unconverged == 0) return;
  const double frac = static_cast<double>(curve.unconverged) / static_cast<double>(curve.points.size());
  err << "warning: " << curve.unconverged << " of " << curve.points.size()
      << " sweep points hit max_iters\n";
  if (frac > cfg.max_unconverged)
    throw NumericalFailure("too many unconverged sweep points");
}

// Residuals of every class solve across the sweep.
double worst_residual(const DiscreteSource& source, const DistortionMatrix& dmat,
                      const BAOptions& opts) {
  double worst = 0.0;
  for (double beta : opts.beta_grid) {
    const auto res = ba_solve(source, dmat, beta, opts);
    for (std::size_t c = 0; c < res.classes.size(); ++c)
      if (res.classes[c].converged)
        worst = std::max(worst, ba_fixed_point_residual(res.classes[c], res.slope,
                                                        res.problems[c].pmf,
                                                        res.problems[c].distortion));
  }
  return worst;
}

int rd_discrete(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto inst = load_instance(cfg.instance);
  const auto opts = ba_options(cfg);
  const auto curve = ba_curve(inst.source, inst.distortion, opts);
  require_convergence(cfg, curve, err);
  emit_curve(cfg, curve, out);

  const auto dmax = d_max(inst.source, inst.distortion);
  const auto top = std::max_element(curve.points.begin(), curve.points.end(),
                                    [](const RDPoint& a, const RDPoint& b) { return a.rate < b.rate; });
  if (top->rate <= 1e-12) {
    err << "R_S ≡ 0 (D_max = " << format_number(dmax.d_max) << ")\n";
  } else {
    const auto& first = curve.points.front();
    err << "D_max = " << format_number(dmax.d_max) << ", R_S(0) ~ " << format_number(first.rate)
        << " (at D = " << format_number(first.distortion) << ")\n";
  }

  if (cfg.check) {
    auto problems = curve_problems(curve);
    const double residual = worst_residual(inst.source, inst.distortion, opts);
    if (residual > 10 * opts.tol) problems.push_back("fixed-point residual " + format_number(residual));
    for (const auto& p : problems) err << "check failed: " << p << '\n';
    if (!problems.empty()) return kCheckFailed;
    err << "checks passed\n";
  }
  return kOk;
}

int rd_gaussian(const Config& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.embeddings.empty() == cfg.spectrum.empty())
    throw UsageError("rd-gaussian needs exactly one of --embeddings or --spectrum");
  std::optional<std::vector<double>> grid;
  if (cfg.distortion_grid) grid = parse_list(*cfg.distortion_grid, "--distortion-grid");

  RDCurve curve;
  if (!cfg.spectrum.empty()) {
    auto spectra = load_spectrum(cfg.spectrum);
    if (cfg.log_base)
      spectra = SpectrumSet(spectra.bins(), spectra.mean_length(), *cfg.log_base);
    curve = gaussian_curve(spectra, grid ? *grid : default_distortion_grid(spectra));
    err << "bins = " << spectra.bins().size() << ", eigenvalue mass = "
        << format_number(spectra.total_mass()) << '\n';
  } else {
    const auto set = read_embeddings(cfg.embeddings);
    auto res = approx_rs_curve(set, cfg.min_bin, grid ? *grid : std::vector<double>{},
                               cfg.log_base.value_or(2.0));
    if (res.grid.undersized)
      err << "warning: " << set.size() << " records is fewer than --min-bin " << cfg.min_bin
          << "; using a single bin\n";
    err << "records = " << set.size() << ", dimension = " << set.dimension()
        << ", bins = " << res.grid.counts.size() << ", mean length = "
        << format_number(res.spectra.mean_length()) << ", eigenvalue mass = "
        << format_number(res.spectra.total_mass()) << '\n';
    curve = std::move(res.curve);
  }
  emit_curve(cfg, curve, out);

  if (cfg.check) {
    auto problems = curve_problems(curve);
    for (const auto& p : problems) err << "check failed: " << p << '\n';
    if (!problems.empty()) return kCheckFailed;
    err << "checks passed\n";
  }
  return kOk;
}

int eval(const Config& cfg, std::ostream& out, std::ostream& err) {
  nlohmann::json result;
  if (!cfg.instance.empty()) {
    const auto inst = load_instance(cfg.instance);
    if (!inst.kernel) throw UsageError("eval --instance needs a \"kernel\" entry");
    const double d = expected_distortion(inst.source, *inst.kernel, inst.distortion);
    const double r = summarizer_rate(inst.source, *inst.kernel, inst.distortion);
    const auto opts = ba_options(cfg);
    const auto curve = cfg.curve.empty() ? ba_curve(inst.source, inst.distortion, opts)
                                         : load_curve(cfg.curve);
    result["distortion"] = d;
    result["rate"] = r;
    try {
      const double bound = rate_at(curve, d);
      result["bound"] = bound;
      result["gap"] = r - bound;
    } catch (const std::out_of_range&) {
      result["bound"] = nullptr;
      result["gap"] = nullptr;
    }
  } else {
    if (cfg.embeddings.empty() || cfg.summaries.empty())
      throw UsageError("eval needs --instance, or both --embeddings and --summaries");
    const auto texts = read_embeddings(cfg.embeddings);
    const auto summaries = read_embeddings(cfg.summaries);
    if (texts.dimension() != summaries.dimension())
      throw UsageError("text and summary embeddings have different dimensions");
    const double base = cfg.log_base.value_or(2.0);
    const auto point = eval_summarizer_embeddings(texts, summaries, cfg.min_bin, base);
    result = eval_point_to_json(point);
    std::optional<double> bound;
    if (!cfg.curve.empty()) {
      try {
        bound = rate_at(load_curve(cfg.curve), point.point.distortion);
      } catch (const std::out_of_range&) {
      }
    } else if (point.point.distortion > 0.0) {
      const auto approx = approx_rs_curve(texts, cfg.min_bin, {}, base);
      bound = solve_for_distortion(approx.spectra, point.point.distortion).rate;
    }
    result["bound"] = bound ? nlohmann::json(*bound) : nlohmann::json(nullptr);
    result["gap"] = bound ? nlohmann::json(point.point.rate - *bound) : nlohmann::json(nullptr);
    if (point.violations > 0)
      err << "warning: " << point.violations << " summaries are longer than their texts\n";
  }
  if (result["gap"].is_null())
    err << "bound gap R - R_S(D): unavailable at D = " << format_number(result["distortion"].get<double>()) << '\n';
  else
    err << "bound gap R - R_S(D) = " << format_number(result["gap"].get<double>()) << '\n';
  emit(cfg, result.dump(2) + "\n", out);
  return kOk;
}

int example1(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto ex = make_example1();
  const char* names[] = {"always-0", "diagonal", "0-or-111"};
  for (std::size_t k = 0; k < ex.kernels.size(); ++k) {
    err << names[k] << ": (D, R) = ("
        << format_number(expected_distortion(ex.source, ex.kernels[k], ex.distortion)) << ", "
        << format_number(summarizer_rate(ex.source, ex.kernels[k], ex.distortion)) << ")\n";
  }
  const auto dmax = d_max(ex.source, ex.distortion);
  err << "D_max = " << format_number(dmax.d_max) << ", s_4* = "
      << ex.distortion.summaries()[dmax.best_summary.at(4)] << '\n';

  const auto opts = ba_options(cfg);
  const auto curve = ba_curve(ex.source, ex.distortion, opts);
  require_convergence(cfg, curve, err);
  emit_curve(cfg, curve, out);

  if (cfg.check) {
    auto problems = curve_problems(curve);
    const double at_dmax = rate_at(curve, dmax.d_max);
    if (at_dmax > 1e-6) problems.push_back("R_S(D_max) = " + format_number(at_dmax));
    for (const auto& k : ex.kernels) {
      const double d = expected_distortion(ex.source, k, ex.distortion);
      const double r = summarizer_rate(ex.source, k, ex.distortion);
      if (d >= curve.points.front().distortion && rate_at(curve, d) > r - 1e-6)
        problems.push_back("one-shot point (" + format_number(d) + ", " + format_number(r) +
                           ") is not above the curve");
    }
    const double residual = worst_residual(ex.source, ex.distortion, opts);
    if (residual > 10 * opts.tol) problems.push_back("fixed-point residual " + format_number(residual));

    const auto mc = simulate_block_converse(ex.source, ex.kernels[2], ex.distortion, 16, 10000, cfg.seed);
    if (mc.rate < rate_at(curve, mc.distortion) - 0.02)
      problems.push_back("block converse violated at D = " + format_number(mc.distortion));

    for (const auto& p : problems) err << "check failed: " << p << '\n';
    if (!problems.empty()) return kCheckFailed;
    err << "checks passed\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Summarizer rate-distortion toolkit", "srd"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output file (default: stdout)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_flag("--check", cfg.check, "Verify curve properties; exit 1 on violation");
  };
  auto add_ba = [&cfg](CLI::App* sub) {
    sub->add_option("--beta-grid", cfg.beta_grid, "Comma-separated negative tangent slopes");
    sub->add_option("--tol", cfg.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", cfg.max_iters, "Iteration cap per class solve")->check(CLI::PositiveNumber);
    sub->add_option("--max-unconverged", cfg.max_unconverged,
                    "Allowed fraction of sweep points that hit the iteration cap")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto add_gaussian = [&cfg](CLI::App* sub) {
    sub->add_option("--min-bin", cfg.min_bin, "Minimum records per length bin")->check(CLI::PositiveNumber);
    sub->add_option("--log-base", cfg.log_base, "Logarithm base for rates")->check(CLI::Range(1.0 + 1e-12, 1e300));
  };

  auto* discrete = app.add_subcommand("rd-discrete", "Sweep R_S(D) for a discrete JSON instance");
  discrete->add_option("--instance", cfg.instance, "Instance JSON")->required();
  add_common(discrete);
  add_ba(discrete);

  auto* gaussian = app.add_subcommand("rd-gaussian", "R_S(D) from an SRDE file or spectrum JSON");
  gaussian->add_option("--embeddings", cfg.embeddings, "SRDE embedding file");
  gaussian->add_option("--spectrum", cfg.spectrum, "Spectrum JSON");
  gaussian->add_option("--distortion-grid", cfg.distortion_grid, "Comma-separated distortions");
  add_common(gaussian);
  add_gaussian(gaussian);

  auto* evalc = app.add_subcommand("eval", "Score a summarizer against R_S(D)");
  evalc->add_option("--instance", cfg.instance, "Instance JSON with a kernel");
  evalc->add_option("--embeddings", cfg.embeddings, "SRDE file of text embeddings");
  evalc->add_option("--summaries", cfg.summaries, "SRDE file of summary embeddings, paired by index");
  evalc->add_option("--curve", cfg.curve, "Precomputed curve (CSV or JSON) to use as the bound");
  add_common(evalc);
  add_ba(evalc);
  add_gaussian(evalc);

  auto* ex1 = app.add_subcommand("example1", "Four-text worked example and its curve");
  add_common(ex1);
  add_ba(ex1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (discrete->parsed()) return rd_discrete(cfg, out, err);
    if (gaussian->parsed()) return rd_gaussian(cfg, out, err);
    if (evalc->parsed()) return eval(cfg, out, err);
    return example1(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const SrdeError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const StructuralError& e) {
    err << "input error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::domain_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace srd::cli
