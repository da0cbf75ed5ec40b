#include "srd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace srd {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

Eigen::MatrixXd matrix_from_rows(const std::vector<std::vector<double>>& rows, const char* what) {
  if (rows.empty()) throw ParseError(std::string(what) + " has no rows");
  const auto cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ParseError(std::string(what) + " rows have unequal lengths");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return m;
}

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) rows[static_cast<std::size_t>(i)].push_back(m(i, k));
  return rows;
}

json parse_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DiscreteInstance instance_from_json(const json& j) {
  try {
    DiscreteSource source(field<std::vector<std::string>>(j, "texts"),
                          field<std::vector<double>>(j, "pmf"),
                          field<int>(j, "alphabet_size"));
    DistortionMatrix dmat(
        matrix_from_rows(field<std::vector<std::vector<double>>>(j, "distortion"), "distortion"),
        field<std::vector<std::string>>(j, "summaries"));
    std::optional<SummarizerKernel> kernel;
    if (j.contains("kernel") && !j.at("kernel").is_null())
      kernel.emplace(matrix_from_rows(field<std::vector<std::vector<double>>>(j, "kernel"), "kernel"),
                     source, dmat);
    return DiscreteInstance{std::move(source), std::move(dmat), std::move(kernel)};
  } catch (const StructuralError& e) {
    throw ParseError(std::string("invalid instance: ") + e.what());
  }
}

json instance_to_json(const DiscreteSource& source, const DistortionMatrix& dmat,
                      const SummarizerKernel* kernel) {
  json j;
  j["alphabet_size"] = source.alphabet_size();
  j["texts"] = source.texts();
  j["pmf"] = source.pmf();
  j["summaries"] = dmat.summaries();
  j["distortion"] = rows_of(dmat.values());
  if (kernel) j["kernel"] = rows_of(kernel->cond());
  return j;
}

DiscreteInstance load_instance(const std::filesystem::path& path) {
  return instance_from_json(parse_json_file(path));
}

std::string curve_to_csv(const RDCurve& curve) {
  std::string out = "beta,distortion,rate,log_base\n";
  for (const auto& p : curve.points) {
    if (p.beta) out += format_number(*p.beta);
    out += ',' + format_number(p.distortion) + ',' + format_number(p.rate) + ',' +
           format_number(p.log_base) + '\n';
  }
  return out;
}

json curve_to_json(const RDCurve& curve) {
  json points = json::array();
  for (const auto& p : curve.points) {
    json jp;
    jp["beta"] = p.beta ? json(*p.beta) : json(nullptr);
    jp["distortion"] = p.distortion;
    jp["rate"] = p.rate;
    jp["log_base"] = p.log_base;
    points.push_back(std::move(jp));
  }
  return json{{"log_base", curve.log_base}, {"points", std::move(points)}};
}

RDCurve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "beta,distortion,rate,log_base")
    throw ParseError("curve CSV: expected header beta,distortion,rate,log_base");
  RDCurve curve;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (cells.size() != 4)
      throw ParseError("curve CSV line " + std::to_string(lineno) + ": expected 4 fields");
    try {
      RDPoint p;
      if (!cells[0].empty()) p.beta = std::stod(cells[0]);
      p.distortion = std::stod(cells[1]);
      p.rate = std::stod(cells[2]);
      p.log_base = std::stod(cells[3]);
      curve.log_base = p.log_base;
      curve.points.push_back(p);
    } catch (const std::exception&) {
      throw ParseError("curve CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const RDPoint& a, const RDPoint& b) { return a.distortion < b.distortion; });
  return curve;
}

RDCurve load_curve(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  if (path.extension() != ".json") return curve_from_csv(text);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  RDCurve curve;
  curve.log_base = field<double>(j, "log_base");
  for (const auto& jp : field<json>(j, "points")) {
    RDPoint p;
    if (jp.contains("beta") && !jp.at("beta").is_null()) p.beta = field<double>(jp, "beta");
    p.distortion = field<double>(jp, "distortion");
    p.rate = field<double>(jp, "rate");
    p.log_base = field<double>(jp, "log_base");
    curve.points.push_back(p);
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const RDPoint& a, const RDPoint& b) { return a.distortion < b.distortion; });
  return curve;
}

SpectrumSet spectrum_from_json(const json& j) {
  std::vector<SpectrumBin> bins;
  for (const auto& jb : field<json>(j, "bins")) {
    SpectrumBin b;
    b.weight = field<double>(jb, "weight");
    b.eigenvalues = field<std::vector<double>>(jb, "eigenvalues");
    bins.push_back(std::move(b));
  }
  try {
    return SpectrumSet(std::move(bins), field<double>(j, "mean_length"), field<double>(j, "log_base"));
  } catch (const StructuralError& e) {
    throw ParseError(std::string("invalid spectrum: ") + e.what());
  }
}

json spectrum_to_json(const SpectrumSet& spectra) {
  json bins = json::array();
  for (const auto& b : spectra.bins())
    bins.push_back(json{{"weight", b.weight}, {"eigenvalues", b.eigenvalues}});
  return json{{"mean_length", spectra.mean_length()},
              {"log_base", spectra.log_base()},
              {"bins", std::move(bins)}};
}

SpectrumSet load_spectrum(const std::filesystem::path& path) {
  return spectrum_from_json(parse_json_file(path));
}

json eval_point_to_json(const EvalPoint& point) {
  return json{{"distortion", point.point.distortion},
              {"rate", point.point.rate},
              {"violations", point.violations}};
}

}  // namespace srd
