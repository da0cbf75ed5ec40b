#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "srd/blahut.hpp"
#include "srd/example1.hpp"
#include "srd/gaussian.hpp"
#include "srd/pipeline.hpp"
#include "srd/srde.hpp"

namespace py = pybind11;
using namespace srd;

namespace {

using Bins = std::vector<std::pair<double, std::vector<double>>>;

SpectrumSet make_spectra(const Bins& bins, double mean_length, double log_base) {
  std::vector<SpectrumBin> out;
  for (const auto& [w, eig] : bins) out.push_back(SpectrumBin{w, eig});
  return SpectrumSet(std::move(out), mean_length, log_base);
}

Bins spectra_to_bins(const SpectrumSet& s) {
  Bins out;
  for (const auto& b : s.bins()) out.emplace_back(b.weight, b.eigenvalues);
  return out;
}

// (lengths uint32[n], values float32[n, m]) <-> EmbeddingSet
EmbeddingSet to_set(py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast> lengths,
                    py::array_t<float, py::array::c_style | py::array::forcecast> values) {
  if (values.ndim() != 2) throw StructuralError("values must be a 2-d array");
  if (lengths.ndim() != 1 || lengths.shape(0) != values.shape(0))
    throw StructuralError("lengths must be 1-d with one entry per row of values");
  std::vector<std::uint32_t> lens(lengths.data(), lengths.data() + lengths.size());
  std::vector<float> vals(values.data(), values.data() + values.size());
  return EmbeddingSet(static_cast<std::size_t>(values.shape(1)), std::move(lens), std::move(vals));
}

py::tuple from_set(const EmbeddingSet& set) {
  py::array_t<std::uint32_t> lengths(static_cast<py::ssize_t>(set.size()));
  std::memcpy(lengths.mutable_data(), set.lengths().data(), set.size() * sizeof(std::uint32_t));
  py::array_t<float> values({static_cast<py::ssize_t>(set.size()), static_cast<py::ssize_t>(set.dimension())});
  std::memcpy(values.mutable_data(), set.values().data(), set.values().size() * sizeof(float));
  return py::make_tuple(lengths, values);
}

BAOptions make_options(std::optional<std::vector<double>> beta_grid, double tol, int max_iters) {
  BAOptions opts;
  if (beta_grid) opts.beta_grid = *beta_grid;
  opts.tol = tol;
  opts.max_iters = max_iters;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Summarizer rate-distortion toolkit (C++ core)";

  py::register_exception<SrdeError>(m, "SrdeError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);

  py::class_<DiscreteSource>(m, "DiscreteSource")
      .def(py::init<std::vector<std::string>, std::vector<double>, int>(), py::arg("texts"),
           py::arg("pmf"), py::arg("alphabet_size"))
      .def_property_readonly("texts", &DiscreteSource::texts)
      .def_property_readonly("pmf", &DiscreteSource::pmf)
      .def_property_readonly("lengths", &DiscreteSource::lengths)
      .def_property_readonly("alphabet_size", &DiscreteSource::alphabet_size)
      .def_property_readonly("mean_length", &DiscreteSource::mean_length);

  py::class_<DistortionMatrix>(m, "DistortionMatrix")
      .def(py::init<Eigen::MatrixXd, std::vector<std::string>>(), py::arg("values"), py::arg("summaries"),
           "values[t, s] = d(text t, summary s)")
      .def_property_readonly("values", &DistortionMatrix::values)
      .def_property_readonly("summaries", &DistortionMatrix::summaries)
      .def_property_readonly("is_normal", &DistortionMatrix::is_normal);

  py::class_<SummarizerKernel>(m, "SummarizerKernel")
      .def(py::init<Eigen::MatrixXd, const DiscreteSource&, const DistortionMatrix&>(), py::arg("cond"),
           py::arg("source"), py::arg("distortion"))
      .def_property_readonly("cond", &SummarizerKernel::cond);

  py::class_<RDCurve>(m, "Curve")
      .def_property_readonly("distortion", [](const RDCurve& c) {
        std::vector<double> v;
        for (const auto& p : c.points) v.push_back(p.distortion);
        return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
      })
      .def_property_readonly("rate", [](const RDCurve& c) {
        std::vector<double> v;
        for (const auto& p : c.points) v.push_back(p.rate);
        return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
      })
      .def_property_readonly("beta", [](const RDCurve& c) {
        std::vector<std::optional<double>> v;
        for (const auto& p : c.points) v.push_back(p.beta);
        return v;
      })
      .def_readonly("log_base", &RDCurve::log_base)
      .def_readonly("unconverged", &RDCurve::unconverged)
      .def("rate_at", &rate_at, py::arg("distortion"))
      .def("__len__", [](const RDCurve& c) { return c.points.size(); });

  m.def("expected_distortion", &expected_distortion, py::arg("source"), py::arg("kernel"), py::arg("distortion"));
  m.def("summarizer_rate", &summarizer_rate, py::arg("source"), py::arg("kernel"), py::arg("distortion"));
  m.def("conditional_mutual_information", &conditional_mutual_information, py::arg("source"),
        py::arg("kernel"), "I(T;S|l(T)) in nats");
  m.def(
      "d_max",
      [](const DiscreteSource& s, const DistortionMatrix& d) {
        const auto r = d_max(s, d);
        std::map<int, std::string> best;
        for (const auto& [len, idx] : r.best_summary) best[len] = d.summaries()[idx];
        return py::make_tuple(r.d_max, best);
      },
      py::arg("source"), py::arg("distortion"), "(D_max, {length: best summary})");

  m.def("default_beta_grid", &default_beta_grid, py::arg("points") = 40, py::arg("lo") = 1e-4,
        py::arg("hi") = 1e2);
  m.def(
      "ba_curve",
      [](const DiscreteSource& s, const DistortionMatrix& d, std::optional<std::vector<double>> beta_grid,
         double tol, int max_iters) {
        const auto opts = make_options(std::move(beta_grid), tol, max_iters);
        py::gil_scoped_release release;
        return ba_curve(s, d, opts);
      },
      py::arg("source"), py::arg("distortion"), py::arg("beta_grid") = py::none(), py::arg("tol") = 1e-10,
      py::arg("max_iters") = 5000);
  m.def(
      "grid_oracle_rd",
      [](const DiscreteSource& s, const DistortionMatrix& d, double target, double resolution) {
        return grid_oracle_rd(s, d, target, resolution);
      },
      py::arg("source"), py::arg("distortion"), py::arg("target"), py::arg("resolution"));
  m.def("simulate_block_converse", [](const DiscreteSource& s, const SummarizerKernel& k, const DistortionMatrix& d,
                                      std::size_t n, std::size_t trials, std::uint64_t seed) {
        const auto e = simulate_block_converse(s, k, d, n, trials, seed);
        return py::dict(py::arg("distortion") = e.distortion, py::arg("rate") = e.rate,
                        py::arg("distortion_stderr") = e.distortion_stderr, py::arg("rate_stderr") = e.rate_stderr);
      },
      py::arg("source"), py::arg("kernel"), py::arg("distortion"), py::arg("block_length"), py::arg("trials"),
      py::arg("seed"));
  m.def("example1", []() {
        auto ex = make_example1();
        return py::make_tuple(ex.source, ex.distortion, std::vector<SummarizerKernel>(ex.kernels.begin(), ex.kernels.end()));
      },
      "(source, distortion, [always-0, diagonal, 0-or-111 kernels])");

  m.def("eig_spectrum", &eig_spectrum, py::arg("covariance"));
  m.def(
      "solve_for_distortion",
      [](const Bins& bins, double mean_length, double log_base, double target) {
        const auto sol = solve_for_distortion(make_spectra(bins, mean_length, log_base), target);
        return py::dict(py::arg("level") = sol.level, py::arg("distortion") = sol.distortion,
                        py::arg("rate") = sol.rate, py::arg("allocations") = sol.allocations,
                        py::arg("saturated") = sol.saturated);
      },
      py::arg("bins"), py::arg("mean_length"), py::arg("log_base"), py::arg("target"),
      "bins: [(weight, eigenvalues), ...]");
  m.def(
      "gaussian_curve",
      [](const Bins& bins, double mean_length, double log_base, std::optional<std::vector<double>> grid) {
        const auto spectra = make_spectra(bins, mean_length, log_base);
        return gaussian_curve(spectra, grid ? *grid : default_distortion_grid(spectra));
      },
      py::arg("bins"), py::arg("mean_length"), py::arg("log_base") = 2.0, py::arg("grid") = py::none());

  m.def("encode_srde", [](py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast> lengths,
                          py::array_t<float, py::array::c_style | py::array::forcecast> values) {
        const auto bytes = encode_srde(to_set(lengths, values));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("lengths"), py::arg("values"));
  m.def("decode_srde", [](py::bytes data) {
        const std::string s = data;
        return from_set(decode_srde({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}));
      },
      py::arg("data"), "-> (lengths, values)");
  m.def("write_embeddings", [](const std::filesystem::path& path,
                               py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast> lengths,
                               py::array_t<float, py::array::c_style | py::array::forcecast> values) {
        write_embeddings(path, to_set(lengths, values));
      },
      py::arg("path"), py::arg("lengths"), py::arg("values"));
  m.def("read_embeddings", [](const std::filesystem::path& path) { return from_set(read_embeddings(path)); },
        py::arg("path"), "-> (lengths, values)");

  m.def(
      "approx_rs_curve",
      [](py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast> lengths,
         py::array_t<float, py::array::c_style | py::array::forcecast> values, std::size_t min_bin,
         std::vector<double> grid, double log_base) {
        auto res = approx_rs_curve(to_set(lengths, values), min_bin, grid, log_base);
        return py::make_tuple(res.curve, spectra_to_bins(res.spectra), res.spectra.mean_length());
      },
      py::arg("lengths"), py::arg("values"), py::arg("min_bin") = kDefaultMinBin,
      py::arg("grid") = std::vector<double>{}, py::arg("log_base") = 2.0,
      "-> (curve, bins, mean_length)");
  m.def(
      "eval_summarizer_embeddings",
      [](py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast> text_lengths,
         py::array_t<float, py::array::c_style | py::array::forcecast> text_values,
         py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast> summary_lengths,
         py::array_t<float, py::array::c_style | py::array::forcecast> summary_values, std::size_t min_bin,
         double log_base) {
        const auto e = eval_summarizer_embeddings(to_set(text_lengths, text_values),
                                                  to_set(summary_lengths, summary_values), min_bin, log_base);
        return py::dict(py::arg("distortion") = e.point.distortion, py::arg("rate") = e.point.rate,
                        py::arg("violations") = e.violations);
      },
      py::arg("text_lengths"), py::arg("text_values"), py::arg("summary_lengths"), py::arg("summary_values"),
      py::arg("min_bin") = kDefaultMinBin, py::arg("log_base") = 2.0);
}
