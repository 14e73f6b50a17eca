// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <string>
#include <vector>

#include "hpdwave/error.hpp"
#include "hpdwave/manifold.hpp"
#include "hpdwave/shrinkage.hpp"
#include "hpdwave/simulate.hpp"
#include "hpdwave/spectral.hpp"
#include "hpdwave/wavelet.hpp"

namespace py = pybind11;
using namespace hpdwave;

namespace {

using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const std::complex<double>* data, Index d) {
  Matrix m(d, d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) m(r, c) = data[r * d + c];
  return m;
}

void from_matrix(const Matrix& m, std::complex<double>* out) {
  const Index d = m.rows();
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) out[r * d + c] = m(r, c);
}

HpdMatrix to_hpd(const CArray& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("expected a square (d, d) array");
  return HpdMatrix(to_matrix(a.data(), a.shape(0)));
}

CArray from_hpd(const Matrix& m) {
  CArray out({m.rows(), m.cols()});
  from_matrix(m, out.mutable_data());
  return out;
}

HpdCurve to_curve(const CArray& a) {
  if (a.ndim() != 3 || a.shape(1) != a.shape(2)) throw py::value_error("expected an (n, d, d) array");
  const Index d = a.shape(1);
  HpdCurve c;
  c.reserve(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) c.emplace_back(to_matrix(a.data(i, 0, 0), d));
  return c;
}

CArray from_matrices(const std::vector<Matrix>& ms) {
  const py::ssize_t d = ms.empty() ? 0 : ms.front().rows();
  CArray out({static_cast<py::ssize_t>(ms.size()), d, d});
  for (std::size_t i = 0; i < ms.size(); ++i) from_matrix(ms[i], out.mutable_data(static_cast<py::ssize_t>(i), 0, 0));
  return out;
}

CArray from_curve(const HpdCurve& c) {
  std::vector<Matrix> ms;
  ms.reserve(c.size());
  for (const auto& p : c) ms.push_back(p.matrix());
  return from_matrices(ms);
}

TimeSeries to_series(const RArray& x) {
  if (x.ndim() != 2) throw py::value_error("expected a (d, T) array");
  TimeSeries ts;
  ts.data.resize(x.shape(0), x.shape(1));
  for (py::ssize_t r = 0; r < x.shape(0); ++r)
    for (py::ssize_t c = 0; c < x.shape(1); ++c) ts.data(r, c) = *x.data(r, c);
  return ts;
}

RArray from_series(const TimeSeries& ts) {
  RArray out({ts.data.rows(), ts.data.cols()});
  for (Index r = 0; r < ts.data.rows(); ++r)
    for (Index c = 0; c < ts.data.cols(); ++c) *out.mutable_data(r, c) = ts.data(r, c);
  return out;
}

TaperKind parse_taper(const std::string& name) {
  if (name == "dpss") return TaperKind::Dpss;
  if (name == "sine") return TaperKind::Sine;
  throw Error(ErrorKind::InvalidArgument, "unknown taper '" + name + "'");
}

TransformOptions transform_options(int order, const std::string& metric, const std::string& method) {
  TransformOptions o;
  o.order = order;
  o.metric = parse_metric(metric);
  if (method == "fast") {
    o.method = PredictionMethod::Fast;
  } else if (method == "neville") {
    o.method = PredictionMethod::Neville;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown prediction method '" + method + "'");
  }
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Intrinsic wavelet regression and spectral estimation for curves of HPD matrices.";

  static py::exception<Error> error(m, "HpdwaveError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("geodesic", [](const CArray& p1, const CArray& p2, double t, const std::string& metric) {
    return from_hpd(geodesic(parse_metric(metric), to_hpd(p1), to_hpd(p2), t).matrix());
  }, py::arg("p1"), py::arg("p2"), py::arg("t"), py::arg("metric") = "riemannian");

  m.def("dist", [](const CArray& p1, const CArray& p2, const std::string& metric) {
    return dist(parse_metric(metric), to_hpd(p1), to_hpd(p2));
  }, py::arg("p1"), py::arg("p2"), py::arg("metric") = "riemannian");

  m.def("karcher_mean", [](const CArray& points, std::vector<double> weights, const std::string& metric) {
    const HpdCurve c = to_curve(points);
    if (weights.empty()) weights.assign(c.size(), 1.0);
    return from_hpd(karcher_mean(c, weights, parse_metric(metric)).matrix());
  }, py::arg("points"), py::arg("weights") = std::vector<double>{}, py::arg("metric") = "riemannian",
     "Weighted intrinsic mean of an (n, d, d) stack; equal weights by default.");

  py::class_<WaveletDecomposition>(m, "WaveletDecomposition")
      .def_property_readonly("levels", &WaveletDecomposition::levels)
      .def_property_readonly("dim", &WaveletDecomposition::dim)
      .def_property_readonly("order", [](const WaveletDecomposition& w) { return w.options.order; })
      .def_property_readonly("metric", [](const WaveletDecomposition& w) {
        return std::string(to_string(w.options.metric));
      })
      .def_property_readonly("coarsest", [](const WaveletDecomposition& w) { return from_hpd(w.coarsest); })
      .def("coefficients", [](const WaveletDecomposition& w, int j) {
        std::vector<Matrix> out;
        for (const auto& c : w.scales.at(static_cast<std::size_t>(j - 1))) out.push_back(c.coeff);
        return from_matrices(out);
      }, py::arg("j"), "Raw coefficients D_{j,k} at scale j (1-based), in chart coordinates.")
      .def("whitened", [](const WaveletDecomposition& w, int j) {
        return from_matrices(whiten(w).at(static_cast<std::size_t>(j - 1)));
      }, py::arg("j"))
      .def("traces", [](const WaveletDecomposition& w) { return trace_pyramid(w).scales; },
           "Real traces of the whitened coefficients, one list per scale.");

  m.def("forward", [](const CArray& curve, int order, const std::string& metric, const std::string& method) {
    return forward(to_curve(curve), transform_options(order, metric, method));
  }, py::arg("curve"), py::arg("order") = 5, py::arg("metric") = "riemannian", py::arg("method") = "fast");

  m.def("inverse", [](const WaveletDecomposition& w) { return from_curve(inverse(w)); }, py::arg("decomposition"));

  m.def("cpress_denoise", [](const CArray& curve, double lambda, int order, const std::string& metric) {
    return from_curve(cpress_denoise(to_curve(curve), transform_options(order, metric, "fast"), lambda));
  }, py::arg("curve"), py::arg("lam"), py::arg("order") = 5, py::arg("metric") = "riemannian");

  m.def("noise_variance", [](Index d, int B, int levels, int order) {
    return noise_variance({.d = d, .B = B, .levels = levels, .order = order});
  }, py::arg("d"), py::arg("B"), py::arg("levels"), py::arg("order"));

  m.def("bias_constant", &bias_constant, py::arg("d"), py::arg("B"));

  m.def("dpss_tapers", [](Index T, double W, int B) {
    const auto t = dpss_tapers(T, W, B);
    RArray tapers({static_cast<py::ssize_t>(t.count()), static_cast<py::ssize_t>(t.length())});
    for (int b = 0; b < t.count(); ++b)
      for (Index i = 0; i < t.length(); ++i) *tapers.mutable_data(b, i) = t.tapers(i, b);
    return py::make_tuple(tapers, std::vector<double>(t.eigenvalues.data(),
                                                      t.eigenvalues.data() + t.eigenvalues.size()));
  }, py::arg("T"), py::arg("W"), py::arg("B"), "Returns (tapers of shape (B, T), eigenvalues).");

  m.def("multitaper_periodogram", [](const RArray& x, int B, double nw, const std::string& taper) {
    const TimeSeries ts = to_series(x);
    EstimateOptions o;
    o.B = B;
    o.nw = nw;
    o.taper = parse_taper(taper);
    const int b = resolve_tapers(o, ts.dim());
    return from_curve(multitaper_periodogram(ts, make_tapers(o, ts.length(), b)));
  }, py::arg("x"), py::arg("B") = 0, py::arg("nw") = 0.0, py::arg("taper") = "dpss");

  m.def("estimate_spectrum",
        [](const RArray& x, int B, int order, const std::string& metric, const std::string& policy, double nw,
           const std::string& taper, bool bias_correction) {
          EstimateOptions o;
          o.B = B;
          o.order = order;
          o.metric = parse_metric(metric);
          o.policy = parse_policy(policy);
          o.nw = nw;
          o.taper = parse_taper(taper);
          o.bias_correction = bias_correction;
          const auto est = estimate_spectrum(to_series(x), o);
          py::dict out;
          out["estimate"] = from_curve(est.curve);
          out["frequencies"] = est.frequencies;
          out["periodogram"] = from_curve(est.periodogram);
          out["B"] = est.B;
          out["lambda"] = est.lambda;
          out["policy"] = to_string(est.policy);
          return out;
        },
        py::arg("x"), py::arg("B") = 0, py::arg("order") = 5, py::arg("metric") = "riemannian",
        py::arg("policy") = "universal", py::arg("nw") = 0.0, py::arg("taper") = "dpss",
        py::arg("bias_correction") = true,
        "Multitaper periodogram, bias correction and wavelet denoising of a (d, T) series.");

  m.def("test_spectrum", [](const std::string& shape, std::size_t n, Index d) {
    return from_curve(make_test_spectrum(preset_spectrum(parse_spectrum_shape(shape), n, d)));
  }, py::arg("shape"), py::arg("n"), py::arg("d"));

  m.def("simulate_timeseries", [](const CArray& spectrum, Index T, std::uint64_t seed, std::uint64_t stream) {
    auto rng = make_rng(seed, stream);
    return from_series(cramer_timeseries(to_curve(spectrum), T, rng));
  }, py::arg("spectrum"), py::arg("T"), py::arg("seed"), py::arg("stream") = 0);

  m.def("isre", [](const CArray& estimate, const CArray& truth) {
    return isre(to_curve(estimate), to_curve(truth));
  }, py::arg("estimate"), py::arg("truth"));

  m.def("nn_regression", [](const CArray& curve, int k, const std::string& metric) {
    return from_curve(nn_regression(to_curve(curve), k, parse_metric(metric)));
  }, py::arg("curve"), py::arg("k"), py::arg("metric") = "riemannian");
}
