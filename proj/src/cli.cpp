// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <map>
#include <ostream>

#include "hpdwave/io.hpp"

namespace hpdwave::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An Error raised inside a named pipeline stage.
struct StageError : std::runtime_error {
  StageError(std::string stage, const Error& e)
      : std::runtime_error(stage + ": " + e.what()), kind(e.kind()) {}
  ErrorKind kind;
};

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::IoError || kind == ErrorKind::FormatError ? kIo : kPipeline;
}

MetricKind metric_flag(const std::string& text) {
  try {
    return parse_metric(text);
  } catch (const Error& e) {
    throw UsageError(std::string("--metric: ") + e.what());
  }
}

void check_order(int order) {
  if (order < 1 || order % 2 == 0) throw UsageError("--order must be an odd positive integer");
}

struct SimulateArgs {
  std::string spectrum = "bumps";
  std::size_t n = 0;
  Index d = 2;
  Index T = 0;
  std::uint64_t seed = 1;
  std::string out_spectrum;
  std::string out_ts;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.n == 0 && a.T == 0) throw UsageError("one of --n or --T is required");
  std::size_t n = a.n;
  if (n == 0) {
    if (a.T % 2 != 0) throw UsageError("--T must be even (T = 2n)");
    n = static_cast<std::size_t>(a.T / 2);
  }
  if (!is_dyadic(n)) {
    throw UsageError("--n must be dyadic (a power of two), got " + std::to_string(n));
  }
  if (a.T != 0 && a.T != 2 * static_cast<Index>(n)) throw UsageError("--T must equal 2 * --n");
  if (a.d < 1) throw UsageError("--d must be at least 1");
  SpectrumShape shape;
  try {
    shape = parse_spectrum_shape(a.spectrum);
  } catch (const Error& e) {
    throw UsageError(std::string("--spectrum: ") + e.what());
  }
  const auto truth = stage("spectrum", [&] { return make_test_spectrum(preset_spectrum(shape, n, a.d)); });
  Rng rng = make_rng(a.seed);
  const auto ts = stage("synthesis", [&] { return cramer_timeseries(truth, 2 * static_cast<Index>(n), rng); });
  write_file_atomic(a.out_spectrum, encode_curve(truth));
  write_file_atomic(a.out_ts, encode_timeseries(ts));
  out << "wrote " << a.out_spectrum << " (n=" << n << ", d=" << a.d << ") and " << a.out_ts
      << " (T=" << 2 * n << ")\n";
}

struct EstimateArgs {
  std::string in;
  int B = 0;
  int order = 5;
  std::string metric = "riemannian";
  std::string policy = "universal";
  std::string taper = "dpss";
  double nw = 0.0;
  bool truncate = false;
  bool no_bias = false;
  bool mad_noise = false;
  std::string out;
  std::string emit_traces;
};

void cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  check_order(a.order);
  EstimateOptions options;
  options.B = a.B;
  options.order = a.order;
  options.metric = metric_flag(a.metric);
  try {
    options.policy = parse_policy(a.policy);
  } catch (const Error& e) {
    throw UsageError(std::string("--policy: ") + e.what());
  }
  if (a.taper == "sine") {
    options.taper = TaperKind::Sine;
  } else if (a.taper != "dpss") {
    throw UsageError("--taper must be dpss or sine");
  }
  if (a.B < 0) throw UsageError("--B must be nonnegative");
  if (a.nw < 0.0) throw UsageError("--nw must be nonnegative");
  options.nw = a.nw;
  options.bias_correction = !a.no_bias;
  options.mad_noise = a.mad_noise;

  TimeSeries ts = decode_timeseries(read_file(a.in));
  if (a.truncate) {
    std::size_t n = 1;
    while (2 * n <= static_cast<std::size_t>(ts.length() / 2)) n *= 2;
    if (ts.length() < 2) throw StageError("input", Error(ErrorKind::EmptyInput, "series too short"));
    ts.data = ts.data.leftCols(static_cast<Index>(2 * n)).eval();
  } else if (ts.length() % 2 != 0 || !is_dyadic(static_cast<std::size_t>(ts.length() / 2))) {
    throw StageError("periodogram",
                     Error(ErrorKind::NotDyadic, "series length " + std::to_string(ts.length()) +
                                                     " is not twice a power of two (see --truncate-dyadic)"));
  }
  const auto est = stage("estimate", [&] { return estimate_spectrum(ts, options); });
  write_file_atomic(a.out, encode_curve(est.curve, options.metric));
  if (!a.emit_traces.empty()) write_file_atomic(a.emit_traces, encode_traces(est.traces, est.labels));
  out << "wrote " << a.out << " (n=" << est.curve.size() << ", d=" << est.d << ", B=" << est.B
      << ", lambda=" << est.lambda << ")\n";
}

struct TransformArgs {
  std::string in;
  bool forward = false;
  bool inverse = false;
  int order = 5;
  std::string metric;
  std::string out;
};

void cmd_transform(const TransformArgs& a, std::ostream& out) {
  if (a.forward == a.inverse) throw UsageError("exactly one of --forward or --inverse is required");
  check_order(a.order);
  const std::string bytes = read_file(a.in);
  if (a.forward) {
    const auto file = decode_curve(bytes);
    TransformOptions options;
    options.order = a.order;
    options.metric = !a.metric.empty() ? metric_flag(a.metric) : file.metric.value_or(MetricKind::Riemannian);
    const auto decomp = stage("forward transform", [&] { return forward(file.curve, options); });
    write_file_atomic(a.out, encode_decomposition(decomp));
    out << "wrote " << a.out << " (" << decomp.levels() << " scales)\n";
  } else {
    const auto decomp = decode_decomposition(bytes);
    if (!a.metric.empty() && metric_flag(a.metric) != decomp.options.metric) {
      throw UsageError("--metric differs from the metric stored in the decomposition");
    }
    const auto curve = stage("inverse transform", [&] { return inverse(decomp); });
    write_file_atomic(a.out, encode_curve(curve, decomp.options.metric));
    out << "wrote " << a.out << " (n=" << curve.size() << ")\n";
  }
}

void cmd_benchmark(const std::string& config_path, const std::string& out_path, std::ostream& out) {
  BenchmarkConfig config;
  try {
    config = parse_benchmark_config(read_file(config_path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IoError) throw;
    throw UsageError(std::string("--config: ") + e.what());
  }
  const auto rows = stage("benchmark", [&] { return run_benchmark(config); });
  write_file_atomic(out_path, benchmark_csv(rows));
  for (const auto& s : summarize(rows)) {
    out << s.estimator << (s.params.empty() ? "" : " [" + s.params + "]") << ": median ISRE " << s.median
        << ", mean " << s.mean << ", failures " << s.failures << "/" << s.runs << "\n";
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw Error(ErrorKind::InvalidArgument, "key '" + std::string(key) + "': bad value '" + std::string(v) + "'");
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(trim(v.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

BenchmarkConfig parse_benchmark_config(std::string_view text) {
  std::map<std::string, std::string, std::less<>> kv;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::InvalidArgument, "line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (!kv.emplace(key, std::string(value)).second) {
      throw Error(ErrorKind::InvalidArgument, "duplicate key '" + key + "'");
    }
  }
  static const std::vector<std::string> known = {"spectrum", "d", "T", "replicates", "seed", "B", "order",
                                                 "metric", "nw", "taper", "estimators", "nn_k",
                                                 "cpress_lambda"};
  for (const auto& [key, value] : kv) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorKind::InvalidArgument, "unknown key '" + key + "'");
    }
  }
  for (const char* key : {"spectrum", "d", "T", "replicates", "seed"}) {
    if (!kv.contains(key)) throw Error(ErrorKind::InvalidArgument, "missing required key '" + std::string(key) + "'");
  }
  BenchmarkConfig c;
  const auto d = parse_number<Index>("d", kv.at("d"));
  c.T = parse_number<Index>("T", kv.at("T"));
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "key 'd' must be >= 1");
  if (c.T < 2 || c.T % 2 != 0 || !is_dyadic(static_cast<std::size_t>(c.T / 2))) {
    throw Error(ErrorKind::InvalidArgument, "key 'T' must be twice a power of two");
  }
  c.spectrum = preset_spectrum(parse_spectrum_shape(kv.at("spectrum")), static_cast<std::size_t>(c.T / 2), d);
  c.replicates = parse_number<int>("replicates", kv.at("replicates"));
  if (c.replicates < 1) throw Error(ErrorKind::InvalidArgument, "key 'replicates' must be >= 1");
  c.seed = parse_number<std::uint64_t>("seed", kv.at("seed"));
  if (auto it = kv.find("B"); it != kv.end()) c.B = parse_number<int>("B", it->second);
  if (auto it = kv.find("order"); it != kv.end()) c.order = parse_number<int>("order", it->second);
  if (c.order < 1 || c.order % 2 == 0) throw Error(ErrorKind::InvalidArgument, "key 'order' must be odd");
  if (auto it = kv.find("metric"); it != kv.end()) c.metric = parse_metric(it->second);
  if (auto it = kv.find("nw"); it != kv.end()) c.nw = parse_number<double>("nw", it->second);
  if (auto it = kv.find("taper"); it != kv.end()) {
    if (it->second == "sine") {
      c.taper = TaperKind::Sine;
    } else if (it->second != "dpss") {
      throw Error(ErrorKind::InvalidArgument, "key 'taper' must be dpss or sine");
    }
  }
  if (auto it = kv.find("estimators"); it != kv.end()) {
    c.estimators.clear();
    for (auto e : split_commas(it->second)) {
      static const std::vector<std::string_view> names = {"raw", "wavelet-universal", "wavelet-cv",
                                                          "wavelet-cpress", "nn"};
      if (std::find(names.begin(), names.end(), e) == names.end()) {
        throw Error(ErrorKind::InvalidArgument, "key 'estimators': unknown estimator '" + std::string(e) + "'");
      }
      c.estimators.emplace_back(e);
    }
  }
  if (auto it = kv.find("nn_k"); it != kv.end()) {
    c.nn_k.clear();
    for (auto k : split_commas(it->second)) c.nn_k.push_back(parse_number<int>("nn_k", k));
  }
  if (auto it = kv.find("cpress_lambda"); it != kv.end()) {
    c.cpress_lambda = parse_number<double>("cpress_lambda", it->second);
  }
  return c;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intrinsic wavelet estimation of HPD spectral matrices", "hpdwave"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hpdwave 0.1.0");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a test spectrum and a time series from it");
  simulate->add_option("--spectrum", sim.spectrum, "bumps, peaks or smooth")->capture_default_str();
  simulate->add_option("--n", sim.n, "Number of frequencies (power of two)");
  simulate->add_option("--d", sim.d, "Number of channels")->capture_default_str();
  simulate->add_option("--T", sim.T, "Series length, 2n");
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out-spectrum", sim.out_spectrum, "Output HPDC file for the true spectrum")->required();
  simulate->add_option("--out-ts", sim.out_ts, "Output TSV file for the series")->required();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the spectral matrix of a time series");
  estimate->add_option("--in", est.in, "Input TSV time series")->required();
  estimate->add_option("--B", est.B, "Number of tapers (default d)");
  estimate->add_option("--order", est.order, "Refinement order N")->capture_default_str();
  estimate->add_option("--metric", est.metric, "riemannian, logeuclidean, cholesky or euclidean")
      ->capture_default_str();
  estimate->add_option("--policy", est.policy, "universal, cpress:<lambda>, cv or cv:<l1>,<l2>,...")
      ->capture_default_str();
  estimate->add_option("--taper", est.taper, "dpss or sine")->capture_default_str();
  estimate->add_option("--nw", est.nw, "DPSS time-bandwidth product (default B/2 + 1)");
  estimate->add_flag("--truncate-dyadic", est.truncate, "Truncate the series to twice a power of two");
  estimate->add_flag("--no-bias-correction", est.no_bias, "Skip the Wishart bias correction");
  estimate->add_flag("--mad-noise", est.mad_noise, "Estimate the noise level by MAD");
  estimate->add_option("--out", est.out, "Output HPDC file")->required();
  estimate->add_option("--emit-traces", est.emit_traces, "Optional CSV of coefficient traces and labels");

  std::string config_path;
  std::string bench_out;
  auto* benchmark = app.add_subcommand("benchmark", "Run a Monte-Carlo benchmark");
  benchmark->add_option("--config", config_path, "key = value configuration file")->required();
  benchmark->add_option("--out", bench_out, "Output CSV")->required();

  TransformArgs tr;
  auto* transform = app.add_subcommand("transform", "Forward or inverse wavelet transform of an HPDC curve");
  transform->add_option("--in", tr.in, "Input HPDC file")->required();
  auto* fwd = transform->add_flag("--forward", tr.forward, "Curve to decomposition");
  auto* inv = transform->add_flag("--inverse", tr.inverse, "Decomposition to curve");
  fwd->excludes(inv);
  transform->add_option("--order", tr.order, "Refinement order N")->capture_default_str();
  transform->add_option("--metric", tr.metric, "Metric (default: file tag, else riemannian)");
  transform->add_option("--out", tr.out, "Output HPDC file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
      err << "run '" << sub->get_name() << " --help' for usage\n";
    }
    return kUsage;
  }

  try {
    if (simulate->parsed()) cmd_simulate(sim, out);
    if (estimate->parsed()) cmd_estimate(est, out);
    if (benchmark->parsed()) cmd_benchmark(config_path, bench_out, out);
    if (transform->parsed()) cmd_transform(tr, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const StageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kPipeline;
  }
  return kSuccess;
}

}  // namespace hpdwave::cli
