// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#include "hpdwave/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace hpdwave {

namespace {

constexpr std::string_view kMagic = "HPDC";
constexpr std::uint8_t kFlagMetric = 0x01;
constexpr std::uint8_t kFlagDecomposition = 0x02;

template <class T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

void put_matrix(std::string& out, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      put(out, m(r, c).real());
      put(out, m(r, c).imag());
    }
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw Error(ErrorKind::FormatError, std::string("truncated file while reading ") + what);
    }
    char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  Matrix matrix(Index d) {
    Matrix m(d, d);
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) {
        const double re = get<double>("matrix entry");
        const double im = get<double>("matrix entry");
        if (!std::isfinite(re) || !std::isfinite(im)) {
          throw Error(ErrorKind::FormatError, "non-finite matrix entry");
        }
        m(r, c) = Complex(re, im);
      }
    }
    return m;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

struct Header {
  Index d = 0;
  std::uint64_t n = 0;
  std::uint8_t flags = 0;
  std::optional<MetricKind> metric;
};

std::string encode_header(Index d, std::uint64_t n, std::uint8_t flags, std::optional<MetricKind> metric) {
  std::string out(kMagic);
  put(out, kHpdcVersion);
  put(out, static_cast<std::uint32_t>(d));
  put(out, n);
  if (metric) flags |= kFlagMetric;
  put(out, flags);
  if (metric) put(out, static_cast<std::uint8_t>(*metric));
  return out;
}

Header decode_header(Reader& in, std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != kMagic) {
    throw Error(ErrorKind::FormatError, "bad magic bytes, not an HPDC file");
  }
  for (int i = 0; i < 4; ++i) in.get<char>("magic");
  const auto version = in.get<std::uint8_t>("version");
  if (version != kHpdcVersion) {
    throw Error(ErrorKind::FormatError, "unsupported HPDC version " + std::to_string(version));
  }
  Header h;
  h.d = static_cast<Index>(in.get<std::uint32_t>("dimension"));
  h.n = in.get<std::uint64_t>("length");
  h.flags = in.get<std::uint8_t>("flags");
  if ((h.flags & ~(kFlagMetric | kFlagDecomposition)) != 0) {
    throw Error(ErrorKind::FormatError, "unknown HPDC flag bits");
  }
  if (h.flags & kFlagMetric) {
    const auto tag = in.get<std::uint8_t>("metric tag");
    if (tag > 3) throw Error(ErrorKind::FormatError, "unknown metric tag " + std::to_string(tag));
    h.metric = static_cast<MetricKind>(tag);
  }
  if (h.d < 1 || h.n < 1) throw Error(ErrorKind::FormatError, "HPDC needs d >= 1 and n >= 1");
  return h;
}

void expect_matrices(const Reader& in, const Header& h, std::uint64_t count) {
  const auto per = static_cast<std::uint64_t>(16 * h.d * h.d);
  if (count > in.remaining() / per || in.remaining() != count * per) {
    throw Error(ErrorKind::FormatError, "payload is " + std::to_string(in.remaining()) +
                                            " bytes, expected " + std::to_string(count) + " matrices of " +
                                            std::to_string(per) + " bytes");
  }
}

}  // namespace

std::string encode_curve(const HpdCurve& curve, std::optional<MetricKind> metric) {
  if (curve.empty()) throw Error(ErrorKind::EmptyInput, "cannot encode an empty curve");
  const Index d = curve.front().dim();
  std::string out = encode_header(d, curve.size(), 0, metric);
  out.reserve(out.size() + curve.size() * static_cast<std::size_t>(16 * d * d));
  for (const auto& p : curve) {
    if (p.dim() != d) throw Error(ErrorKind::DimMismatch, "curve dimensions differ");
    put_matrix(out, p.matrix());
  }
  return out;
}

CurveFile decode_curve(std::string_view bytes) {
  Reader in(bytes);
  const auto h = decode_header(in, bytes);
  if (h.flags & kFlagDecomposition) {
    throw Error(ErrorKind::FormatError, "file holds a wavelet decomposition, not a curve");
  }
  expect_matrices(in, h, h.n);
  CurveFile out;
  out.metric = h.metric;
  out.curve.reserve(h.n);
  for (std::uint64_t i = 0; i < h.n; ++i) {
    const Matrix m = in.matrix(h.d);
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() != 0.0) {
      throw Error(ErrorKind::FormatError, "matrix " + std::to_string(i) + " is not Hermitian");
    }
    try {
      out.curve.emplace_back(m);
    } catch (const Error& e) {
      throw Error(ErrorKind::FormatError, "matrix " + std::to_string(i) + " is not positive definite");
    }
  }
  return out;
}

std::string encode_decomposition(const WaveletDecomposition& decomp) {
  const Index d = decomp.dim();
  const std::uint64_t n = std::uint64_t{1} << decomp.levels();
  std::string out = encode_header(d, n, kFlagDecomposition, decomp.options.metric);
  put(out, static_cast<std::uint8_t>(decomp.options.order));
  put_matrix(out, decomp.coarsest);
  for (const auto& scale : decomp.scales) {
    for (const auto& c : scale) {
      put_matrix(out, c.coeff);
      put_matrix(out, c.base);
    }
  }
  return out;
}

WaveletDecomposition decode_decomposition(std::string_view bytes) {
  Reader in(bytes);
  const auto h = decode_header(in, bytes);
  if (!(h.flags & kFlagDecomposition)) {
    throw Error(ErrorKind::FormatError, "file holds a curve, not a wavelet decomposition");
  }
  if (!is_dyadic(h.n)) throw Error(ErrorKind::FormatError, "decomposition length is not a power of two");
  WaveletDecomposition out;
  out.options.metric = h.metric.value_or(MetricKind::Riemannian);
  out.options.order = in.get<std::uint8_t>("order");
  if (out.options.order < 1 || out.options.order % 2 == 0) {
    throw Error(ErrorKind::FormatError, "invalid refinement order " + std::to_string(out.options.order));
  }
  expect_matrices(in, h, 2 * h.n - 1);
  out.coarsest = in.matrix(h.d);
  const int levels = dyadic_levels(h.n);
  out.scales.resize(static_cast<std::size_t>(levels));
  for (int j = 1; j <= levels; ++j) {
    auto& scale = out.scales[static_cast<std::size_t>(j) - 1];
    scale.resize(std::size_t{1} << (j - 1));
    for (auto& c : scale) {
      c.coeff = in.matrix(h.d);
      c.base = in.matrix(h.d);
    }
  }
  return out;
}

bool is_decomposition(std::string_view bytes) {
  Reader in(bytes);
  return (decode_header(in, bytes).flags & kFlagDecomposition) != 0;
}

std::string encode_timeseries(const TimeSeries& ts) {
  std::string out = "t";
  for (Index c = 0; c < ts.dim(); ++c) out += "\tch" + std::to_string(c);
  out += '\n';
  char buf[64];
  for (Index t = 0; t < ts.length(); ++t) {
    out += std::to_string(t);
    for (Index c = 0; c < ts.dim(); ++c) {
      const auto r = std::to_chars(buf, buf + sizeof buf, ts.data(c, t), std::chars_format::general, 17);
      out += '\t';
      out.append(buf, r.ptr);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

}  // namespace

TimeSeries decode_timeseries(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw Error(ErrorKind::FormatError, "empty time series file");
  const auto header = split_tabs(lines.front());
  if (header.size() < 2 || header.front() != "t") {
    throw Error(ErrorKind::FormatError, "time series header must be 't\\tch0\\t...'");
  }
  const auto d = static_cast<Index>(header.size() - 1);
  const auto T = static_cast<Index>(lines.size() - 1);
  TimeSeries ts;
  ts.data.resize(d, T);
  for (Index t = 0; t < T; ++t) {
    const auto fields = split_tabs(lines[static_cast<std::size_t>(t) + 1]);
    if (static_cast<Index>(fields.size()) != d + 1) {
      throw Error(ErrorKind::FormatError, "row " + std::to_string(t + 1) + " has " +
                                              std::to_string(fields.size()) + " fields, expected " +
                                              std::to_string(d + 1));
    }
    for (Index c = 0; c < d; ++c) {
      const auto f = fields[static_cast<std::size_t>(c) + 1];
      double v = 0.0;
      const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (r.ec != std::errc() || r.ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::FormatError, "row " + std::to_string(t + 1) + ": bad value '" +
                                                std::string(f) + "'");
      }
      ts.data(c, t) = v;
    }
  }
  return ts;
}

std::string encode_traces(const TracePyramid& traces, const LabelTree& labels) {
  if (traces.levels() != labels.levels()) throw Error(ErrorKind::ShapeMismatch, "label tree shape");
  std::string out = "j,k,trace,label\n";
  char buf[64];
  for (int j = 1; j <= traces.levels(); ++j) {
    for (std::size_t k = 0; k < traces.scales[static_cast<std::size_t>(j) - 1].size(); ++k) {
      const auto r = std::to_chars(buf, buf + sizeof buf, traces.at(j, k));
      out += std::to_string(j) + "," + std::to_string(k) + "," + std::string(buf, r.ptr) + "," +
             std::to_string(static_cast<int>(labels.at(j, k))) + "\n";
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed for '" + path.string() + "'");
  return std::move(buf).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::IoError, "write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::IoError, "cannot rename onto '" + path.string() + "'");
  }
}

}  // namespace hpdwave
