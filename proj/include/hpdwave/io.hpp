// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hpdwave Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "hpdwave/shrinkage.hpp"
#include "hpdwave/spectral.hpp"

namespace hpdwave {

// HPDC layout, little-endian:
//   "HPDC" | u8 version = 1 | u32 d | u64 n | u8 flags | [u8 metric] | payload
// flags bit0: metric tag byte present (0 riemannian, 1 logeuclidean,
//             2 cholesky, 3 euclidean).
// flags bit1: wavelet decomposition. The payload starts with a u8 refinement
//             order, then the coarsest midpoint, then for j = 1..J and
//             k = 0..2^{j-1}-1 the pair (coefficient, base point). n is the
//             length 2^J of the curve it reconstructs.
// Matrices are d*d complex entries, row-major, each as (re f64, im f64).

inline constexpr std::uint8_t kHpdcVersion = 1;
inline constexpr std::size_t kHpdcHeaderBytes = 18;

struct CurveFile {
  HpdCurve curve;
  std::optional<MetricKind> metric;
};

std::string encode_curve(const HpdCurve& curve, std::optional<MetricKind> metric = std::nullopt);
/// Validates structure and positive-definiteness; throws FormatError.
CurveFile decode_curve(std::string_view bytes);

std::string encode_decomposition(const WaveletDecomposition& decomp);
WaveletDecomposition decode_decomposition(std::string_view bytes);

/// True if the buffer carries the decomposition flag.
bool is_decomposition(std::string_view bytes);

/// Header "t\tch0\t...", one row per sample, 17 significant digits.
std::string encode_timeseries(const TimeSeries& ts);
TimeSeries decode_timeseries(std::string_view text);

/// "j,k,trace,label" rows for every coefficient.
std::string encode_traces(const TracePyramid& traces, const LabelTree& labels);

/// Throws IoError.
std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace hpdwave
