#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "logsp/grid.hpp"

namespace logsp {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary dump: "LSPF", u32 version, u32 n, f64 L, then n*n f64 samples in
/// row-major order. Every number is little-endian.
inline constexpr std::uint32_t kFieldFormatVersion = 1;

std::vector<unsigned char> encode_field(const Field& f);
/// Builds the grid from the header. Throws FormatError on a bad magic, version,
/// size or truncated payload.
Field decode_field(const std::vector<unsigned char>& bytes);

void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

struct RadialSample {
  double r = 0.0;
  double value = 0.0;
};

/// Angular average in rings of width h: ring k collects the nodes with
/// k h <= |x| < (k + 1) h and reports r = (k + 1/2) h. Rings beyond L and empty
/// rings are omitted.
std::vector<RadialSample> radial_profile(const Field& f);

/// CSV with header "r,value".
void write_radial_profile(const std::filesystem::path& path, const Field& f);

}  // namespace logsp
