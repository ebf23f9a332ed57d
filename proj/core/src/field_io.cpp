#include "logsp/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "format.hpp"

namespace logsp {

namespace {

constexpr unsigned char kMagic[4] = {'L', 'S', 'P', 'F'};
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 8;

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t k = 0; k < sizeof(T); ++k) out.push_back(static_cast<unsigned char>(bits >> (8 * k)));
}

template <class T>
T get_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) bits |= static_cast<U>(p[k]) << (8 * k);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::vector<unsigned char> encode_field(const Field& f) {
  const std::size_t n = f.n();
  std::vector<unsigned char> out;
  out.reserve(kHeaderSize + 8 * n * n);
  for (unsigned char c : kMagic) out.push_back(c);
  put_le(out, kFieldFormatVersion);
  put_le(out, static_cast<std::uint32_t>(n));
  put_le(out, f.grid().half_width());
  for (double x : f.values()) put_le(out, x);
  return out;
}

Field decode_field(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a field dump (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kFieldFormatVersion) {
    throw FormatError("unsupported field dump version " + std::to_string(version));
  }
  const std::size_t n = get_le<std::uint32_t>(bytes.data() + 8);
  const double L = get_le<double>(bytes.data() + 12);
  if (bytes.size() != kHeaderSize + 8 * n * n) {
    throw FormatError("field dump payload has " + std::to_string(bytes.size() - kHeaderSize) + " bytes, expected " +
                      std::to_string(8 * n * n));
  }
  Grid2D grid = [&] {
    try {
      return make_grid(n, L);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("field dump header: ") + e.what());
    }
  }();
  std::vector<double> values(n * n);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = get_le<double>(bytes.data() + kHeaderSize + 8 * k);
  return Field(std::move(grid), std::move(values));
}

void write_field(const std::filesystem::path& path, const Field& f) {
  const std::vector<unsigned char> bytes = encode_field(f);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_field(bytes);
}

std::vector<RadialSample> radial_profile(const Field& f) {
  const Grid2D& g = f.grid();
  const double h = g.spacing();
  const auto rings = static_cast<std::size_t>(std::floor(g.half_width() / h));
  std::vector<double> sum(rings, 0.0);
  std::vector<std::size_t> count(rings, 0);
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double r = std::hypot(g.node(i), g.node(j));
      const auto k = static_cast<std::size_t>(r / h);
      if (k >= rings) continue;
      sum[k] += f(i, j);
      ++count[k];
    }
  }
  std::vector<RadialSample> out;
  for (std::size_t k = 0; k < rings; ++k) {
    if (count[k] > 0) out.push_back({(static_cast<double>(k) + 0.5) * h, sum[k] / static_cast<double>(count[k])});
  }
  return out;
}

void write_radial_profile(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "r,value\n";
  for (const RadialSample& s : radial_profile(f)) out << detail::format_double(s.r) << ',' << detail::format_double(s.value) << '\n';
}

}  // namespace logsp
