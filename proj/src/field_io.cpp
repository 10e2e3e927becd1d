#include "mlnl/field_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace mlnl {

namespace {
constexpr char kMagic[4] = {'M', 'L', 'N', 'F'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw FormatError(std::string("field file truncated while reading ") + what);
  return v;
}
}  // namespace

void write_field(const ScalarField& field, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kFieldFormatVersion);
  put<std::uint8_t>(os, static_cast<std::uint8_t>(field.grid.dim));
  put<std::uint8_t>(os, 0);
  put<std::uint8_t>(os, 0);
  put<std::uint8_t>(os, 0);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(field.grid.points_per_axis));
  put<double>(os, field.grid.half_width);
  os.write(reinterpret_cast<const char*>(field.values.data()),
           static_cast<std::streamsize>(sizeof(double) * field.values.size()));
  if (!os) throw IoError("write failed: " + path);
}

ScalarField read_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw FormatError("bad magic in field file: " + path);
  const auto version = get<std::uint32_t>(is, "version");
  if (version > kFieldFormatVersion)
    throw UnsupportedVersionError("field file version " + std::to_string(version) +
                                  " is newer than supported version " +
                                  std::to_string(kFieldFormatVersion));
  const auto dim = get<std::uint8_t>(is, "dim");
  get<std::uint8_t>(is, "padding");
  get<std::uint8_t>(is, "padding");
  get<std::uint8_t>(is, "padding");
  const auto n = get<std::uint64_t>(is, "N");
  const auto half_width = get<double>(is, "half_width");
  if (dim < 1 || dim > 3) throw FormatError("field file has unsupported dim");
  GridSpec grid = GridSpec::make(dim, half_width, static_cast<int>(n));
  Eigen::ArrayXd values(grid.cell_count());
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(sizeof(double) * values.size()));
  if (!is) throw FormatError("field file payload truncated: " + path);
  return ScalarField(grid, std::move(values));
}

}  // namespace mlnl
