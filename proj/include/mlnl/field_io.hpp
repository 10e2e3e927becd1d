#pragma once

#include <string>

#include "mlnl/grid.hpp"

namespace mlnl {

/// Binary field file, little-endian:
///   magic "MLNF" (4 bytes), u32 version = 1, u8 dim, u8 padding x3,
///   u64 N, f64 half_width, then N^dim f64 values row-major.
void write_field(const ScalarField& field, const std::string& path);
ScalarField read_field(const std::string& path);

constexpr std::uint32_t kFieldFormatVersion = 1;

}  // namespace mlnl
