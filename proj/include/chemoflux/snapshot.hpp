#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "chemoflux/field.hpp"

namespace chemoflux {

/// CFX1 raw snapshot: "CFX1", u32 N, u32 component count, then count * N * N
/// little-endian doubles, row-major, one component after another.
void write_snapshot(const std::filesystem::path& path, std::span<const ScalarField> components);

/// The format does not store L, so the caller supplies it.
std::vector<ScalarField> read_snapshot(const std::filesystem::path& path, double side_length);

}  // namespace chemoflux
