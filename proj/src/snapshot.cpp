#include "chemoflux/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace chemoflux {

static_assert(std::endian::native == std::endian::little,
              "CFX1 I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'C', 'F', 'X', '1'};

void put_u32(std::ofstream& out, std::uint32_t value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t value = 0;
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, std::span<const ScalarField> components) {
  if (components.empty()) throw std::invalid_argument("write_snapshot: no components");
  const Grid& grid = components.front().grid();
  for (const auto& c : components) require_same_grid(grid, c.grid(), "write_snapshot");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_snapshot: cannot open " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(grid.resolution()));
  put_u32(out, static_cast<std::uint32_t>(components.size()));
  // Reserved word pads the header to 16 bytes.
  put_u32(out, 0);
  for (const auto& c : components) {
    out.write(reinterpret_cast<const char*>(c.samples().data()),
              static_cast<std::streamsize>(c.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("write_snapshot: write failed for " + path.string());
}

std::vector<ScalarField> read_snapshot(const std::filesystem::path& path, double side_length) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_snapshot: cannot open " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (magic != kMagic) throw std::runtime_error("read_snapshot: bad magic in " + path.string());
  const std::uint32_t n = get_u32(in);
  const std::uint32_t count = get_u32(in);
  (void)get_u32(in);
  if (!in) throw std::runtime_error("read_snapshot: truncated header in " + path.string());

  const Grid grid(side_length, n);
  std::vector<ScalarField> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<double> samples(grid.size());
    in.read(reinterpret_cast<char*>(samples.data()),
            static_cast<std::streamsize>(samples.size() * sizeof(double)));
    if (!in) throw std::runtime_error("read_snapshot: truncated payload in " + path.string());
    out.emplace_back(grid, std::move(samples));
  }
  return out;
}

}  // namespace chemoflux
