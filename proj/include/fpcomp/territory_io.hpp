#pragma once

#include <filesystem>
#include <iosfwd>

#include "fpcomp/lattice_fpp.hpp"

namespace fpcomp {

// Binary winner-grid format, all integers little-endian:
//   magic   "FPTG"            4 bytes
//   version u32 = 1
//   d       u32
//   k       u32
//   flags   u32   bit 0: winning times included
//   seed    u64
//   lo[d], hi[d]  i64 each
//   winners       i16 per site, row-major (axis 0 fastest);
//                 0..k-1 type index, -1 tie, -2 unreached
//   times         f64 per site when flag bit 0 is set (+inf = unreached)
void write_territory_binary(const std::filesystem::path& path, const TerritoryMap& map,
                            bool include_times = true);
TerritoryMap read_territory_binary(const std::filesystem::path& path);

// CSV: one row per site, columns c0..c{d-1}, winner, time.
void write_territory_csv(std::ostream& os, const TerritoryMap& map);

void write_ppm(const std::filesystem::path& path, const Image& img);

}  // namespace fpcomp
