#ifndef ASEP_SNAPSHOT_HPP
#define ASEP_SNAPSHOT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asep/lattice.hpp"

namespace asep {

// Portable binary configuration dump. Layout, all little-endian:
//   bytes 0..3   magic "ASNP"
//   u32          format version (1)
//   u32          dim
//   u32          inv_eps
//   u32          flags (bit 0: axis-0 wraps)
//   u64          seed
//   f64          microscopic time (IEEE binary64)
//   bytes        occupancy, packed LSB-first, ceil(site_count/8) bytes
struct Snapshot {
  int dim = 0;
  int inv_eps = 0;
  bool wrap_axis0 = false;
  uint64_t seed = 0;
  double micro_time = 0.0;
  std::vector<uint8_t> occupancy;  // one byte per site, 0 or 1
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

Snapshot make_snapshot(const Lattice& lattice,
                       std::span<const uint8_t> occupancy, uint64_t seed,
                       double micro_time);

}  // namespace asep

#endif
