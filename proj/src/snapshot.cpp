#include "asep/snapshot.hpp"

#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace asep {

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

uint32_t get_u32(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
  return v;
}

uint64_t get_u64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
  return v;
}

constexpr size_t kHeaderSize = 4 + 4 + 4 + 4 + 4 + 8 + 8;

int64_t site_count_of(int inv_eps, int dim) {
  int64_t n = 1;
  for (int i = 0; i < dim; ++i) n *= 2 * inv_eps + 1;
  return n;
}

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const int64_t sites = site_count_of(snap.inv_eps, snap.dim);
  if (int64_t(snap.occupancy.size()) != sites)
    throw std::invalid_argument("snapshot: occupancy size mismatch");

  std::vector<uint8_t> buf;
  buf.reserve(kHeaderSize + size_t((sites + 7) / 8));
  buf.push_back('A');
  buf.push_back('S');
  buf.push_back('N');
  buf.push_back('P');
  put_u32(buf, 1);
  put_u32(buf, uint32_t(snap.dim));
  put_u32(buf, uint32_t(snap.inv_eps));
  put_u32(buf, snap.wrap_axis0 ? 1u : 0u);
  put_u64(buf, snap.seed);
  uint64_t bits;
  std::memcpy(&bits, &snap.micro_time, 8);
  put_u64(buf, bits);

  size_t base = buf.size();
  buf.resize(base + size_t((sites + 7) / 8), 0);
  for (int64_t s = 0; s < sites; ++s)
    if (snap.occupancy[s]) buf[base + size_t(s / 8)] |= uint8_t(1u << (s % 8));

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("snapshot: cannot open " + path);
  size_t written = std::fwrite(buf.data(), 1, buf.size(), f);
  std::fclose(f);
  if (written != buf.size())
    throw std::runtime_error("snapshot: short write to " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("snapshot: cannot open " + path);
  std::vector<uint8_t> buf;
  uint8_t chunk[65536];
  size_t n;
  while ((n = std::fread(chunk, 1, sizeof chunk, f)) > 0)
    buf.insert(buf.end(), chunk, chunk + n);
  std::fclose(f);

  if (buf.size() < kHeaderSize || std::memcmp(buf.data(), "ASNP", 4) != 0)
    throw std::runtime_error("snapshot: bad magic in " + path);
  if (get_u32(buf.data() + 4) != 1)
    throw std::runtime_error("snapshot: unsupported version in " + path);

  Snapshot snap;
  snap.dim = int(get_u32(buf.data() + 8));
  snap.inv_eps = int(get_u32(buf.data() + 12));
  snap.wrap_axis0 = get_u32(buf.data() + 16) != 0;
  snap.seed = get_u64(buf.data() + 20);
  uint64_t bits = get_u64(buf.data() + 28);
  std::memcpy(&snap.micro_time, &bits, 8);

  const int64_t sites = site_count_of(snap.inv_eps, snap.dim);
  if (buf.size() != kHeaderSize + size_t((sites + 7) / 8))
    throw std::runtime_error("snapshot: truncated file " + path);
  snap.occupancy.resize(size_t(sites));
  for (int64_t s = 0; s < sites; ++s)
    snap.occupancy[s] =
        (buf[kHeaderSize + size_t(s / 8)] >> (s % 8)) & 1u;
  return snap;
}

Snapshot make_snapshot(const Lattice& lattice,
                       std::span<const uint8_t> occupancy, uint64_t seed,
                       double micro_time) {
  Snapshot snap;
  snap.dim = lattice.dim();
  snap.inv_eps = lattice.inv_eps();
  snap.wrap_axis0 = lattice.wraps_axis0();
  snap.seed = seed;
  snap.micro_time = micro_time;
  snap.occupancy.assign(occupancy.begin(), occupancy.end());
  return snap;
}

}  // namespace asep
