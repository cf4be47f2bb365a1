#pragma once

// Binary field snapshots.
//
//   offset  size  content
//   0       4     magic "DKLB"
//   4       4     version (u32, currently 1)
//   8       8     N (u64)
//   16      8     L (f64)
//   24      8     t (f64)
//   32      1     is_real (u8)
//   33      16*N  coefficients as (f64 re, f64 im), FFT order
//
// All integers and doubles are little-endian regardless of host order.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dklb/grid.hpp"

namespace dklb {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderSize = 33;

struct Snapshot {
  SpectralField field;
  double t;
};

std::vector<std::uint8_t> encode_snapshot(const SpectralField& f, double t);

/// Throws ValidationError on bad magic, unsupported version or truncation.
/// The grid's dealias fraction is not stored and must be supplied.
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes,
                         double dealias_fraction = 2.0 / 3.0);

void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double t);
Snapshot read_snapshot(const std::filesystem::path& path, double dealias_fraction = 2.0 / 3.0);

}  // namespace dklb
