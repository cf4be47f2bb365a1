#include "dklb/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "dklb/error.hpp"

namespace dklb {

namespace {

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double d) {
  put_le(out, std::bit_cast<std::uint64_t>(d));
}

template <typename U>
U get_le(const std::uint8_t* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const SpectralField& f, double t) {
  const auto c = f.coeffs();
  std::vector<std::uint8_t> out;
  out.reserve(kSnapshotHeaderSize + 16 * c.size());
  for (char ch : {'D', 'K', 'L', 'B'}) out.push_back(static_cast<std::uint8_t>(ch));
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint64_t>(out, c.size());
  put_f64(out, f.grid().length());
  put_f64(out, t);
  out.push_back(f.is_real() ? 1 : 0);
  for (const cplx& z : c) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
  return out;
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes, double dealias_fraction) {
  if (bytes.size() < kSnapshotHeaderSize || std::memcmp(bytes.data(), "DKLB", 4) != 0) {
    throw ValidationError("snapshot: missing DKLB header");
  }
  const std::uint8_t* p = bytes.data();
  const auto version = get_le<std::uint32_t>(p + 4);
  if (version != kSnapshotVersion) {
    throw ValidationError("snapshot: unsupported version " + std::to_string(version));
  }
  const auto n = get_le<std::uint64_t>(p + 8);
  const double length = get_f64(p + 16);
  const double t = get_f64(p + 24);
  const bool is_real = p[32] != 0;
  if (n > (bytes.size() - kSnapshotHeaderSize) / 16 ||
      bytes.size() != kSnapshotHeaderSize + 16 * n) {
    throw ValidationError("snapshot: payload size does not match N");
  }
  GridPtr grid = SpectralGrid::create(static_cast<std::size_t>(n), length, dealias_fraction);
  std::vector<cplx> c(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint8_t* q = p + kSnapshotHeaderSize + 16 * k;
    c[k] = cplx(get_f64(q), get_f64(q + 8));
  }
  return {SpectralField(std::move(grid), std::move(c), is_real), t};
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double t) {
  const auto bytes = encode_snapshot(f, t);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot write snapshot " + path.string());
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Snapshot read_snapshot(const std::filesystem::path& path, double dealias_fraction) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot read snapshot " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return decode_snapshot(bytes, dealias_fraction);
}

}  // namespace dklb
