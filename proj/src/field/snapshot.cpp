#include "hkt/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "hkt/fiber_context.hpp"

namespace hkt {

namespace {

constexpr char kMagic[4] = {'H', 'K', 'T', 'F'};
constexpr uint32_t kVersion = 1;
constexpr uint32_t kMixed = 0xFFFFFFFFu;

void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const FormField& field) {
  const FiberContext& ctx = FiberContext::get(field.grid.n);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);

  uint32_t p = kMixed, q = kMixed;
  bool first = true;
  for (const auto& [rank, values] : field.comps) {
    (void)values;
    auto [bp, bq] = IndexTables::bidegree_of(ctx.idx.mask_of(field.degree, rank));
    if (first) {
      p = bp;
      q = bq;
      first = false;
    } else if (p != static_cast<uint32_t>(bp) || q != static_cast<uint32_t>(bq)) {
      p = q = kMixed;
    }
  }

  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<uint32_t>(field.grid.n));
  put_u32(os, field.grid.active_mask);
  put_u32(os, static_cast<uint32_t>(field.grid.N));
  put_u32(os, static_cast<uint32_t>(field.degree));
  put_u32(os, p);
  put_u32(os, q);
  put_u32(os, static_cast<uint32_t>(field.comps.size()));
  for (const auto& [rank, values] : field.comps) {
    put_u32(os, static_cast<uint32_t>(rank));
    for (long i = 0; i < values.size(); ++i) {
      put_f64(os, values[i].real());
      put_f64(os, values[i].imag());
    }
  }
  if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

FormField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path);
  const uint32_t version = get_u32(is);
  if (version != kVersion) throw std::runtime_error("read_snapshot: unsupported version");
  const int n = static_cast<int>(get_u32(is));
  const uint32_t mask = get_u32(is);
  const int N = static_cast<int>(get_u32(is));
  const int degree = static_cast<int>(get_u32(is));
  get_u32(is);  // p: derivable from component ranks
  get_u32(is);  // q
  const uint32_t count = get_u32(is);

  FormField out = zero_field(make_grid(n, mask, N), degree);
  const long P = out.grid.points();
  for (uint32_t c = 0; c < count; ++c) {
    const int rank = static_cast<int>(get_u32(is));
    Eigen::VectorXcd& values = out.component(rank);
    for (long i = 0; i < P; ++i) {
      const double re = get_f64(is);
      const double im = get_f64(is);
      values[i] = cdouble(re, im);
    }
  }
  if (!is) throw std::runtime_error("read_snapshot: truncated file " + path);
  return out;
}

}  // namespace hkt
