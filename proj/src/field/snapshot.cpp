#include "nsreg/field.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace nsreg {

namespace {

constexpr char kMagic[8] = {'N', 'S', 'R', 'L', '1', 0, 0, 0};

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("snapshot: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_snapshot(const std::filesystem::path& path, const GridSpec& grid, double time,
                    const std::vector<const Eigen::ArrayXd*>& components) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("snapshot: cannot open " + tmp.string());
    os.write(kMagic, 8);
    put_u64(os, std::uint64_t(grid.n));
    put_f64(os, grid.box_length);
    put_f64(os, time);
    put_u64(os, components.size());
    for (const auto* c : components) {
      if (c->size() != grid.size()) throw std::invalid_argument("snapshot: component size mismatch");
      if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(c->data()), std::streamsize(c->size() * sizeof(double)));
      } else {
        for (Eigen::Index i = 0; i < c->size(); ++i) put_f64(os, (*c)[i]);
      }
    }
    if (!os) throw std::runtime_error("snapshot: write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_snapshot(const std::filesystem::path& path, const VectorField& u, double time) {
  write_snapshot(path, u.grid, time, {&u[0], &u[1], &u[2]});
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("snapshot: bad magic in " + path.string());
  Snapshot snap;
  const auto n = get_u64(is);
  const double box = get_f64(is);
  snap.grid = make_grid(static_cast<int>(n), box);
  snap.time = get_f64(is);
  const auto count = get_u64(is);
  if (count > 64) throw std::runtime_error("snapshot: implausible component count");
  for (std::uint64_t c = 0; c < count; ++c) {
    Eigen::ArrayXd values(snap.grid.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) values[i] = get_f64(is);
    snap.components.push_back(std::move(values));
  }
  return snap;
}

}  // namespace nsreg
