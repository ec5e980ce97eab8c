#include "mocomp/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mocomp::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("cannot open for writing: " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open: " + path.string());
  return is;
}

void write_header(std::ofstream& os, const Grid2D& g) {
  const std::uint32_t dims[2] = {static_cast<std::uint32_t>(g.width), static_cast<std::uint32_t>(g.height)};
  os.write(reinterpret_cast<const char*>(dims), sizeof dims);
}

Grid2D read_header(std::ifstream& is, const std::filesystem::path& path) {
  std::uint32_t dims[2] = {0, 0};
  is.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (!is) throw DataError("truncated header: " + path.string());
  try {
    return Grid2D(static_cast<int>(dims[0]), static_cast<int>(dims[1]));
  } catch (const InvalidParameter& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_doubles(std::ofstream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& is, double* p, std::size_t n, const std::filesystem::path& path) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw DataError("truncated data: " + path.string());
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw DataError("write failed: " + path.string());
}

}  // namespace

void write_scalar(const std::filesystem::path& path, const ScalarField& f) {
  auto os = open_out(path);
  write_header(os, f.grid());
  write_doubles(os, f.data(), f.size());
  finish(os, path);
}

ScalarField read_scalar(const std::filesystem::path& path) {
  auto is = open_in(path);
  ScalarField f(read_header(is, path));
  read_doubles(is, f.data(), f.size(), path);
  return f;
}

void write_complex(const std::filesystem::path& path, const ComplexField& f) {
  auto os = open_out(path);
  write_header(os, f.grid());
  // std::complex<double> is layout-compatible with double[2].
  write_doubles(os, reinterpret_cast<const double*>(f.data()), 2 * f.size());
  finish(os, path);
}

ComplexField read_complex(const std::filesystem::path& path) {
  auto is = open_in(path);
  ComplexField f(read_header(is, path));
  read_doubles(is, reinterpret_cast<double*>(f.data()), 2 * f.size(), path);
  return f;
}

void write_displacement(const std::filesystem::path& path, const DisplacementField& z) {
  auto os = open_out(path);
  write_header(os, z.grid());
  std::vector<double> plane(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) plane[i] = z[i].x;
  write_doubles(os, plane.data(), plane.size());
  for (std::size_t i = 0; i < z.size(); ++i) plane[i] = z[i].y;
  write_doubles(os, plane.data(), plane.size());
  finish(os, path);
}

DisplacementField read_displacement(const std::filesystem::path& path) {
  auto is = open_in(path);
  DisplacementField z(read_header(is, path));
  std::vector<double> plane(z.size());
  read_doubles(is, plane.data(), plane.size(), path);
  for (std::size_t i = 0; i < z.size(); ++i) z[i].x = plane[i];
  read_doubles(is, plane.data(), plane.size(), path);
  for (std::size_t i = 0; i < z.size(); ++i) z[i].y = plane[i];
  return z;
}

void write_pgm(const std::filesystem::path& path, const Gray8& img) {
  auto os = open_out(path);
  os << "P5\n" << img.width << " " << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  finish(os, path);
}

Gray8 read_pgm(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string magic;
  Gray8 img;
  int maxval = 0;
  is >> magic >> img.width >> img.height >> maxval;
  if (magic != "P5" || maxval != 255 || img.width <= 0 || img.height <= 0) {
    throw DataError("not an 8-bit binary PGM: " + path.string());
  }
  is.get();
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  is.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!is) throw DataError("truncated PGM: " + path.string());
  return img;
}

void write_pgm(const std::filesystem::path& path, const ScalarField& f, double lo, double hi) {
  Gray8 img{f.width(), f.height(), std::vector<unsigned char>(f.size())};
  const double range = hi - lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double t = range > 0.0 ? (f[i] - lo) / range : 0.0;
    img.pixels[i] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
  }
  write_pgm(path, img);
}

void write_pgm(const std::filesystem::path& path, const ScalarField& f) {
  write_pgm(path, f, min_value(f), max_value(f));
}

void write_pgm_symmetric(const std::filesystem::path& path, const ScalarField& f) {
  const double m = max_abs(f);
  if (m == 0.0) {
    write_pgm(path, Gray8{f.width(), f.height(), std::vector<unsigned char>(f.size(), 128)});
    return;
  }
  write_pgm(path, f, -m, m);
}

}  // namespace mocomp::io
