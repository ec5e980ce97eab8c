#pragma once

// On-disk formats. All numeric files start with two little-endian uint32
// dimensions (width, height) followed by row-major little-endian float64:
//   scalar      one plane
//   complex     interleaved (re, im) per pixel
//   displacement  two planes, z1 then z2
// Images for inspection are 8-bit binary PGM (P5).

#include <filesystem>
#include <string>

#include "mocomp/fields.hpp"

namespace mocomp::io {

void write_scalar(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_scalar(const std::filesystem::path& path);

void write_complex(const std::filesystem::path& path, const ComplexField& f);
ComplexField read_complex(const std::filesystem::path& path);

void write_displacement(const std::filesystem::path& path, const DisplacementField& z);
DisplacementField read_displacement(const std::filesystem::path& path);

/// Min-max normalized to [0, 255]; a constant field maps to 0.
void write_pgm(const std::filesystem::path& path, const ScalarField& f);
/// Linear map of [lo, hi] onto [0, 255] with clamping.
void write_pgm(const std::filesystem::path& path, const ScalarField& f, double lo, double hi);
/// Signed data centred at 128 with range [-m, m], m = max |f|.
void write_pgm_symmetric(const std::filesystem::path& path, const ScalarField& f);

/// Raw 8-bit grey pixels, used by the renderers.
struct Gray8 {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;
};
void write_pgm(const std::filesystem::path& path, const Gray8& img);
Gray8 read_pgm(const std::filesystem::path& path);

}  // namespace mocomp::io
