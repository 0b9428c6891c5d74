#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "secdyn/polynomial.hpp"
#include "secdyn/secant_map.hpp"

namespace secdyn {

/// Rectangular view of the plane. Pixel (col, row) maps to the center of its
/// cell, rows running top to bottom (row 0 at y_max), matching PPM order.
struct Window {
  double x_min = -3.0, x_max = 3.0;
  double y_min = -3.0, y_max = 3.0;
  int width = 300, height = 300;

  PlanePoint cell_center(int col, int row) const {
    const double dx = (x_max - x_min) / width;
    const double dy = (y_max - y_min) / height;
    return {x_min + (col + 0.5) * dx, y_max - (row + 0.5) * dy};
  }
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

/// Root-indexed colors; everything non-converged renders white. Colors are
/// assigned multiple roots first (ascending), then simple roots ascending, so
/// the family (x+2)x(x-1)^d gets red for 1, green for -2, blue for 0.
struct Palette {
  std::vector<Rgb> root_colors;
  Rgb other{255, 255, 255};

  static Palette for_roots(const Polynomial& p);
};

// Cell codes: >= 0 converged root index; negative values per OrbitClass.
inline constexpr std::int16_t kCellNearPole = -1;
inline constexpr std::int16_t kCellEscaped = -2;
inline constexpr std::int16_t kCellNonConvergent = -3;

struct BasinGrid {
  Window window;
  OrbitLimits limits;
  Palette palette;
  std::vector<std::int16_t> cells;  // row-major, top row first

  std::int16_t cell(int col, int row) const {
    return cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(window.width) +
                 static_cast<std::size_t>(col)];
  }
  std::vector<std::uint8_t> pixels() const;  // 3 bytes per cell, row-major
};

/// Number of workers actually used for a request (0 = hardware concurrency),
/// capped by the SECANT_DYN_THREADS environment variable when set.
int resolve_workers(int requested);

/// Classify every cell center of the window by iterate_orbit. Cells are
/// independent, so the result is byte-identical for any worker count.
BasinGrid render_basin(const Polynomial& p, const Window& w, const OrbitLimits& limits,
                       int workers = 0);

/// Binary PPM (P6, maxval 255): "P6\n<width> <height>\n255\n" followed by
/// 3*width*height bytes, rows top to bottom. Throws on I/O failure.
void write_image(const BasinGrid& g, const std::string& path);

struct ParityWitness {
  int root_index = -1;
  PlanePoint seed;
  int iterations = 0;
};

struct ParityReport {
  int root_index = -1;
  double epsilon = 0.0;
  int samples = 0;
  std::uint64_t rng_seed = 0;
  bool quadrant_only = false;
  std::vector<int> converged_counts;  // by root index
  int near_pole = 0;
  int escaped = 0;
  int non_convergent = 0;
  std::vector<ParityWitness> witnesses;

  int total() const;
};

/// Classify n seeds sampled uniformly from the epsilon-disc around the
/// multiple root's fixed point (rejection from the bounding square,
/// mt19937-64, 53-bit uniform doubles; points within pole_guard of the pole
/// curve are resampled). quadrant_only restricts seeds to x >= alpha,
/// y >= alpha. For even multiplicity, additionally walks slope -1 curves
/// aimed at each simple root via the landing map and records seeds that
/// converge there as witnesses.
ParityReport parity_experiment(const Polynomial& p, int root_index, double epsilon, int n,
                               std::uint64_t rng_seed,
                               const OrbitLimits& limits = OrbitLimits::local_defaults(),
                               bool quadrant_only = false);

void write_parity_csv(std::ostream& os, const ParityReport& rep, const Polynomial& p);

}  // namespace secdyn
