#pragma once
// Grid and sample measures, the magnify/translate operators, convolution,
// Kolmogorov-Smirnov distance and CSV serialisation.

#include "nl/core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nl {

/// Probability weights on the uniform cells [lo + i w, lo + (i+1) w), last cell closed.
struct GridMeasure {
  double lo = 0.0, hi = 1.0;
  std::vector<double> weights;

  std::size_t cells() const { return weights.size(); }
  double cell_width() const { return (hi - lo) / static_cast<double>(weights.size()); }
  double total() const;
  /// CDF with mass spread uniformly inside each cell.
  double cdf(double x) const;
  /// Mass of [a, b] under the same convention.
  double mass(double a, double b) const;
  void normalize();
};

struct SampleMeasure {
  std::vector<double> points;
  std::uint64_t seed = 0;
  std::string generator_tag;
};

GridMeasure uniform_grid(double lo, double hi, std::size_t cells);
/// Unit mass in the cell containing x.
GridMeasure point_mass(double lo, double hi, std::size_t cells, double x);

/// Push-forward under y = a*x + b (a > 0), re-binned onto [lo, hi] with `cells`
/// cells by proportional splitting, then renormalised. EmptyWindow when no mass lands.
GridMeasure affine_rebin(const GridMeasure& mu, double a, double b, double lo, double hi, std::size_t cells);

/// Magnification by e^t about 0 on [-1, 1].
GridMeasure rescale(const GridMeasure& mu, double t);
/// Recentre at x and restrict to [-1, 1].
GridMeasure translate_restrict(const GridMeasure& mu, double x);

/// Cells are treated as atoms at their left endpoints. Without mod_one the result
/// has n + m - 1 cells; with mod_one both inputs must live on [0, 1].
GridMeasure convolve(const GridMeasure& mu, const GridMeasure& nu, bool mod_one);

double ks_distance(const GridMeasure& mu, const GridMeasure& nu);

GridMeasure bin_samples(const SampleMeasure& s, double lo, double hi, std::size_t cells);
/// Draws points from a grid measure (uniform inside the chosen cell).
SampleMeasure sample_grid(const GridMeasure& mu, std::size_t n, std::uint64_t seed);

void write_grid_csv(std::ostream& os, const GridMeasure& mu);
GridMeasure read_grid_csv(std::istream& is);
void write_samples_csv(std::ostream& os, const SampleMeasure& s);
SampleMeasure read_samples_csv(std::istream& is);

}  // namespace nl
