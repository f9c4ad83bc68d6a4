#pragma once
// Local-dimension regression, entropy dimension over value classes, the resonance
// test and the Marstrand sweep.

#include "nl/digit_process.hpp"
#include "nl/measures.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nl {

struct DimEstimate {
  double value = 0;
  std::string method;  // "local" or "entropy"
  std::string params;
  double dispersion = 0;  // IQR of per-point slopes (local only)
  std::size_t points = 0;
};

struct LocalDimOptions {
  std::vector<double> radii;  // empty: automatic
  std::size_t n_radii = 12;
  double quantile = 0.5;
  std::size_t max_centers = 2000;
};

/// Lower quantile of per-point OLS slopes of log mu(B(x, r)) against log r, the
/// centre excluded from its own ball. Automatic radii run from the median distance
/// to the 20th neighbour up to clamp(100 r_min, range / 100, range / 10), the lower
/// end pulled down to keep two decades.
DimEstimate local_dim(const SampleMeasure& s, const LocalDimOptions& opt = {});

/// H(mu, P_k) in nats, P_k grouping depth-k words by exact value.
double partition_entropy(const DigitProcess& p, int k);
/// Same for explicit word weights (words of equal length k).
double partition_entropy(const std::vector<std::pair<std::vector<int>, double>>& words, const PisotNumber& beta);

/// H(mu, P_k) / (k log beta). For a mixture the minimum over its components.
DimEstimate entropy_dim(const DigitProcess& p, int k);
DimEstimate entropy_dim(const std::vector<std::pair<std::vector<int>, double>>& words, const PisotNumber& beta);
/// b-adic entropy of a grid on [0, 1] whose cell count is a multiple of b^k.
DimEstimate entropy_dim(const GridMeasure& mu, long long base, int k);

struct EstimatorConfig {
  enum class Kind { Entropy, Local };
  Kind kind = Kind::Entropy;
  long long base = 2;
  int k = 12;
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
  LocalDimOptions local;
};

struct ResonanceReport {
  double dim_mu = 0, dim_nu = 0, dim_conv = 0;
  double gap = 0;  // min(1, dim mu + dim nu) - dim conv
  double margin = 0.03;
  bool resonates = false;
  std::string to_json() const;
};

DimEstimate estimate_dim(const GridMeasure& mu, const EstimatorConfig& cfg);
ResonanceReport resonance_test(const GridMeasure& mu, const GridMeasure& nu, bool mod_one, const EstimatorConfig& cfg,
                               double margin = 0.03);

struct SweepOptions {
  double margin = 0.03;
  double dim_mu = -1, dim_nu = -1;  // < 0: estimate from the pools
  LocalDimOptions local;
};

struct SweepRow {
  double t = 0;
  double dim = 0;
  std::size_t n = 0;
  bool exceptional = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double dim_mu = 0, dim_nu = 0;
  double threshold = 0;
  double exceptional_fraction = 0;
};

/// Samples of mu * S_t nu: x_i + e^t y_i with y_i running through the nu-pool points
/// satisfying |y| <= e^-t, in pool order.
SampleMeasure magnified_sum(const SampleMeasure& mu, const SampleMeasure& nu, double t);
SweepReport marstrand_sweep(const SampleMeasure& mu, const SampleMeasure& nu, const std::vector<double>& t_grid,
                            const SweepOptions& opt = {});

void write_sweep_csv(std::ostream& os, const SweepReport& r);

}  // namespace nl
