#pragma once
// Orbit statistics: empirical orbit measures, the normality battery, Weyl sums,
// digit-process samplers and the local-average harness.

#include "nl/beta.hpp"
#include "nl/digit_process.hpp"
#include "nl/measures.hpp"

#include <string>
#include <vector>

namespace nl {

GridMeasure orbit_empirical(const OrbitRecord& orbit, std::size_t cells);
GridMeasure orbit_empirical(const Rational& x0, const BetaSystem& sys, std::size_t n, std::size_t cells);

struct NormalityOptions {
  std::size_t cells = 16;
  double ks_threshold = -1;  // < 0: 4 / sqrt(N) * sqrt(cells)
  double chi2_level = 0.999;
  std::vector<int> weyl_m{1, 2, 3};
};

struct NormalityReport {
  std::size_t N = 0;
  int alphabet = 0;
  std::vector<double> digit_freqs;
  std::vector<double> block_chi2;      // L = 1, 2, 3
  std::vector<int> block_df;
  std::vector<double> chi2_threshold;
  double ks_vs_parry = 0;
  double ks_threshold = 0;
  std::vector<double> weyl;  // only for integer bases; Pisot sums come from weyl_sums
  bool pass = false;
  std::string to_json() const;
};

NormalityReport normality_battery(const OrbitRecord& orbit, const BetaSystem& sys, const NormalityOptions& opt = {});
NormalityReport normality_battery(const Rational& x0, const BetaSystem& sys, std::size_t n, const NormalityOptions& opt = {});

struct WeylResult {
  std::vector<double> magnitudes;
  long precision_bits = 0;  // 0 when computed from exact digits
  double error_bound = 0;   // bound on |computed phase - true phase| (cycles)
};
/// |1/N sum_{k<N} e(m beta^k x0)| for each m.
WeylResult weyl_sums(const Rational& x0, const PisotNumber& beta, std::size_t n, const std::vector<int>& m_list);

/// Independent digit strings, string i from stream (seed, i).
std::vector<std::vector<int>> sample_digit_strings(const DigitProcess& p, std::size_t n_points, std::size_t n_digits,
                                                   std::uint64_t seed);
SampleMeasure sample_markov(const DigitProcess& p, std::size_t n_points, std::size_t n_digits, std::uint64_t seed);

struct LocalAverageResult {
  std::vector<double> ks_trace;  // KS between the two Cesaro averages after n + 1 terms
  GridMeasure conditional_average;
  GridMeasure orbit_average;
};
/// Compares (1/n) sum mu_{A^j(x)} with (1/n) sum delta_{T^j x}, j < n, on b^level cells.
LocalAverageResult local_average(const DigitProcess& p, const std::vector<int>& x_digits, std::size_t n_max, int level);

struct OrthogonalityResult {
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> correlation;
  double threshold = 0;  // 4 / sqrt(N)
  bool pass = false;
};
/// Martingale differences g_n = E(1_w o T^n | A^n) - 1_w o T^n at n = k i for the most likely
/// depth-k word w, correlated over independent samples.
OrthogonalityResult martingale_orthogonality(const DigitProcess& p, int k, std::size_t n_points, std::uint64_t seed);

/// Overlapping block entropy H_k / k in nats per digit.
double block_entropy_rate(const std::vector<int>& digits, int k, int alphabet);

/// Upper 'level' quantile of chi-squared with df degrees of freedom.
double chi2_quantile(int df, double level);

/// Gauss-map orbit of a rational: KS distance of its first n points to the Gauss measure.
double gauss_orbit_ks(const Rational& x, std::size_t n, std::size_t cells);

}  // namespace nl
