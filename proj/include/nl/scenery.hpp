#pragma once
// Scenery frames mu_{x,t}, scalar feature series along them, periodograms and phases.

#include "nl/digit_process.hpp"
#include "nl/measures.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nl {

/// Catalog of frame functionals. All take values in [0, 1].
enum class Functional {
  MassQuarter,  // mass[-1/4, 1/4]
  MassHalf,     // mass[-1/2, 1/2]
  CdfZero,      // frame CDF at 0
  Entropy4,     // entropy of the 16 level-4 cells over log 16
  Moment2,      // integral of v^2
};

Functional parse_functional(const std::string& name);
std::string functional_name(Functional f);
/// Coarsest uniform frame on [-1, 1] from which f is read off exactly.
std::size_t functional_cells(Functional f);
double apply_functional(Functional f, const GridMeasure& frame);

/// Frame of a grid measure: magnify the window [x - e^-t, x + e^-t] onto [-1, 1].
/// ResolutionExhausted once a source cell is wider than e^-t times a frame cell.
GridMeasure scenery_frame(const GridMeasure& mu, double x, double t, std::size_t cells = 64);
/// Frame of an integer-base digit process at the point with the given digits.
/// The digits must reach about 50 places past level floor(t / log b).
GridMeasure scenery_frame(const DigitProcess& p, const std::vector<int>& x_digits, double t, std::size_t cells = 64);
GridMeasure scenery_frame(const DigitProcess& p, const Rational& x, double t, std::size_t cells = 64);

struct SceneryScalarSeries {
  double dt = 0;
  std::vector<double> values;  // values[j] at t = t0 + j * dt
  std::string functional_tag;
  std::string center;
  std::string source_tag;
  double t0 = 0;  // first sampled time: the window lies inside the support from here on

  double duration() const { return dt * static_cast<double>(values.size()); }
};

/// Samples the multiples of dt below t_max, starting at the first one whose window
/// fits inside the support. dt must not exceed 0.1.
SceneryScalarSeries scenery_series(const GridMeasure& mu, double x, double t_max, double dt, Functional f);
SceneryScalarSeries scenery_series(const DigitProcess& p, const std::vector<int>& x_digits, double t_max, double dt,
                                   Functional f, double time_shift = 0);
SceneryScalarSeries scenery_series(const DigitProcess& p, const Rational& x, double t_max, double dt, Functional f);

/// Normalised autocorrelation after mean removal at the nearest sample lag.
double autocorrelation(const SceneryScalarSeries& s, double lag);

struct SpectrumReport {
  std::vector<double> frequencies;
  std::vector<double> powers;
  std::vector<double> phases;   // radians in (-pi, pi]
  std::vector<bool> is_peak;
  std::vector<double> refined;  // location of the power maximum within 1/T of each tested frequency
  double background = 0;        // median power over the background grid
  double peak_factor = 5;
  std::vector<double> peaks() const;
};

/// Fourier coefficient (1/T) sum (v_j - mean) e(-alpha t_j) dt.
std::pair<double, double> fourier_coefficient(const SceneryScalarSeries& s, double alpha);

/// SeriesTooShort unless the series spans 50 periods of the smallest frequency.
SpectrumReport spectrum_scan(const SceneryScalarSeries& s, const std::vector<double>& frequencies,
                             double peak_factor = 5);

struct PhaseOptions {
  double t_max = 0;  // 0: 60 periods of 1/alpha
  double dt = 0.05 * 0.6931471805599453;
  Functional functional = Functional::MassHalf;
  double peak_factor = 5;
  double image_slope = 1;  // phases of the image under y -> s y + c
  std::size_t bins = 16;
};

struct PhaseScatter {
  std::vector<double> phases;  // radians; NaN where no peak
  std::vector<bool> has_peak;
  std::size_t no_peak = 0;
  double circular_mean = 0;      // radians
  double circular_variance = 1;  // 1 - |mean resultant|
  std::vector<double> histogram;
};

/// Per-point phases of the alpha-coefficient. For image_slope s the frames of the image
/// measure at g(x) are those of the source at x, taken log s later.
PhaseScatter phase_scatter(const DigitProcess& p, const std::vector<std::vector<int>>& points, double alpha,
                           const PhaseOptions& opt = {});

/// Signed angle b - a wrapped to (-pi, pi].
double angle_diff(double a, double b);

void write_series_csv(std::ostream& os, const SceneryScalarSeries& s);
void write_spectrum_csv(std::ostream& os, const SpectrumReport& r);

}  // namespace nl
