#include "nl/scenery.hpp"

#include "nl/beta.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <ostream>

namespace nl {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr std::size_t kDigitMargin = 50;

// Neighbouring level-k cylinders of x (offsets -1, 0, +1) with their masses
// relative to x's own cylinder and their normalised hidden-state posteriors.
struct Window {
  int k = -1;
  double u = 0;  // T^k x in [0, 1)
  bool present[3] = {false, false, false};
  double m[3] = {0, 0, 0};
  std::vector<double> alpha[3];
};

bool shift_word(std::vector<int>& w, long long b, int delta) {
  int i = static_cast<int>(w.size()) - 1;
  if (delta > 0) {
    while (i >= 0 && w[static_cast<std::size_t>(i)] == b - 1) w[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return false;
    ++w[static_cast<std::size_t>(i)];
  } else {
    while (i >= 0 && w[static_cast<std::size_t>(i)] == 0) w[static_cast<std::size_t>(i--)] = static_cast<int>(b - 1);
    if (i < 0) return false;
    --w[static_cast<std::size_t>(i)];
  }
  return true;
}

Window make_window(const DigitProcess& p, const std::vector<int>& digits, int k) {
  long long b = p.int_base();
  require(digits.size() >= static_cast<std::size_t>(k) + kDigitMargin, ErrorKind::ResolutionExhausted,
          "not enough digits of x for level " + std::to_string(k));
  for (std::size_t i = 0; i < static_cast<std::size_t>(k) + kDigitMargin; ++i)
    require(digits[i] >= 0 && digits[i] < b, ErrorKind::DigitOutOfRange, "digit outside the base");
  Window w;
  w.k = k;
  long double u = 0, scale = 1;
  for (std::size_t i = static_cast<std::size_t>(k); i < static_cast<std::size_t>(k) + kDigitMargin; ++i) {
    scale /= static_cast<long double>(b);
    u += digits[i] * scale;
  }
  w.u = static_cast<double>(u);
  std::vector<int> base_word(digits.begin(), digits.begin() + k);
  double lm[3];
  for (int j = 0; j < 3; ++j) {
    std::vector<int> word = base_word;
    lm[j] = -std::numeric_limits<double>::infinity();
    if (j != 1 && !shift_word(word, b, j - 1)) continue;
    std::vector<double> a = p.init;
    double acc = 0;
    bool null = false;
    for (int d : word) {
      a = p.forward(a, d);
      double s = 0;
      for (double v : a) s += v;
      if (s == 0) {
        null = true;
        break;
      }
      acc += std::log(s);
      for (double& v : a) v /= s;
    }
    if (null) continue;
    if (word.empty()) {
      double s = 0;
      for (double v : a) s += v;
      for (double& v : a) v /= s;
    }
    w.present[j] = true;
    w.alpha[j] = std::move(a);
    lm[j] = acc;
  }
  double ref = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < 3; ++j)
    if (w.present[j]) ref = std::max(ref, lm[j]);
  require(std::isfinite(ref), ErrorKind::EmptyWindow, "window carries no mass");
  for (int j = 0; j < 3; ++j) w.m[j] = w.present[j] ? std::exp(lm[j] - ref) : 0.0;
  return w;
}

double window_cdf(const DigitProcess& p, const Window& w, double u) {
  double F = 0;
  for (int j = 0; j < 3; ++j) {
    if (!w.present[j]) continue;
    double y = u - static_cast<double>(j - 1);
    if (y <= 0) continue;
    F += w.m[j] * (y >= 1 ? 1.0 : p.cdf(w.alpha[j], y));
  }
  return F;
}

int level_for(double t, long long b) {
  double lb = std::log(static_cast<double>(b));
  return std::max(0, static_cast<int>(std::floor(t / lb + 1e-12)));
}

GridMeasure window_frame(const DigitProcess& p, const Window& w, double t, std::size_t cells) {
  double lb = std::log(static_cast<double>(p.int_base()));
  double s = std::exp(-t + w.k * lb);
  double lo = window_cdf(p, w, w.u - s), hi = window_cdf(p, w, w.u + s);
  require(hi - lo > 0, ErrorKind::EmptyWindow, "window carries no mass");
  GridMeasure g{-1.0, 1.0, std::vector<double>(cells, 0.0)};
  double prev = lo;
  for (std::size_t i = 0; i < cells; ++i) {
    double v = -1.0 + 2.0 * static_cast<double>(i + 1) / static_cast<double>(cells);
    double cur = i + 1 == cells ? hi : window_cdf(p, w, w.u + s * v);
    g.weights[i] = std::max(0.0, cur - prev) / (hi - lo);
    prev = cur;
  }
  return g;
}

void check_process(const DigitProcess& p) {
  require(p.integer_base(), ErrorKind::InvalidArgument, "scenery frames need an integer base");
}

void check_dt(double t_max, double dt) {
  require(dt > 0 && dt <= 0.1, ErrorKind::InvalidArgument, "dt must lie in (0, 0.1]");
  require(t_max > 0, ErrorKind::InvalidArgument, "t_max must be positive");
}

std::vector<double> sample_times(double t_start, double t_max, double dt) {
  std::vector<double> ts;
  for (auto j = static_cast<std::size_t>(std::max(0.0, std::ceil(t_start / dt - 1e-9)));; ++j) {
    double t = static_cast<double>(j) * dt;
    if (t >= t_max) break;
    ts.push_back(t);
  }
  return ts;
}

// Level from which the digit prefix has cylinders on both sides.
int interior_level(const std::vector<int>& d, long long base) {
  bool low = false, high = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    low = low || d[i] > 0;
    high = high || d[i] < base - 1;
    if (low && high) return static_cast<int>(i) + 1;
  }
  fail(ErrorKind::ResolutionExhausted, "digit string never leaves the boundary of [0, 1]");
}

std::string digits_center(const std::vector<int>& d) {
  std::string s = "0.";
  for (std::size_t i = 0; i < std::min<std::size_t>(d.size(), 24); ++i) s += static_cast<char>('0' + d[i]);
  return s + "...";
}

}  // namespace

Functional parse_functional(const std::string& name) {
  if (name == "mass_quarter" || name == "mass[-1/4,1/4]") return Functional::MassQuarter;
  if (name == "mass_half" || name == "mass[-1/2,1/2]") return Functional::MassHalf;
  if (name == "cdf0") return Functional::CdfZero;
  if (name == "entropy4") return Functional::Entropy4;
  if (name == "moment2") return Functional::Moment2;
  fail(ErrorKind::InvalidArgument, "unknown functional '" + name + "'");
}

std::string functional_name(Functional f) {
  switch (f) {
    case Functional::MassQuarter: return "mass_quarter";
    case Functional::MassHalf: return "mass_half";
    case Functional::CdfZero: return "cdf0";
    case Functional::Entropy4: return "entropy4";
    case Functional::Moment2: return "moment2";
  }
  return "?";
}

std::size_t functional_cells(Functional f) {
  switch (f) {
    case Functional::MassQuarter: return 8;
    case Functional::MassHalf: return 4;
    case Functional::CdfZero: return 2;
    case Functional::Entropy4: return 16;
    case Functional::Moment2: return 64;
  }
  return 64;
}

double apply_functional(Functional f, const GridMeasure& frame) {
  switch (f) {
    case Functional::MassQuarter: return frame.mass(-0.25, 0.25);
    case Functional::MassHalf: return frame.mass(-0.5, 0.5);
    case Functional::CdfZero: return frame.cdf(0.0);
    case Functional::Entropy4: {
      double h = 0;
      for (int i = 0; i < 16; ++i) {
        double m = frame.mass(-1.0 + i / 8.0, -1.0 + (i + 1) / 8.0);
        if (m > 0) h -= m * std::log(m);
      }
      return std::clamp(h / std::log(16.0), 0.0, 1.0);
    }
    case Functional::Moment2: {
      double s = 0, w = frame.cell_width();
      for (std::size_t i = 0; i < frame.cells(); ++i) {
        double a = frame.lo + static_cast<double>(i) * w, b = a + w;
        s += frame.weights[i] * (a * a + a * b + b * b) / 3.0;
      }
      return std::clamp(s, 0.0, 1.0);
    }
  }
  return 0;
}

GridMeasure scenery_frame(const GridMeasure& mu, double x, double t, std::size_t cells) {
  require(cells >= 1, ErrorKind::InvalidArgument, "frame needs cells");
  double r = std::exp(-t);
  require(mu.cell_width() <= r * 2.0 / static_cast<double>(cells) * (1 + 1e-9), ErrorKind::ResolutionExhausted,
          "grid too coarse for the window at t = " + fmt(t));
  return affine_rebin(mu, 1.0 / r, -x / r, -1.0, 1.0, cells);
}

GridMeasure scenery_frame(const DigitProcess& p, const std::vector<int>& x_digits, double t, std::size_t cells) {
  check_process(p);
  require(cells >= 1, ErrorKind::InvalidArgument, "frame needs cells");
  Window w = make_window(p, x_digits, level_for(t, p.int_base()));
  return window_frame(p, w, t, cells);
}

GridMeasure scenery_frame(const DigitProcess& p, const Rational& x, double t, std::size_t cells) {
  check_process(p);
  require(x >= 0 && x < 1, ErrorKind::InvalidArgument, "x must lie in [0, 1)");
  int k = level_for(t, p.int_base());
  return scenery_frame(p, integer_base_digits(x, p.int_base(), static_cast<std::size_t>(k) + kDigitMargin + 8), t,
                       cells);
}

SceneryScalarSeries scenery_series(const GridMeasure& mu, double x, double t_max, double dt, Functional f) {
  check_dt(t_max, dt);
  SceneryScalarSeries s{dt, {}, functional_name(f), fmt(x), "grid"};
  double room = std::min(x - mu.lo, mu.hi - x);
  require(room > 0, ErrorKind::OutOfInterval, "x must lie inside the grid's interval");
  std::vector<double> ts = sample_times(-std::log(room), t_max, dt);
  if (!ts.empty()) s.t0 = ts.front();
  for (double t : ts) s.values.push_back(apply_functional(f, scenery_frame(mu, x, t, functional_cells(f))));
  return s;
}

SceneryScalarSeries scenery_series(const DigitProcess& p, const std::vector<int>& x_digits, double t_max, double dt,
                                   Functional f, double time_shift) {
  check_process(p);
  check_dt(t_max, dt);
  SceneryScalarSeries s{dt, {}, functional_name(f), digits_center(x_digits), p.tag};
  double lb = std::log(static_cast<double>(p.int_base()));
  std::vector<double> ts = sample_times(interior_level(x_digits, p.int_base()) * lb - time_shift, t_max, dt);
  if (!ts.empty()) s.t0 = ts.front();
  Window w;
  for (double t : ts) {
    double tt = t + time_shift;
    int k = level_for(tt, p.int_base());
    if (k != w.k) w = make_window(p, x_digits, k);
    s.values.push_back(apply_functional(f, window_frame(p, w, tt, functional_cells(f))));
  }
  return s;
}

SceneryScalarSeries scenery_series(const DigitProcess& p, const Rational& x, double t_max, double dt, Functional f) {
  check_process(p);
  require(x >= 0 && x < 1, ErrorKind::InvalidArgument, "x must lie in [0, 1)");
  int k = level_for(t_max, p.int_base());
  SceneryScalarSeries s = scenery_series(
      p, integer_base_digits(x, p.int_base(), static_cast<std::size_t>(k) + kDigitMargin + 8), t_max, dt, f);
  s.center = x.str();
  return s;
}

double autocorrelation(const SceneryScalarSeries& s, double lag) {
  std::size_t n = s.values.size();
  auto L = static_cast<std::size_t>(std::llround(lag / s.dt));
  require(L < n, ErrorKind::SeriesTooShort, "lag exceeds the series");
  double mean = 0;
  for (double v : s.values) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0, cl = 0;
  for (std::size_t j = 0; j < n; ++j) c0 += (s.values[j] - mean) * (s.values[j] - mean);
  for (std::size_t j = 0; j + L < n; ++j) cl += (s.values[j] - mean) * (s.values[j + L] - mean);
  if (c0 == 0) return 0;
  return cl / c0 * static_cast<double>(n) / static_cast<double>(n - L);
}

std::pair<double, double> fourier_coefficient(const SceneryScalarSeries& s, double alpha) {
  std::size_t n = s.values.size();
  require(n > 0, ErrorKind::SeriesTooShort, "empty series");
  double mean = 0;
  for (double v : s.values) mean += v;
  mean /= static_cast<double>(n);
  std::complex<double> acc = 0, z = 1, step = std::polar(1.0, -kTwoPi * alpha * s.dt);
  for (std::size_t j = 0; j < n; ++j) {
    if (j % 256 == 0) z = std::polar(1.0, -kTwoPi * alpha * (s.t0 + s.dt * static_cast<double>(j)));
    acc += (s.values[j] - mean) * z;
    z *= step;
  }
  acc /= static_cast<double>(n);  // (1/T) sum ... dt with T = n dt
  return {acc.real(), acc.imag()};
}

std::vector<double> SpectrumReport::peaks() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < frequencies.size(); ++i)
    if (is_peak[i]) out.push_back(frequencies[i]);
  return out;
}

SpectrumReport spectrum_scan(const SceneryScalarSeries& s, const std::vector<double>& frequencies, double peak_factor) {
  require(!frequencies.empty(), ErrorKind::InvalidArgument, "no test frequencies");
  double fmin = *std::min_element(frequencies.begin(), frequencies.end());
  double fmax = *std::max_element(frequencies.begin(), frequencies.end());
  require(fmin > 0, ErrorKind::InvalidArgument, "test frequencies must be positive");
  double T = s.duration();
  require(T * fmin >= 50, ErrorKind::SeriesTooShort,
          "series covers " + fmt(T * fmin) + " periods of the smallest frequency, need 50");
  SpectrumReport r;
  r.frequencies = frequencies;
  r.peak_factor = peak_factor;
  double mean = 0, dev = 0;
  for (double v : s.values) mean += v;
  mean /= static_cast<double>(s.values.size());
  for (double v : s.values) dev = std::max(dev, std::fabs(v - mean));
  bool constant = dev <= 1e-12 * std::max(1.0, std::fabs(mean));

  auto power = [&](double a) {
    auto [re, im] = fourier_coefficient(s, a);
    return re * re + im * im;
  };
  for (double a : frequencies) {
    auto [re, im] = fourier_coefficient(s, a);
    r.powers.push_back(re * re + im * im);
    r.phases.push_back(std::atan2(im, re));
  }

  double nyquist = 0.5 / s.dt, step = 0.5 / T;
  auto background_grid = [&](double hi) {
    std::vector<double> g;
    for (double a = 3.0 / T; a <= hi; a += step) {
      bool near = false;
      for (double f : frequencies) near = near || std::fabs(a - f) < 3.0 / T;
      if (!near) g.push_back(a);
    }
    return g;
  };
  std::vector<double> grid = background_grid(std::min(nyquist, 3.0 * fmax));
  if (grid.size() < 16) grid = background_grid(nyquist);
  require(!grid.empty(), ErrorKind::SeriesTooShort, "no room for a background estimate");
  std::vector<double> bg(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { bg[i] = power(grid[i]); });
  std::nth_element(bg.begin(), bg.begin() + static_cast<std::ptrdiff_t>(bg.size() / 2), bg.end());
  r.background = constant ? 0.0 : bg[bg.size() / 2];

  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    r.is_peak.push_back(!constant && r.powers[i] > 0 && r.powers[i] >= peak_factor * r.background);
    double best = frequencies[i], bp = r.powers[i];
    for (int k = -40; k <= 40; ++k) {
      double a = frequencies[i] + k / (40.0 * T);
      if (a <= 0) continue;
      double pw = power(a);
      if (pw > bp) bp = pw, best = a;
    }
    r.refined.push_back(best);
  }
  return r;
}

double angle_diff(double a, double b) {
  double d = std::remainder(b - a, kTwoPi);
  return d <= -kTwoPi / 2 ? d + kTwoPi : d;
}

PhaseScatter phase_scatter(const DigitProcess& p, const std::vector<std::vector<int>>& points, double alpha,
                           const PhaseOptions& opt) {
  check_process(p);
  require(alpha > 0, ErrorKind::InvalidArgument, "alpha must be positive");
  require(opt.image_slope > 0, ErrorKind::InvalidArgument, "image slope must be positive");
  require(opt.bins >= 1, ErrorKind::InvalidArgument, "need at least one bin");
  double t_max = opt.t_max > 0 ? opt.t_max : 60.0 / alpha;
  double shift = std::log(opt.image_slope);
  std::size_t m = points.size();
  PhaseScatter out;
  out.phases.assign(m, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> peak(m, 0);
  parallel_for(m, [&](std::size_t i) {
    SceneryScalarSeries s = scenery_series(p, points[i], t_max, opt.dt, opt.functional, shift);
    SpectrumReport r = spectrum_scan(s, {alpha}, opt.peak_factor);
    if (r.is_peak[0]) {
      peak[i] = 1;
      out.phases[i] = r.phases[0];
    }
  });
  out.histogram.assign(opt.bins, 0.0);
  double c = 0, sn = 0;
  std::size_t got = 0;
  for (std::size_t i = 0; i < m; ++i) {
    out.has_peak.push_back(peak[i] != 0);
    if (!peak[i]) {
      ++out.no_peak;
      continue;
    }
    ++got;
    c += std::cos(out.phases[i]);
    sn += std::sin(out.phases[i]);
    double u = (out.phases[i] + kTwoPi / 2) / kTwoPi;
    auto bin = std::min(opt.bins - 1, static_cast<std::size_t>(u * static_cast<double>(opt.bins)));
    out.histogram[bin] += 1;
  }
  if (got == 0) {
    out.circular_mean = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  for (double& h : out.histogram) h /= static_cast<double>(got);
  c /= static_cast<double>(got);
  sn /= static_cast<double>(got);
  out.circular_mean = std::atan2(sn, c);
  out.circular_variance = 1.0 - std::hypot(c, sn);
  return out;
}

void write_series_csv(std::ostream& os, const SceneryScalarSeries& s) {
  os << "# functional=" << s.functional_tag << " center=" << s.center << " source=" << s.source_tag << "\n";
  os << "t,value\n";
  for (std::size_t j = 0; j < s.values.size(); ++j)
    os << fmt(s.t0 + static_cast<double>(j) * s.dt) << "," << fmt(s.values[j]) << "\n";
}

void write_spectrum_csv(std::ostream& os, const SpectrumReport& r) {
  os << "# background=" << fmt(r.background) << " peak_factor=" << fmt(r.peak_factor) << "\n";
  os << "frequency,power,phase,peak\n";
  for (std::size_t i = 0; i < r.frequencies.size(); ++i)
    os << fmt(r.frequencies[i]) << "," << fmt(r.powers[i]) << "," << fmt(r.phases[i]) << ","
       << (r.is_peak[i] ? 1 : 0) << "\n";
}

}  // namespace nl
