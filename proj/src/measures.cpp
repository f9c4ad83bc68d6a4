#include "nl/measures.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace nl {

double GridMeasure::total() const {
  double s = 0;
  for (double w : weights) s += w;
  return s;
}

double GridMeasure::cdf(double x) const {
  if (x <= lo) return 0.0;
  double acc = 0;
  if (x >= hi) return total();
  double w = cell_width();
  double pos = (x - lo) / w;
  auto idx = static_cast<std::size_t>(pos);
  if (idx >= cells()) idx = cells() - 1;
  for (std::size_t i = 0; i < idx; ++i) acc += weights[i];
  return acc + weights[idx] * (pos - static_cast<double>(idx));
}

double GridMeasure::mass(double a, double b) const { return b <= a ? 0.0 : cdf(b) - cdf(a); }

void GridMeasure::normalize() {
  double s = total();
  require(s > 0, ErrorKind::EmptyWindow, "measure has zero mass");
  for (double& w : weights) w /= s;
}

GridMeasure uniform_grid(double lo, double hi, std::size_t cells) {
  require(cells >= 1 && hi > lo, ErrorKind::InvalidArgument, "need cells >= 1 and hi > lo");
  GridMeasure g{lo, hi, std::vector<double>(cells, 1.0 / static_cast<double>(cells))};
  return g;
}

GridMeasure point_mass(double lo, double hi, std::size_t cells, double x) {
  require(cells >= 1 && hi > lo, ErrorKind::InvalidArgument, "need cells >= 1 and hi > lo");
  require(x >= lo && x <= hi, ErrorKind::OutOfInterval, "point outside the interval");
  GridMeasure g{lo, hi, std::vector<double>(cells, 0.0)};
  auto idx = static_cast<std::size_t>((x - lo) / g.cell_width());
  g.weights[std::min(idx, cells - 1)] = 1.0;
  return g;
}

GridMeasure affine_rebin(const GridMeasure& mu, double a, double b, double lo, double hi, std::size_t cells) {
  require(a > 0, ErrorKind::InvalidArgument, "affine slope must be positive");
  require(cells >= 1 && hi > lo, ErrorKind::InvalidArgument, "need cells >= 1 and hi > lo");
  GridMeasure out{lo, hi, std::vector<double>(cells, 0.0)};
  double ws = mu.cell_width(), wt = out.cell_width();
  for (std::size_t i = 0; i < mu.cells(); ++i) {
    double m = mu.weights[i];
    if (m == 0) continue;
    double s0 = a * (mu.lo + static_cast<double>(i) * ws) + b;
    double s1 = a * (mu.lo + static_cast<double>(i + 1) * ws) + b;
    if (s1 <= lo || s0 >= hi) continue;
    double len = s1 - s0;
    double c0 = std::max(s0, lo), c1 = std::min(s1, hi);
    auto j0 = static_cast<std::size_t>(std::floor((c0 - lo) / wt));
    j0 = std::min(j0, cells - 1);
    for (std::size_t j = j0; j < cells; ++j) {
      double t0 = lo + static_cast<double>(j) * wt, t1 = t0 + wt;
      if (t0 >= c1) break;
      double ov = std::min(t1, c1) - std::max(t0, c0);
      if (ov > 0) out.weights[j] += m * ov / len;
    }
  }
  double s = out.total();
  require(s > 0, ErrorKind::EmptyWindow, "no mass in the target window");
  for (double& w : out.weights) w /= s;
  return out;
}

GridMeasure rescale(const GridMeasure& mu, double t) {
  require(mu.lo >= -1 - 1e-12 && mu.hi <= 1 + 1e-12, ErrorKind::InvalidArgument, "rescale needs a measure on [-1, 1]");
  if (t == 0 && mu.lo == -1 && mu.hi == 1) {
    GridMeasure g = mu;
    g.normalize();
    return g;
  }
  return affine_rebin(mu, std::exp(t), 0.0, -1.0, 1.0, mu.cells());
}

GridMeasure translate_restrict(const GridMeasure& mu, double x) {
  require(x >= mu.lo && x <= mu.hi, ErrorKind::OutOfInterval, "translation point outside the measure's interval");
  std::size_t cells = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(2.0 / mu.cell_width())));
  return affine_rebin(mu, 1.0, -x, -1.0, 1.0, cells);
}

GridMeasure convolve(const GridMeasure& mu, const GridMeasure& nu_in, bool mod_one) {
  double w = mu.cell_width();
  GridMeasure nu = nu_in;
  if (std::fabs(nu.cell_width() - w) > 1e-12 * w) {
    auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil((nu.hi - nu.lo) / w - 1e-9)));
    nu = affine_rebin(nu_in, 1.0, 0.0, nu_in.lo, nu_in.lo + static_cast<double>(cells) * w, cells);
  }
  std::size_t n = mu.cells(), m = nu.cells();
  GridMeasure out;
  std::size_t outn;
  if (mod_one) {
    require(std::fabs(mu.lo) < 1e-12 && std::fabs(mu.hi - 1) < 1e-12 && std::fabs(nu.lo) < 1e-12 &&
                std::fabs(nu.hi - 1) < 1e-12 && n == m,
            ErrorKind::IntervalMismatch, "mod-1 convolution needs both measures on [0, 1] with equal cells");
    outn = n;
    out.lo = 0;
    out.hi = 1;
  } else {
    outn = n + m - 1;
    out.lo = mu.lo + nu.lo;
    out.hi = out.lo + static_cast<double>(outn) * w;
  }
  out.weights.assign(outn, 0.0);
  std::vector<std::size_t> nzp, nzq;
  for (std::size_t i = 0; i < n; ++i)
    if (mu.weights[i] != 0) nzp.push_back(i);
  for (std::size_t j = 0; j < m; ++j)
    if (nu.weights[j] != 0) nzq.push_back(j);
  // Both branches add terms to each output cell in increasing i order.
  if (static_cast<double>(nzp.size()) * static_cast<double>(nzq.size()) < 4.0 * static_cast<double>(outn) * 64) {
    for (std::size_t i : nzp)
      for (std::size_t j : nzq) {
        std::size_t k = i + j;
        if (mod_one && k >= outn) k -= outn;
        out.weights[k] += mu.weights[i] * nu.weights[j];
      }
  } else {
    const double* p = mu.weights.data();
    const double* q = nu.weights.data();
    parallel_for(outn, [&](std::size_t k) {
      double s = 0;
      if (!mod_one) {
        std::size_t ilo = k >= m - 1 ? k - (m - 1) : 0, ihi = std::min(k, n - 1);
        for (std::size_t i = ilo; i <= ihi; ++i) s += p[i] * q[k - i];
      } else {
        for (std::size_t i = 0; i <= k; ++i) s += p[i] * q[k - i];
        for (std::size_t i = k + 1; i < n; ++i) s += p[i] * q[k + n - i];
      }
      out.weights[k] = s;
    });
  }
  return out;
}

double ks_distance(const GridMeasure& mu, const GridMeasure& nu) {
  double scale = std::max({1.0, std::fabs(mu.lo), std::fabs(mu.hi)});
  require(std::fabs(mu.lo - nu.lo) <= 1e-12 * scale && std::fabs(mu.hi - nu.hi) <= 1e-12 * scale,
          ErrorKind::IntervalMismatch, "KS distance needs measures on the same interval");
  auto eval_at_knots = [](const GridMeasure& a, const GridMeasure& b) {
    // CDF of b at each knot of a, walking both grids once.
    std::vector<double> out(a.cells() + 1);
    double wb = b.cell_width();
    std::size_t j = 0;
    double accb = 0;
    for (std::size_t i = 0; i <= a.cells(); ++i) {
      double x = a.lo + static_cast<double>(i) * a.cell_width();
      while (j < b.cells() && b.lo + static_cast<double>(j + 1) * wb <= x) accb += b.weights[j++];
      double frac = j < b.cells() ? (x - (b.lo + static_cast<double>(j) * wb)) / wb : 0.0;
      out[i] = accb + (j < b.cells() ? b.weights[j] * std::clamp(frac, 0.0, 1.0) : 0.0);
    }
    return out;
  };
  double tm = mu.total(), tn = nu.total();
  double best = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const GridMeasure& a = pass == 0 ? mu : nu;
    const GridMeasure& b = pass == 0 ? nu : mu;
    double ta = pass == 0 ? tm : tn, tb = pass == 0 ? tn : tm;
    std::vector<double> fb = eval_at_knots(a, b);
    double acc = 0;
    for (std::size_t i = 0; i <= a.cells(); ++i) {
      best = std::max(best, std::fabs(acc / ta - fb[i] / tb));
      if (i < a.cells()) acc += a.weights[i];
    }
  }
  return std::min(1.0, best);
}

GridMeasure bin_samples(const SampleMeasure& s, double lo, double hi, std::size_t cells) {
  require(cells >= 1 && hi > lo, ErrorKind::InvalidArgument, "need cells >= 1 and hi > lo");
  require(!s.points.empty(), ErrorKind::InvalidArgument, "empty sample list");
  GridMeasure g{lo, hi, std::vector<double>(cells, 0.0)};
  double w = g.cell_width();
  for (double x : s.points) {
    require(x >= lo && x <= hi, ErrorKind::OutOfInterval, "sample " + fmt(x) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
    auto idx = static_cast<std::size_t>((x - lo) / w);
    g.weights[std::min(idx, cells - 1)] += 1.0;
  }
  for (double& v : g.weights) v /= static_cast<double>(s.points.size());
  return g;
}

SampleMeasure sample_grid(const GridMeasure& mu, std::size_t n, std::uint64_t seed) {
  std::vector<double> cum(mu.cells());
  double acc = 0;
  for (std::size_t i = 0; i < mu.cells(); ++i) cum[i] = (acc += mu.weights[i]);
  require(acc > 0, ErrorKind::EmptyWindow, "cannot sample a zero measure");
  SampleMeasure s;
  s.seed = seed;
  s.generator_tag = "grid";
  s.points.resize(n);
  Rng rng(seed);
  double w = mu.cell_width();
  for (std::size_t k = 0; k < n; ++k) {
    double u = rng.u01() * acc;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), mu.cells() - 1);
    s.points[k] = mu.lo + (static_cast<double>(i) + rng.u01()) * w;
  }
  return s;
}

void write_grid_csv(std::ostream& os, const GridMeasure& mu) {
  os << "lo,hi,cells\n" << fmt(mu.lo) << ',' << fmt(mu.hi) << ',' << mu.cells() << "\nweight\n";
  for (double w : mu.weights) os << fmt(w) << '\n';
}

GridMeasure read_grid_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line.rfind("lo,hi,cells", 0) == 0, ErrorKind::ConfigError,
          "grid CSV must start with 'lo,hi,cells'");
  require(static_cast<bool>(std::getline(is, line)), ErrorKind::ConfigError, "grid CSV missing header values");
  GridMeasure g;
  std::size_t cells = 0;
  {
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    try {
      g.lo = std::stod(a);
      g.hi = std::stod(b);
      cells = std::stoul(c);
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigError, "bad grid CSV header: " + line);
    }
  }
  while (std::getline(is, line)) {
    if (line.empty() || line == "weight") continue;
    try {
      g.weights.push_back(std::stod(line));
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigError, "bad weight line: " + line);
    }
  }
  require(g.weights.size() == cells, ErrorKind::ConfigError, "grid CSV cell count does not match header");
  return g;
}

void write_samples_csv(std::ostream& os, const SampleMeasure& s) {
  os << "# seed=" << s.seed << " tag=" << s.generator_tag << "\nx\n";
  for (double x : s.points) os << fmt(x) << '\n';
}

SampleMeasure read_samples_csv(std::istream& is) {
  SampleMeasure s;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line == "x") continue;
    if (line[0] == '#') {
      auto p = line.find("seed=");
      if (p != std::string::npos) s.seed = std::stoull(line.substr(p + 5));
      auto q = line.find("tag=");
      if (q != std::string::npos) s.generator_tag = line.substr(q + 4);
      continue;
    }
    try {
      s.points.push_back(std::stod(line));
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigError, "bad sample line: " + line);
    }
  }
  return s;
}

}  // namespace nl
