#pragma once
// Slow, independent reference computations used by the tests. Nothing here calls
// into the library's algebraic machinery; everything is plain double arithmetic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// Largest real root of a monic polynomial (constant term first), by bisection on [1, 1 + max|c|].
inline double dominant_root(const std::vector<long long>& c) {
  auto f = [&](double x) {
    double v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + static_cast<double>(c[i]);
    return v;
  };
  double hi = 1;
  for (long long v : c) hi = std::max(hi, 1.0 + std::fabs(static_cast<double>(v)));
  double lo = 1;
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    (f(m) > 0 ? hi : lo) = m;
  }
  return 0.5 * (lo + hi);
}

/// Greedy beta digits of x in [0, 1] by floating-point iteration.
inline std::vector<int> greedy_digits(double x, double beta, int n) {
  std::vector<int> d;
  for (int i = 0; i < n; ++i) {
    double y = beta * x;
    int k = static_cast<int>(std::floor(y + 1e-13));
    d.push_back(k);
    x = std::max(0.0, y - k);
  }
  return d;
}

/// Quasi-greedy expansion of 1, unrolled to n digits: the greedy one with its last
/// nonzero digit lowered and the block repeated when the greedy one is finite.
inline std::vector<int> quasi_greedy_one(double beta, int n) {
  std::vector<int> g = greedy_digits(1.0, beta, 64);
  int last = -1;
  for (int i = 0; i < 40; ++i)
    if (g[i] != 0) last = i;
  bool finite = std::all_of(g.begin() + last + 1, g.begin() + 40, [](int v) { return v == 0; });
  if (!finite) return std::vector<int>(g.begin(), g.begin() + n);
  std::vector<int> block(g.begin(), g.begin() + last + 1);
  block.back() -= 1;
  std::vector<int> out;
  while (static_cast<int>(out.size()) < n) out.insert(out.end(), block.begin(), block.end());
  out.resize(static_cast<std::size_t>(n));
  return out;
}

/// Parry's lexicographic criterion: every suffix is strictly below the quasi-greedy expansion of 1.
inline bool lex_admissible(const std::vector<int>& w, const std::vector<int>& one) {
  for (std::size_t s = 0; s < w.size(); ++s) {
    for (std::size_t i = s; i < w.size(); ++i) {
      int a = w[i], b = one[i - s];
      if (a < b) break;
      if (a > b) return false;
    }
  }
  for (int d : w)
    if (d > one[0]) return false;
  return true;
}

/// Classes of distinct values sum d_i beta^-(i+1) over words in {0..D-1}^k, and the
/// smallest gap between them times beta^k.
inline std::pair<std::size_t, double> value_classes(double beta, int D, int k) {
  std::vector<double> v{0.0};
  double p = 1;
  for (int i = 0; i < k; ++i) {
    p /= beta;
    std::vector<double> nx;
    nx.reserve(v.size() * static_cast<std::size_t>(D));
    for (double x : v)
      for (int d = 0; d < D; ++d) nx.push_back(x + d * p);
    v.swap(nx);
  }
  std::sort(v.begin(), v.end());
  std::vector<double> distinct;
  for (double x : v)
    if (distinct.empty() || x - distinct.back() > 1e-11) distinct.push_back(x);
  double gap = 1e300;
  for (std::size_t i = 1; i < distinct.size(); ++i) gap = std::min(gap, distinct[i] - distinct[i - 1]);
  return {distinct.size(), gap * std::pow(beta, k)};
}

/// Density of the beta-shift's absolutely continuous invariant measure by power iteration
/// of the transfer operator on the partition cut out by the orbit of 1. Returns the
/// sorted cut points (0 first, 1 last) and the normalised density value on each piece.
struct PiecewiseDensity {
  std::vector<double> cuts;
  std::vector<double> values;
  double operator()(double x) const {
    auto it = std::upper_bound(cuts.begin(), cuts.end(), x);
    std::size_t i = static_cast<std::size_t>(std::max<long>(0, it - cuts.begin() - 1));
    return values[std::min(i, values.size() - 1)];
  }
};

inline PiecewiseDensity parry_power_iteration(double beta, int iterations = 4000) {
  std::vector<double> cuts{0.0, 1.0};
  double t = 1;
  for (int i = 0; i < 60; ++i) {
    t = beta * t - std::floor(beta * t + 1e-12);
    if (t < 1e-9) break;
    bool seen = false;
    for (double c : cuts) seen = seen || std::fabs(c - t) < 1e-9;
    if (seen) break;
    cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  std::size_t m = cuts.size() - 1;
  // preimages of each piece's midpoint under every branch, located in the partition
  std::vector<std::vector<std::size_t>> pre(m);
  int B = static_cast<int>(std::ceil(beta));
  for (std::size_t j = 0; j < m; ++j) {
    double y = 0.5 * (cuts[j] + cuts[j + 1]);
    for (int d = 0; d < B; ++d) {
      double x = (y + d) / beta;
      if (x >= 1) continue;
      auto it = std::upper_bound(cuts.begin(), cuts.end(), x);
      pre[j].push_back(static_cast<std::size_t>(it - cuts.begin() - 1));
    }
  }
  std::vector<double> h(m, 1.0);
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(m, 0.0);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i : pre[j]) g[j] += h[i] / beta;
    double mass = 0;
    for (std::size_t j = 0; j < m; ++j) mass += g[j] * (cuts[j + 1] - cuts[j]);
    for (double& v : g) v /= mass;
    h.swap(g);
  }
  return {cuts, h};
}

/// Entropy (nats) of a finite distribution.
inline double entropy(const std::vector<double>& p) {
  double h = 0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

/// Entropy of the partition by value sum d_i beta^-(i+1), grouping words whose values agree to tol.
inline double value_partition_entropy(const std::vector<std::pair<std::vector<int>, double>>& words, double beta,
                                      double tol = 1e-10) {
  std::vector<std::pair<double, double>> v;
  for (const auto& [w, m] : words) {
    double x = 0, p = 1;
    for (int d : w) x += d * (p /= beta);
    if (m > 0) v.emplace_back(x, m);
  }
  std::sort(v.begin(), v.end());
  std::vector<double> mass;
  double last = -1;
  for (const auto& [x, m] : v) {
    if (mass.empty() || x - last > tol) mass.push_back(0);
    mass.back() += m;
    last = x;
  }
  return entropy(mass);
}

/// Kolmogorov distance between two CDFs given on the same breakpoints.
inline double ks_from_cells(const std::vector<double>& a, const std::vector<double>& b) {
  double ca = 0, cb = 0, d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
    d = std::max(d, std::fabs(ca - cb));
  }
  return d;
}

/// (1/n) sum (v_j - mean) e(-alpha (t0 + j dt)) with direct trigonometric evaluation.
inline std::complex<double> fourier(const std::vector<double>& v, double dt, double alpha, double t0 = 0) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  std::complex<double> s = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    double a = -2 * M_PI * alpha * (t0 + static_cast<double>(j) * dt);
    s += (v[j] - mean) * std::complex<double>(std::cos(a), std::sin(a));
  }
  return s / static_cast<double>(v.size());
}

/// Wilson-Hilferty approximation of the chi-square quantile.
inline double chi2_quantile_wh(int df, double z) {
  double k = df, a = 2.0 / (9.0 * k);
  double c = 1 - a + z * std::sqrt(a);
  return k * c * c * c;
}

/// Mass of the middle-thirds Cantor measure in [0, x], from ternary digits (devil's staircase).
inline double cantor_cdf(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  double f = 0, w = 0.5;
  for (int i = 0; i < 60; ++i) {
    x *= 3;
    int d = static_cast<int>(std::floor(x));
    x -= d;
    if (d == 1) return f + w;
    if (d == 2) f += w;
    w *= 0.5;
  }
  return f;
}

}  // namespace oracle
