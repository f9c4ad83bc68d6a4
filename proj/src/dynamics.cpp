#include "nl/dynamics.hpp"

#include "nl/ifs.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <unordered_map>

namespace nl {

GridMeasure orbit_empirical(const OrbitRecord& orbit, std::size_t cells) {
  SampleMeasure s;
  s.points = orbit.points;
  for (double& x : s.points) x = std::clamp(x, 0.0, 1.0);
  return bin_samples(s, 0.0, 1.0, cells);
}

GridMeasure orbit_empirical(const Rational& x0, const BetaSystem& sys, std::size_t n, std::size_t cells) {
  return orbit_empirical(beta_orbit(x0, sys, n), cells);
}

double chi2_quantile(int df, double level) {
  require(df >= 1, ErrorKind::InvalidArgument, "chi-squared needs df >= 1");
  return boost::math::quantile(boost::math::chi_squared_distribution<double>(df), level);
}

namespace {

std::vector<double> weyl_from_points(const std::vector<double>& pts, const std::vector<int>& m_list) {
  std::vector<double> out;
  for (int m : m_list) {
    double re = 0, im = 0;
    for (double x : pts) {
      double ph = 2 * M_PI * std::fmod(m * x, 1.0);
      re += std::cos(ph);
      im += std::sin(ph);
    }
    out.push_back(std::hypot(re, im) / static_cast<double>(pts.size()));
  }
  return out;
}

std::string json_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

}  // namespace

std::string NormalityReport::to_json() const {
  std::ostringstream os;
  std::vector<double> df(block_df.begin(), block_df.end());
  os << "{\n"
     << "  \"N\": " << N << ",\n"
     << "  \"alphabet\": " << alphabet << ",\n"
     << "  \"digit_freqs\": " << json_list(digit_freqs) << ",\n"
     << "  \"block_chi2\": " << json_list(block_chi2) << ",\n"
     << "  \"block_df\": " << json_list(df) << ",\n"
     << "  \"chi2_threshold\": " << json_list(chi2_threshold) << ",\n"
     << "  \"ks_vs_parry\": " << fmt(ks_vs_parry) << ",\n"
     << "  \"ks_threshold\": " << fmt(ks_threshold) << ",\n"
     << "  \"weyl\": " << json_list(weyl) << ",\n"
     << "  \"verdict\": \"" << (pass ? "PASS" : "FAIL") << "\"\n}\n";
  return os.str();
}

NormalityReport normality_battery(const OrbitRecord& orbit, const BetaSystem& sys, const NormalityOptions& opt) {
  NormalityReport r;
  const auto& d = orbit.digits;
  r.N = d.size();
  r.alphabet = sys.alphabet_size();
  require(r.N >= 3, ErrorKind::InvalidArgument, "need at least 3 digits");
  int B = r.alphabet;
  r.digit_freqs.assign(static_cast<std::size_t>(B), 0.0);
  for (int x : d) r.digit_freqs[static_cast<std::size_t>(x)] += 1.0 / static_cast<double>(r.N);
  DigitProcess parry = parry_process(sys);
  bool ok = true;
  for (int L = 1; L <= 3; ++L) {
    std::size_t words = 1;
    for (int i = 0; i < L; ++i) words *= static_cast<std::size_t>(B);
    std::vector<double> expect(words);
    std::vector<int> w(static_cast<std::size_t>(L));
    for (std::size_t idx = 0; idx < words; ++idx) {
      std::size_t t = idx;
      for (int i = L - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<int>(t % static_cast<std::size_t>(B));
        t /= static_cast<std::size_t>(B);
      }
      expect[idx] = parry.cylinder_mass(w);
    }
    std::size_t nb = r.N / static_cast<std::size_t>(L);
    std::vector<double> obs(words, 0.0);
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t idx = 0;
      for (int i = 0; i < L; ++i) idx = idx * static_cast<std::size_t>(B) + static_cast<std::size_t>(d[b * L + i]);
      obs[idx] += 1;
    }
    double chi = 0;
    int support = 0;
    for (std::size_t idx = 0; idx < words; ++idx) {
      if (expect[idx] > 1e-15) {
        ++support;
        double e = expect[idx] * static_cast<double>(nb);
        chi += (obs[idx] - e) * (obs[idx] - e) / e;
      } else if (obs[idx] > 0) {
        chi = std::numeric_limits<double>::infinity();
      }
    }
    int df = std::max(1, support - 1);
    double thr = chi2_quantile(df, opt.chi2_level);
    r.block_chi2.push_back(chi);
    r.block_df.push_back(df);
    r.chi2_threshold.push_back(thr);
    if (!(chi < thr)) ok = false;
  }
  GridMeasure emp = orbit_empirical(orbit, opt.cells);
  GridMeasure target = ParryDensity(sys).to_grid(opt.cells);
  r.ks_vs_parry = ks_distance(emp, target);
  r.ks_threshold = opt.ks_threshold >= 0 ? opt.ks_threshold
                                         : 4.0 / std::sqrt(static_cast<double>(r.N)) * std::sqrt(static_cast<double>(opt.cells));
  if (!(r.ks_vs_parry < r.ks_threshold)) ok = false;
  if (sys.beta().is_integer_base()) r.weyl = weyl_from_points(orbit.points, opt.weyl_m);
  r.pass = ok;
  return r;
}

NormalityReport normality_battery(const Rational& x0, const BetaSystem& sys, std::size_t n, const NormalityOptions& opt) {
  return normality_battery(beta_orbit(x0, sys, n), sys, opt);
}

WeylResult weyl_sums(const Rational& x0, const PisotNumber& beta, std::size_t n, const std::vector<int>& m_list) {
  require(n >= 1, ErrorKind::InvalidArgument, "N must be at least 1");
  WeylResult res;
  if (beta.is_integer_base()) {
    require(x0 >= 0 && x0 < 1, ErrorKind::OutOfInterval, "x0 must lie in [0, 1)");
    long long b = beta.integer_value();
    std::vector<int> d = integer_base_digits(x0, b, n + 80);
    std::vector<double> pts(n);
    for (std::size_t k = 0; k < n; ++k) pts[k] = digits_value(d, k, 80, static_cast<double>(b));
    res.magnitudes = weyl_from_points(pts, m_list);
    res.error_bound = 1e-15;
    return res;
  }
  double lb = std::log2(beta.value());
  double mag = std::max(1.0, std::fabs(to_double(x0)));
  long bits = static_cast<long>(std::ceil(static_cast<double>(n) * lb + std::log2(mag) + std::log2(static_cast<double>(n)))) + 96;
  require(bits <= (1L << 26), ErrorKind::PrecisionExhausted, "precision budget exceeded");
  Mp b = beta.value_mp(static_cast<int>(bits + 16));
  Mp y(bits), fr(64);
  set_rational(y.get(), x0, MPFR_RNDN);
  std::vector<double> pts(n);
  for (std::size_t k = 0; k < n; ++k) {
    mpfr_frac(fr.get(), y.get(), MPFR_RNDN);
    double f = fr.to_double();
    if (f < 0) f += 1.0;
    pts[k] = f;
    mpfr_mul(y.get(), y.get(), b.get(), MPFR_RNDN);
  }
  res.magnitudes = weyl_from_points(pts, m_list);
  res.precision_bits = bits;
  // relative error <= (k + 1) 2^-bits, value <= mag beta^k
  res.error_bound = std::ldexp(static_cast<double>(n + 1) * mag, static_cast<int>(static_cast<double>(n) * lb) - static_cast<int>(bits) + 1) + 1e-16;
  return res;
}

std::vector<std::vector<int>> sample_digit_strings(const DigitProcess& p, std::size_t n_points, std::size_t n_digits,
                                                   std::uint64_t seed) {
  std::vector<std::vector<int>> out(n_points);
  parallel_for(n_points, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    out[i] = p.sample_digits(n_digits, rng);
  });
  return out;
}

SampleMeasure sample_markov(const DigitProcess& p, std::size_t n_points, std::size_t n_digits, std::uint64_t seed) {
  auto strings = sample_digit_strings(p, n_points, n_digits, seed);
  SampleMeasure s;
  s.seed = seed;
  s.generator_tag = p.tag;
  s.points.resize(n_points);
  double b = p.base.value();
  for (std::size_t i = 0; i < n_points; ++i) s.points[i] = digits_value(strings[i], 0, std::min<std::size_t>(n_digits, 80), b);
  return s;
}

LocalAverageResult local_average(const DigitProcess& p, const std::vector<int>& x, std::size_t n_max, int level) {
  require(p.integer_base(), ErrorKind::InvalidArgument, "local averages need an integer base");
  require(level >= 1, ErrorKind::InvalidArgument, "level must be at least 1");
  require(x.size() >= n_max + static_cast<std::size_t>(level), ErrorKind::InvalidArgument,
          "need at least n_max + level digits of x");
  std::size_t S = static_cast<std::size_t>(p.states());
  long long b = p.int_base();
  std::vector<GridMeasure> G;
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> e(S, 0.0);
    e[s] = 1.0;
    bool reachable = false;
    for (const Edge& ed : p.trans[s]) reachable = reachable || ed.prob > 0;
    G.push_back(reachable ? p.grid(e, level) : GridMeasure{0.0, 1.0, {}});
  }
  std::size_t cells = 1;
  for (int i = 0; i < level; ++i) cells *= static_cast<std::size_t>(b);
  std::vector<double> alpha = p.init;
  {
    double s = 0;
    for (double v : alpha) s += v;
    for (double& v : alpha) v /= s;
  }
  std::vector<double> asum(S, 0.0), hist(cells, 0.0);
  LocalAverageResult res;
  res.ks_trace.reserve(n_max);
  GridMeasure cond{0.0, 1.0, std::vector<double>(cells, 0.0)};
  GridMeasure emp = cond;
  for (std::size_t n = 0; n < n_max; ++n) {
    for (std::size_t s = 0; s < S; ++s) asum[s] += alpha[s];
    std::size_t idx = 0;
    for (int i = 0; i < level; ++i) idx = idx * static_cast<std::size_t>(b) + static_cast<std::size_t>(x[n + i]);
    hist[idx] += 1.0;
    double inv = 1.0 / static_cast<double>(n + 1);
    std::fill(cond.weights.begin(), cond.weights.end(), 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      if (asum[s] == 0) continue;
      for (std::size_t c = 0; c < cells; ++c) cond.weights[c] += asum[s] * inv * G[s].weights[c];
    }
    for (std::size_t c = 0; c < cells; ++c) emp.weights[c] = hist[c] * inv;
    res.ks_trace.push_back(ks_distance(cond, emp));
    alpha = p.forward(alpha, x[n]);
    double s = 0;
    for (double v : alpha) s += v;
    require(s > 0, ErrorKind::ZeroCylinder, "cylinder of x has zero mass after " + std::to_string(n + 1) + " digits");
    for (double& v : alpha) v /= s;
  }
  res.conditional_average = cond;
  res.orbit_average = emp;
  return res;
}

OrthogonalityResult martingale_orthogonality(const DigitProcess& p, int k, std::size_t n_points, std::uint64_t seed) {
  require(k >= 1 && n_points >= 1, ErrorKind::InvalidArgument, "need k >= 1 and at least one point");
  auto cyl = enumerate_cylinders(p, k);
  std::vector<int> w = std::max_element(cyl.begin(), cyl.end(), [](const auto& a, const auto& b) { return a.second < b.second; })->first;
  OrthogonalityResult r;
  r.pairs = {{0, 1}, {0, 2}, {1, 3}};
  auto strings = sample_digit_strings(p, n_points, static_cast<std::size_t>(4 * k), seed);
  std::vector<std::array<double, 4>> g(n_points);
  parallel_for(n_points, [&](std::size_t i) {
    const auto& x = strings[i];
    std::vector<double> alpha = p.init;
    for (int blk = 0; blk < 4; ++blk) {
      double s = 0;
      for (double v : alpha) s += v;
      std::vector<double> a = alpha;
      for (double& v : a) v /= s;
      double cond = p.cylinder_mass_from(a, w);
      bool hit = std::equal(w.begin(), w.end(), x.begin() + blk * k);
      g[i][static_cast<std::size_t>(blk)] = cond - (hit ? 1.0 : 0.0);
      for (int j = 0; j < k; ++j) a = p.forward(a, x[static_cast<std::size_t>(blk * k + j)]);
      alpha = a;
    }
  });
  r.threshold = 4.0 / std::sqrt(static_cast<double>(n_points));
  r.pass = true;
  for (auto [a, b] : r.pairs) {
    double c = 0;
    for (std::size_t i = 0; i < n_points; ++i) c += g[i][static_cast<std::size_t>(a)] * g[i][static_cast<std::size_t>(b)];
    c /= static_cast<double>(n_points);
    r.correlation.push_back(c);
    if (!(std::fabs(c) < r.threshold)) r.pass = false;
  }
  return r;
}

double block_entropy_rate(const std::vector<int>& digits, int k, int alphabet) {
  require(k >= 1 && digits.size() >= static_cast<std::size_t>(k), ErrorKind::InvalidArgument, "not enough digits");
  std::unordered_map<std::uint64_t, std::size_t> counts;
  std::size_t total = digits.size() - static_cast<std::size_t>(k) + 1;
  for (std::size_t i = 0; i < total; ++i) {
    std::uint64_t key = 0;
    for (int j = 0; j < k; ++j) key = key * static_cast<std::uint64_t>(alphabet) + static_cast<std::uint64_t>(digits[i + j]);
    ++counts[key];
  }
  std::vector<std::size_t> c;
  for (auto& [key, v] : counts) c.push_back(v);
  std::sort(c.begin(), c.end());
  double h = 0;
  for (std::size_t v : c) {
    double q = static_cast<double>(v) / static_cast<double>(total);
    h -= q * std::log(q);
  }
  return h / k;
}

double gauss_orbit_ks(const Rational& x, std::size_t n, std::size_t cells) {
  std::vector<BigInt> a = cf_expansion(x, n + 40);
  require(a.size() > 40, ErrorKind::InvalidArgument, "rational has too few partial quotients");
  std::size_t m = std::min(n, a.size() - 40);
  SampleMeasure s;
  for (std::size_t k = 0; k < m; ++k) {
    double v = 0;
    for (std::size_t j = k + 40; j-- > k;) v = 1.0 / (a[j].convert_to<double>() + v);
    s.points.push_back(std::clamp(v, 0.0, 1.0));
  }
  GridMeasure emp = bin_samples(s, 0.0, 1.0, cells);
  GridMeasure gauss{0.0, 1.0, std::vector<double>(cells)};
  for (std::size_t i = 0; i < cells; ++i) {
    double lo = static_cast<double>(i) / static_cast<double>(cells), hi = static_cast<double>(i + 1) / static_cast<double>(cells);
    gauss.weights[i] = std::log2((1 + hi) / (1 + lo));
  }
  return ks_distance(emp, gauss);
}

}  // namespace nl
