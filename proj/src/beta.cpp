#include "nl/beta.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

namespace nl {

int EventuallyPeriodic::at(std::size_t i) const {
  if (i < preperiod.size()) return preperiod[i];
  if (period.empty()) return 0;
  return period[(i - preperiod.size()) % period.size()];
}

std::vector<int> EventuallyPeriodic::unroll(std::size_t n) const {
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
  return out;
}

std::string EventuallyPeriodic::str() const {
  std::string s = digits_to_string(preperiod);
  if (!period.empty()) s += "(" + digits_to_string(period) + ")";
  return s;
}

namespace {

struct GreedyOrbit {
  std::vector<int> digits;
  std::vector<ZKey> points;  // T^n 1 for n = 0..; points[0] = 1
  bool terminates = false;
  std::size_t loop_start = 0;  // index into points where the cycle begins
};

GreedyOrbit greedy_orbit_of_one(const PisotNumber& beta, std::size_t budget) {
  GreedyOrbit g;
  std::map<ZKey, std::size_t> seen;
  ZKey t = beta.key_int(1);
  g.points.push_back(t);
  for (std::size_t i = 0; i < budget; ++i) {
    ZKey bt = beta.key_shift_add(t, 0);
    long long d = beta.key_floor(bt);
    g.digits.push_back(static_cast<int>(d));
    bt.c[0] -= d;
    t = bt;
    if (t == ZKey{}) {
      g.terminates = true;
      return g;
    }
    auto it = seen.find(t);
    if (it != seen.end()) {
      g.loop_start = it->second;
      return g;
    }
    seen.emplace(t, g.digits.size());
    g.points.push_back(t);
  }
  fail(ErrorKind::PeriodNotFound, "no repetition in the orbit of 1 within " + std::to_string(budget) + " steps");
}

}  // namespace

EventuallyPeriodic greedy_expansion_of_one(const PisotNumber& beta, std::size_t budget) {
  GreedyOrbit g = greedy_orbit_of_one(beta, budget);
  EventuallyPeriodic e;
  if (g.terminates) {
    e.preperiod = g.digits;
  } else {
    e.preperiod.assign(g.digits.begin(), g.digits.begin() + static_cast<long>(g.loop_start));
    e.period.assign(g.digits.begin() + static_cast<long>(g.loop_start), g.digits.end());
  }
  return e;
}

EventuallyPeriodic expansion_of_one(const PisotNumber& beta, std::size_t budget) {
  EventuallyPeriodic e = greedy_expansion_of_one(beta, budget);
  if (e.period.empty()) {
    e.period = e.preperiod;
    e.period.back() -= 1;
    e.preperiod.clear();
  }
  return e;
}

BetaSystem::BetaSystem(const PisotNumber& beta, std::size_t budget) : beta_(beta) {
  B_ = beta.is_integer_base() ? static_cast<int>(beta.integer_value()) : static_cast<int>(std::floor(beta.value())) + 1;
  a_ = expansion_of_one(beta, budget);
  // longest zero run in pre + period + period (catches runs across the wrap)
  std::vector<int> w = a_.preperiod;
  for (int r = 0; r < 2; ++r) w.insert(w.end(), a_.period.begin(), a_.period.end());
  int run = 0;
  for (int d : w) {
    run = d == 0 ? run + 1 : 0;
    n0_ = std::max(n0_, run);
  }
  if (std::all_of(a_.period.begin(), a_.period.end(), [](int d) { return d == 0; })) n0_ = static_cast<int>(w.size());

  int S = states();
  v_.assign(S, 1.0);
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> nv(S, 0.0);
    for (int s = 0; s < S; ++s) {
      int ad = a_.at(s);
      nv[s] += ad * v_[0];
      nv[s] += v_[step(s, ad)];
    }
    double mx = *std::max_element(nv.begin(), nv.end());
    double diff = 0;
    for (int s = 0; s < S; ++s) {
      nv[s] /= mx;
      diff = std::max(diff, std::fabs(nv[s] - v_[s]));
    }
    v_ = nv;
    if (diff < 1e-16) break;
  }
  pi_.assign(S, 1.0 / S);
  for (int it = 0; it < 100000; ++it) {
    std::vector<double> np(S, 0.0);
    for (int s = 0; s < S; ++s)
      for (int d = 0; d <= a_.at(s); ++d) np[step(s, d)] += pi_[s] * parry_prob(s, d);
    double sum = 0;
    for (double x : np) sum += x;
    double diff = 0;
    for (int s = 0; s < S; ++s) {
      np[s] /= sum;
      diff = std::max(diff, std::fabs(np[s] - pi_[s]));
    }
    pi_ = np;
    if (diff < 1e-17) break;
  }
}

int BetaSystem::step(int state, int d) const {
  int ad = a_.at(static_cast<std::size_t>(state));
  if (d < ad) return 0;
  if (d > ad) return -1;
  int nx = state + 1;
  if (nx == states()) nx = static_cast<int>(a_.preperiod.size());
  return nx;
}

double BetaSystem::parry_prob(int state, int d) const {
  int nx = step(state, d);
  if (nx < 0) return 0.0;
  return v_[nx] / (beta_.value() * v_[state]);
}

bool is_admissible(const std::vector<int>& word, const BetaSystem& sys) {
  int s = 0;
  for (int d : word) {
    require(d >= 0 && d < sys.alphabet_size(), ErrorKind::DigitOutOfRange,
            "digit " + std::to_string(d) + " outside {0.." + std::to_string(sys.alphabet_size() - 1) + "}");
    s = sys.step(s, d);
    if (s < 0) return false;
  }
  return true;
}

int zero_run_bound(const BetaSystem& sys) { return sys.zero_run_bound(); }

double digits_value(const std::vector<int>& d, std::size_t from, std::size_t count, double beta) {
  double v = 0;
  std::size_t end = std::min(d.size(), from + count);
  for (std::size_t i = end; i-- > from;) v = (v + d[i]) / beta;
  return v;
}

std::string digits_to_string(const std::vector<int>& d) {
  bool small = std::all_of(d.begin(), d.end(), [](int x) { return x >= 0 && x <= 9; });
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (small) s += static_cast<char>('0' + d[i]);
    else {
      if (i) s += ',';
      s += std::to_string(d[i]);
    }
  }
  return s;
}

std::vector<int> digits_from_string(const std::string& s) {
  std::vector<int> out;
  if (s.find(',') != std::string::npos) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stoi(item));
      } catch (const std::exception&) {
        fail(ErrorKind::InvalidArgument, "bad digit '" + item + "'");
      }
    }
    return out;
  }
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    require(c >= '0' && c <= '9', ErrorKind::InvalidArgument, std::string("bad digit '") + c + "'");
    out.push_back(c - '0');
  }
  return out;
}

std::vector<int> integer_base_digits(const Rational& x, long long base, std::size_t n) {
  require(base >= 2, ErrorKind::InvalidArgument, "base must be at least 2");
  require(x >= 0 && x < 1, ErrorKind::OutOfInterval, "point must lie in [0, 1)");
  std::vector<int> out(n, 0);
  if (n == 0) return out;
  BigInt p = numerator(x), q = denominator(x);
  if (base <= 62) {
    BigInt pw;
    mpz_ui_pow_ui(pw.backend().data(), static_cast<unsigned long>(base), n);
    BigInt m = p * pw / q;
    std::string s(mpz_sizeinbase(m.backend().data(), static_cast<int>(base)) + 2, '\0');
    mpz_get_str(s.data(), static_cast<int>(base), m.backend().data());
    s.resize(std::strlen(s.c_str()));
    if (s == "0") s.clear();
    std::size_t off = n - s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      char c = s[i];
      int v = c >= '0' && c <= '9' ? c - '0' : (c >= 'a' && c <= 'z' ? c - 'a' + 10 : c - 'A' + 36);
      if (base > 36 && c >= 'a' && c <= 'z') v = c - 'a' + 36;
      if (base > 36 && c >= 'A' && c <= 'Z') v = c - 'A' + 10;
      out[off + i] = v;
    }
    return out;
  }
  BigInt r = p;
  for (std::size_t i = 0; i < n; ++i) {
    r *= base;
    BigInt d = r / q;
    r -= d * q;
    out[i] = static_cast<int>(d);
  }
  return out;
}

namespace {

OrbitRecord finish_points(OrbitRecord rec, const std::vector<int>& digits, std::size_t n, double beta) {
  rec.digits.assign(digits.begin(), digits.begin() + static_cast<long>(n));
  rec.points.resize(n);
  for (std::size_t k = 0; k < n; ++k) rec.points[k] = digits_value(digits, k, 80, beta);
  return rec;
}

}  // namespace

OrbitRecord beta_orbit(const Rational& x0, const BetaSystem& sys, std::size_t n) {
  require(n >= 1, ErrorKind::InvalidArgument, "orbit length must be at least 1");
  require(x0 >= 0 && x0 < 1, ErrorKind::OutOfInterval, "x0 must lie in [0, 1)");
  if (sys.beta().is_integer_base()) {
    long long b = sys.beta().integer_value();
    std::vector<int> d = integer_base_digits(x0, b, n + 80);
    OrbitRecord rec;
    rec.start = x0.str();
    rec.method = "exact";
    return finish_points(std::move(rec), d, n, static_cast<double>(b));
  }
  QBetaPoint q;
  q.num.assign(static_cast<std::size_t>(sys.beta().degree()), BigInt(0));
  q.num[0] = numerator(x0);
  q.den = denominator(x0);
  OrbitRecord rec = beta_orbit(q, sys, n);
  rec.start = x0.str();
  return rec;
}

OrbitRecord beta_orbit(const QBetaPoint& x0, const BetaSystem& sys, std::size_t n) {
  const PisotNumber& beta = sys.beta();
  int deg = beta.degree();
  require(x0.den > 0, ErrorKind::InvalidArgument, "denominator must be positive");
  std::vector<BigInt> num = x0.num;
  num.resize(static_cast<std::size_t>(deg));
  std::vector<double> pw(static_cast<std::size_t>(deg), 1.0);
  for (int j = 1; j < deg; ++j) pw[j] = pw[j - 1] * beta.value();
  // Coordinates and denominator share a power-of-two scale so large denominators stay finite.
  long shift = std::max<long>(0, static_cast<long>(msb(x0.den)) - 900);
  auto approx = [&](const std::vector<BigInt>& e, double& mag) {
    double v = 0;
    mag = 0;
    for (int j = 0; j < deg; ++j) {
      double c = e[j] == 0 ? 0.0 : BigInt(e[j] >> shift).convert_to<double>();
      v += c * pw[j];
      mag += std::fabs(c) * pw[j];
    }
    return v;
  };
  double den = BigInt(x0.den >> shift).convert_to<double>();
  {
    double mag;
    double v = approx(num, mag) / den;
    require(v > -1e-9 && v < 1 + 1e-9, ErrorKind::OutOfInterval, "x0 must lie in [0, 1)");
    std::vector<BigInt> t = num;
    require(beta.sign_of_reduced(t) >= 0, ErrorKind::OutOfInterval, "x0 must lie in [0, 1)");
    t[0] -= x0.den;
    require(beta.sign_of_reduced(t) < 0, ErrorKind::OutOfInterval, "x0 must lie in [0, 1)");
  }
  const auto& mp = beta.minpoly();
  std::vector<int> digits;
  digits.reserve(n + 80);
  std::vector<double> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n + 80; ++k) {
    double mag;
    if (k < n) points.push_back(approx(num, mag) / den);
    // beta * x
    std::vector<BigInt> bx(static_cast<std::size_t>(deg));
    BigInt top = num[deg - 1];
    for (int j = deg - 1; j >= 1; --j) bx[j] = num[j - 1];
    bx[0] = 0;
    if (top != 0)
      for (int j = 0; j < deg; ++j) bx[j] -= top * mp[j];
    double v = approx(bx, mag) / den;
    double f = std::floor(v);
    long long d;
    double err = (mag / den) * 1e-12 + 1e-300;
    if (v - f > err && f + 1 - v > err) {
      d = static_cast<long long>(f);
    } else {
      long long m = std::llround(v);
      std::vector<BigInt> diff = bx;
      diff[0] -= BigInt(m) * x0.den;
      d = beta.sign_of_reduced(diff) >= 0 ? m : m - 1;
    }
    digits.push_back(static_cast<int>(d));
    bx[0] -= BigInt(d) * x0.den;
    num = std::move(bx);
  }
  OrbitRecord rec;
  rec.method = "exact";
  rec.digits.assign(digits.begin(), digits.begin() + static_cast<long>(n));
  rec.points = std::move(points);
  rec.start = "qbeta";
  return rec;
}

OrbitRecord beta_orbit(const Mp& x0, const BetaSystem& sys, std::size_t n) {
  require(n >= 1, ErrorKind::InvalidArgument, "orbit length must be at least 1");
  require(mpfr_sgn(x0.get()) >= 0 && mpfr_cmp_ui(x0.get(), 1) < 0, ErrorKind::OutOfInterval, "x0 must lie in [0, 1)");
  const PisotNumber& beta = sys.beta();
  double lb = std::log2(beta.value());
  std::size_t total = n + 80;
  long base_bits = static_cast<long>(std::ceil(static_cast<double>(total) * lb)) + 64;
  for (long bits = base_bits; bits <= 4 * base_bits + 4096; bits = bits * 2) {
    Mp b = beta.value_mp(static_cast<int>(bits));
    Mp y(bits), z(bits), fl(bits);
    mpfr_set(y.get(), x0.get(), MPFR_RNDN);
    // log2 of an upper bound on |y - T^k x0|
    double lerr = -static_cast<double>(bits) + 1;
    bool ok = true;
    std::vector<int> digits;
    std::vector<double> points;
    digits.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
      if (k < n) points.push_back(y.to_double());
      mpfr_mul(z.get(), y.get(), b.get(), MPFR_RNDN);
      lerr = std::max(lerr + lb, -static_cast<double>(bits) + 2.0) + 1.0;
      mpfr_floor(fl.get(), z.get());
      mpfr_sub(y.get(), z.get(), fl.get(), MPFR_RNDN);
      double frac = y.to_double();
      double dist = std::min(frac, 1.0 - frac);
      if (k < n + 8 && (lerr > -8 || (dist > 0 ? std::log2(dist) : -1e9) <= lerr + 1)) {
        ok = false;
        break;
      }
      digits.push_back(static_cast<int>(mpfr_get_si(fl.get(), MPFR_RNDN)));
    }
    if (!ok) continue;
    OrbitRecord rec;
    rec.start = fmt(x0.to_double());
    rec.method = "mpfr:" + std::to_string(bits);
    rec.digits.assign(digits.begin(), digits.begin() + static_cast<long>(n));
    rec.points = std::move(points);
    return rec;
  }
  fail(ErrorKind::PrecisionExhausted, "could not certify orbit digits");
}

ParryDensity::ParryDensity(const BetaSystem& sys) {
  const PisotNumber& beta = sys.beta();
  beta_ = beta.value();
  B_ = sys.alphabet_size();
  GreedyOrbit g = greedy_orbit_of_one(beta, 100000);
  std::size_t np = g.points.size();
  double p = g.terminates ? 0.0 : static_cast<double>(np - g.loop_start);
  for (std::size_t i = 0; i < np; ++i) {
    double c = std::pow(beta_, -static_cast<double>(i));
    if (!g.terminates && i >= g.loop_start) c /= 1.0 - std::pow(beta_, -p);
    double t = i == 0 ? 1.0 : beta.key_value(g.points[i]);
    t_.push_back(t);
    c_.push_back(c);
  }
  double total = 0;
  for (std::size_t i = 0; i < t_.size(); ++i) total += c_[i] * t_[i];
  for (double& c : c_) c /= total;
}

double ParryDensity::operator()(double x) const {
  if (x < 0 || x >= 1) return 0.0;
  double h = 0;
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (x < t_[i]) h += c_[i];
  return h;
}

double ParryDensity::sup() const { return (*this)(0.0); }

double ParryDensity::transfer(double x) const {
  double s = 0;
  for (int d = 0; d < B_; ++d) {
    double y = (x + d) / beta_;
    if (y < 1) s += (*this)(y);
  }
  return s / beta_;
}

double ParryDensity::transfer_residual() const {
  std::vector<double> knots{0.0, 1.0};
  for (double t : t_) {
    knots.push_back(t);
    for (int d = 0; d < B_ + 1; ++d) {
      double y = beta_ * t - d;
      if (y > 0 && y < 1) knots.push_back(y);
    }
  }
  for (int d = 0; d < B_ + 1; ++d) {
    double y = beta_ - d;
    if (y > 0 && y < 1) knots.push_back(y);
  }
  std::sort(knots.begin(), knots.end());
  std::vector<double> uniq;
  for (double k : knots)
    if (uniq.empty() || k - uniq.back() > 1e-9) uniq.push_back(k);
  double r = 0;
  for (std::size_t i = 0; i + 1 < uniq.size(); ++i) {
    double m = 0.5 * (uniq[i] + uniq[i + 1]);
    r = std::max(r, std::fabs(transfer(m) - (*this)(m)));
  }
  return r;
}

GridMeasure ParryDensity::to_grid(std::size_t cells) const {
  GridMeasure g{0.0, 1.0, std::vector<double>(cells, 0.0)};
  double w = 1.0 / static_cast<double>(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    double a = static_cast<double>(j) * w, b = static_cast<double>(j + 1) * w;
    double s = 0;
    for (std::size_t i = 0; i < t_.size(); ++i) s += c_[i] * std::max(0.0, std::min(b, t_[i]) - a);
    g.weights[j] = s;
  }
  return g;
}

GridMeasure parry_density(const BetaSystem& sys, int level) {
  require(level >= 1, ErrorKind::InvalidArgument, "level must be at least 1");
  double cells = std::ceil(std::pow(sys.beta().value(), level));
  require(cells <= 1e8, ErrorKind::InvalidArgument, "level too large");
  return ParryDensity(sys).to_grid(static_cast<std::size_t>(cells));
}

}  // namespace nl
