#include "nl/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace nl {

IntMat IntMat::operator*(const IntMat& o) const {
  return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Rational IntMat::apply(const Rational& x) const {
  BigInt P = numerator(x), Q = denominator(x);
  BigInt num = a * P + b * Q, den = c * P + d * Q;
  require(den != 0, ErrorKind::InvalidArgument, "pole hit");
  return Rational(num, den);
}

double IntMat::apply(double x) const {
  return (a.convert_to<double>() * x + b.convert_to<double>()) / (c.convert_to<double>() * x + d.convert_to<double>());
}

IFSMap IFSMap::affine(const Rational& a, const Rational& b) {
  IFSMap f;
  f.kind = Kind::Affine;
  f.slope = a;
  f.offset = b;
  return f;
}

IFSMap IFSMap::moebius(long long p, long long q, long long r, long long s) {
  IFSMap f;
  f.kind = Kind::Moebius;
  f.p = p;
  f.q = q;
  f.r = r;
  f.s = s;
  return f;
}

IntMat IFSMap::matrix() const {
  if (kind == Kind::Moebius) return {BigInt(p), BigInt(q), BigInt(r), BigInt(s)};
  BigInt da = denominator(slope), db = denominator(offset);
  BigInt L = da / boost::multiprecision::gcd(da, db) * db;
  return {numerator(slope) * (L / da), numerator(offset) * (L / db), BigInt(0), L};
}

double IFSMap::apply(double x) const {
  if (kind == Kind::Affine) return to_double(slope) * x + to_double(offset);
  return (static_cast<double>(p) * x + static_cast<double>(q)) / (static_cast<double>(r) * x + static_cast<double>(s));
}

double IFSMap::derivative(double x) const {
  if (kind == Kind::Affine) return to_double(slope);
  double den = static_cast<double>(r) * x + static_cast<double>(s);
  return static_cast<double>(p * s - q * r) / (den * den);
}

std::string IFSMap::str() const {
  if (kind == Kind::Affine) return "affine " + slope.str() + " " + offset.str();
  return "moebius " + std::to_string(p) + " " + std::to_string(q) + " " + std::to_string(r) + " " + std::to_string(s);
}

namespace {

void check_weights(const IFS& ifs) {
  require(!ifs.maps.empty(), ErrorKind::InvalidArgument, "IFS has no maps");
  require(ifs.weights.size() == ifs.maps.size(), ErrorKind::InvalidArgument, "need one weight per map");
  double s = 0;
  for (double w : ifs.weights) {
    require(w > 0, ErrorKind::InvalidArgument, "weights must be positive");
    s += w;
  }
  require(std::fabs(s - 1) < 1e-9, ErrorKind::InvalidArgument, "weights must sum to 1");
}

std::vector<int> draw_word(const IFS& ifs, int depth, Rng& rng) {
  std::vector<int> w(static_cast<std::size_t>(depth));
  for (int& x : w) x = rng.pick(ifs.weights);
  return w;
}

IntMat product(const std::vector<IntMat>& ms, const std::vector<int>& w, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return ms[static_cast<std::size_t>(w[lo])];
  if (hi == lo) return IntMat{};
  std::size_t mid = (lo + hi) / 2;
  return product(ms, w, lo, mid) * product(ms, w, mid, hi);
}

}  // namespace

ValidationReport validate_regular(const IFS& ifs) {
  check_weights(ifs);
  require(ifs.lo < ifs.hi, ErrorKind::InvalidArgument, "interval must have lo < hi");
  ValidationReport rep;
  for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
    const IFSMap& f = ifs.maps[i];
    std::string name = "map " + std::to_string(i) + " (" + f.str() + ")";
    double sup;
    if (f.kind == IFSMap::Kind::Affine) {
      require(f.slope != 0, ErrorKind::DegenerateInput, name + " is constant");
      require(f.slope > 0, ErrorKind::OrientationReversing, name + " reverses orientation");
      require(f.slope < 1, ErrorKind::NotContracting, name + " has slope >= 1");
      sup = to_double(f.slope);
    } else {
      long long det = f.p * f.s - f.q * f.r;
      require(det != 0, ErrorKind::DegenerateInput, name + " has zero determinant");
      Rational dl = Rational(f.r) * ifs.lo + f.s, dh = Rational(f.r) * ifs.hi + f.s;
      require(dl != 0 && dh != 0 && (dl > 0) == (dh > 0), ErrorKind::NotContracting, name + " has a pole in I");
      require(det > 0, ErrorKind::OrientationReversing, name + " reverses orientation");
      Rational d1 = Rational(det) / (dl * dl), d2 = Rational(det) / (dh * dh);
      Rational m = std::max(d1, d2);
      require(m < 1, ErrorKind::NotContracting, name + " has sup |f'| >= 1 on I");
      sup = to_double(m);
    }
    IntMat M = f.matrix();
    Rational a = M.apply(ifs.lo), b = M.apply(ifs.hi);
    require(a >= ifs.lo && b <= ifs.hi, ErrorKind::NotContracting, name + " does not map I into itself");
    rep.images.emplace_back(a, b);
    rep.max_derivative.push_back(sup);
  }
  std::vector<std::pair<Rational, Rational>> sorted = rep.images;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    require(sorted[i + 1].first >= sorted[i].second, ErrorKind::OverlappingImages,
            "images [" + fmt(to_double(sorted[i].first)) + ", " + fmt(to_double(sorted[i].second)) + "] and [" +
                fmt(to_double(sorted[i + 1].first)) + ", " + fmt(to_double(sorted[i + 1].second)) + "] overlap");
  return rep;
}

double max_contraction(const IFS& ifs) {
  ValidationReport rep = validate_regular(ifs);
  return *std::max_element(rep.max_derivative.begin(), rep.max_derivative.end());
}

int depth_for_bits(const IFS& ifs, double bits) {
  double lam = max_contraction(ifs);
  double len = std::log2(to_double(ifs.hi - ifs.lo));
  return static_cast<int>(std::ceil((bits + len) / -std::log2(lam))) + 1;
}

SampleMeasure sample_measure(const IFS& ifs, std::size_t n, int depth, std::uint64_t seed, double resolution) {
  double lam = max_contraction(ifs);
  double diam = std::pow(lam, depth) * to_double(ifs.hi - ifs.lo);
  require(depth >= 0 && diam < resolution, ErrorKind::DepthTooShallow,
          "depth " + std::to_string(depth) + " leaves diameter " + fmt(diam) + " above resolution " + fmt(resolution));
  SampleMeasure s;
  s.seed = seed;
  s.generator_tag = "ifs";
  s.points.resize(n);
  double mid = to_double((ifs.lo + ifs.hi) / 2);
  parallel_for(n, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    std::vector<int> w = draw_word(ifs, depth, rng);
    double x = mid;
    for (std::size_t k = w.size(); k-- > 0;) x = ifs.maps[static_cast<std::size_t>(w[k])].apply(x);
    s.points[i] = x;
  });
  return s;
}

std::vector<Rational> sample_exact(const IFS& ifs, std::size_t n, int depth, std::uint64_t seed) {
  validate_regular(ifs);
  std::vector<IntMat> ms;
  for (const auto& f : ifs.maps) ms.push_back(f.matrix());
  Rational mid = (ifs.lo + ifs.hi) / 2;
  std::vector<Rational> out(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, i);
    std::vector<int> w = draw_word(ifs, depth, rng);
    out[i] = product(ms, w, 0, w.size()).apply(mid);
  });
  return out;
}

// ---- quadratic surds ---------------------------------------------------------

namespace {

QuadSurd make_surd(const Rational& a, const Rational& b, BigInt D) {
  QuadSurd s;
  s.a = a;
  if (b == 0 || D == 0) return s;
  require(D > 0, ErrorKind::InvalidArgument, "negative radicand");
  BigInt k = 1;
  for (BigInt f = 2; f * f <= D; ++f)
    while (D % (f * f) == 0) {
      D /= f * f;
      k *= f;
    }
  if (D == 1) {
    s.a += b * Rational(k);
    return s;
  }
  s.b = b * Rational(k);
  s.D = D.convert_to<long long>();
  return s;
}

long long common_D(const QuadSurd& x, const QuadSurd& y) {
  if (x.b == 0) return y.D;
  if (y.b == 0) return x.D;
  require(x.D == y.D, ErrorKind::InvalidArgument, "surds from different quadratic fields");
  return x.D;
}

// exact sign of u + v sqrt(D)
int surd_sign(const Rational& u, const Rational& v, long long D) {
  int su = u > 0 ? 1 : (u < 0 ? -1 : 0), sv = v > 0 ? 1 : (v < 0 ? -1 : 0);
  if (sv == 0 || D == 1) {
    Rational t = u + (D == 1 ? v : Rational(0));
    return t > 0 ? 1 : (t < 0 ? -1 : 0);
  }
  if (su == 0 || su == sv) return sv;
  Rational lhs = u * u, rhs = v * v * D;
  if (lhs == rhs) return 0;
  return lhs > rhs ? su : sv;
}

}  // namespace

QuadSurd surd_rational(const Rational& x) {
  QuadSurd s;
  s.a = x;
  return s;
}

double QuadSurd::value() const { return to_double(a) + to_double(b) * std::sqrt(static_cast<double>(D)); }

bool QuadSurd::operator==(const QuadSurd& o) const {
  if (b == 0 && o.b == 0) return a == o.a;
  return a == o.a && b == o.b && D == o.D;
}

QuadSurd QuadSurd::operator*(const QuadSurd& o) const {
  long long d = common_D(*this, o);
  return make_surd(a * o.a + b * o.b * d, a * o.b + o.a * b, BigInt(d));
}

QuadSurd QuadSurd::inverse() const {
  Rational n = a * a - b * b * D;
  require(n != 0, ErrorKind::InvalidArgument, "inverse of zero");
  return make_surd(a / n, -b / n, BigInt(D));
}

std::string QuadSurd::str() const {
  if (b == 0) return a.str();
  return a.str() + (b > 0 ? " + " : " - ") + Rational(b > 0 ? b : Rational(-b)).str() + "*sqrt(" + std::to_string(D) + ")";
}

QuadSurd pow(const QuadSurd& x, long long e) {
  QuadSurd base = e < 0 ? x.inverse() : x;
  unsigned long long k = static_cast<unsigned long long>(e < 0 ? -e : e);
  QuadSurd r = surd_rational(1);
  while (k) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

ContractionRatio contraction_ratio(const IFSMap& f, const Rational& lo, const Rational& hi) {
  ContractionRatio out;
  auto in_domain = [&](const QuadSurd& x) {
    return surd_sign(x.a - lo, x.b, x.D) >= 0 && surd_sign(hi - x.a, -x.b, x.D) >= 0;
  };
  if (f.kind == IFSMap::Kind::Affine) {
    require(f.slope != 1, ErrorKind::NoFixedPointInDomain, "slope 1 has no isolated fixed point");
    out.fixed_point = surd_rational(f.offset / (1 - f.slope));
    require(in_domain(out.fixed_point), ErrorKind::NoFixedPointInDomain, "fixed point outside the domain");
    out.derivative = surd_rational(f.slope);
    out.lambda = std::fabs(to_double(f.slope));
    return out;
  }
  long long det = f.p * f.s - f.q * f.r;
  std::vector<QuadSurd> cands;
  if (f.r == 0) {
    require(f.s != f.p, ErrorKind::NoFixedPointInDomain, "no fixed point");
    cands.push_back(surd_rational(Rational(f.q, f.s - f.p)));
  } else {
    BigInt disc = BigInt(f.s - f.p) * (f.s - f.p) + BigInt(4) * f.r * f.q;
    require(disc >= 0, ErrorKind::NoFixedPointInDomain, "fixed points are complex");
    Rational a(f.p - f.s, 2 * f.r);
    Rational b(1, 2 * f.r);
    cands.push_back(make_surd(a, b, disc));
    cands.push_back(make_surd(a, -b, disc));
  }
  bool found = false;
  for (const QuadSurd& x : cands) {
    if (!in_domain(x)) continue;
    QuadSurd w = surd_rational(Rational(f.r)) * x;
    w.a += f.s;
    QuadSurd der = (w * w).inverse() * surd_rational(Rational(det));
    double lam = std::fabs(der.value());
    if (!found || lam < out.lambda) {
      out.fixed_point = x;
      out.derivative = der;
      out.lambda = lam;
      found = true;
    }
  }
  require(found, ErrorKind::NoFixedPointInDomain, "no fixed point in [" + lo.str() + ", " + hi.str() + "]");
  return out;
}

Dependence mult_independent(const QuadSurd& a, const QuadSurd& b) {
  require(a.value() > 0 && b.value() > 0, ErrorKind::InvalidArgument, "inputs must be positive");
  require(!(a == surd_rational(1)) && !(b == surd_rational(1)), ErrorKind::InvalidArgument, "inputs must differ from 1");
  auto to_mp = [](const QuadSurd& x, Mp& out) {
    Mp t(out.bits());
    set_rational(out.get(), x.a, MPFR_RNDN);
    mpfr_set_si(t.get(), static_cast<long>(x.D), MPFR_RNDN);
    mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
    Mp bb(out.bits());
    set_rational(bb.get(), x.b, MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), bb.get(), MPFR_RNDN);
    mpfr_add(out.get(), out.get(), t.get(), MPFR_RNDN);
  };
  Mp la(512), lb(512), r(512);
  to_mp(a, la);
  to_mp(b, lb);
  mpfr_log(la.get(), la.get(), MPFR_RNDN);
  mpfr_log(lb.get(), lb.get(), MPFR_RNDN);
  mpfr_div(r.get(), la.get(), lb.get(), MPFR_RNDN);
  Dependence out;
  // convergents h/k of log a / log b
  BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  Mp x = r, fl(512);
  for (int depth = 0; depth < 200; ++depth) {
    mpfr_floor(fl.get(), x.get());
    BigInt q = BigInt(static_cast<long long>(mpfr_get_si(fl.get(), MPFR_RNDN)));
    BigInt h2 = q * h1 + h0, k2 = q * k1 + k0;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    out.cf_depth = depth + 1;
    if (k1 > 64 || abs(h1) > 64) break;
    long long P = h1.convert_to<long long>(), Q = k1.convert_to<long long>();
    if (Q >= 1 && pow(a, Q) == pow(b, P)) {
      out.dependent = true;
      out.p = P;
      out.q = Q;
      return out;
    }
    mpfr_sub(x.get(), x.get(), fl.get(), MPFR_RNDN);
    if (mpfr_zero_p(x.get()) || mpfr_get_exp(x.get()) < -400) break;
    mpfr_ui_div(x.get(), 1, x.get(), MPFR_RNDN);
  }
  return out;
}

IFS gauss_ifs(const std::vector<long long>& lambda, const std::vector<double>& weights) {
  std::vector<long long> L = lambda;
  std::sort(L.begin(), L.end());
  L.erase(std::unique(L.begin(), L.end()), L.end());
  require(L.size() >= 2, ErrorKind::InvalidArgument, "need at least two partial quotients");
  for (long long i : L) require(i >= 1, ErrorKind::InvalidArgument, "partial quotients must be positive");
  IFS ifs;
  for (long long i : L)
    for (long long j : L) ifs.maps.push_back(IFSMap::moebius(1, j, i, i * j + 1));
  if (weights.empty()) ifs.weights.assign(ifs.maps.size(), 1.0 / static_cast<double>(ifs.maps.size()));
  else ifs.weights = weights;
  long long m = L.front(), M = L.back();
  // hull of the attractor: [0; (M, m)^inf] and [0; (m, M)^inf]
  double xmin = contraction_ratio(IFSMap::moebius(1, m, M, M * m + 1)).fixed_point.value();
  double xmax = contraction_ratio(IFSMap::moebius(1, M, m, M * m + 1)).fixed_point.value();
  const double scale = 1099511627776.0;  // 2^40
  ifs.lo = Rational(static_cast<long long>(std::floor(xmin * scale)) - 1, static_cast<long long>(scale));
  ifs.hi = Rational(static_cast<long long>(std::ceil(xmax * scale)) + 1, static_cast<long long>(scale));
  validate_regular(ifs);
  return ifs;
}

IFS parse_ifs(std::istream& is) {
  IFS ifs;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::stringstream ss(line);
    std::string kw;
    if (!(ss >> kw)) continue;
    std::vector<std::string> args;
    std::string a;
    while (ss >> a) args.push_back(a);
    std::string where = "line " + std::to_string(lineno) + ": ";
    try {
      if (kw == "affine") {
        require(args.size() == 2, ErrorKind::ConfigError, where + "affine needs slope and offset");
        ifs.maps.push_back(IFSMap::affine(parse_rational(args[0]), parse_rational(args[1])));
      } else if (kw == "moebius") {
        require(args.size() == 4, ErrorKind::ConfigError, where + "moebius needs p q r s");
        ifs.maps.push_back(IFSMap::moebius(std::stoll(args[0]), std::stoll(args[1]), std::stoll(args[2]), std::stoll(args[3])));
      } else if (kw == "weights") {
        ifs.weights.clear();
        for (const auto& w : args) ifs.weights.push_back(to_double(parse_rational(w)));
      } else if (kw == "interval") {
        require(args.size() == 2, ErrorKind::ConfigError, where + "interval needs lo and hi");
        ifs.lo = parse_rational(args[0]);
        ifs.hi = parse_rational(args[1]);
      } else {
        fail(ErrorKind::ConfigError, where + "unknown directive '" + kw + "'");
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorKind::ConfigError, where + "bad number");
    }
  }
  if (ifs.weights.empty() && !ifs.maps.empty())
    ifs.weights.assign(ifs.maps.size(), 1.0 / static_cast<double>(ifs.maps.size()));
  return ifs;
}

void write_ifs(std::ostream& os, const IFS& ifs) {
  os << "interval " << ifs.lo.str() << ' ' << ifs.hi.str() << '\n';
  for (const auto& f : ifs.maps) os << f.str() << '\n';
  os << "weights";
  for (double w : ifs.weights) os << ' ' << fmt(w);
  os << '\n';
}

std::vector<BigInt> cf_expansion(const Rational& x, std::size_t max_terms) {
  std::vector<BigInt> out;
  BigInt p = numerator(x), q = denominator(x);
  // x in (0,1): skip the integer part
  BigInt a0 = p / q;
  p -= a0 * q;
  while (p != 0 && out.size() < max_terms) {
    BigInt a = q / p;
    BigInt r = q - a * p;
    out.push_back(a);
    q = p;
    p = r;
  }
  return out;
}

}  // namespace nl
