#include "nl/algebraic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace nl {

namespace {

using Cld = std::complex<long double>;

// ---- small complex MPFR helpers -------------------------------------------

struct Cx {
  Mp re, im;
  explicit Cx(long bits) : re(bits), im(bits) {}
};

void cx_mul(Cx& out, const Cx& a, const Cx& b, long bits) {
  Mp t1(bits), t2(bits), r(bits), i(bits);
  mpfr_mul(t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_sub(r.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_mul(t1.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(i.get(), t1.get(), t2.get(), MPFR_RNDN);
  out.re = r;
  out.im = i;
}

void cx_div(Cx& out, const Cx& a, const Cx& b, long bits) {
  Mp den(bits), t1(bits), t2(bits), r(bits), i(bits);
  mpfr_sqr(t1.get(), b.re.get(), MPFR_RNDN);
  mpfr_sqr(t2.get(), b.im.get(), MPFR_RNDN);
  mpfr_add(den.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_mul(t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_add(r.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_div(r.get(), r.get(), den.get(), MPFR_RNDN);
  mpfr_mul(t1.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_sub(i.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_div(i.get(), i.get(), den.get(), MPFR_RNDN);
  out.re = r;
  out.im = i;
}

// p(z) and p'(z) by Horner.
void cx_eval(const std::vector<long long>& p, const Cx& z, Cx& val, Cx& der, long bits) {
  Cx v(bits), d(bits), tmp(bits);
  for (std::size_t k = p.size(); k-- > 0;) {
    cx_mul(tmp, d, z, bits);
    mpfr_add(d.re.get(), tmp.re.get(), v.re.get(), MPFR_RNDN);
    mpfr_add(d.im.get(), tmp.im.get(), v.im.get(), MPFR_RNDN);
    cx_mul(tmp, v, z, bits);
    mpfr_add_si(v.re.get(), tmp.re.get(), static_cast<long>(p[k]), MPFR_RNDN);
    v.im = tmp.im;
  }
  val = v;
  der = d;
}

std::vector<Cld> aberth_ld(const std::vector<long long>& p) {
  int d = static_cast<int>(p.size()) - 1;
  long double bound = 0;
  for (int i = 0; i < d; ++i) bound = std::max(bound, std::fabs(static_cast<long double>(p[i])));
  bound += 1;
  std::vector<Cld> z(d);
  for (int i = 0; i < d; ++i) {
    long double ang = 2.0L * M_PIl * (i + 0.25L) / d + 0.4L;
    z[i] = std::polar(std::min(bound, 2.0L) * 0.9L, ang);
  }
  auto ev = [&](Cld x, Cld& der) {
    Cld v = 0;
    der = 0;
    for (int k = d; k >= 0; --k) {
      der = der * x + v;
      v = v * x + static_cast<long double>(p[k]);
    }
    return v;
  };
  for (int it = 0; it < 500; ++it) {
    long double move = 0;
    for (int i = 0; i < d; ++i) {
      Cld der;
      Cld v = ev(z[i], der);
      if (v == Cld(0)) continue;
      Cld ratio = v / der;
      Cld s = 0;
      for (int j = 0; j < d; ++j)
        if (j != i) s += 1.0L / (z[i] - z[j]);
      Cld w = ratio / (1.0L - ratio * s);
      z[i] -= w;
      move = std::max(move, std::abs(w));
    }
    if (move < 1e-17L) break;
  }
  return z;
}

struct CRat {
  Rational re, im;
};

CRat crat_mul(const CRat& a, const CRat& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Rational norm2(const CRat& a) { return a.re * a.re + a.im * a.im; }

CRat crat_eval(const std::vector<long long>& p, const CRat& z) {
  CRat v{0, 0};
  for (std::size_t k = p.size(); k-- > 0;) {
    v = crat_mul(v, z);
    v.re += p[k];
  }
  return v;
}

// Upper bound on sqrt(q) as an exact rational.
Rational sqrt_up(const Rational& q) {
  if (q <= 0) return Rational(0);
  Mp x(256);
  set_rational(x.get(), q, MPFR_RNDU);
  mpfr_sqrt(x.get(), x.get(), MPFR_RNDU);
  return exact_rational(x.get());
}

struct Isolation {
  bool ok = false;
  std::vector<CRat> z;
  std::vector<Rational> radius;
};

// Inclusion disks |x - z_i| <= d |p(z_i) / prod_{j!=i}(z_i - z_j)|: when they are
// pairwise disjoint each one holds exactly one root.
Isolation isolate(const std::vector<long long>& p, const std::vector<CRat>& z) {
  Isolation out;
  out.z = z;
  int d = static_cast<int>(z.size());
  out.radius.resize(d);
  for (int i = 0; i < d; ++i) {
    Rational num = norm2(crat_eval(p, z[i]));
    Rational den = 1;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      Rational dd = norm2(CRat{z[i].re - z[j].re, z[i].im - z[j].im});
      if (dd == 0) return out;
      den *= dd;
    }
    out.radius[i] = sqrt_up(Rational(d * d) * num / den);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Rational s = out.radius[i] + out.radius[j];
      if (s * s >= norm2(CRat{z[i].re - z[j].re, z[i].im - z[j].im})) return out;
    }
  out.ok = true;
  return out;
}

std::vector<CRat> approximate_roots(const std::vector<long long>& p, long bits) {
  auto zl = aberth_ld(p);
  int d = static_cast<int>(zl.size());
  std::vector<CRat> out(d);
  for (int i = 0; i < d; ++i) {
    Cx z(bits), val(bits), der(bits), step(bits);
    mpfr_set_ld(z.re.get(), zl[i].real(), MPFR_RNDN);
    mpfr_set_ld(z.im.get(), zl[i].imag(), MPFR_RNDN);
    bool real = std::fabs(zl[i].imag()) < 1e-12L * (1 + std::abs(zl[i]));
    if (real) mpfr_set_zero(z.im.get(), 1);
    for (int it = 0; it < 64 + 4 * static_cast<int>(std::log2(static_cast<double>(bits))); ++it) {
      cx_eval(p, z, val, der, bits);
      if (mpfr_zero_p(der.re.get()) && mpfr_zero_p(der.im.get())) break;
      cx_div(step, val, der, bits);
      mpfr_sub(z.re.get(), z.re.get(), step.re.get(), MPFR_RNDN);
      if (!real) mpfr_sub(z.im.get(), z.im.get(), step.im.get(), MPFR_RNDN);
      long e1 = mpfr_zero_p(step.re.get()) ? -(1L << 30) : mpfr_get_exp(step.re.get());
      long e2 = (real || mpfr_zero_p(step.im.get())) ? -(1L << 30) : mpfr_get_exp(step.im.get());
      if (std::max(e1, e2) < -bits + 4) break;
    }
    out[i] = CRat{exact_rational(z.re.get()), real ? Rational(0) : exact_rational(z.im.get())};
  }
  return out;
}

std::vector<BigInt> divisors_of(long long n) {
  std::vector<BigInt> out;
  unsigned long long m = static_cast<unsigned long long>(n < 0 ? -n : n);
  for (unsigned long long k = 1; k * k <= m; ++k)
    if (m % k == 0) {
      out.push_back(BigInt(k));
      if (k * k != m) out.push_back(BigInt(m / k));
    }
  return out;
}

BigInt eval_int(const std::vector<long long>& p, const BigInt& x) {
  BigInt v = 0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v;
}

// Exact division check: does monic q divide p over Z?
bool divides(const std::vector<long long>& p, const std::vector<BigInt>& q) {
  std::vector<BigInt> r(p.begin(), p.end());
  int dq = static_cast<int>(q.size()) - 1;
  for (int i = static_cast<int>(r.size()) - 1; i >= dq; --i) {
    BigInt c = r[i];
    if (c == 0) continue;
    for (int j = 0; j <= dq; ++j) r[i - dq + j] -= c * q[j];
  }
  for (int i = 0; i < dq; ++i)
    if (r[i] != 0) return false;
  return true;
}

// Recombination of approximate roots into integer factors, each verified by
// exact division.
bool has_nontrivial_factor(const std::vector<long long>& p, const std::vector<CRat>& z) {
  int d = static_cast<int>(z.size());
  if (d < 2 || d > 22) return false;
  std::vector<Cld> zz(d);
  for (int i = 0; i < d; ++i) zz[i] = Cld(z[i].re.convert_to<long double>(), z[i].im.convert_to<long double>());
  for (unsigned mask = 1; mask < (1u << d) - 1; ++mask) {
    int sz = __builtin_popcount(mask);
    if (sz > d / 2) continue;
    std::vector<Cld> c{Cld(1)};
    for (int i = 0; i < d; ++i) {
      if (!(mask & (1u << i))) continue;
      std::vector<Cld> nc(c.size() + 1, Cld(0));
      for (std::size_t k = 0; k < c.size(); ++k) {
        nc[k + 1] += c[k];
        nc[k] -= c[k] * zz[i];
      }
      c = nc;
    }
    std::vector<BigInt> q(c.size());
    bool ok = true;
    for (std::size_t k = 0; k < c.size() && ok; ++k) {
      long double re = std::round(c[k].real());
      if (std::fabs(c[k].imag()) > 1e-6L || std::fabs(c[k].real() - re) > 1e-6L * (1 + std::fabs(re))) ok = false;
      else q[k] = BigInt(static_cast<long long>(re));
    }
    if (ok && divides(p, q)) return true;
  }
  return false;
}

bool is_reciprocal(const std::vector<long long>& p) {
  int d = static_cast<int>(p.size()) - 1;
  bool plus = true, minus = true;
  for (int i = 0; i <= d; ++i) {
    if (p[i] != p[d - i]) plus = false;
    if (p[i] != -p[d - i]) minus = false;
  }
  return plus || minus;
}

int sign_of_poly_at(const std::vector<long long>& p, const Rational& x) {
  Rational v = 0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

Rational pow_rat(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

bool add_overflow(long long a, long long b, long long& out) { return __builtin_add_overflow(a, b, &out); }
bool mul_overflow(long long a, long long b, long long& out) { return __builtin_mul_overflow(a, b, &out); }

}  // namespace

// ---- certification ----------------------------------------------------------

PisotNumber make_integer_base(long long n) {
  require(n >= 2, ErrorKind::NotPisot, "integer base must be at least 2");
  PisotNumber b;
  b.s_ = std::make_shared<PisotNumber::State>();
  b.s_->minpoly = {-n, 1};
  b.s_->interval = {Rational(n), Rational(n)};
  b.s_->value = static_cast<double>(n);
  b.s_->cert_bits = 0;
  return b;
}

PisotNumber certify_pisot(const std::vector<long long>& mp) {
  require(mp.size() >= 2, ErrorKind::DegenerateInput, "polynomial must have degree at least 1");
  require(mp.back() == 1, ErrorKind::DegenerateInput, "polynomial is not monic");
  int d = static_cast<int>(mp.size()) - 1;
  if (d == 1) {
    require(-mp[0] >= 2, ErrorKind::NotPisot, "degree-1 base must be an integer n >= 2");
    return make_integer_base(-mp[0]);
  }
  require(d <= ZKey::kMaxDegree, ErrorKind::InvalidArgument,
          "degree above " + std::to_string(ZKey::kMaxDegree) + " is not supported");
  // Rational roots of a monic integer polynomial are integer divisors of a0.
  if (mp[0] == 0) fail(ErrorKind::NotIrreducible, "x divides the polynomial");
  for (const BigInt& k : divisors_of(mp[0]))
    for (int s : {1, -1})
      if (eval_int(mp, BigInt(s) * k) == 0) fail(ErrorKind::NotIrreducible, "rational root found");

  bool recip = is_reciprocal(mp);
  std::vector<CRat> last;
  for (long bits = 64; bits <= 4096; bits *= 2) {
    auto z = approximate_roots(mp, bits);
    last = z;
    Isolation iso = isolate(mp, z);
    if (!iso.ok) continue;
    if (recip && d >= 3) break;
    bool real_above_one_possible = false;
    for (int i = 0; i < d; ++i) {
      const Rational& R = iso.radius[i];
      Rational im = z[i].im < 0 ? Rational(-z[i].im) : z[i].im;
      if (im <= R && z[i].re + R > 1) real_above_one_possible = true;
    }
    if (!real_above_one_possible) {
      if (has_nontrivial_factor(mp, z)) fail(ErrorKind::NotIrreducible, "integer factor found");
      fail(ErrorKind::NotPisot, "no real root greater than 1");
    }
    // classify each disk
    int dominant = -1, above = 0;
    bool undecided = false;
    for (int i = 0; i < d; ++i) {
      const Rational& R = iso.radius[i];
      Rational m2 = norm2(z[i]);
      Rational lo = 1 - R, hi = 1 + R;
      bool below = R < 1 && m2 < lo * lo;
      bool over = m2 > hi * hi;
      if (!below && !over) undecided = true;
      if (over) {
        ++above;
        if (z[i].im == 0 && z[i].re - R > 1) dominant = i;
      }
    }
    if (undecided) continue;
    if (above != 1 || dominant < 0) {
      if (has_nontrivial_factor(mp, z)) fail(ErrorKind::NotIrreducible, "integer factor found");
      fail(ErrorKind::NotPisot, "root moduli do not follow the Pisot pattern");
    }
    // Pisot pattern certified. Any factor avoiding beta would have all roots
    // inside the unit disk and a zero constant term, so a0 != 0 gives irreducibility.
    PisotNumber b;
    b.s_ = std::make_shared<PisotNumber::State>();
    b.s_->minpoly = mp;
    b.s_->interval = {z[dominant].re - iso.radius[dominant], z[dominant].re + iso.radius[dominant]};
    b.s_->value = z[dominant].re.convert_to<double>();
    b.s_->cert_bits = static_cast<int>(bits);
    for (int i = 0; i < d; ++i) {
      if (i == dominant) continue;
      Rational ub = sqrt_up(norm2(z[i])) + iso.radius[i];
      if (ub >= 1) {
        b.s_.reset();
        break;
      }
      b.s_->conj_bounds.push_back(ub);
      b.s_->conj_moduli.push_back(std::sqrt(norm2(z[i]).convert_to<double>()));
    }
    if (!b.s_) continue;
    return b;
  }
  if (!last.empty() && has_nontrivial_factor(mp, last)) fail(ErrorKind::NotIrreducible, "integer factor found");
  if (recip && d >= 3) fail(ErrorKind::NotPisot, "reciprocal polynomial of degree >= 3 has roots of modulus >= 1 besides beta");
  fail(ErrorKind::PrecisionExhausted, "root isolation did not certify within 4096 bits");
}

std::vector<long long> parse_minpoly(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t;
    for (char c : item)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stoll(t, &pos));
      require(pos == t.size(), ErrorKind::InvalidArgument, "bad coefficient '" + t + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "bad coefficient '" + t + "'");
    }
  }
  require(!out.empty(), ErrorKind::InvalidArgument, "empty coefficient list");
  out.push_back(1);
  return out;
}

// ---- PisotNumber members ----------------------------------------------------

double PisotNumber::log_value() const { return std::log(value()); }

RationalInterval PisotNumber::refined(int bits) const {
  if (is_integer_base()) return s_->interval;
  {
    std::lock_guard<std::mutex> lk(s_->mu);
    for (auto& [b, iv] : s_->cache)
      if (b >= bits) return iv;
  }
  Rational target = Rational(1) / Rational(pow2(static_cast<unsigned>(bits)));
  RationalInterval iv = s_->interval;
  const auto& p = s_->minpoly;
  int slo = sign_of_poly_at(p, iv.lo);
  bool done = false;
  if (iv.width() > target) {
    // Newton at slightly higher precision, then an exact sign check.
    long prec = bits + 32;
    Mp x(prec), v(prec), dv(prec), t(prec);
    mpfr_set_d(x.get(), s_->value, MPFR_RNDN);
    for (int it = 0; it < 200; ++it) {
      mpfr_set_zero(v.get(), 1);
      mpfr_set_zero(dv.get(), 1);
      for (std::size_t k = p.size(); k-- > 0;) {
        mpfr_mul(dv.get(), dv.get(), x.get(), MPFR_RNDN);
        mpfr_add(dv.get(), dv.get(), v.get(), MPFR_RNDN);
        mpfr_mul(v.get(), v.get(), x.get(), MPFR_RNDN);
        mpfr_add_si(v.get(), v.get(), static_cast<long>(p[k]), MPFR_RNDN);
      }
      mpfr_div(t.get(), v.get(), dv.get(), MPFR_RNDN);
      mpfr_sub(x.get(), x.get(), t.get(), MPFR_RNDN);
      if (mpfr_zero_p(t.get()) || mpfr_get_exp(t.get()) < -prec + 2) break;
    }
    Rational mid = exact_rational(x.get());
    Rational half = target / 2;
    RationalInterval cand{mid - half, mid + half};
    if (iv.contains(cand.lo) && iv.contains(cand.hi)) {
      int a = sign_of_poly_at(p, cand.lo), b = sign_of_poly_at(p, cand.hi);
      if (a == 0) {
        iv = {cand.lo, cand.lo};
        done = true;
      } else if (b == 0) {
        iv = {cand.hi, cand.hi};
        done = true;
      } else if (a != b) {
        iv = cand;
        done = true;
      }
    }
    while (!done && iv.width() > target) {
      Rational m = (iv.lo + iv.hi) / 2;
      int sm = sign_of_poly_at(p, m);
      if (sm == 0) {
        iv = {m, m};
        break;
      }
      if (sm == slo) iv.lo = m;
      else iv.hi = m;
    }
  }
  std::lock_guard<std::mutex> lk(s_->mu);
  s_->cache.emplace_back(bits, iv);
  return iv;
}

Mp PisotNumber::value_mp(int bits) const {
  Mp x(bits + 8);
  if (is_integer_base()) {
    mpfr_set_si(x.get(), static_cast<long>(integer_value()), MPFR_RNDN);
    return x;
  }
  RationalInterval iv = refined(bits + 4);
  set_rational(x.get(), (iv.lo + iv.hi) / 2, MPFR_RNDN);
  return x;
}

ZKey PisotNumber::key_int(long long v) const {
  ZKey k;
  k.c[0] = v;
  return k;
}

ZKey PisotNumber::key_shift_add(const ZKey& k, long long digit) const {
  int d = degree();
  const auto& a = s_->minpoly;
  ZKey out;
  long long top = k.c[d - 1];
  for (int i = d - 1; i >= 1; --i) out.c[i] = k.c[i - 1];
  out.c[0] = 0;
  if (top != 0)
    for (int j = 0; j < d; ++j) {
      long long prod, sum;
      if (mul_overflow(a[j], top, prod) || add_overflow(out.c[j], -prod, sum))
        fail(ErrorKind::DepthExhausted, "Z[beta] coordinate overflow");
      out.c[j] = sum;
    }
  long long s;
  if (add_overflow(out.c[0], digit, s)) fail(ErrorKind::DepthExhausted, "Z[beta] coordinate overflow");
  out.c[0] = s;
  return out;
}

double PisotNumber::key_value(const ZKey& k) const {
  double v = 0, pw = 1;
  for (int j = 0; j < degree(); ++j) {
    v += static_cast<double>(k.c[j]) * pw;
    pw *= s_->value;
  }
  return v;
}

int PisotNumber::key_sign(const ZKey& k) const {
  bool zero = true;
  double mag = 0, v = 0, pw = 1;
  for (int j = 0; j < degree(); ++j) {
    if (k.c[j] != 0) zero = false;
    v += static_cast<double>(k.c[j]) * pw;
    mag += std::fabs(static_cast<double>(k.c[j])) * pw;
    pw *= s_->value;
  }
  if (zero) return 0;
  if (std::fabs(v) > mag * 1e-12) return v > 0 ? 1 : -1;
  std::vector<BigInt> e(degree());
  for (int j = 0; j < degree(); ++j) e[j] = k.c[j];
  return sign_of_reduced(e);
}

long long PisotNumber::key_floor(const ZKey& k) const {
  double v = key_value(k);
  double mag = 0, pw = 1;
  for (int j = 0; j < degree(); ++j) {
    mag += std::fabs(static_cast<double>(k.c[j])) * pw;
    pw *= s_->value;
  }
  double err = mag * 1e-12 + 1e-300;
  double f = std::floor(v);
  if (v - f > err && f + 1 - v > err) return static_cast<long long>(f);
  // exact decision near an integer
  long long m = static_cast<long long>(std::llround(v));
  ZKey diff = k;
  diff.c[0] -= m;
  int s = key_sign(diff);
  return s >= 0 ? m : m - 1;
}

std::vector<BigInt> PisotNumber::reduce(const std::vector<BigInt>& poly) const {
  int d = degree();
  const auto& a = s_->minpoly;
  std::vector<BigInt> r = poly;
  if (static_cast<int>(r.size()) < d) r.resize(d);
  for (int i = static_cast<int>(r.size()) - 1; i >= d; --i) {
    BigInt c = r[i];
    if (c == 0) continue;
    for (int j = 0; j <= d; ++j) r[i - d + j] -= c * a[j];
  }
  r.resize(d);
  return r;
}

RationalInterval PisotNumber::interval_of_reduced(const std::vector<BigInt>& e, int bits) const {
  RationalInterval b = refined(bits);
  Rational lo = 0, hi = 0;
  Rational plo = 1, phi = 1;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (e[j] > 0) {
      lo += Rational(e[j]) * plo;
      hi += Rational(e[j]) * phi;
    } else if (e[j] < 0) {
      lo += Rational(e[j]) * phi;
      hi += Rational(e[j]) * plo;
    }
    plo *= b.lo;
    phi *= b.hi;
  }
  return {lo, hi};
}

int PisotNumber::sign_of_reduced(const std::vector<BigInt>& e) const {
  bool zero = std::all_of(e.begin(), e.end(), [](const BigInt& v) { return v == 0; });
  if (zero) return 0;
  for (int bits = 64;; bits *= 2) {
    RationalInterval iv = interval_of_reduced(e, bits);
    if (iv.lo > 0) return 1;
    if (iv.hi < 0) return -1;
    require(bits < (1 << 24), ErrorKind::PrecisionExhausted, "sign refinement did not terminate");
  }
}

// ---- operations -------------------------------------------------------------

RationalInterval eval_interval(const DigitPolynomial& p, const PisotNumber& beta, int precision_bits) {
  require(precision_bits >= 8, ErrorKind::InvalidArgument, "precision must be at least 8 bits");
  int k = p.length();
  if (k == 0) return {Rational(0), Rational(0)};
  std::vector<BigInt> q(k);
  for (int i = 0; i < k; ++i) q[k - 1 - i] = p.coeffs[i];
  std::vector<BigInt> e = beta.reduce(q);
  Rational target = Rational(1) / Rational(pow2(static_cast<unsigned>(precision_bits)));
  for (int bits = precision_bits + 16;; bits *= 2) {
    RationalInterval E = beta.interval_of_reduced(e, bits);
    RationalInterval b = beta.refined(bits);
    Rational blo = pow_rat(b.lo, k), bhi = pow_rat(b.hi, k);
    RationalInterval out;
    out.lo = E.lo >= 0 ? E.lo / bhi : E.lo / blo;
    out.hi = E.hi >= 0 ? E.hi / blo : E.hi / bhi;
    if (out.width() <= target) return out;
    require(bits < (1 << 24), ErrorKind::PrecisionExhausted, "interval refinement did not terminate");
  }
}

Order compare_words(const DigitPolynomial& u, const DigitPolynomial& v, const PisotNumber& beta) {
  int L = std::max(u.length(), v.length());
  std::vector<BigInt> q(std::max(L, 1));
  for (int i = 0; i < L; ++i) {
    long long a = i < u.length() ? u.coeffs[i] : 0;
    long long b = i < v.length() ? v.coeffs[i] : 0;
    q[L - 1 - i] = BigInt(a) - BigInt(b);
  }
  int s = beta.sign_of_reduced(beta.reduce(q));
  return s > 0 ? Order::Greater : (s < 0 ? Order::Less : Order::Equal);
}

Rational garsia_constant(const PisotNumber& beta, int digit_bound) {
  require(digit_bound >= 2, ErrorKind::InvalidArgument, "digit bound D must be at least 2");
  Rational c = 1;
  for (const Rational& u : beta.conjugate_bounds()) c *= (1 - u) / Rational(digit_bound - 1);
  return c;
}

GapScan exhaustive_gap(const PisotNumber& beta, int D, int k) {
  require(D >= 2 && k >= 1, ErrorKind::InvalidArgument, "need D >= 2 and k >= 1");
  double total = std::pow(static_cast<double>(D), k);
  require(total <= 2e7, ErrorKind::DepthExhausted, "word enumeration exceeds 2e7");
  std::vector<std::pair<ZKey, double>> vals;
  vals.reserve(static_cast<std::size_t>(total));
  double inv = 1.0 / beta.value();
  std::vector<ZKey> keys(k + 1);
  std::vector<double> dv(k + 1, 0.0);
  std::vector<int> digit(k, 0);
  // odometer over words, Horner on both representations
  std::vector<double> pw(k + 1, 1.0);
  for (int i = 1; i <= k; ++i) pw[i] = pw[i - 1] * inv;
  int pos = 0;
  keys[0] = beta.key_zero();
  while (true) {
    while (pos < k) {
      keys[pos + 1] = beta.key_shift_add(keys[pos], digit[pos]);
      dv[pos + 1] = dv[pos] + digit[pos] * pw[pos + 1];
      ++pos;
    }
    vals.emplace_back(keys[k], dv[k]);
    int i = k - 1;
    while (i >= 0 && digit[i] == D - 1) digit[i--] = 0;
    if (i < 0) break;
    ++digit[i];
    pos = i;
  }
  GapScan g;
  g.k = k;
  g.words = vals.size();
  std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> distinct;
  for (std::size_t i = 0; i < vals.size(); ++i)
    if (i == 0 || !(vals[i].first == vals[i - 1].first)) distinct.push_back(vals[i].second);
  std::sort(distinct.begin(), distinct.end());
  g.classes = distinct.size();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < distinct.size(); ++i) gap = std::min(gap, distinct[i] - distinct[i - 1]);
  g.min_scaled_gap = gap * std::pow(beta.value(), k);
  return g;
}

}  // namespace nl
