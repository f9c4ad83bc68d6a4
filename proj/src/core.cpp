#include "nl/core.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <cmath>
#include <cstdio>
#include <thread>

namespace nl {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::NotPisot: return "NotPisot";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::PeriodNotFound: return "PeriodNotFound";
    case ErrorKind::DigitOutOfRange: return "DigitOutOfRange";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::IntervalMismatch: return "IntervalMismatch";
    case ErrorKind::OutOfInterval: return "OutOfInterval";
    case ErrorKind::NotContracting: return "NotContracting";
    case ErrorKind::OverlappingImages: return "OverlappingImages";
    case ErrorKind::OrientationReversing: return "OrientationReversing";
    case ErrorKind::DepthTooShallow: return "DepthTooShallow";
    case ErrorKind::NoFixedPointInDomain: return "NoFixedPointInDomain";
    case ErrorKind::ZeroCylinder: return "ZeroCylinder";
    case ErrorKind::ResolutionExhausted: return "ResolutionExhausted";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::RadiiOutOfRange: return "RadiiOutOfRange";
    case ErrorKind::DepthExhausted: return "DepthExhausted";
    case ErrorKind::NTooSmall: return "NTooSmall";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ReplayMismatch: return "ReplayMismatch";
  }
  return "Error";
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotIrreducible:
    case ErrorKind::NotPisot:
    case ErrorKind::PrecisionExhausted:
    case ErrorKind::PeriodNotFound:
    case ErrorKind::ZeroCylinder:
    case ErrorKind::ResolutionExhausted:
    case ErrorKind::DepthExhausted:
    case ErrorKind::NoFixedPointInDomain:
    case ErrorKind::ReplayMismatch:
      return 3;
    default:
      return 2;
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

int Rng::pick(const std::vector<double>& p) {
  double u = u01();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return static_cast<int>(i);
  }
  // round-off: last index with positive weight
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0) return static_cast<int>(i);
  return 0;
}

namespace {
std::atomic<int> g_threads{0};
}

void set_max_threads(int n) { g_threads = std::max(0, n); }

int max_threads() {
  int n = g_threads.load();
  if (n > 0) return n;
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
  if (n == 0) return;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t a = w * chunk, b = std::min(n, a + chunk);
    if (a >= b) break;
    pool.emplace_back([&, a, b] {
      try {
        for (std::size_t i = a; i < b && !failed; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

BigInt pow2(unsigned e) { return BigInt(1) << e; }

Rational exact_rational(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return Rational(0);
  BigInt z;
  long e = mpfr_get_z_2exp(z.backend().data(), x);
  Rational r{z};
  if (e >= 0) r *= Rational(pow2(static_cast<unsigned>(e)));
  else r /= Rational(pow2(static_cast<unsigned>(-e)));
  return r;
}

void set_rational(mpfr_ptr x, const Rational& q, mpfr_rnd_t rnd) { mpfr_set_q(x, q.backend().data(), rnd); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational rational_from_double(double x) {
  int e = 0;
  double m = std::frexp(x, &e);
  auto mant = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mant);
  e -= 53;
  if (e >= 0) r *= Rational(boost::multiprecision::pow(BigInt(2), static_cast<unsigned>(e)));
  else r /= Rational(boost::multiprecision::pow(BigInt(2), static_cast<unsigned>(-e)));
  return r;
}

Rational parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  require(!s.empty(), ErrorKind::InvalidArgument, "empty number");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      BigInt p(s.substr(0, slash)), q(s.substr(slash + 1));
      require(q != 0, ErrorKind::InvalidArgument, "zero denominator in " + raw);
      return Rational(p, q);
    }
    std::string mant = s;
    long exp10 = 0;
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
      mant = s.substr(0, epos);
      exp10 = std::stol(s.substr(epos + 1));
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      neg = mant[0] == '-';
      mant = mant.substr(1);
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    require(!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos,
            ErrorKind::InvalidArgument, "not a number: " + raw);
    Rational r{BigInt(digits)};
    BigInt ten = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(exp10)));
    if (exp10 >= 0) r *= Rational(ten);
    else r /= Rational(ten);
    return neg ? Rational(-r) : r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "not a number: " + raw);
  }
}

std::string version_string() { return "normlab 0.1.0"; }

}  // namespace nl
