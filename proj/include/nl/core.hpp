#pragma once
// Shared plumbing: error kinds, big-number aliases, seeded streams, a
// deterministic parallel loop and the fixed decimal formatting used in outputs.

#include <boost/multiprecision/gmp.hpp>
#include <mpfr.h>

#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nl {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Owning MPFR value with an explicit binary precision.
class Mp {
 public:
  explicit Mp(long bits = 64) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  Mp(const Mp& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mp& operator=(const Mp& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  ~Mp() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  long bits() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

/// Exact value of an MPFR number (they are dyadic rationals).
Rational exact_rational(mpfr_srcptr x);
void set_rational(mpfr_ptr x, const Rational& q, mpfr_rnd_t rnd);
BigInt pow2(unsigned e);

enum class ErrorKind {
  InvalidArgument,
  DegenerateInput,
  NotIrreducible,
  NotPisot,
  PrecisionExhausted,
  PeriodNotFound,
  DigitOutOfRange,
  EmptyWindow,
  IntervalMismatch,
  OutOfInterval,
  NotContracting,
  OverlappingImages,
  OrientationReversing,
  DepthTooShallow,
  NoFixedPointInDomain,
  ZeroCylinder,
  ResolutionExhausted,
  SeriesTooShort,
  TooFewSamples,
  RadiiOutOfRange,
  DepthExhausted,
  NTooSmall,
  ConfigError,
  ReplayMismatch,
};

const char* kind_name(ErrorKind k);

// 2 for validation problems, 3 for failed numerical certification.
int exit_code_for(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }
inline void require(bool ok, ErrorKind k, const std::string& msg) {
  if (!ok) fail(k, msg);
}

// splitmix64 finaliser; used to derive independent per-item seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Engine wrapper with platform-independent conversions (std distributions
/// are implementation-defined, the engine sequence is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index) { return Rng(derive_seed(seed, index)); }
  std::uint64_t next() { return eng_(); }
  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  // Index drawn from a probability vector by inversion.
  int pick(const std::vector<double>& p);
  int below(int n) { return static_cast<int>(u01() * n); }

 private:
  std::mt19937_64 eng_;
};

void set_max_threads(int n);
int max_threads();

// Runs f(i) for i in [0, n). Work is split into contiguous blocks; callers
// write to per-index slots so results never depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

// Fixed 12-significant-digit rendering shared by every output writer.
std::string fmt(double v);

double to_double(const Rational& q);
Rational rational_from_double(double x);
// Accepts integers, "p/q", and finite decimals such as "0.125" or "-3e-2".
Rational parse_rational(const std::string& s);

std::string version_string();

}  // namespace nl
