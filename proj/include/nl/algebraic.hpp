#pragma once
// Certified Pisot bases, exact arithmetic in Z[beta], interval evaluation of
// digit polynomials and the Garsia separation constant.

#include "nl/core.hpp"

#include <array>
#include <memory>
#include <mutex>
#include <utility>

namespace nl {

enum class Order { Less, Equal, Greater };

struct RationalInterval {
  Rational lo, hi;
  Rational width() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
};

/// Value sum coeffs[i] * beta^-(i+1).
struct DigitPolynomial {
  std::vector<long long> coeffs;
  int length() const { return static_cast<int>(coeffs.size()); }
};

class PisotNumber;

/// Element of Z[beta] stored by coordinates on 1, beta, ..., beta^(d-1).
/// Coordinates are machine integers; overflow raises DepthExhausted.
struct ZKey {
  static constexpr int kMaxDegree = 6;
  std::array<long long, kMaxDegree> c{};
  bool operator==(const ZKey& o) const { return c == o.c; }
  bool operator<(const ZKey& o) const { return c < o.c; }
};

struct ZKeyHash {
  std::size_t operator()(const ZKey& k) const {
    std::uint64_t h = 0x12345678;
    for (long long v : k.c) h = mix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

class PisotNumber {
 public:
  /// Coefficients constant term first; the trailing 1 is included.
  const std::vector<long long>& minpoly() const { return s_->minpoly; }
  int degree() const { return static_cast<int>(s_->minpoly.size()) - 1; }
  bool is_integer_base() const { return degree() == 1; }
  long long integer_value() const { return -s_->minpoly[0]; }

  RationalInterval root_interval() const { return s_->interval; }
  /// Certified bracket of width at most 2^-bits.
  RationalInterval refined(int bits) const;
  double value() const { return s_->value; }
  double log_value() const;
  /// beta as an MPFR number within 2^-bits of the true value.
  Mp value_mp(int bits) const;

  /// Rational upper bounds on the moduli of the non-dominant roots.
  const std::vector<Rational>& conjugate_bounds() const { return s_->conj_bounds; }
  const std::vector<double>& conjugate_moduli() const { return s_->conj_moduli; }
  /// Number of precision-doubling rounds used by certification (64 << k bits).
  int certification_bits() const { return s_->cert_bits; }

  // Z[beta] helpers on machine-integer coordinates.
  ZKey key_zero() const { return ZKey{}; }
  ZKey key_int(long long v) const;
  /// beta * k + digit
  ZKey key_shift_add(const ZKey& k, long long digit) const;
  double key_value(const ZKey& k) const;
  /// Exact sign of a key (refines the root interval when needed).
  int key_sign(const ZKey& k) const;
  /// floor of the value of a key, decided exactly.
  long long key_floor(const ZKey& k) const;

  // Big-coordinate variants.
  std::vector<BigInt> reduce(const std::vector<BigInt>& poly_low_first) const;
  int sign_of_reduced(const std::vector<BigInt>& e) const;
  RationalInterval interval_of_reduced(const std::vector<BigInt>& e, int bits) const;

  bool operator==(const PisotNumber& o) const { return minpoly() == o.minpoly(); }

 private:
  friend PisotNumber certify_pisot(const std::vector<long long>&);
  friend PisotNumber make_integer_base(long long);
  struct State {
    std::vector<long long> minpoly;
    RationalInterval interval;
    double value = 0;
    std::vector<Rational> conj_bounds;
    std::vector<double> conj_moduli;
    int cert_bits = 0;
    std::mutex mu;
    std::vector<std::pair<int, RationalInterval>> cache;
  };
  std::shared_ptr<State> s_;
};

/// Root isolation with precision doubling from 64 to 4096 bits.
PisotNumber certify_pisot(const std::vector<long long>& minpoly);
PisotNumber make_integer_base(long long n);

/// Parses "c0,c1,...,c_{d-1}" (monic leading 1 implied) into a full polynomial.
std::vector<long long> parse_minpoly(const std::string& text);

RationalInterval eval_interval(const DigitPolynomial& p, const PisotNumber& beta, int precision_bits);
Order compare_words(const DigitPolynomial& u, const DigitPolynomial& v, const PisotNumber& beta);
Rational garsia_constant(const PisotNumber& beta, int digit_bound);

/// Exhaustive separation scan used by the CLI: minimum over distinct values
/// of |pi(u)-pi(v)| * beta^k for all words over {0..D-1} of length k.
struct GapScan {
  int k = 0;
  std::size_t words = 0;
  std::size_t classes = 0;
  double min_scaled_gap = 0;
};
GapScan exhaustive_gap(const PisotNumber& beta, int digit_bound, int k);

}  // namespace nl
