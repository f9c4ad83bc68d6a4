#pragma once
// Iterated function systems of affine and Moebius maps, validated exactly.

#include "nl/core.hpp"
#include "nl/measures.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nl {

/// x -> (a x + b) / (c x + d) with integer entries.
struct IntMat {
  BigInt a = 1, b = 0, c = 0, d = 1;
  IntMat operator*(const IntMat& o) const;
  BigInt det() const { return a * d - b * c; }
  Rational apply(const Rational& x) const;
  double apply(double x) const;
};

struct IFSMap {
  enum class Kind { Affine, Moebius };
  Kind kind = Kind::Affine;
  Rational slope = 1, offset = 0;  // affine
  long long p = 1, q = 0, r = 0, s = 1;  // moebius

  static IFSMap affine(const Rational& a, const Rational& b);
  static IFSMap moebius(long long p, long long q, long long r, long long s);
  IntMat matrix() const;
  double apply(double x) const;
  double derivative(double x) const;
  std::string str() const;
};

struct IFS {
  std::vector<IFSMap> maps;
  std::vector<double> weights;
  Rational lo = 0, hi = 1;
};

struct ValidationReport {
  std::vector<std::pair<Rational, Rational>> images;  // f_i(I), in map order
  std::vector<double> max_derivative;
};

/// Throws NotContracting, OverlappingImages or OrientationReversing.
ValidationReport validate_regular(const IFS& ifs);

/// Largest sup_I |f_i'| over the maps.
double max_contraction(const IFS& ifs);

/// Points f_w(midpoint) with i.i.d. words of the given depth; point i uses stream (seed, i).
SampleMeasure sample_measure(const IFS& ifs, std::size_t n, int depth, std::uint64_t seed, double resolution = 1e-12);
/// Same words, evaluated exactly by a product tree of integer matrices.
std::vector<Rational> sample_exact(const IFS& ifs, std::size_t n, int depth, std::uint64_t seed);
/// Smallest depth with max_contraction^depth * |I| < 2^-bits.
int depth_for_bits(const IFS& ifs, double bits);

/// a + b sqrt(D) with D squarefree (D = 1 means rational, b = 0).
struct QuadSurd {
  Rational a = 0, b = 0;
  long long D = 1;
  double value() const;
  bool operator==(const QuadSurd& o) const;
  QuadSurd operator*(const QuadSurd& o) const;
  QuadSurd inverse() const;
  std::string str() const;
};
QuadSurd surd_rational(const Rational& x);
QuadSurd pow(const QuadSurd& x, long long e);

struct ContractionRatio {
  QuadSurd fixed_point;
  QuadSurd derivative;  // signed f'(p)
  double lambda = 0;    // |f'(p)|
};

/// Derivative at the fixed point inside [lo, hi]. NoFixedPointInDomain otherwise.
ContractionRatio contraction_ratio(const IFSMap& f, const Rational& lo = 0, const Rational& hi = 1);

struct Dependence {
  bool dependent = false;
  long long p = 0, q = 0;  // a^q = b^p when dependent
  int cf_depth = 0;        // continued-fraction terms explored
};
Dependence mult_independent(const QuadSurd& a, const QuadSurd& b);

/// The |L|^2 maps f_i o f_j of inverse Gauss branches, equal weights unless given.
IFS gauss_ifs(const std::vector<long long>& lambda, const std::vector<double>& weights = {});

IFS parse_ifs(std::istream& is);
void write_ifs(std::ostream& os, const IFS& ifs);

/// Continued-fraction partial quotients of a rational in (0, 1).
std::vector<BigInt> cf_expansion(const Rational& x, std::size_t max_terms);

}  // namespace nl
