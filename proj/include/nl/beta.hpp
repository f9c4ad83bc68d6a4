#pragma once
// beta-expansions: the expansion of 1, Parry's admissibility automaton, orbits of
// T_beta, and the Parry density.

#include "nl/algebraic.hpp"
#include "nl/measures.hpp"

#include <string>
#include <vector>

namespace nl {

struct EventuallyPeriodic {
  std::vector<int> preperiod;
  std::vector<int> period;
  int at(std::size_t i) const;  // 0-based digit of the unrolled sequence
  std::vector<int> unroll(std::size_t n) const;
  std::string str() const;  // "pre(period)"
};

/// Quasi-greedy expansion of 1 by exact iteration of T_beta on 1 in Z[beta].
EventuallyPeriodic expansion_of_one(const PisotNumber& beta, std::size_t state_budget = 100000);
/// Greedy digits of 1 (finite when the greedy expansion terminates).
EventuallyPeriodic greedy_expansion_of_one(const PisotNumber& beta, std::size_t state_budget = 100000);

class BetaSystem {
 public:
  explicit BetaSystem(const PisotNumber& beta, std::size_t state_budget = 100000);

  const PisotNumber& beta() const { return beta_; }
  int alphabet_size() const { return B_; }
  const EventuallyPeriodic& one_expansion() const { return a_; }
  int zero_run_bound() const { return n0_; }

  /// Automaton on "number of leading digits of a matched so far".
  int states() const { return static_cast<int>(a_.preperiod.size() + a_.period.size()); }
  /// Next state after reading d, or -1 if d makes the word inadmissible.
  int step(int state, int d) const;

  /// Maximal-entropy Markov measure on the automaton (the Parry measure lifted to digits).
  const std::vector<double>& parry_stationary() const { return pi_; }
  /// Probability of the edge state --d--> step(state, d).
  double parry_prob(int state, int d) const;

 private:
  PisotNumber beta_;
  int B_ = 2;
  EventuallyPeriodic a_;
  int n0_ = 0;
  std::vector<double> v_, pi_;
};

bool is_admissible(const std::vector<int>& word, const BetaSystem& sys);
int zero_run_bound(const BetaSystem& sys);

/// Element (sum num[j] beta^j) / den of Q(beta).
struct QBetaPoint {
  std::vector<BigInt> num;
  BigInt den = 1;
};

struct OrbitRecord {
  std::string start;
  std::vector<int> digits;
  std::vector<double> points;  // T^k x for k < N
  std::string method;          // "exact" or "mpfr:<bits>"
};

OrbitRecord beta_orbit(const Rational& x0, const BetaSystem& sys, std::size_t n);
OrbitRecord beta_orbit(const QBetaPoint& x0, const BetaSystem& sys, std::size_t n);
/// x0 taken as exact; precision grows with n and every digit is certified.
OrbitRecord beta_orbit(const Mp& x0, const BetaSystem& sys, std::size_t n);

/// Digits of a rational in an integer base, via one big-integer division.
std::vector<int> integer_base_digits(const Rational& x, long long base, std::size_t n);

/// Piecewise-constant invariant density h(x) = sum_i coef[i] * 1[0, t[i]).
class ParryDensity {
 public:
  explicit ParryDensity(const BetaSystem& sys);
  double operator()(double x) const;
  const std::vector<double>& breakpoints() const { return t_; }
  const std::vector<double>& coefficients() const { return c_; }
  double sup() const;
  /// One application of the transfer operator, as a function.
  double transfer(double x) const;
  /// sup |L h - h| over every piece of both functions.
  double transfer_residual() const;
  /// Exact cell integrals on a uniform grid over [0, 1].
  GridMeasure to_grid(std::size_t cells) const;

 private:
  double beta_ = 2;
  int B_ = 2;
  std::vector<double> t_, c_;
};

/// Grid at about beta^k cells.
GridMeasure parry_density(const BetaSystem& sys, int level);

/// Value sum d_i beta^-(i+1) of a digit word in double precision.
double digits_value(const std::vector<int>& d, std::size_t from, std::size_t count, double beta);

std::string digits_to_string(const std::vector<int>& d);
std::vector<int> digits_from_string(const std::string& s);

}  // namespace nl
