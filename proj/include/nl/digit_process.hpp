#pragma once
// Digit processes: edge-labelled Markov chains emitting base-beta digits.
// Bernoulli, Markov, Parry, block and shift-averaged measures all live here, so
// cylinder masses, conditionals and sampling share one implementation.

#include "nl/algebraic.hpp"
#include "nl/beta.hpp"
#include "nl/measures.hpp"

#include <string>
#include <vector>

namespace nl {

struct Edge {
  int digit;
  int next;
  double prob;
};

class DigitProcess {
 public:
  PisotNumber base;
  int alphabet = 2;
  std::vector<std::vector<Edge>> trans;  // per hidden state
  std::vector<double> init;
  // Non-empty for an explicit mixture: init == sum weights[c] * component_inits[c].
  std::vector<std::vector<double>> component_inits;
  std::vector<double> component_weights;
  std::string tag;

  int states() const { return static_cast<int>(trans.size()); }
  bool integer_base() const { return base.is_integer_base(); }
  long long int_base() const { return base.integer_value(); }

  /// alpha after reading one digit (not normalised).
  std::vector<double> forward(const std::vector<double>& alpha, int digit) const;
  double cylinder_mass(const std::vector<int>& word) const;
  double cylinder_mass_from(const std::vector<double>& alpha, const std::vector<int>& word) const;
  /// log mass of a cylinder; -inf when it is null.
  double log_mass(const std::vector<int>& word) const;
  /// Normalised hidden-state distribution after a prefix. ZeroCylinder when null.
  std::vector<double> posterior(const std::vector<int>& prefix) const;

  /// P(X < x) for the process started from alpha (integer bases).
  double cdf(const std::vector<double>& alpha, double x) const;
  /// Law of the value started from alpha on b^level cells of [0, 1] (integer bases).
  GridMeasure grid(const std::vector<double>& alpha, int level) const;

  std::vector<int> sample_digits(std::size_t n, Rng& rng) const;
  std::vector<int> sample_digits_from(const std::vector<double>& alpha, std::size_t n, Rng& rng) const;

  /// Shannon entropy rate of a single-state or stationary Markov process, in nats per digit.
  double entropy_rate() const;
  /// Stationary distribution of the hidden chain (power iteration).
  std::vector<double> stationary() const;
};

DigitProcess bernoulli_process(long long base, const std::vector<double>& weights);
/// Digit chain with transition matrix P[i][j] = P(next digit j | digit i), started stationary.
DigitProcess markov_process(long long base, const std::vector<std::vector<double>>& P);
/// Golden-mean Markov measure of maximal entropy on base-2 words without "11".
DigitProcess golden_markov_process();
DigitProcess parry_process(const BetaSystem& sys);
/// Lebesgue on [0, 1] in an integer base.
DigitProcess lebesgue_process(long long base);
/// Cantor-Lebesgue measure (base 3, weights 1/2 on digits 0 and 2).
DigitProcess cantor_process();

/// Uniform average of the processes started at each hidden state distribution.
DigitProcess mixture(const DigitProcess& p, const std::vector<std::vector<double>>& inits);

/// Base-b digits to an exact rational M / b^n.
Rational rational_from_digits(const std::vector<int>& digits, long long base);

/// Word mass for a tiny enumeration check: all words of a length with their masses.
std::vector<std::pair<std::vector<int>, double>> enumerate_cylinders(const DigitProcess& p, int depth);

}  // namespace nl
