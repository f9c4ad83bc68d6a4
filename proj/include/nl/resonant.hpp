#pragma once
// Block measures: N forced zeros followed by M free digits (uniform, or Parry
// distributed over a Pisot base), their shift averages and entropy-drop checks.

#include "nl/beta.hpp"
#include "nl/digit_process.hpp"

#include <string>
#include <vector>

namespace nl {

struct ResonantSpec {
  PisotNumber base = make_integer_base(2);
  int N = 2;
  int M = 4;  // the integer construction uses M = N^2
  bool shift_averaged = false;
};

/// The (N + M)-periodic block process; the shift average when spec.shift_averaged.
/// NTooSmall when N does not exceed the longest zero run of the expansion of 1.
DigitProcess build_block_measure(const ResonantSpec& spec);
/// Uniform mixture of the processes read from offsets 0 .. period - 1.
DigitProcess shift_average(const DigitProcess& nu, int period);

/// max over words w of length <= depth of |mass(w) - sum_d mass(d w)|.
double shift_invariance_residual(const DigitProcess& p, int depth);

/// Digit-wise sum of two processes over one base (alphabet A1 + A2 - 1).
DigitProcess digit_sum(const DigitProcess& a, const DigitProcess& b);

struct EntropyDropReport {
  int N = 0, M = 0;
  int depth = 0;             // depth of the exact computation
  bool exact = true;         // false: H_N(rho) + M log beta bound
  double h_rho = 0;          // H(rho, P_depth)
  double h_rho_N = 0;        // H(rho, P_N)
  double h_mu_N = 0;         // H(mu, P_N)
  double c = 0;              // h_rho_N - h_mu_N
  double c_bound = 0;        // log 3
  double normalized = 0;     // entropy over (N + M) log beta
  double margin = 0.02;
  bool resonance = false;    // normalized < 1 - margin
  std::string to_json() const;
};

/// Entropy of rho = nu_N (+) mu over value classes at depth N + M. Falls back to
/// the bound through depth N when the exact enumeration passes 2e7 entries.
EntropyDropReport entropy_drop_check(const ResonantSpec& spec, const DigitProcess& mu, double margin = 0.02);

struct CylinderBoundReport {
  int k = 1;
  std::size_t cylinders = 0;  // charged cylinders of depth (N + M) k
  double max_mass = 0;
  double c = 0;               // sup of the Parry density
  double bound = 0;           // c^k beta^(-M k)
  bool holds = false;
};

/// Exhaustive check of mass(I) <= c^k beta^(-M k) over the charged depth-(N + M) k cylinders of nu.
CylinderBoundReport cylinder_mass_bound(const ResonantSpec& spec, int k);

/// Every word of length <= depth charged by p is admissible for sys.
bool charged_words_admissible(const DigitProcess& p, const BetaSystem& sys, int depth);

}  // namespace nl
