#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "check.hpp"
#include "oracles/oracles.hpp"

#include "nl/dynamics.hpp"

#include <random>

using namespace nl;

namespace {
PisotNumber golden() { return certify_pisot({-1, -1, 1}); }

std::vector<Rational> cantor_points(std::size_t n, std::size_t digits, std::uint64_t seed) {
  DigitProcess c = cantor_process();
  std::vector<Rational> out;
  for (const auto& d : sample_digit_strings(c, n, digits, seed)) out.push_back(rational_from_digits(d, 3));
  return out;
}
}  // namespace

TEST_CASE("digit process cylinder masses") {
  DigitProcess b = bernoulli_process(3, {0.7, 0.2, 0.1});
  CHECK(b.cylinder_mass({0, 1, 2}) == doctest::Approx(0.7 * 0.2 * 0.1));
  CHECK(b.entropy_rate() == doctest::Approx(oracle::entropy({0.7, 0.2, 0.1})));
  DigitProcess g = golden_markov_process();
  CHECK(g.cylinder_mass({1, 1}) == 0);
  CHECK(std::isinf(g.log_mass({0, 1, 1})));
  DigitProcess p = parry_process(BetaSystem(golden()));
  CHECK(p.entropy_rate() == doctest::Approx(golden().log_value()).epsilon(1e-10));
  double total = 0;
  for (const auto& [w, m] : enumerate_cylinders(p, 8)) total += m;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cantor process cdf matches the devil's staircase") {
  DigitProcess c = cantor_process();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    double x = u(rng);
    CHECK(c.cdf(c.init, x) == doctest::Approx(oracle::cantor_cdf(x)).epsilon(1e-9));
  }
  GridMeasure g = c.grid(c.init, 5);
  CHECK(g.cells() == 243);
  CHECK(g.total() == doctest::Approx(1.0));
  CHECK(g.weights[81] == 0);  // first cell of the removed middle third
}

TEST_CASE("mixtures and posteriors") {
  DigitProcess b = bernoulli_process(2, {0.9, 0.1});
  DigitProcess m = mixture(b, {b.init, b.init});
  CHECK(m.cylinder_mass({1, 0}) == doctest::Approx(0.09));
  DigitProcess g = golden_markov_process();
  std::vector<double> post = g.posterior({0, 1});
  double s = 0;
  for (double v : post) s += v;
  CHECK(s == doctest::Approx(1.0));
  CHECK(rational_from_digits({0, 2, 0, 2}, 3) == Rational(20, 81));
}

TEST_CASE("orbit empirical measures") {
  BetaSystem two(make_integer_base(2));
  GridMeasure u = uniform_grid(0, 1, 16);
  CHECK(ks_distance(orbit_empirical(Rational(1, 7), two, 10000, 16), u) > 0.1);
  BetaSystem three(make_integer_base(3));
  for (const Rational& x : cantor_points(3, 100064, 11)) {
    CHECK(ks_distance(orbit_empirical(x, two, 100000, 16), u) < 0.02);
    OrbitRecord o = beta_orbit(x, three, 100000);
    CHECK(std::count(o.digits.begin(), o.digits.end(), 1) == 0);
    CHECK(ks_distance(orbit_empirical(o, 16), u) > 0.1);
  }
}

TEST_CASE("normality battery") {
  BetaSystem two(make_integer_base(2)), three(make_integer_base(3));
  CHECK_FALSE(normality_battery(Rational(0), two, 1000).pass);
  DigitProcess b = bernoulli_process(3, {0.7, 0.2, 0.1});
  int pass2 = 0;
  for (const auto& d : sample_digit_strings(b, 5, 20000 * 7 / 10 + 64, 21)) {
    Rational x = rational_from_digits(d, 3);
    pass2 += normality_battery(x, two, 20000).pass ? 1 : 0;
    NormalityReport r3 = normality_battery(x, three, 13000);
    CHECK_FALSE(r3.pass);
    CHECK(std::fabs(r3.digit_freqs[0] - 0.7) < 0.015);
    CHECK(std::fabs(r3.digit_freqs[1] - 0.2) < 0.015);
    CHECK(std::fabs(r3.digit_freqs[2] - 0.1) < 0.015);
  }
  CHECK(pass2 >= 4);
  NormalityReport r = normality_battery(Rational(1, 3), BetaSystem(golden()), 2000);
  CHECK(r.alphabet == 2);
  CHECK(r.to_json().find("\"verdict\"") != std::string::npos);
}

TEST_CASE("Weyl sums") {
  WeylResult a = weyl_sums(Rational(1, 3), make_integer_base(2), 1000, {1});
  CHECK(a.magnitudes[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(weyl_sums(Rational(0), make_integer_base(2), 1000, {1}).magnitudes[0] == doctest::Approx(1.0));
  std::mt19937_64 rng(3);
  int small = 0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<int> d(100100);
    for (int& v : d) v = static_cast<int>(rng() & 1);
    small += weyl_sums(rational_from_digits(d, 2), make_integer_base(2), 100000, {1}).magnitudes[0] < 0.02 ? 1 : 0;
  }
  CHECK(small == 5);
  // beta^k (1/3) * 3 = beta^k is a Lucas number up to beta'^k, so m = 3 is nearly resonant
  WeylResult g = weyl_sums(Rational(1, 3), golden(), 2000, {3});
  CHECK(g.magnitudes[0] > 0.99);
  CHECK(g.precision_bits > 0);
}

TEST_CASE("samplers") {
  DigitProcess b = bernoulli_process(2, {0.9, 0.1});
  auto strs = sample_digit_strings(b, 10000, 1, 5);
  double ones = 0;
  for (const auto& s : strs) ones += s[0];
  CHECK(std::fabs(ones / 10000 - 0.1) < 0.01);
  for (const auto& s : sample_digit_strings(golden_markov_process(), 500, 200, 6))
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(!(s[i - 1] == 1 && s[i] == 1));
  SampleMeasure fair = sample_markov(bernoulli_process(2, {0.5, 0.5}), 20000, 48, 7);
  CHECK(ks_distance(bin_samples(fair, 0, 1, 64), uniform_grid(0, 1, 64)) < 4 / std::sqrt(20000.0));
  CHECK(sample_markov(b, 10, 20, 8).points == sample_markov(b, 10, 20, 8).points);
}

TEST_CASE("local averages track the orbit") {
  for (const DigitProcess& p : {bernoulli_process(2, {0.7, 0.3}), golden_markov_process(), cantor_process()}) {
    int level = p.int_base() == 2 ? 12 : 7;
    auto xs = sample_digit_strings(p, 3, 10000 + static_cast<std::size_t>(level), 13);
    for (const auto& x : xs) {
      LocalAverageResult r = local_average(p, x, 10000, level);
      CHECK(r.ks_trace.back() < 0.05);
      CHECK(r.ks_trace.back() <= r.ks_trace[99] + 0.01);
    }
  }
}

TEST_CASE("martingale differences are orthogonal") {
  for (const DigitProcess& p : {bernoulli_process(2, {0.7, 0.3}), cantor_process()}) {
    OrthogonalityResult o = martingale_orthogonality(p, 2, 10000, 3);
    CHECK(o.pass);
    CHECK(o.threshold == doctest::Approx(0.04));
    for (double c : o.correlation) CHECK(std::fabs(c) <= o.threshold);
  }
}

TEST_CASE("block entropy converges to the digit entropy") {
  Rng rng(5);
  std::vector<int> d = bernoulli_process(2, {0.7, 0.3}).sample_digits(100000, rng);
  CHECK(std::fabs(block_entropy_rate(d, 8, 2) - oracle::entropy({0.7, 0.3})) < 0.01);
}

TEST_CASE("chi-square quantiles") {
  for (int df : {1, 2, 7, 26, 255})
    CHECK(chi2_quantile(df, 0.999) == doctest::Approx(oracle::chi2_quantile_wh(df, 3.090232306167813)).epsilon(df < 5 ? 0.05 : 0.01));
  CHECK(chi2_quantile(1, 0.999) == doctest::Approx(10.827566170662733).epsilon(1e-8));
}

TEST_CASE("Gauss orbit statistic runs on exact points") {
  std::vector<int> d(400);
  std::mt19937_64 rng(2);
  for (int& v : d) v = static_cast<int>(rng() % 10);
  Rational x = rational_from_digits(d, 10);
  double ks = gauss_orbit_ks(x, 50, 16);
  CHECK(ks >= 0);
  CHECK(ks <= 1);
  CHECK_ERROR(gauss_orbit_ks(Rational(1, 3), 50, 16), InvalidArgument);
}
