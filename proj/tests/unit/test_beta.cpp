#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "check.hpp"
#include "oracles/oracles.hpp"

#include "nl/beta.hpp"

#include <functional>
#include <random>
#include <set>

using namespace nl;

namespace {
PisotNumber golden() { return certify_pisot({-1, -1, 1}); }
PisotNumber tribonacci() { return certify_pisot({-1, -1, -1, 1}); }
PisotNumber plastic() { return certify_pisot({-1, -1, 0, 1}); }

std::vector<std::vector<int>> all_words(int alphabet, int n) {
  std::vector<std::vector<int>> out{{}};
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<int>> nx;
    for (const auto& w : out)
      for (int d = 0; d < alphabet; ++d) {
        nx.push_back(w);
        nx.back().push_back(d);
      }
    out.swap(nx);
  }
  return out;
}
}  // namespace

TEST_CASE("expansions of one") {
  EventuallyPeriodic two = expansion_of_one(make_integer_base(2));
  CHECK(two.preperiod.empty());
  CHECK(two.period == std::vector<int>{1});
  EventuallyPeriodic g = expansion_of_one(golden());
  CHECK(g.unroll(8) == std::vector<int>{1, 0, 1, 0, 1, 0, 1, 0});
  CHECK(greedy_expansion_of_one(golden()).str() == "11");
  EventuallyPeriodic t = expansion_of_one(tribonacci());
  CHECK(t.unroll(9) == std::vector<int>{1, 1, 0, 1, 1, 0, 1, 1, 0});
  for (const PisotNumber& b : {golden(), tribonacci(), plastic()}) {
    EventuallyPeriodic a = expansion_of_one(b);
    BetaSystem sys(b);
    std::vector<int> d = a.unroll(200);
    CHECK(is_admissible(std::vector<int>(d.begin(), d.begin() + 40), sys));
    CHECK(d == oracle::quasi_greedy_one(b.value(), 200));
    CHECK(digits_value(d, 0, 200, b.value()) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("admissibility examples") {
  BetaSystem g(golden());
  CHECK_FALSE(is_admissible(digits_from_string("11"), g));
  CHECK(is_admissible(digits_from_string("1010"), g));
  BetaSystem three(make_integer_base(3));
  for (const auto& w : all_words(3, 5)) CHECK(is_admissible(w, three));
  CHECK_ERROR(is_admissible({2}, g), DigitOutOfRange);
}

TEST_CASE("admissibility matches the lexicographic criterion") {
  for (const PisotNumber& b : {golden(), tribonacci(), plastic()}) {
    BetaSystem sys(b);
    std::vector<int> one = oracle::quasi_greedy_one(b.value(), 64);
    for (const auto& w : all_words(sys.alphabet_size(), 11)) CHECK(is_admissible(w, sys) == oracle::lex_admissible(w, one));
  }
}

TEST_CASE("admissible word counts follow Fibonacci for the golden mean") {
  BetaSystem g(golden());
  std::size_t f0 = 1, f1 = 2;
  for (int n = 1; n <= 14; ++n) {
    std::size_t count = 0;
    std::function<void(std::vector<int>&)> rec = [&](std::vector<int>& w) {
      if (static_cast<int>(w.size()) == n) {
        ++count;
        return;
      }
      for (int d = 0; d < 2; ++d) {
        w.push_back(d);
        if (is_admissible(w, g)) rec(w);
        w.pop_back();
      }
    };
    std::vector<int> w;
    rec(w);
    CHECK(count == f1);
    std::size_t f2 = f0 + f1;
    f0 = f1;
    f1 = f2;
  }
}

TEST_CASE("subwords of admissible words are admissible") {
  std::mt19937_64 rng(3);
  for (const PisotNumber& b : {golden(), tribonacci()}) {
    BetaSystem sys(b);
    for (int trial = 0; trial < 200; ++trial) {
      OrbitRecord o = beta_orbit(Rational(static_cast<long long>(rng() % 100000), 100003), sys, 30);
      CHECK(is_admissible(o.digits, sys));
      std::size_t i = rng() % 30, j = i + rng() % (30 - i);
      CHECK(is_admissible(std::vector<int>(o.digits.begin() + static_cast<long>(i), o.digits.begin() + static_cast<long>(j)), sys));
    }
  }
}

TEST_CASE("zero run bounds") {
  CHECK(BetaSystem(make_integer_base(2)).zero_run_bound() == 0);
  CHECK(BetaSystem(golden()).zero_run_bound() == 1);
  BetaSystem t(tribonacci());
  CHECK(t.zero_run_bound() == 1);
  CHECK(zero_run_bound(t) == 1);
  // admissible words joined by more than N0 zeros stay admissible
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    auto u = beta_orbit(Rational(static_cast<long long>(rng() % 9973), 9973), t, 12).digits;
    auto v = beta_orbit(Rational(static_cast<long long>(rng() % 9967), 9967), t, 12).digits;
    std::vector<int> w = u;
    for (int i = 0; i <= t.zero_run_bound(); ++i) w.push_back(0);
    w.insert(w.end(), v.begin(), v.end());
    CHECK(is_admissible(w, t));
  }
}

TEST_CASE("orbit examples") {
  CHECK(beta_orbit(Rational(1, 2), BetaSystem(make_integer_base(2)), 3).digits == std::vector<int>{1, 0, 0});
  // 3/10, 9/10, 27/10, 21/10, 3/10: digits 0, 0, 2, 2, 0
  std::vector<int> tenth;
  for (long long num = 1, i = 0; i < 5; ++i) {
    num *= 3;
    tenth.push_back(static_cast<int>(num / 10));
    num %= 10;
  }
  CHECK(tenth == std::vector<int>{0, 0, 2, 2, 0});
  CHECK(beta_orbit(Rational(1, 10), BetaSystem(make_integer_base(3)), 5).digits == tenth);
  BetaSystem g(golden());
  QBetaPoint inv;  // 1/beta = beta - 1
  inv.num = {BigInt(-1), BigInt(1)};
  inv.den = 1;
  OrbitRecord o = beta_orbit(inv, g, 6);
  CHECK(o.digits == std::vector<int>{1, 0, 0, 0, 0, 0});
  CHECK(o.points[1] == doctest::Approx(0.0));
  CHECK_ERROR(beta_orbit(Rational(1), g, 3), OutOfInterval);
  CHECK_ERROR(beta_orbit(Rational(-1, 3), g, 3), OutOfInterval);
}

TEST_CASE("exact and multiprecision orbits agree") {
  BetaSystem t(tribonacci());
  Rational x(12345, 54321);
  OrbitRecord a = beta_orbit(x, t, 200);
  Mp m(2048);
  set_rational(m.get(), x, MPFR_RNDN);
  OrbitRecord b = beta_orbit(m, t, 200);
  CHECK(a.digits == b.digits);
  // rational with a huge denominator
  Rational big(BigInt(1) << 3000, (BigInt(1) << 3001) + 1);
  OrbitRecord c = beta_orbit(big, BetaSystem(golden()), 50);
  CHECK(c.digits.size() == 50);
  CHECK(c.points[0] == doctest::Approx(0.5));
}

TEST_CASE("integer base digits") {
  CHECK(integer_base_digits(Rational(1, 4), 3, 6) == std::vector<int>{0, 2, 0, 2, 0, 2});
  CHECK(digits_to_string({1, 0, 2}) == "102");
  CHECK(digits_from_string("102") == std::vector<int>{1, 0, 2});
}

TEST_CASE("parry density against a power-iteration oracle") {
  for (const PisotNumber& b : {golden(), tribonacci(), plastic(), make_integer_base(2)}) {
    BetaSystem sys(b);
    ParryDensity h(sys);
    oracle::PiecewiseDensity o = oracle::parry_power_iteration(b.value());
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
      double x = (i + 0.5) / 10000.0;
      worst = std::max(worst, std::fabs(h(x) - o(x)));
    }
    CHECK(worst < 1e-8);
    CHECK(h.transfer_residual() < 1e-10);
    GridMeasure grid = parry_density(sys, 12);
    CHECK(grid.total() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("golden parry density levels") {
  ParryDensity h{BetaSystem(golden())};
  double beta = golden().value();
  CHECK(h(0.3) / h(0.9) == doctest::Approx(beta).epsilon(1e-12));
  CHECK(h(0.3) == doctest::Approx(beta * beta * beta / (1 + beta * beta)).epsilon(1e-12));
  ParryDensity two{BetaSystem(make_integer_base(2))};
  CHECK(two(0.1) == doctest::Approx(1.0));
  CHECK(two(0.9) == doctest::Approx(1.0));
}

TEST_CASE("parry edge probabilities sum to one") {
  BetaSystem t(tribonacci());
  for (int s = 0; s < t.states(); ++s) {
    double sum = 0;
    for (int d = 0; d < t.alphabet_size(); ++d)
      if (t.step(s, d) >= 0) sum += t.parry_prob(s, d);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}
