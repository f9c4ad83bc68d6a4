#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "check.hpp"
#include "oracles/oracles.hpp"

#include "nl/dimension.hpp"
#include "nl/dynamics.hpp"

#include <cmath>

using namespace nl;

namespace {
const double kLog2 = std::log(2.0), kLog3 = std::log(3.0);
const double kCantorDim = kLog2 / kLog3;

SampleMeasure cantor_samples(std::size_t n, std::uint64_t seed) { return sample_markov(cantor_process(), n, 40, seed); }

std::vector<double> geometric(double a, double b, int n) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(a * std::pow(b / a, i / double(n - 1)));
  return r;
}
}  // namespace

TEST_CASE("local dimension of simple measures") {
  SampleMeasure u = sample_grid(uniform_grid(0, 1, 1 << 12), 20000, 3);
  CHECK(std::fabs(local_dim(u).value - 1) < 0.05);

  LocalDimOptions o;
  o.radii = geometric(std::pow(3.0, -12), std::pow(3.0, -4), 9);
  DimEstimate c = local_dim(cantor_samples(100000, 5), o);
  CHECK(std::fabs(c.value - kCantorDim) < 0.03);
  CHECK(c.dispersion >= 0);
  CHECK(c.method == "local");

  SampleMeasure atom;
  atom.points.assign(2000, 0.25);
  CHECK(local_dim(atom).value == doctest::Approx(0).scale(1));
}

TEST_CASE("local dimension preconditions") {
  SampleMeasure few = sample_grid(uniform_grid(0, 1, 64), 100, 1);
  CHECK_ERROR(local_dim(few), TooFewSamples);
  SampleMeasure u = sample_grid(uniform_grid(0, 1, 1 << 12), 5000, 1);
  LocalDimOptions narrow;
  narrow.radii = geometric(1e-3, 5e-3, 6);
  CHECK_ERROR(local_dim(u, narrow), RadiiOutOfRange);
  LocalDimOptions q;
  q.quantile = 0.8;
  CHECK_ERROR(local_dim(u, q), InvalidArgument);
}

TEST_CASE("entropy dimension: closed forms") {
  DigitProcess leb = lebesgue_process(2);
  for (int k = 1; k <= 12; ++k) CHECK(entropy_dim(leb, k).value == doctest::Approx(1).epsilon(1e-12));
  DimEstimate b = entropy_dim(bernoulli_process(2, {0.9, 0.1}), 12);
  CHECK(b.value == doctest::Approx(oracle::entropy({0.9, 0.1}) / kLog2).epsilon(1e-6));
  CHECK(b.value == doctest::Approx(0.469).epsilon(1e-3));
  CHECK(b.method == "entropy");
}

TEST_CASE("entropy dimension of uniform admissible golden words") {
  PisotNumber g = certify_pisot({-1, -1, 1});
  double phi = g.value();
  std::vector<int> one = oracle::quasi_greedy_one(phi, 12);
  const int k = 10;
  std::vector<std::pair<std::vector<int>, double>> words;
  for (int m = 0; m < (1 << k); ++m) {
    std::vector<int> w;
    for (int i = k - 1; i >= 0; --i) w.push_back((m >> i) & 1);
    if (oracle::lex_admissible(w, one)) words.emplace_back(w, 1.0);
  }
  CHECK(words.size() == 144);  // F_12
  for (auto& w : words) w.second /= static_cast<double>(words.size());
  DimEstimate e = entropy_dim(words, g);
  CHECK(e.value == doctest::Approx(std::log(144.0) / (k * std::log(phi))).epsilon(1e-9));
  CHECK(std::fabs(e.value - 1) < 0.05);
}

TEST_CASE("partition entropy is subadditive") {
  std::vector<DigitProcess> ps{bernoulli_process(2, {0.8, 0.2}), golden_markov_process(), cantor_process(),
                               parry_process(BetaSystem(certify_pisot({-1, -1, 1}))), parry_process(BetaSystem(certify_pisot({-1, -1, -1, 1})))};
  for (const DigitProcess& p : ps)
    for (int k = 1; k <= 5; ++k)
      for (int m = 1; m <= 5; ++m)
        CHECK(partition_entropy(p, k + m) <= partition_entropy(p, k) + partition_entropy(p, m) + 1e-12);
}

TEST_CASE("local and entropy estimators agree on Bernoulli measures") {
  for (auto w : {std::vector<double>{0.7, 0.3}, std::vector<double>{0.5, 0.5}}) {
    DigitProcess p = bernoulli_process(2, w);
    double e = entropy_dim(p, 12).value;
    double l = local_dim(sample_markov(p, 50000, 48, 11)).value;
    CHECK(std::fabs(e - l) < 0.05);
  }
  DigitProcess p = bernoulli_process(3, {0.6, 0.1, 0.3});
  CHECK(std::fabs(entropy_dim(p, 8).value - local_dim(sample_markov(p, 50000, 32, 12)).value) < 0.05);
}

TEST_CASE("restriction does not lower the dimension") {
  SampleMeasure c = cantor_samples(60000, 7);
  double full = local_dim(c).value;
  SampleMeasure left;
  for (double x : c.points)
    if (x < 1.0 / 3) left.points.push_back(x);
  CHECK(local_dim(left).value >= full - 0.05);
}

TEST_CASE("resonance test") {
  const int level = 12;
  EstimatorConfig cfg;
  cfg.base = 3;
  cfg.k = level;
  DigitProcess c = cantor_process();
  GridMeasure g = c.grid(c.init, level);
  ResonanceReport r = resonance_test(g, g, true, cfg);
  CHECK(r.resonates);
  CHECK(r.dim_conv <= 0.96);
  CHECK(r.dim_mu == doctest::Approx(kCantorDim).epsilon(1e-9));
  CHECK(r.dim_conv >= std::max(r.dim_mu, r.dim_nu) - 0.05);

  EstimatorConfig c2;
  c2.base = 2;
  c2.k = 10;
  GridMeasure leb = uniform_grid(0, 1, 1 << 10);
  ResonanceReport d = resonance_test(leb, leb, true, c2);
  CHECK_FALSE(d.resonates);
  CHECK(d.dim_mu == doctest::Approx(1));
  CHECK(d.dim_conv == doctest::Approx(1));

  DigitProcess b = bernoulli_process(2, {0.8, 0.2});
  GridMeasure bg = b.grid(b.init, 10);
  ResonanceReport e = resonance_test(bg, leb, true, c2);
  CHECK_FALSE(e.resonates);
  CHECK(e.dim_conv >= std::max(e.dim_mu, e.dim_nu) - 0.05);
}

TEST_CASE("Marstrand sweep fixtures") {
  SampleMeasure c = cantor_samples(20000, 9);
  SampleMeasure delta;
  delta.points.assign(20000, 0.0);
  SweepOptions o;
  o.dim_nu = 0;
  SweepReport r = marstrand_sweep(c, delta, {0.1, 0.5, 1.0}, o);
  double base = local_dim(c).value;
  for (const SweepRow& row : r.rows) CHECK(row.dim == doctest::Approx(base).epsilon(1e-12));

  SampleMeasure u = sample_grid(uniform_grid(0, 1, 1 << 12), 20000, 4), v = sample_grid(uniform_grid(0, 1, 1 << 12), 20000, 5);
  SweepReport l = marstrand_sweep(u, v, {0.1, 0.6, 1.1});
  for (const SweepRow& row : l.rows) CHECK(std::fabs(row.dim - 1) < 0.05);
  CHECK(l.exceptional_fraction == 0);
}
