#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "check.hpp"
#include "oracles/oracles.hpp"

#include "nl/digit_process.hpp"
#include "nl/measures.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace nl;

namespace {
GridMeasure random_grid(std::mt19937_64& rng, std::size_t cells) {
  GridMeasure g{0.0, 1.0, std::vector<double>(cells)};
  std::uniform_real_distribution<double> u(0, 1);
  for (double& w : g.weights) w = u(rng) < 0.3 ? 0.0 : u(rng);
  g.normalize();
  return g;
}
}  // namespace

TEST_CASE("rescale examples") {
  GridMeasure u = uniform_grid(-1, 1, 256);
  CHECK(ks_distance(rescale(u, 0), u) < 1e-12);
  CHECK(ks_distance(rescale(u, std::log(2.0)), u) < 1e-12);
  GridMeasure d = point_mass(-1, 1, 256, 0.0);
  for (double t : {0.3, 1.0, 2.0}) {
    GridMeasure r = rescale(d, t);
    double w = d.cell_width() * std::exp(t) + r.cell_width();
    CHECK(r.mass(-w, w) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rescale is a semigroup up to one cell") {
  std::mt19937_64 rng(5);
  GridMeasure mu = random_grid(rng, 512);
  mu = affine_rebin(mu, 2, -1, -1, 1, 512);
  for (auto [s, t] : {std::pair{0.2, 0.3}, std::pair{0.5, 0.1}, std::pair{0.05, 0.6}}) {
    GridMeasure a = rescale(rescale(mu, s), t), b = rescale(mu, s + t);
    double worst = 0;
    for (double x = -1; x <= 1; x += 1.0 / 1024) worst = std::max(worst, std::fabs(a.cdf(x) - b.cdf(x)));
    CHECK(worst <= *std::max_element(b.weights.begin(), b.weights.end()));
  }
}

TEST_CASE("translate_restrict examples") {
  GridMeasure u = uniform_grid(0, 1, 1000);
  GridMeasure h = translate_restrict(u, 0.5);
  CHECK(h.mass(-0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(h.mass(0.5, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  GridMeasure z = translate_restrict(u, 0.0);
  CHECK(z.mass(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  GridMeasure d = translate_restrict(point_mass(0, 1, 1000, 0.3), 0.3);
  CHECK(d.mass(-0.002, 0.002) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_ERROR(translate_restrict(u, 2.0), OutOfInterval);
}

TEST_CASE("convolution examples") {
  GridMeasure u = uniform_grid(0, 1, 1024);
  CHECK(ks_distance(convolve(u, u, true), u) < 1e-12);
  DigitProcess fair = bernoulli_process(2, {0.5, 0.5});
  GridMeasure b = fair.grid(fair.init, 8);
  GridMeasure c = convolve(b, b, true);
  double worst = 0;
  for (double w : c.weights) worst = std::max(worst, std::fabs(w - 1.0 / 256));
  CHECK(worst < 1e-12);
  GridMeasure full = convolve(u, u, false);
  CHECK(full.cells() == 2047);
  CHECK(full.total() == doctest::Approx(1.0));
}

TEST_CASE("convolution is commutative and associative") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    GridMeasure a = random_grid(rng, 256), b = random_grid(rng, 256), c = random_grid(rng, 256);
    CHECK(ks_distance(convolve(a, b, true), convolve(b, a, true)) < 1e-10);
    CHECK(ks_distance(convolve(convolve(a, b, true), c, true), convolve(a, convolve(b, c, true), true)) < 1e-10);
  }
}

TEST_CASE("ks distance matches a direct cumulative oracle") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    GridMeasure a = random_grid(rng, 64), b = random_grid(rng, 64);
    double d = ks_distance(a, b);
    CHECK(d == doctest::Approx(oracle::ks_from_cells(a.weights, b.weights)).epsilon(1e-12));
    CHECK(d >= 0);
    CHECK(d <= 1);
  }
  CHECK(ks_distance(point_mass(0, 1, 10, 0.05), point_mass(0, 1, 10, 0.95)) == doctest::Approx(1.0));
}

TEST_CASE("bin_samples examples") {
  SampleMeasure s;
  s.points = {0.5};
  GridMeasure g = bin_samples(s, 0, 1, 2);
  CHECK(g.weights == std::vector<double>{0, 1});
  s.points = {1.0};
  CHECK(bin_samples(s, 0, 1, 2).weights == std::vector<double>{0, 1});
  SampleMeasure u;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0, 1);
  for (int i = 0; i < 10000; ++i) u.points.push_back(d(rng));
  for (double w : bin_samples(u, 0, 1, 16).weights) CHECK(std::fabs(w - 1.0 / 16) < 0.02);
  CHECK_ERROR(bin_samples(SampleMeasure{}, 0, 1, 4), InvalidArgument);
}

TEST_CASE("sampling from a grid and binning again") {
  std::mt19937_64 rng(4);
  GridMeasure g = random_grid(rng, 32);
  SampleMeasure s = sample_grid(g, 100000, 17);
  GridMeasure back = bin_samples(s, 0, 1, 32);
  for (std::size_t i = 0; i < 32; ++i) {
    double sd = std::sqrt(g.weights[i] * (1 - g.weights[i]) / 100000.0);
    CHECK(std::fabs(back.weights[i] - g.weights[i]) <= 5 * sd + 1e-12);
  }
  CHECK(sample_grid(g, 10, 17).points == sample_grid(g, 10, 17).points);
}

TEST_CASE("csv round trips") {
  std::mt19937_64 rng(6);
  GridMeasure g = random_grid(rng, 20);
  std::stringstream ss;
  write_grid_csv(ss, g);
  GridMeasure r = read_grid_csv(ss);
  REQUIRE(r.cells() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(r.weights[i] == doctest::Approx(g.weights[i]).epsilon(1e-11));
  SampleMeasure s = sample_grid(g, 5, 3);
  std::stringstream ss2;
  write_samples_csv(ss2, s);
  SampleMeasure t = read_samples_csv(ss2);
  CHECK(t.seed == s.seed);
  CHECK(t.points.size() == 5);
  std::stringstream bad("lo,hi\n");
  CHECK_ERROR(read_grid_csv(bad), ConfigError);
}

TEST_CASE("affine re-binning preserves mass") {
  std::mt19937_64 rng(8);
  GridMeasure g = random_grid(rng, 100);
  GridMeasure h = affine_rebin(g, 0.5, 0.25, 0, 1, 77);
  CHECK(h.total() == doctest::Approx(1.0).epsilon(1e-12));
  double cell = *std::max_element(h.weights.begin(), h.weights.end());
  for (double x : {0.1, 0.4, 0.77}) CHECK(std::fabs(h.cdf(0.25 + 0.5 * x) - g.cdf(x)) <= cell);
  CHECK_ERROR(affine_rebin(g, 1, 5, 0, 1, 10), EmptyWindow);
}
