#include "nl/digit_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nl {

std::vector<double> DigitProcess::forward(const std::vector<double>& alpha, int digit) const {
  std::vector<double> out(trans.size(), 0.0);
  for (std::size_t s = 0; s < trans.size(); ++s) {
    if (alpha[s] == 0) continue;
    for (const Edge& e : trans[s])
      if (e.digit == digit) out[static_cast<std::size_t>(e.next)] += alpha[s] * e.prob;
  }
  return out;
}

double DigitProcess::cylinder_mass_from(const std::vector<double>& alpha, const std::vector<int>& word) const {
  std::vector<double> a = alpha;
  for (int d : word) a = forward(a, d);
  double s = 0;
  for (double v : a) s += v;
  return s;
}

double DigitProcess::cylinder_mass(const std::vector<int>& word) const { return cylinder_mass_from(init, word); }

double DigitProcess::log_mass(const std::vector<int>& word) const {
  std::vector<double> a = init;
  double lm = 0;
  for (int d : word) {
    a = forward(a, d);
    double s = 0;
    for (double v : a) s += v;
    if (s == 0) return -std::numeric_limits<double>::infinity();
    lm += std::log(s);
    for (double& v : a) v /= s;
  }
  return lm;
}

std::vector<double> DigitProcess::posterior(const std::vector<int>& prefix) const {
  std::vector<double> a = init;
  for (int d : prefix) {
    a = forward(a, d);
    double s = 0;
    for (double v : a) s += v;
    require(s > 0, ErrorKind::ZeroCylinder, "cylinder has zero mass");
    for (double& v : a) v /= s;
  }
  return a;
}

double DigitProcess::cdf(const std::vector<double>& alpha, double x) const {
  require(integer_base(), ErrorKind::InvalidArgument, "value distributions need an integer base");
  double total = 0;
  for (double v : alpha) total += v;
  if (x <= 0) return 0.0;
  if (x >= 1) return total;
  auto b = static_cast<long double>(int_base());
  long double y = x;
  double F = 0;
  std::vector<double> a = alpha;
  double rem = total;
  for (int depth = 0; depth < 64; ++depth) {
    y *= b;
    long double fl = std::floor(y);
    int d = static_cast<int>(std::clamp<long double>(fl, 0, b - 1));
    y -= d;
    for (std::size_t s = 0; s < trans.size(); ++s) {
      if (a[s] == 0) continue;
      for (const Edge& e : trans[s])
        if (e.digit < d) F += a[s] * e.prob;
    }
    a = forward(a, d);
    rem = 0;
    for (double v : a) rem += v;
    if (rem <= 1e-18 * total) break;
  }
  return F + rem * static_cast<double>(std::clamp<long double>(y, 0, 1));
}

GridMeasure DigitProcess::grid(const std::vector<double>& alpha, int level) const {
  require(integer_base(), ErrorKind::InvalidArgument, "value distributions need an integer base");
  long long b = int_base();
  double cells = std::pow(static_cast<double>(b), level);
  require(level >= 0 && cells * states() <= 5e7, ErrorKind::InvalidArgument, "grid level too large");
  std::size_t S = trans.size();
  std::vector<double> cur = alpha;  // word-major, S entries per word
  std::size_t words = 1;
  for (int l = 0; l < level; ++l) {
    std::vector<double> nxt(words * static_cast<std::size_t>(b) * S, 0.0);
    for (std::size_t w = 0; w < words; ++w)
      for (std::size_t s = 0; s < S; ++s) {
        double m = cur[w * S + s];
        if (m == 0) continue;
        for (const Edge& e : trans[s])
          nxt[(w * static_cast<std::size_t>(b) + static_cast<std::size_t>(e.digit)) * S + static_cast<std::size_t>(e.next)] +=
              m * e.prob;
      }
    cur.swap(nxt);
    words *= static_cast<std::size_t>(b);
  }
  GridMeasure g{0.0, 1.0, std::vector<double>(words, 0.0)};
  for (std::size_t w = 0; w < words; ++w)
    for (std::size_t s = 0; s < S; ++s) g.weights[w] += cur[w * S + s];
  g.normalize();
  return g;
}

std::vector<int> DigitProcess::sample_digits_from(const std::vector<double>& alpha, std::size_t n, Rng& rng) const {
  std::vector<double> a = alpha;
  double s = 0;
  for (double v : a) s += v;
  require(s > 0, ErrorKind::ZeroCylinder, "initial distribution has zero mass");
  for (double& v : a) v /= s;
  int st = rng.pick(a);
  std::vector<int> out(n);
  std::vector<double> p;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& es = trans[static_cast<std::size_t>(st)];
    p.resize(es.size());
    for (std::size_t i = 0; i < es.size(); ++i) p[i] = es[i].prob;
    const Edge& e = es[static_cast<std::size_t>(rng.pick(p))];
    out[k] = e.digit;
    st = e.next;
  }
  return out;
}

std::vector<int> DigitProcess::sample_digits(std::size_t n, Rng& rng) const { return sample_digits_from(init, n, rng); }

std::vector<double> DigitProcess::stationary() const {
  std::size_t S = trans.size();
  std::vector<double> pi(S, 1.0 / static_cast<double>(S));
  for (int it = 0; it < 200000; ++it) {
    std::vector<double> np(S, 0.0);
    for (std::size_t s = 0; s < S; ++s)
      for (const Edge& e : trans[s]) np[static_cast<std::size_t>(e.next)] += pi[s] * e.prob;
    double diff = 0;
    for (std::size_t s = 0; s < S; ++s) {
      np[s] = 0.5 * (np[s] + pi[s]);
      diff = std::max(diff, std::fabs(np[s] - pi[s]));
    }
    pi.swap(np);
    if (diff < 1e-16) break;
  }
  return pi;
}

double DigitProcess::entropy_rate() const {
  std::vector<double> pi = stationary();
  double h = 0;
  for (std::size_t s = 0; s < trans.size(); ++s) {
    // probability of each digit from s (edges with equal digits merged)
    std::vector<double> pd(static_cast<std::size_t>(alphabet), 0.0);
    for (const Edge& e : trans[s]) pd[static_cast<std::size_t>(e.digit)] += e.prob;
    for (double p : pd)
      if (p > 0) h -= pi[s] * p * std::log(p);
  }
  return h;
}

DigitProcess bernoulli_process(long long base, const std::vector<double>& w) {
  require(base >= 2, ErrorKind::InvalidArgument, "base must be at least 2");
  require(static_cast<long long>(w.size()) == base, ErrorKind::InvalidArgument, "need one weight per digit");
  double s = 0;
  for (double x : w) {
    require(x >= 0, ErrorKind::InvalidArgument, "weights must be nonnegative");
    s += x;
  }
  require(std::fabs(s - 1) < 1e-9, ErrorKind::InvalidArgument, "weights must sum to 1");
  DigitProcess p;
  p.base = make_integer_base(base);
  p.alphabet = static_cast<int>(base);
  p.trans.resize(1);
  for (int d = 0; d < base; ++d)
    if (w[d] > 0) p.trans[0].push_back({d, 0, w[d] / s});
  p.init = {1.0};
  p.tag = "bernoulli";
  return p;
}

DigitProcess markov_process(long long base, const std::vector<std::vector<double>>& P) {
  require(base >= 2 && static_cast<long long>(P.size()) == base, ErrorKind::InvalidArgument, "need a base x base matrix");
  DigitProcess p;
  p.base = make_integer_base(base);
  p.alphabet = static_cast<int>(base);
  p.trans.resize(static_cast<std::size_t>(base));
  for (int i = 0; i < base; ++i) {
    require(static_cast<long long>(P[i].size()) == base, ErrorKind::InvalidArgument, "need a base x base matrix");
    double s = 0;
    for (int j = 0; j < base; ++j) {
      require(P[i][j] >= 0, ErrorKind::InvalidArgument, "transition probabilities must be nonnegative");
      s += P[i][j];
    }
    require(std::fabs(s - 1) < 1e-9, ErrorKind::InvalidArgument, "rows must sum to 1");
    for (int j = 0; j < base; ++j)
      if (P[i][j] > 0) p.trans[i].push_back({j, j, P[i][j] / s});
  }
  p.init.assign(static_cast<std::size_t>(base), 1.0 / static_cast<double>(base));
  p.init = p.stationary();
  p.tag = "markov";
  return p;
}

DigitProcess golden_markov_process() {
  double phi = (1 + std::sqrt(5.0)) / 2;
  DigitProcess p = markov_process(2, {{1 / phi, 1 / (phi * phi)}, {1.0, 0.0}});
  p.tag = "golden-markov";
  return p;
}

DigitProcess parry_process(const BetaSystem& sys) {
  DigitProcess p;
  p.base = sys.beta();
  p.alphabet = sys.alphabet_size();
  int S = sys.states();
  p.trans.resize(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s)
    for (int d = 0; d < sys.alphabet_size(); ++d) {
      int nx = sys.step(s, d);
      if (nx >= 0) p.trans[s].push_back({d, nx, sys.parry_prob(s, d)});
    }
  p.init = sys.parry_stationary();
  p.tag = "parry";
  return p;
}

DigitProcess lebesgue_process(long long base) {
  DigitProcess p = bernoulli_process(base, std::vector<double>(static_cast<std::size_t>(base), 1.0 / static_cast<double>(base)));
  p.tag = "lebesgue";
  return p;
}

DigitProcess cantor_process() {
  DigitProcess p = bernoulli_process(3, {0.5, 0.0, 0.5});
  p.tag = "cantor";
  return p;
}

DigitProcess mixture(const DigitProcess& p, const std::vector<std::vector<double>>& inits) {
  require(!inits.empty(), ErrorKind::InvalidArgument, "empty mixture");
  DigitProcess m = p;
  m.component_inits = inits;
  m.component_weights.assign(inits.size(), 1.0 / static_cast<double>(inits.size()));
  m.init.assign(p.trans.size(), 0.0);
  for (const auto& a : inits) {
    require(a.size() == p.trans.size(), ErrorKind::InvalidArgument, "component size mismatch");
    for (std::size_t s = 0; s < a.size(); ++s) m.init[s] += a[s] / static_cast<double>(inits.size());
  }
  return m;
}

Rational rational_from_digits(const std::vector<int>& digits, long long base) {
  BigInt m = 0;
  for (int d : digits) m = m * base + d;
  BigInt den;
  mpz_ui_pow_ui(den.backend().data(), static_cast<unsigned long>(base), digits.size());
  return Rational(m, den);
}

std::vector<std::pair<std::vector<int>, double>> enumerate_cylinders(const DigitProcess& p, int depth) {
  std::vector<std::pair<std::vector<int>, double>> out;
  std::vector<int> w;
  std::function<void(const std::vector<double>&)> rec = [&](const std::vector<double>& a) {
    if (static_cast<int>(w.size()) == depth) {
      double s = 0;
      for (double v : a) s += v;
      out.emplace_back(w, s);
      return;
    }
    for (int d = 0; d < p.alphabet; ++d) {
      w.push_back(d);
      rec(p.forward(a, d));
      w.pop_back();
    }
  };
  rec(p.init);
  return out;
}

}  // namespace nl
