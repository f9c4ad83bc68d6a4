#include "nl/resonant.hpp"

#include "nl/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace nl {

namespace {

constexpr double kEntryCap = 2e7;

void check_spec(const ResonantSpec& spec) {
  require(spec.N >= 1, ErrorKind::InvalidArgument, "N must be at least 1");
  require(spec.M >= 1, ErrorKind::InvalidArgument, "M must be at least 1");
}

}  // namespace

DigitProcess build_block_measure(const ResonantSpec& spec) {
  check_spec(spec);
  BetaSystem sys(spec.base);
  if (!spec.base.is_integer_base())
    require(spec.N > sys.zero_run_bound(), ErrorKind::NTooSmall,
            "N = " + std::to_string(spec.N) + " must exceed the zero-run bound " + std::to_string(sys.zero_run_bound()));
  int S = sys.states(), P = spec.N + spec.M;
  const auto& pi = sys.parry_stationary();
  DigitProcess p;
  p.base = spec.base;
  p.alphabet = sys.alphabet_size();
  p.trans.resize(static_cast<std::size_t>(P * S));
  auto id = [S](int phase, int s) { return phase * S + s; };
  for (int phase = 0; phase < P; ++phase)
    for (int s = 0; s < S; ++s) {
      auto& out = p.trans[static_cast<std::size_t>(id(phase, s))];
      if (phase < spec.N - 1) {
        out.push_back({0, id(phase + 1, 0), 1.0});
      } else if (phase == spec.N - 1) {
        for (int s2 = 0; s2 < S; ++s2)
          if (pi[static_cast<std::size_t>(s2)] > 0) out.push_back({0, id(spec.N, s2), pi[static_cast<std::size_t>(s2)]});
      } else {
        int next_phase = phase + 1 == P ? 0 : phase + 1;
        for (int d = 0; d < sys.alphabet_size(); ++d) {
          int nx = sys.step(s, d);
          if (nx < 0) continue;
          out.push_back({d, id(next_phase, next_phase == 0 ? 0 : nx), sys.parry_prob(s, d)});
        }
      }
    }
  p.init.assign(p.trans.size(), 0.0);
  p.init[0] = 1.0;
  p.tag = "block(N=" + std::to_string(spec.N) + ",M=" + std::to_string(spec.M) + ")";
  if (spec.shift_averaged) return shift_average(p, P);
  return p;
}

DigitProcess shift_average(const DigitProcess& nu, int period) {
  require(period >= 1, ErrorKind::InvalidArgument, "period must be positive");
  std::vector<std::vector<double>> comps;
  std::vector<double> a = nu.init;
  for (int i = 0; i < period; ++i) {
    comps.push_back(a);
    std::vector<double> nx(a.size(), 0.0);
    for (std::size_t s = 0; s < a.size(); ++s)
      for (const Edge& e : nu.trans[s]) nx[static_cast<std::size_t>(e.next)] += a[s] * e.prob;
    a.swap(nx);
  }
  DigitProcess t = mixture(nu, comps);
  t.tag = "shift-average " + nu.tag;
  return t;
}

double shift_invariance_residual(const DigitProcess& p, int depth) {
  std::vector<double> one(p.init.size(), 0.0);
  for (std::size_t s = 0; s < p.init.size(); ++s)
    for (const Edge& e : p.trans[s]) one[static_cast<std::size_t>(e.next)] += p.init[s] * e.prob;
  double worst = 0;
  std::function<void(const std::vector<double>&, const std::vector<double>&, int)> rec =
      [&](const std::vector<double>& a, const std::vector<double>& b, int level) {
        double ma = 0, mb = 0;
        for (double v : a) ma += v;
        for (double v : b) mb += v;
        worst = std::max(worst, std::fabs(ma - mb));
        if (level == depth || (ma == 0 && mb == 0)) return;
        for (int d = 0; d < p.alphabet; ++d) rec(p.forward(a, d), p.forward(b, d), level + 1);
      };
  rec(p.init, one, 0);
  return worst;
}

DigitProcess digit_sum(const DigitProcess& a, const DigitProcess& b) {
  require(a.base == b.base, ErrorKind::InvalidArgument, "digit sums need a common base");
  DigitProcess r;
  r.base = a.base;
  r.alphabet = a.alphabet + b.alphabet - 1;
  std::size_t Sa = a.trans.size(), Sb = b.trans.size();
  r.trans.resize(Sa * Sb);
  r.init.assign(Sa * Sb, 0.0);
  for (std::size_t i = 0; i < Sa; ++i)
    for (std::size_t j = 0; j < Sb; ++j) {
      r.init[i * Sb + j] = a.init[i] * b.init[j];
      for (const Edge& ea : a.trans[i])
        for (const Edge& eb : b.trans[j])
          r.trans[i * Sb + j].push_back(
              {ea.digit + eb.digit, static_cast<int>(static_cast<std::size_t>(ea.next) * Sb + static_cast<std::size_t>(eb.next)),
               ea.prob * eb.prob});
    }
  r.tag = a.tag + "+" + b.tag;
  return r;
}

EntropyDropReport entropy_drop_check(const ResonantSpec& spec, const DigitProcess& mu, double margin) {
  check_spec(spec);
  require(mu.base == spec.base, ErrorKind::InvalidArgument, "mu must live on the block measure's base");
  ResonantSpec plain = spec;
  plain.shift_averaged = false;
  DigitProcess nu = build_block_measure(plain);
  DigitProcess rho = digit_sum(nu, mu);
  EntropyDropReport r;
  r.N = spec.N;
  r.M = spec.M;
  r.margin = margin;
  double lb = spec.base.log_value();
  r.h_rho_N = partition_entropy(rho, spec.N);
  r.h_mu_N = partition_entropy(mu, spec.N);
  r.c = r.h_rho_N - r.h_mu_N;
  r.c_bound = std::log(3.0);
  int depth = spec.N + spec.M;
  bool too_big = spec.base.is_integer_base() &&
                 (rho.alphabet - 1) * std::pow(static_cast<double>(spec.base.integer_value()), depth) > kEntryCap;
  if (!too_big) {
    try {
      r.h_rho = partition_entropy(rho, depth);
      r.depth = depth;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DepthExhausted) throw;
      too_big = true;
    }
  }
  if (too_big) {
    r.exact = false;
    r.depth = spec.N;
    r.h_rho = r.h_rho_N + spec.M * lb;
  }
  r.normalized = r.h_rho / (depth * lb);
  r.resonance = r.normalized < 1 - margin;
  return r;
}

std::string EntropyDropReport::to_json() const {
  std::ostringstream os;
  os << "{\n  \"N\": " << N << ",\n  \"M\": " << M << ",\n  \"depth\": " << depth
     << ",\n  \"exact\": " << (exact ? "true" : "false") << ",\n  \"h_rho\": " << fmt(h_rho)
     << ",\n  \"h_rho_N\": " << fmt(h_rho_N) << ",\n  \"h_mu_N\": " << fmt(h_mu_N) << ",\n  \"c\": " << fmt(c)
     << ",\n  \"c_bound\": " << fmt(c_bound) << ",\n  \"normalized\": " << fmt(normalized)
     << ",\n  \"margin\": " << fmt(margin) << ",\n  \"resonance\": " << (resonance ? "true" : "false") << "\n}\n";
  return os.str();
}

CylinderBoundReport cylinder_mass_bound(const ResonantSpec& spec, int k) {
  require(k >= 1 && k <= 3, ErrorKind::InvalidArgument, "k must lie in 1..3");
  ResonantSpec plain = spec;
  plain.shift_averaged = false;
  DigitProcess nu = build_block_measure(plain);
  BetaSystem sys(spec.base);
  CylinderBoundReport r;
  r.k = k;
  r.c = ParryDensity(sys).sup();
  r.bound = std::pow(r.c, k) * std::pow(spec.base.value(), -static_cast<double>(spec.M) * k);
  int depth = (spec.N + spec.M) * k;
  std::function<void(const std::vector<double>&, int)> rec = [&](const std::vector<double>& a, int level) {
    double m = 0;
    for (double v : a) m += v;
    if (m == 0) return;
    if (level == depth) {
      ++r.cylinders;
      r.max_mass = std::max(r.max_mass, m);
      return;
    }
    for (int d = 0; d < nu.alphabet; ++d) rec(nu.forward(a, d), level + 1);
  };
  rec(nu.init, 0);
  r.holds = r.max_mass <= r.bound * (1 + 1e-12);
  return r;
}

bool charged_words_admissible(const DigitProcess& p, const BetaSystem& sys, int depth) {
  std::vector<int> w;
  bool ok = true;
  std::function<void(const std::vector<double>&)> rec = [&](const std::vector<double>& a) {
    if (!ok) return;
    double m = 0;
    for (double v : a) m += v;
    if (m == 0) return;
    if (!w.empty() && !is_admissible(w, sys)) {
      ok = false;
      return;
    }
    if (static_cast<int>(w.size()) == depth) return;
    for (int d = 0; d < p.alphabet; ++d) {
      w.push_back(d);
      rec(p.forward(a, d));
      w.pop_back();
    }
  };
  rec(p.init);
  return ok;
}

}  // namespace nl
