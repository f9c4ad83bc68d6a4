#include "nl/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace nl {

namespace {

constexpr std::size_t kEntryCap = 20000000;

double slope(const std::vector<double>& lx, const std::vector<double>& ly) {
  double n = static_cast<double>(lx.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double at_quantile(const std::vector<double>& sorted, double q) {
  return sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
}

// Distance from x[i] to its k-th nearest other point in a sorted array.
double kth_neighbour(const std::vector<double>& x, std::size_t i, std::size_t k) {
  std::size_t l = i, r = i;
  double d = 0;
  for (std::size_t got = 0; got < k; ++got) {
    bool has_l = l > 0, has_r = r + 1 < x.size();
    if (!has_l && !has_r) break;
    double dl = has_l ? x[i] - x[l - 1] : INFINITY, dr = has_r ? x[r + 1] - x[i] : INFINITY;
    if (dl <= dr) {
      d = dl;
      --l;
    } else {
      d = dr;
      ++r;
    }
  }
  return d;
}

struct NodeKey {
  ZKey key;
  int state;
  bool operator==(const NodeKey& o) const { return state == o.state && key == o.key; }
};
struct NodeHash {
  std::size_t operator()(const NodeKey& n) const { return ZKeyHash{}(n.key) ^ (static_cast<std::size_t>(n.state) * 0x9e3779b97f4a7c15ULL); }
};

double entropy_of(const std::unordered_map<ZKey, double, ZKeyHash>& classes) {
  double total = 0;
  for (const auto& [k, m] : classes) total += m;
  require(total > 0, ErrorKind::DegenerateInput, "no mass");
  double h = 0;
  for (const auto& [k, m] : classes)
    if (m > 0) h -= (m / total) * std::log(m / total);
  return h;
}

double process_entropy_from(const DigitProcess& p, const std::vector<double>& alpha, int k) {
  require(k >= 1, ErrorKind::InvalidArgument, "k must be at least 1");
  const PisotNumber& beta = p.base;
  bool closed = p.integer_base() && p.states() == 1 && p.alphabet <= p.int_base();
  if (closed) {
    double h1 = 0;
    for (const Edge& e : p.trans[0])
      if (e.prob > 0) h1 -= e.prob * std::log(e.prob);
    return k * h1;
  }
  std::unordered_map<NodeKey, double, NodeHash> cur;
  for (int s = 0; s < p.states(); ++s)
    if (alpha[static_cast<std::size_t>(s)] > 0) cur[{beta.key_zero(), s}] += alpha[static_cast<std::size_t>(s)];
  for (int level = 0; level < k; ++level) {
    std::unordered_map<NodeKey, double, NodeHash> nxt;
    nxt.reserve(cur.size() * 2);
    for (const auto& [node, m] : cur)
      for (const Edge& e : p.trans[static_cast<std::size_t>(node.state)]) {
        if (e.prob == 0) continue;
        nxt[{beta.key_shift_add(node.key, e.digit), e.next}] += m * e.prob;
        require(nxt.size() <= kEntryCap, ErrorKind::DepthExhausted,
                "more than 2e7 (value, state) entries at depth " + std::to_string(level + 1));
      }
    cur.swap(nxt);
  }
  std::unordered_map<ZKey, double, ZKeyHash> classes;
  for (const auto& [node, m] : cur) classes[node.key] += m;
  return entropy_of(classes);
}

std::string k_param(int k) { return "k=" + std::to_string(k); }

}  // namespace

DimEstimate local_dim(const SampleMeasure& s, const LocalDimOptions& opt) {
  std::size_t n = s.points.size();
  require(n >= 1000, ErrorKind::TooFewSamples, "need at least 1000 sample points, got " + std::to_string(n));
  require(opt.quantile > 0 && opt.quantile <= 0.5, ErrorKind::InvalidArgument, "quantile must lie in (0, 0.5]");
  require(opt.max_centers >= 1, ErrorKind::InvalidArgument, "need at least one centre");
  std::vector<double> x = s.points;
  std::sort(x.begin(), x.end());
  DimEstimate est;
  est.method = "local";
  est.points = n;
  double range = x.back() - x.front();
  if (range == 0) {
    est.params = "atom";
    return est;
  }
  std::size_t nc = std::min(opt.max_centers, n);
  std::vector<std::size_t> centres(nc);
  for (std::size_t c = 0; c < nc; ++c) centres[c] = std::min(n - 1, (c * n) / nc + n / (2 * nc));

  std::vector<double> radii = opt.radii;
  if (radii.empty()) {
    require(opt.n_radii >= 3, ErrorKind::InvalidArgument, "need at least three radii");
    std::vector<double> d(nc);
    for (std::size_t c = 0; c < nc; ++c) d[c] = kth_neighbour(x, centres[c], 20);
    std::sort(d.begin(), d.end());
    double r_min = d[nc / 2];
    require(r_min > 0, ErrorKind::RadiiOutOfRange, "median 20th-neighbour distance is zero");
    double r_max = std::clamp(100 * r_min, 0.01 * range, 0.1 * range);
    r_min = std::min(r_min, r_max / 100);
    for (std::size_t i = 0; i < opt.n_radii; ++i)
      radii.push_back(r_min * std::pow(r_max / r_min, static_cast<double>(i) / static_cast<double>(opt.n_radii - 1)));
  }
  std::sort(radii.begin(), radii.end());
  require(radii.size() >= 3 && radii.front() > 0, ErrorKind::RadiiOutOfRange, "need at least three positive radii");
  require(radii.back() / radii.front() >= 100 * (1 - 1e-9), ErrorKind::RadiiOutOfRange,
          "radii span " + fmt(std::log10(radii.back() / radii.front())) + " decades, need 2");

  std::vector<double> slopes(nc, NAN);
  parallel_for(nc, [&](std::size_t c) {
    double xc = x[centres[c]];
    std::vector<double> lx, ly;
    for (double r : radii) {
      auto cnt = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), xc + r) -
                                          std::lower_bound(x.begin(), x.end(), xc - r)) - 1;
      if (cnt == 0) continue;
      lx.push_back(std::log(r));
      ly.push_back(std::log(static_cast<double>(cnt) / static_cast<double>(n - 1)));
    }
    if (lx.size() >= 3) slopes[c] = slope(lx, ly);
  });
  std::vector<double> ok;
  for (double v : slopes)
    if (std::isfinite(v)) ok.push_back(v);
  require(!ok.empty(), ErrorKind::RadiiOutOfRange, "no centre has three occupied radii");
  std::sort(ok.begin(), ok.end());
  est.value = at_quantile(ok, opt.quantile);
  est.dispersion = at_quantile(ok, 0.75) - at_quantile(ok, 0.25);
  est.params = "r=" + fmt(radii.front()) + ".." + fmt(radii.back()) + " q=" + fmt(opt.quantile);
  return est;
}

double partition_entropy(const DigitProcess& p, int k) { return process_entropy_from(p, p.init, k); }

double partition_entropy(const std::vector<std::pair<std::vector<int>, double>>& words, const PisotNumber& beta) {
  require(!words.empty(), ErrorKind::InvalidArgument, "no words");
  std::size_t len = words.front().first.size();
  std::unordered_map<ZKey, double, ZKeyHash> classes;
  for (const auto& [w, m] : words) {
    require(w.size() == len, ErrorKind::InvalidArgument, "words must share one length");
    require(m >= 0, ErrorKind::InvalidArgument, "negative weight");
    ZKey key = beta.key_zero();
    for (int d : w) key = beta.key_shift_add(key, d);
    classes[key] += m;
  }
  return entropy_of(classes);
}

DimEstimate entropy_dim(const DigitProcess& p, int k) {
  DimEstimate est;
  est.method = "entropy";
  est.params = k_param(k);
  double norm = k * p.base.log_value();
  if (p.component_inits.empty()) {
    est.value = process_entropy_from(p, p.init, k) / norm;
  } else {
    est.value = INFINITY;
    for (const auto& a : p.component_inits) est.value = std::min(est.value, process_entropy_from(p, a, k) / norm);
    est.params += " min over " + std::to_string(p.component_inits.size()) + " components";
  }
  return est;
}

DimEstimate entropy_dim(const std::vector<std::pair<std::vector<int>, double>>& words, const PisotNumber& beta) {
  DimEstimate est;
  est.method = "entropy";
  int k = words.empty() ? 0 : static_cast<int>(words.front().first.size());
  require(k >= 1, ErrorKind::InvalidArgument, "words must be non-empty");
  est.params = k_param(k);
  est.value = partition_entropy(words, beta) / (k * beta.log_value());
  return est;
}

DimEstimate entropy_dim(const GridMeasure& mu, long long base, int k) {
  require(base >= 2 && k >= 1, ErrorKind::InvalidArgument, "need base >= 2 and k >= 1");
  require(mu.lo == 0 && mu.hi == 1, ErrorKind::IntervalMismatch, "grid entropy needs a grid on [0, 1]");
  std::size_t groups = 1;
  for (int i = 0; i < k; ++i) {
    groups *= static_cast<std::size_t>(base);
    require(groups <= mu.cells(), ErrorKind::DepthExhausted, "grid coarser than level k");
  }
  require(mu.cells() % groups == 0, ErrorKind::InvalidArgument, "grid not aligned to the b-adic level");
  std::size_t per = mu.cells() / groups;
  double total = mu.total(), h = 0;
  require(total > 0, ErrorKind::DegenerateInput, "no mass");
  for (std::size_t g = 0; g < groups; ++g) {
    double m = 0;
    for (std::size_t j = 0; j < per; ++j) m += mu.weights[g * per + j];
    m /= total;
    if (m > 0) h -= m * std::log(m);
  }
  DimEstimate est;
  est.method = "entropy";
  est.params = k_param(k) + " base=" + std::to_string(base);
  est.value = h / (k * std::log(static_cast<double>(base)));
  return est;
}

DimEstimate estimate_dim(const GridMeasure& mu, const EstimatorConfig& cfg) {
  if (cfg.kind == EstimatorConfig::Kind::Entropy) return entropy_dim(mu, cfg.base, cfg.k);
  return local_dim(sample_grid(mu, cfg.samples, cfg.seed), cfg.local);
}

ResonanceReport resonance_test(const GridMeasure& mu, const GridMeasure& nu, bool mod_one, const EstimatorConfig& cfg,
                               double margin) {
  ResonanceReport r;
  r.margin = margin;
  EstimatorConfig c = cfg;
  r.dim_mu = estimate_dim(mu, c).value;
  c.seed = derive_seed(cfg.seed, 1);
  r.dim_nu = estimate_dim(nu, c).value;
  c.seed = derive_seed(cfg.seed, 2);
  r.dim_conv = estimate_dim(convolve(mu, nu, mod_one), c).value;
  r.gap = std::min(1.0, r.dim_mu + r.dim_nu) - r.dim_conv;
  r.resonates = r.gap > margin;
  return r;
}

std::string ResonanceReport::to_json() const {
  std::ostringstream os;
  os << "{\n  \"dim_mu\": " << fmt(dim_mu) << ",\n  \"dim_nu\": " << fmt(dim_nu) << ",\n  \"dim_conv\": "
     << fmt(dim_conv) << ",\n  \"gap\": " << fmt(gap) << ",\n  \"margin\": " << fmt(margin)
     << ",\n  \"resonates\": " << (resonates ? "true" : "false") << "\n}\n";
  return os.str();
}

SampleMeasure magnified_sum(const SampleMeasure& mu, const SampleMeasure& nu, double t) {
  double e = std::exp(t), lim = std::exp(-t) * (1 + 1e-12);
  SampleMeasure out;
  out.seed = derive_seed(mu.seed, nu.seed);
  out.generator_tag = mu.generator_tag + "+S_t " + nu.generator_tag;
  std::size_t j = 0;
  for (double x : mu.points) {
    while (j < nu.points.size() && std::fabs(nu.points[j]) > lim) ++j;
    if (j >= nu.points.size()) break;
    out.points.push_back(x + e * nu.points[j++]);
  }
  return out;
}

SweepReport marstrand_sweep(const SampleMeasure& mu, const SampleMeasure& nu, const std::vector<double>& t_grid,
                            const SweepOptions& opt) {
  require(!t_grid.empty(), ErrorKind::InvalidArgument, "empty t grid");
  SweepReport r;
  r.dim_mu = opt.dim_mu >= 0 ? opt.dim_mu : local_dim(mu, opt.local).value;
  r.dim_nu = opt.dim_nu >= 0 ? opt.dim_nu : local_dim(nu, opt.local).value;
  r.threshold = std::min(1.0, r.dim_mu + r.dim_nu) - opt.margin;
  std::size_t bad = 0;
  for (double t : t_grid) {
    SampleMeasure z = magnified_sum(mu, nu, t);
    SweepRow row;
    row.t = t;
    row.n = z.points.size();
    row.dim = local_dim(z, opt.local).value;
    row.exceptional = row.dim < r.threshold;
    bad += row.exceptional ? 1 : 0;
    r.rows.push_back(row);
  }
  r.exceptional_fraction = static_cast<double>(bad) / static_cast<double>(t_grid.size());
  return r;
}

void write_sweep_csv(std::ostream& os, const SweepReport& r) {
  os << "t,dim_estimate,exceptional_flag\n";
  for (const SweepRow& row : r.rows) os << fmt(row.t) << "," << fmt(row.dim) << "," << (row.exceptional ? 1 : 0) << "\n";
}

}  // namespace nl
