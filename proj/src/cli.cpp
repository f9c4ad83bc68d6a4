#include "nl/cli.hpp"

#include "nl/algebraic.hpp"
#include "nl/beta.hpp"
#include "nl/digit_process.hpp"
#include "nl/dimension.hpp"
#include "nl/dynamics.hpp"
#include "nl/ifs.hpp"
#include "nl/measures.hpp"
#include "nl/resonant.hpp"
#include "nl/scenery.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace nl::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// ---------------------------------------------------------------- reals

class RealParser {
 public:
  explicit RealParser(const std::string& s) : s_(s) {}
  double parse() {
    double v = sum();
    skip();
    if (i_ != s_.size()) bad();
    return v;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  [[noreturn]] void bad() const { fail(ErrorKind::ConfigError, "cannot read '" + s_ + "' as a real"); }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    skip();
    if (eat('(')) {
      double v = sum();
      if (!eat(')')) bad();
      return v;
    }
    for (const char* fn : {"log", "sqrt", "exp"}) {
      std::size_t n = std::char_traits<char>::length(fn);
      if (s_.compare(i_, n, fn) == 0) {
        i_ += n;
        if (!eat('(')) bad();
        double a = sum();
        if (!eat(')')) bad();
        if (fn[0] == 'l') return std::log(a);
        if (fn[0] == 's') return std::sqrt(a);
        return std::exp(a);
      }
    }
    if (s_.compare(i_, 2, "pi") == 0) {
      i_ += 2;
      return 3.141592653589793;
    }
    const char* start = s_.c_str() + i_;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) bad();
    i_ += static_cast<std::size_t>(end - start);
    return v;
  }
};

// ---------------------------------------------------------------- schemas

enum class Type { Int, Real, Rational, String, Bool, IntList, RealList, StringList, RationalList };

struct KeySpec {
  std::string name;
  Type type;
  bool required = false;
  std::string def;
};

using Schema = std::vector<KeySpec>;

KeySpec req(const std::string& n, Type t) { return {n, t, true, ""}; }
KeySpec opt(const std::string& n, Type t, const std::string& d) { return {n, t, false, d}; }

const std::map<std::string, Schema>& schemas() {
  using T = Type;
  static const std::map<std::string, Schema> s = {
      {"pisot-certify",
       {opt("minpoly", T::IntList, ""), opt("beta", T::StringList, ""), opt("digit_bounds", T::IntList, "[2]"),
        opt("gap_k", T::Int, "0")}},
      {"expand-one", {req("beta", T::String)}},
      {"admissible",
       {req("beta", T::String), opt("word", T::String, ""), opt("max_length", T::Int, "0"),
        opt("grid_points", T::Int, "0")}},
      {"orbit", {req("beta", T::String), req("x0", T::Rational), req("n", T::Int)}},
      {"parry", {req("beta", T::StringList), opt("cells", T::Int, "1000")}},
      {"ifs-sample",
       {req("lambda", T::IntList), opt("weights", T::RealList, ""), opt("n", T::Int, "1000"),
        opt("bits", T::Real, "53"), opt("exact", T::Bool, "false")}},
      {"cf-set",
       {req("lambda", T::IntList), opt("n", T::Int, "10"), opt("terms", T::Int, "20"),
        opt("bits", T::Real, "2000"), opt("gauss_points", T::Int, "10000")}},
      {"normality",
       {opt("measure", T::StringList, ""), opt("x0", T::RationalList, ""), opt("base", T::Int, "2"),
        opt("weights", T::RealList, ""), opt("beta", T::String, "golden"), opt("points", T::Int, "10"),
        opt("digits", T::Int, "100000"), opt("test_bases", T::IntList, "[2]"), opt("test_beta", T::StringList, ""),
        opt("cells", T::Int, "16"), opt("local_dim_samples", T::Int, "0")}},
      {"weyl", {req("beta", T::String), req("x0", T::Rational), req("n", T::Int), opt("m", T::IntList, "[1, 2, 3]")}},
      {"local-average",
       {req("measure", T::StringList), opt("base", T::Int, "2"), opt("weights", T::RealList, ""),
        opt("beta", T::String, "golden"), opt("points", T::Int, "10"), opt("n", T::Int, "10000"),
        opt("level", T::Int, "0"), opt("orth_k", T::Int, "2"), opt("orth_points", T::Int, "10000"),
        opt("trace_stride", T::Int, "100")}},
      {"scenery-scan",
       {req("measure", T::StringList), opt("base", T::Int, "2"), opt("weights", T::RealList, ""),
        opt("beta", T::String, "golden"), opt("x", T::Rational, ""), opt("dt", T::Real, "0.05*log(2)"),
        opt("t_max", T::Real, "0"), opt("functional", T::String, "mass_half"),
        opt("frequencies", T::RealList, "[1/log(3), 1/log(2)]"), opt("peak_factor", T::Real, "5")}},
      {"phase",
       {req("measure", T::String), opt("base", T::Int, "2"), opt("weights", T::RealList, ""),
        opt("beta", T::String, "golden"), req("alpha", T::Real), opt("points", T::Int, "100"),
        opt("dt", T::Real, "0.05*log(2)"), opt("t_max", T::Real, "0"), opt("functional", T::String, "mass_half"),
        opt("image_slopes", T::RealList, "[1]"), opt("peak_factor", T::Real, "5"), opt("bins", T::Int, "16")}},
      {"dim",
       {req("measure", T::String), opt("base", T::Int, "2"), opt("weights", T::RealList, ""),
        opt("beta", T::String, "golden"), opt("estimator", T::String, "local"), opt("samples", T::Int, "100000"),
        opt("radii", T::RealList, ""), opt("quantile", T::Real, "0.5"), opt("k", T::Int, "12"),
        opt("digits", T::Int, "40")}},
      {"resonance",
       {req("measure", T::String), opt("nu", T::String, ""), opt("base", T::Int, "2"), opt("weights", T::RealList, ""),
        opt("beta", T::String, "golden"), opt("level", T::Int, "12"), opt("mod_one", T::Bool, "true"),
        opt("estimator", T::String, "entropy"), opt("k", T::Int, "12"), opt("margin", T::Real, "0.03"),
        opt("samples", T::Int, "200000"), opt("dissonance_trials", T::Int, "0"), opt("t_min", T::Real, "0.1"),
        opt("t_max", T::Real, "1")}},
      {"marstrand-sweep",
       {req("measure", T::String), opt("nu", T::String, ""), opt("base", T::Int, "2"),
        opt("weights", T::RealList, ""), opt("beta", T::String, "golden"), opt("samples", T::Int, "200000"),
        opt("t_grid", T::RealList, ""), opt("t_min", T::Real, "0.05"), opt("t_max", T::Real, "1.1"),
        opt("t_count", T::Int, "32"), opt("margin", T::Real, "0.03"), opt("dim_mu", T::Real, "-1"),
        opt("dim_nu", T::Real, "-1"), opt("digits", T::Int, "40")}},
      {"resonant-build",
       {req("beta", T::String), req("N", T::Int), req("M", T::Int), opt("shift_averaged", T::Bool, "true"),
        opt("samples", T::Int, "1000"), opt("sample_digits", T::Int, "200"), opt("dump_depth", T::Int, "0"),
        opt("bound_k", T::Int, "1"), opt("entropy_k", T::Int, "0"), opt("admissible_depth", T::Int, "0")}},
      {"entropy-drop",
       {req("beta", T::String), req("N", T::Int), req("M", T::Int), req("mu", T::StringList),
        opt("weights", T::RealList, ""), opt("margin", T::Real, "0.02")}},
  };
  return s;
}

// ---------------------------------------------------------------- typed access

class Params {
 public:
  Params(const ExperimentConfig& cfg, const Schema& schema) : cfg_(cfg), schema_(schema) {}

  bool given(const std::string& k) const { return cfg_.params.count(k) > 0; }
  bool has(const std::string& k) const { return !text(k).empty(); }
  std::string text(const std::string& k) const {
    auto it = cfg_.params.find(k);
    if (it != cfg_.params.end()) return it->second;
    for (const KeySpec& ks : schema_)
      if (ks.name == k) return ks.def;
    fail(ErrorKind::ConfigError, "no key '" + k + "' for " + cfg_.command);
  }
  long long integer(const std::string& k) const { return to_int(text(k), k); }
  double real(const std::string& k) const { return to_real(text(k), k); }
  Rational rational(const std::string& k) const { return to_rational(text(k), k); }
  std::string str(const std::string& k) const { return text(k); }
  bool boolean(const std::string& k) const { return to_bool(text(k), k); }
  std::vector<long long> ints(const std::string& k) const {
    std::vector<long long> v;
    for (const auto& s : items(k)) v.push_back(to_int(s, k));
    return v;
  }
  std::vector<double> reals(const std::string& k) const {
    std::vector<double> v;
    for (const auto& s : items(k)) v.push_back(to_real(s, k));
    return v;
  }
  std::vector<Rational> rationals(const std::string& k) const {
    std::vector<Rational> v;
    for (const auto& s : items(k)) v.push_back(to_rational(s, k));
    return v;
  }
  std::vector<std::string> strs(const std::string& k) const { return items(k); }
  std::uint64_t seed() const { return cfg_.seed; }

  static long long to_int(const std::string& s, const std::string& k) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(s, &pos);
      if (pos == s.size()) return v;
    } catch (...) {
    }
    fail(ErrorKind::ConfigError, "key '" + k + "' expects an integer, got '" + s + "'");
  }
  static double to_real(const std::string& s, const std::string& k) {
    try {
      return parse_real(s);
    } catch (const Error&) {
      fail(ErrorKind::ConfigError, "key '" + k + "' expects a real, got '" + s + "'");
    }
  }
  static Rational to_rational(const std::string& s, const std::string& k) {
    try {
      return parse_rational(s);
    } catch (...) {
      fail(ErrorKind::ConfigError, "key '" + k + "' expects a rational, got '" + s + "'");
    }
  }
  static bool to_bool(const std::string& s, const std::string& k) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(ErrorKind::ConfigError, "key '" + k + "' expects true or false, got '" + s + "'");
  }

 private:
  std::vector<std::string> items(const std::string& k) const {
    std::string t = text(k);
    if (t.empty()) return {};
    return split_list(t);
  }
  const ExperimentConfig& cfg_;
  const Schema& schema_;
};

// ---------------------------------------------------------------- outputs

class Outputs {
 public:
  explicit Outputs(std::string dir) : dir_(std::move(dir)) {}
  void write(const std::string& name, const std::string& content) {
    std::ofstream f(fs::path(dir_) / name, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::InvalidArgument, "cannot write " + name + " in " + dir_);
    f << content;
    files_.push_back(name);
  }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::vector<std::string> files_;
};

// Small ordered JSON writer with the shared number formatting.
class Json {
 public:
  Json& num(const std::string& k, double v) { return raw(k, fmt(v)); }
  Json& integer(const std::string& k, long long v) { return raw(k, std::to_string(v)); }
  Json& str(const std::string& k, const std::string& v) { return raw(k, nlohmann::json(v).dump()); }
  Json& flag(const std::string& k, bool v) { return raw(k, v ? "true" : "false"); }
  Json& nums(const std::string& k, const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return raw(k, s + "]");
  }
  Json& raw(const std::string& k, const std::string& v) {
    items_.emplace_back(k, v);
    return *this;
  }
  std::string dump(int indent = 0) const {
    std::string pad(static_cast<std::size_t>(indent), ' ');
    std::string s = "{\n";
    for (std::size_t i = 0; i < items_.size(); ++i)
      s += pad + "  " + nlohmann::json(items_[i].first).dump() + ": " + items_[i].second +
           (i + 1 < items_.size() ? ",\n" : "\n");
    return s + pad + "}";
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

std::string indent_block(const std::string& s, int by) {
  std::string o, pad(static_cast<std::size_t>(by), ' ');
  for (std::size_t i = 0; i < s.size(); ++i) {
    o += s[i];
    if (s[i] == '\n' && i + 1 < s.size()) o += pad;
  }
  return o;
}

std::string json_array(const std::vector<Json>& v) {
  std::string s = "[\n";
  for (std::size_t i = 0; i < v.size(); ++i) s += "  " + v[i].dump(2) + (i + 1 < v.size() ? ",\n" : "\n");
  return s + "]\n";
}

// ---------------------------------------------------------------- fixtures

PisotNumber parse_beta(const std::string& name) {
  if (name == "golden") return certify_pisot({-1, -1, 1});
  if (name == "tribonacci") return certify_pisot({-1, -1, -1, 1});
  if (name == "plastic") return certify_pisot({-1, -1, 0, 1});
  if (name.rfind("poly:", 0) == 0) {
    std::vector<long long> c;
    std::string body = name.substr(5);
    std::replace(body.begin(), body.end(), ';', ' ');
    std::istringstream is(body);
    long long v;
    while (is >> v) c.push_back(v);
    return certify_pisot(c);
  }
  long long n = Params::to_int(name, "beta");
  return make_integer_base(n);
}

DigitProcess make_process(const std::string& name, const Params& p) {
  if (name == "cantor") return cantor_process();
  if (name == "lebesgue" || name == "uniform") return lebesgue_process(p.integer("base"));
  if (name == "bernoulli") return bernoulli_process(p.integer("base"), p.reals("weights"));
  if (name == "golden-markov") return golden_markov_process();
  if (name == "parry") return parry_process(BetaSystem(parse_beta(p.str("beta"))));
  fail(ErrorKind::ConfigError, "unknown measure '" + name + "'");
}

bool is_cf(const std::string& name) { return name.rfind("cf:", 0) == 0; }

std::vector<long long> cf_lambda(const std::string& name) {
  std::vector<long long> v;
  std::string body = name.substr(3);
  std::replace(body.begin(), body.end(), ':', ' ');
  std::istringstream is(body);
  long long x;
  while (is >> x) v.push_back(x);
  require(!v.empty(), ErrorKind::ConfigError, "measure '" + name + "' names no partial quotients");
  return v;
}

SampleMeasure make_samples(const std::string& name, const Params& p, std::size_t n, std::size_t digits,
                           std::uint64_t seed) {
  if (name == "delta0") {
    SampleMeasure s;
    s.points.assign(n, 0.0);
    s.seed = seed;
    s.generator_tag = "delta0";
    return s;
  }
  if (is_cf(name)) {
    IFS f = gauss_ifs(cf_lambda(name));
    return sample_measure(f, n, depth_for_bits(f, 60), seed);
  }
  return sample_markov(make_process(name, p), n, digits, seed);
}

std::string safe_name(const std::string& s) {
  std::string o;
  for (char c : s) o += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return o;
}

// ---------------------------------------------------------------- commands

void cmd_pisot_certify(const Params& p, Outputs& out) {
  std::vector<std::pair<std::string, PisotNumber>> betas;
  if (p.has("minpoly")) {
    std::vector<long long> c = p.ints("minpoly");
    std::string tag = "poly:";
    for (std::size_t i = 0; i < c.size(); ++i) tag += (i ? ";" : "") + std::to_string(c[i]);
    betas.emplace_back(tag, certify_pisot(c));
  }
  for (const auto& b : p.strs("beta")) betas.emplace_back(b, parse_beta(b));
  require(!betas.empty(), ErrorKind::ConfigError, "pisot-certify needs minpoly or beta");
  std::vector<Json> rep;
  std::ostringstream gaps;
  gaps << "beta,D,k,words,classes,min_scaled_gap,garsia_constant,ok\n";
  int gap_k = static_cast<int>(p.integer("gap_k"));
  for (const auto& [name, b] : betas) {
    Json j;
    std::vector<double> mp(b.minpoly().begin(), b.minpoly().end());
    j.str("beta", name).nums("minpoly", mp).num("value", b.value()).nums("conjugate_moduli", b.conjugate_moduli());
    j.integer("certification_bits", b.certification_bits());
    for (long long D : p.ints("digit_bounds")) {
      double g = to_double(garsia_constant(b, static_cast<int>(D)));
      j.num("garsia_constant_D" + std::to_string(D), g);
      for (int k = 1; k <= gap_k; ++k) {
        GapScan s = exhaustive_gap(b, static_cast<int>(D), k);
        gaps << name << "," << D << "," << k << "," << s.words << "," << s.classes << "," << fmt(s.min_scaled_gap)
             << "," << fmt(g) << "," << (s.min_scaled_gap >= g ? 1 : 0) << "\n";
      }
    }
    rep.push_back(j);
  }
  out.write("certify.json", json_array(rep));
  if (gap_k > 0) out.write("gaps.csv", gaps.str());
}

void cmd_expand_one(const Params& p, Outputs& out) {
  PisotNumber b = parse_beta(p.str("beta"));
  BetaSystem sys(b);
  Json j;
  j.str("beta", p.str("beta")).num("value", b.value());
  j.str("quasi_greedy", expansion_of_one(b).str()).str("greedy", greedy_expansion_of_one(b).str());
  j.integer("alphabet", sys.alphabet_size()).integer("zero_run_bound", sys.zero_run_bound());
  out.write("one.json", j.dump() + "\n");
}

// Admissible words of each length, by walking the automaton.
std::vector<std::set<std::string>> admissible_words(const BetaSystem& sys, int max_len) {
  std::vector<std::set<std::string>> by_len(static_cast<std::size_t>(max_len) + 1);
  std::string w;
  std::function<void(int)> rec = [&](int state) {
    by_len[w.size()].insert(w);
    if (static_cast<int>(w.size()) == max_len) return;
    for (int d = 0; d < sys.alphabet_size(); ++d) {
      int nx = sys.step(state, d);
      if (nx < 0) continue;
      w.push_back(static_cast<char>('0' + d));
      rec(nx);
      w.pop_back();
    }
  };
  rec(0);
  return by_len;
}

void cmd_admissible(const Params& p, Outputs& out) {
  BetaSystem sys(parse_beta(p.str("beta")));
  Json j;
  if (p.has("word")) {
    std::vector<int> w = digits_from_string(p.str("word"));
    j.str("word", p.str("word")).flag("admissible", is_admissible(w, sys));
  }
  int L = static_cast<int>(p.integer("max_length"));
  if (L > 0) {
    auto adm = admissible_words(sys, L);
    std::vector<std::set<std::string>> greedy(static_cast<std::size_t>(L) + 1);
    long long grid = p.integer("grid_points");
    for (long long i = 0; i < grid; ++i) {
      OrbitRecord o = beta_orbit(Rational(i, grid), sys, static_cast<std::size_t>(L));
      std::string s = digits_to_string(o.digits);
      for (int l = 0; l <= L; ++l) greedy[static_cast<std::size_t>(l)].insert(s.substr(0, static_cast<std::size_t>(l)));
    }
    std::ostringstream os;
    os << "length,admissible,greedy_prefixes,equal\n";
    bool all = true;
    for (int l = 1; l <= L; ++l) {
      bool eq = grid > 0 ? adm[static_cast<std::size_t>(l)] == greedy[static_cast<std::size_t>(l)] : true;
      all = all && eq;
      os << l << "," << adm[static_cast<std::size_t>(l)].size() << "," << greedy[static_cast<std::size_t>(l)].size()
         << "," << (eq ? 1 : 0) << "\n";
    }
    out.write("admissible.csv", os.str());
    j.integer("max_length", L).integer("grid_points", grid).flag("sets_equal", all);
  }
  out.write("admissible.json", j.dump() + "\n");
}

void cmd_orbit(const Params& p, Outputs& out) {
  BetaSystem sys(parse_beta(p.str("beta")));
  OrbitRecord o = beta_orbit(p.rational("x0"), sys, static_cast<std::size_t>(p.integer("n")));
  std::ostringstream os;
  os << "k,digit,point\n";
  for (std::size_t k = 0; k < o.digits.size(); ++k) os << k << "," << o.digits[k] << "," << fmt(o.points[k]) << "\n";
  out.write("orbit.csv", os.str());
  Json j;
  j.str("start", o.start).str("method", o.method).integer("n", static_cast<long long>(o.digits.size()));
  out.write("orbit.json", j.dump() + "\n");
}

void cmd_parry(const Params& p, Outputs& out) {
  std::vector<Json> rep;
  auto cells = static_cast<std::size_t>(p.integer("cells"));
  for (const auto& name : p.strs("beta")) {
    BetaSystem sys(parse_beta(name));
    ParryDensity h(sys);
    Json j;
    j.str("beta", name).nums("breakpoints", h.breakpoints()).nums("coefficients", h.coefficients());
    j.num("sup", h.sup()).num("transfer_residual", h.transfer_residual());
    rep.push_back(j);
    std::ostringstream os;
    os << "x,h\n";
    for (std::size_t i = 0; i < cells; ++i) {
      double x = (static_cast<double>(i) + 0.5) / static_cast<double>(cells);
      os << fmt(x) << "," << fmt(h(x)) << "\n";
    }
    out.write("density_" + safe_name(name) + ".csv", os.str());
  }
  out.write("parry.json", json_array(rep));
}

IFS ifs_from(const Params& p) {
  std::vector<double> w = p.has("weights") ? p.reals("weights") : std::vector<double>{};
  return gauss_ifs(p.ints("lambda"), w);
}

void cmd_ifs_sample(const Params& p, Outputs& out) {
  IFS f = ifs_from(p);
  ValidationReport v = validate_regular(f);
  auto n = static_cast<std::size_t>(p.integer("n"));
  int depth = depth_for_bits(f, p.real("bits"));
  std::ostringstream ifs_text;
  write_ifs(ifs_text, f);
  out.write("ifs.txt", ifs_text.str());
  SampleMeasure s;
  if (p.boolean("exact")) {
    s.seed = p.seed();
    s.generator_tag = "ifs-exact";
    for (const Rational& x : sample_exact(f, n, depth, p.seed())) s.points.push_back(to_double(x));
  } else {
    s = sample_measure(f, n, depth, p.seed());
  }
  std::ostringstream os;
  write_samples_csv(os, s);
  out.write("samples.csv", os.str());
  Json j;
  j.num("hull_lo", to_double(f.lo)).num("hull_hi", to_double(f.hi)).num("max_contraction", max_contraction(f));
  j.integer("depth", depth).nums("max_derivative", v.max_derivative);
  std::vector<double> lam;
  for (const IFSMap& m : f.maps) lam.push_back(contraction_ratio(m, f.lo, f.hi).lambda);
  j.nums("fixed_point_ratios", lam);
  if (f.maps.size() >= 2) {
    Dependence d = mult_independent(contraction_ratio(f.maps[0], f.lo, f.hi).derivative,
                                    contraction_ratio(f.maps[1], f.lo, f.hi).derivative);
    j.flag("first_two_dependent", d.dependent).integer("cf_depth", d.cf_depth);
  }
  out.write("ifs.json", j.dump() + "\n");
}

void cmd_cf_set(const Params& p, Outputs& out) {
  IFS f = gauss_ifs(p.ints("lambda"));
  auto n = static_cast<std::size_t>(p.integer("n"));
  auto terms = static_cast<std::size_t>(p.integer("terms"));
  std::vector<long long> lv = p.ints("lambda");
  std::set<long long> lam(lv.begin(), lv.end());
  std::vector<Rational> xs = sample_exact(f, n, depth_for_bits(f, p.real("bits")), p.seed());
  std::ostringstream os, gs;
  os << "point,terms_in_lambda,partial_quotients\n";
  gs << "point,gauss_ks\n";
  auto gp = static_cast<std::size_t>(p.integer("gauss_points"));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<BigInt> cf = cf_expansion(xs[i], terms);
    std::size_t in = 0;
    std::string q;
    for (const BigInt& a : cf) {
      in += lam.count(a.convert_to<long long>()) ? 1 : 0;
      q += (q.empty() ? "" : " ") + a.str();
    }
    os << i << "," << in << "," << q << "\n";
    gs << i << "," << fmt(gauss_orbit_ks(xs[i], gp, 16)) << "\n";
  }
  out.write("cf.csv", os.str());
  out.write("gauss.csv", gs.str());
}

struct TestSystem {
  std::string name;
  BetaSystem sys;
  double log_base;
};

void cmd_normality(const Params& p, Outputs& out) {
  auto points = static_cast<std::size_t>(p.integer("points"));
  auto N = static_cast<std::size_t>(p.integer("digits"));
  std::vector<TestSystem> tests;
  for (long long b : p.ints("test_bases")) {
    PisotNumber pb = make_integer_base(b);
    tests.push_back({std::to_string(b), BetaSystem(pb), std::log(static_cast<double>(b))});
  }
  for (const auto& name : p.strs("test_beta")) {
    PisotNumber pb = parse_beta(name);
    tests.push_back({name, BetaSystem(pb), pb.log_value()});
  }
  require(!tests.empty(), ErrorKind::ConfigError, "normality needs test_bases or test_beta");
  double max_log = 0;
  for (const auto& t : tests) max_log = std::max(max_log, t.log_base);

  std::vector<std::pair<std::string, std::vector<Rational>>> groups;
  if (p.has("x0")) groups.emplace_back("x0", p.rationals("x0"));
  for (const auto& name : p.strs("measure")) {
    std::vector<Rational> xs;
    std::uint64_t seed = derive_seed(p.seed(), groups.size());
    if (is_cf(name)) {
      IFS f = gauss_ifs(cf_lambda(name));
      xs = sample_exact(f, points, depth_for_bits(f, static_cast<double>(N) * max_log / std::log(2.0) + 144), seed);
    } else {
      DigitProcess proc = make_process(name, p);
      require(proc.integer_base(), ErrorKind::ConfigError, "normality points need an integer-base measure");
      double lb = std::log(static_cast<double>(proc.int_base()));
      auto len = static_cast<std::size_t>(std::ceil(static_cast<double>(N) * max_log / lb)) + 64;
      for (const auto& s : sample_digit_strings(proc, points, len, seed))
        xs.push_back(rational_from_digits(s, proc.int_base()));
    }
    groups.emplace_back(name, std::move(xs));
  }
  require(!groups.empty(), ErrorKind::ConfigError, "normality needs measure or x0");

  NormalityOptions opt;
  opt.cells = static_cast<std::size_t>(p.integer("cells"));
  std::ostringstream csv, summary, js;
  csv << "measure,point,base,N,pass,chi2_1,chi2_2,chi2_3,ks,digit_freqs\n";
  summary << "measure,base,passes,points\n";
  js << "[\n";
  bool first = true;
  for (const auto& [name, xs] : groups) {
    for (const auto& t : tests) {
      std::vector<NormalityReport> reps(xs.size());
      parallel_for(xs.size(), [&](std::size_t i) { reps[i] = normality_battery(xs[i], t.sys, N, opt); });
      int passes = 0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const NormalityReport& r = reps[i];
        passes += r.pass ? 1 : 0;
        std::string fr;
        for (double f : r.digit_freqs) fr += (fr.empty() ? "" : " ") + fmt(f);
        csv << name << "," << i << "," << t.name << "," << r.N << "," << (r.pass ? 1 : 0) << "," << fmt(r.block_chi2[0])
            << "," << fmt(r.block_chi2[1]) << "," << fmt(r.block_chi2[2]) << "," << fmt(r.ks_vs_parry) << "," << fr
            << "\n";
        js << (first ? "" : ",\n") << "{\"measure\": " << nlohmann::json(name).dump() << ", \"point\": " << i
           << ", \"base\": " << nlohmann::json(t.name).dump() << ", \"report\": " << r.to_json() << "}";
        first = false;
      }
      summary << name << "," << t.name << "," << passes << "," << xs.size() << "\n";
    }
  }
  js << "\n]\n";
  out.write("normality.csv", csv.str());
  out.write("normality.json", js.str());
  out.write("summary.csv", summary.str());

  auto ld = static_cast<std::size_t>(p.integer("local_dim_samples"));
  if (ld > 0) {
    std::ostringstream ds;
    ds << "measure,local_dim,dispersion,params\n";
    for (const auto& name : p.strs("measure")) {
      DimEstimate e = local_dim(make_samples(name, p, ld, 48, derive_seed(p.seed(), 1000)));
      ds << name << "," << fmt(e.value) << "," << fmt(e.dispersion) << "," << e.params << "\n";
    }
    out.write("dim.csv", ds.str());
  }
}

void cmd_weyl(const Params& p, Outputs& out) {
  PisotNumber b = parse_beta(p.str("beta"));
  std::vector<int> ms;
  for (long long m : p.ints("m")) ms.push_back(static_cast<int>(m));
  WeylResult w = weyl_sums(p.rational("x0"), b, static_cast<std::size_t>(p.integer("n")), ms);
  std::ostringstream os;
  os << "m,magnitude\n";
  for (std::size_t i = 0; i < ms.size(); ++i) os << ms[i] << "," << fmt(w.magnitudes[i]) << "\n";
  out.write("weyl.csv", os.str());
  Json j;
  j.integer("precision_bits", w.precision_bits).num("error_bound", w.error_bound);
  out.write("weyl.json", j.dump() + "\n");
}

void cmd_local_average(const Params& p, Outputs& out) {
  auto points = static_cast<std::size_t>(p.integer("points"));
  auto n = static_cast<std::size_t>(p.integer("n"));
  auto stride = static_cast<std::size_t>(std::max<long long>(1, p.integer("trace_stride")));
  std::ostringstream trace, summary, orth;
  trace << "measure,point,n,ks\n";
  summary << "measure,point,ks_final,below_0.05\n";
  orth << "measure,pair,correlation,threshold,pass\n";
  std::size_t gi = 0;
  for (const auto& name : p.strs("measure")) {
    DigitProcess proc = make_process(name, p);
    int level = static_cast<int>(p.integer("level"));
    if (level <= 0) level = static_cast<int>(std::floor(std::log(4096.0) / std::log(static_cast<double>(proc.int_base())) + 1e-9));
    std::uint64_t seed = derive_seed(p.seed(), gi++);
    auto xs = sample_digit_strings(proc, points, n + static_cast<std::size_t>(level), seed);
    std::vector<LocalAverageResult> res(points);
    parallel_for(points, [&](std::size_t i) { res[i] = local_average(proc, xs[i], n, level); });
    for (std::size_t i = 0; i < points; ++i) {
      const auto& tr = res[i].ks_trace;
      for (std::size_t k = stride - 1; k < tr.size(); k += stride) trace << name << "," << i << "," << k + 1 << "," << fmt(tr[k]) << "\n";
      summary << name << "," << i << "," << fmt(tr.back()) << "," << (tr.back() < 0.05 ? 1 : 0) << "\n";
    }
    OrthogonalityResult o = martingale_orthogonality(proc, static_cast<int>(p.integer("orth_k")),
                                                     static_cast<std::size_t>(p.integer("orth_points")),
                                                     derive_seed(seed, 77));
    for (std::size_t k = 0; k < o.pairs.size(); ++k)
      orth << name << "," << o.pairs[k].first << "-" << o.pairs[k].second << "," << fmt(o.correlation[k]) << ","
           << fmt(o.threshold) << "," << (std::fabs(o.correlation[k]) <= o.threshold ? 1 : 0) << "\n";
  }
  out.write("ks_trace.csv", trace.str());
  out.write("local_average.csv", summary.str());
  out.write("orthogonality.csv", orth.str());
}

void cmd_scenery_scan(const Params& p, Outputs& out) {
  double dt = p.real("dt");
  double t_max = p.real("t_max");
  if (t_max <= 0) t_max = 500 * dt;
  Functional f = parse_functional(p.str("functional"));
  std::vector<double> freqs = p.reals("frequencies");
  std::vector<Json> rep;
  std::size_t gi = 0;
  for (const auto& name : p.strs("measure")) {
    DigitProcess proc = make_process(name, p);
    SceneryScalarSeries s;
    if (p.has("x")) {
      s = scenery_series(proc, p.rational("x"), t_max, dt, f);
    } else {
      Rng rng = Rng::stream(p.seed(), gi);
      double lb = std::log(static_cast<double>(proc.int_base()));
      auto digits = proc.sample_digits(static_cast<std::size_t>(t_max / lb) + 80, rng);
      s = scenery_series(proc, digits, t_max, dt, f);
    }
    ++gi;
    SpectrumReport r = spectrum_scan(s, freqs, p.real("peak_factor"));
    std::ostringstream ss, sp;
    write_series_csv(ss, s);
    write_spectrum_csv(sp, r);
    out.write("series_" + safe_name(name) + ".csv", ss.str());
    out.write("spectrum_" + safe_name(name) + ".csv", sp.str());
    Json j;
    j.str("measure", name).str("center", s.center).num("t_max", t_max).num("dt", dt);
    j.nums("frequencies", r.frequencies).nums("powers", r.powers).nums("phases", r.phases);
    j.num("background", r.background).nums("peaks", r.peaks()).nums("refined", r.refined);
    rep.push_back(j);
  }
  out.write("scenery.json", json_array(rep));
}

void cmd_phase(const Params& p, Outputs& out) {
  DigitProcess proc = make_process(p.str("measure"), p);
  auto m = static_cast<std::size_t>(p.integer("points"));
  double alpha = p.real("alpha");
  PhaseOptions opt;
  opt.dt = p.real("dt");
  opt.t_max = p.real("t_max");
  opt.functional = parse_functional(p.str("functional"));
  opt.peak_factor = p.real("peak_factor");
  opt.bins = static_cast<std::size_t>(p.integer("bins"));
  double t_max = opt.t_max > 0 ? opt.t_max : 60.0 / alpha;
  double lb = std::log(static_cast<double>(proc.int_base()));
  std::vector<double> slopes = p.reals("image_slopes");
  double max_shift = 0;
  for (double s : slopes) max_shift = std::max(max_shift, std::log(std::max(s, 1.0)));
  auto pts = sample_digit_strings(proc, m, static_cast<std::size_t>((t_max + max_shift) / lb) + 80, p.seed());
  std::ostringstream csv, hist;
  csv << "slope,point,phase,has_peak\n";
  hist << "slope,bin,frequency\n";
  std::vector<Json> rep;
  double base_mean = 0;
  for (std::size_t si = 0; si < slopes.size(); ++si) {
    opt.image_slope = slopes[si];
    PhaseScatter ps = phase_scatter(proc, pts, alpha, opt);
    for (std::size_t i = 0; i < m; ++i)
      csv << fmt(slopes[si]) << "," << i << "," << (ps.has_peak[i] ? fmt(ps.phases[i]) : "nan") << ","
          << (ps.has_peak[i] ? 1 : 0) << "\n";
    for (std::size_t b = 0; b < ps.histogram.size(); ++b) hist << fmt(slopes[si]) << "," << b << "," << fmt(ps.histogram[b]) << "\n";
    if (si == 0) base_mean = ps.circular_mean;
    Json j;
    j.num("slope", slopes[si]).num("circular_mean", ps.circular_mean).num("circular_variance", ps.circular_variance);
    j.integer("no_peak", static_cast<long long>(ps.no_peak));
    j.num("rotation_cycles", angle_diff(base_mean, ps.circular_mean) / (2 * 3.141592653589793));
    rep.push_back(j);
  }
  out.write("phases.csv", csv.str());
  out.write("histogram.csv", hist.str());
  out.write("phase.json", json_array(rep));
}

void cmd_dim(const Params& p, Outputs& out) {
  std::string name = p.str("measure"), est = p.str("estimator");
  DimEstimate e;
  if (est == "local") {
    LocalDimOptions o;
    o.radii = p.reals("radii");
    o.quantile = p.real("quantile");
    e = local_dim(make_samples(name, p, static_cast<std::size_t>(p.integer("samples")),
                               static_cast<std::size_t>(p.integer("digits")), p.seed()),
                  o);
  } else if (est == "entropy") {
    e = entropy_dim(make_process(name, p), static_cast<int>(p.integer("k")));
  } else {
    fail(ErrorKind::ConfigError, "estimator must be local or entropy");
  }
  Json j;
  j.str("measure", name).str("method", e.method).num("value", e.value).num("dispersion", e.dispersion);
  j.str("params", e.params).integer("points", static_cast<long long>(e.points));
  out.write("dim.json", j.dump() + "\n");
}

void cmd_resonance(const Params& p, Outputs& out) {
  std::string mu_name = p.str("measure"), nu_name = p.has("nu") ? p.str("nu") : p.str("measure");
  DigitProcess mu = make_process(mu_name, p), nu = make_process(nu_name, p);
  int level = static_cast<int>(p.integer("level"));
  EstimatorConfig cfg;
  cfg.kind = p.str("estimator") == "local" ? EstimatorConfig::Kind::Local : EstimatorConfig::Kind::Entropy;
  require(p.str("estimator") == "local" || p.str("estimator") == "entropy", ErrorKind::ConfigError,
          "estimator must be local or entropy");
  cfg.base = mu.int_base();
  cfg.k = static_cast<int>(p.integer("k"));
  cfg.samples = static_cast<std::size_t>(p.integer("samples"));
  cfg.seed = p.seed();
  ResonanceReport r = resonance_test(mu.grid(mu.init, level), nu.grid(nu.init, level), p.boolean("mod_one"), cfg,
                                     p.real("margin"));
  out.write("resonance.json", r.to_json());

  auto trials = static_cast<std::size_t>(p.integer("dissonance_trials"));
  if (trials > 0) {
    auto n = static_cast<std::size_t>(p.integer("samples"));
    SampleMeasure X = sample_markov(mu, n, 48, derive_seed(p.seed(), 1));
    SampleMeasure Y = sample_markov(nu, 3 * n, 48, derive_seed(p.seed(), 2));
    double lo = p.real("t_min"), hi = p.real("t_max");
    std::ostringstream os;
    os << "trial,t,local_dim,dissonates\n";
    int ok = 0;
    for (std::size_t i = 0; i < trials; ++i) {
      Rng rng = Rng::stream(derive_seed(p.seed(), 3), i);
      double t = lo + (hi - lo) * rng.u01();
      double d = local_dim(magnified_sum(X, Y, t)).value;
      bool dis = d >= 0.95;
      ok += dis ? 1 : 0;
      os << i << "," << fmt(t) << "," << fmt(d) << "," << (dis ? 1 : 0) << "\n";
    }
    out.write("dissonance.csv", os.str());
    Json j;
    j.integer("trials", static_cast<long long>(trials)).integer("dissonant", ok);
    out.write("dissonance.json", j.dump() + "\n");
  }
}

void cmd_marstrand_sweep(const Params& p, Outputs& out) {
  std::string mu_name = p.str("measure"), nu_name = p.has("nu") ? p.str("nu") : p.str("measure");
  auto n = static_cast<std::size_t>(p.integer("samples"));
  auto digits = static_cast<std::size_t>(p.integer("digits"));
  SampleMeasure X = make_samples(mu_name, p, n, digits, derive_seed(p.seed(), 1));
  SampleMeasure Y = make_samples(nu_name, p, 3 * n, digits, derive_seed(p.seed(), 2));
  std::vector<double> grid = p.reals("t_grid");
  if (grid.empty()) {
    auto cnt = p.integer("t_count");
    require(cnt >= 1, ErrorKind::ConfigError, "t_count must be positive");
    double a = p.real("t_min"), b = p.real("t_max");
    for (long long i = 0; i < cnt; ++i) grid.push_back(cnt == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(cnt - 1));
  }
  SweepOptions o;
  o.margin = p.real("margin");
  o.dim_mu = p.real("dim_mu");
  o.dim_nu = p.real("dim_nu");
  SweepReport r = marstrand_sweep(X, Y, grid, o);
  std::ostringstream os;
  write_sweep_csv(os, r);
  out.write("sweep.csv", os.str());
  Json j;
  j.num("dim_mu", r.dim_mu).num("dim_nu", r.dim_nu).num("threshold", r.threshold);
  j.num("exceptional_fraction", r.exceptional_fraction);
  out.write("sweep.json", j.dump() + "\n");
}

void cmd_resonant_build(const Params& p, Outputs& out) {
  ResonantSpec spec;
  spec.base = parse_beta(p.str("beta"));
  spec.N = static_cast<int>(p.integer("N"));
  spec.M = static_cast<int>(p.integer("M"));
  spec.shift_averaged = p.boolean("shift_averaged");
  DigitProcess proc = build_block_measure(spec);
  BetaSystem sys(spec.base);
  int ek = static_cast<int>(p.integer("entropy_k"));
  if (ek <= 0) ek = spec.N + spec.M;
  Json j;
  j.str("beta", p.str("beta")).integer("N", spec.N).integer("M", spec.M).flag("shift_averaged", spec.shift_averaged);
  j.integer("entropy_k", ek).num("entropy_dim", entropy_dim(proc, ek).value);
  j.num("shift_invariance_residual", shift_invariance_residual(proc, std::min(8, spec.N + spec.M)));
  auto ns = static_cast<std::size_t>(p.integer("samples"));
  if (ns > 0) {
    auto strs = sample_digit_strings(proc, ns, static_cast<std::size_t>(p.integer("sample_digits")), p.seed());
    long long ok = 0;
    for (const auto& w : strs) ok += is_admissible(w, sys) ? 1 : 0;
    j.integer("samples", static_cast<long long>(ns)).integer("admissible_samples", ok);
  }
  int ad = static_cast<int>(p.integer("admissible_depth"));
  if (ad > 0) j.flag("charged_words_admissible", charged_words_admissible(proc, sys, ad));
  int bk = static_cast<int>(p.integer("bound_k"));
  if (bk > 0) {
    CylinderBoundReport cb = cylinder_mass_bound(spec, bk);
    j.integer("bound_k", bk).integer("bound_cylinders", static_cast<long long>(cb.cylinders));
    j.num("bound_max_mass", cb.max_mass).num("bound_c", cb.c).num("bound", cb.bound).flag("bound_holds", cb.holds);
  }
  out.write("resonant.json", j.dump() + "\n");
  int dd = static_cast<int>(p.integer("dump_depth"));
  if (dd > 0) {
    require(dd <= 12, ErrorKind::ConfigError, "dump_depth is limited to 12");
    std::ostringstream os;
    os << "word,mass\n";
    for (const auto& [w, m] : enumerate_cylinders(proc, dd))
      if (m > 0) os << digits_to_string(w) << "," << fmt(m) << "\n";
    out.write("cylinders.csv", os.str());
  }
}

void cmd_entropy_drop(const Params& p, Outputs& out) {
  ResonantSpec spec;
  spec.base = parse_beta(p.str("beta"));
  spec.N = static_cast<int>(p.integer("N"));
  spec.M = static_cast<int>(p.integer("M"));
  std::vector<Json> rep;
  for (const auto& name : p.strs("mu")) {
    DigitProcess mu;
    if (name == "bernoulli") mu = bernoulli_process(spec.base.integer_value(), p.reals("weights"));
    else if (name == "lebesgue") mu = lebesgue_process(spec.base.integer_value());
    else if (name == "parry") mu = parry_process(BetaSystem(spec.base));
    else fail(ErrorKind::ConfigError, "mu must be bernoulli, lebesgue or parry");
    require(spec.base.is_integer_base() || name == "parry", ErrorKind::ConfigError,
            "bernoulli and lebesgue need an integer base");
    EntropyDropReport r = entropy_drop_check(spec, mu, p.real("margin"));
    Json j;
    j.str("mu", name).raw("report", indent_block(trim(r.to_json()), 4));
    rep.push_back(j);
  }
  out.write("entropy_drop.json", json_array(rep));
  ResonantSpec tau = spec;
  tau.shift_averaged = true;
  Json j;
  j.integer("depth", spec.N + spec.M);
  try {
    j.num("tau_entropy_dim", entropy_dim(build_block_measure(tau), spec.N + spec.M).value);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DepthExhausted) throw;
    j.raw("tau_entropy_dim", "null").str("skipped", e.what());
  }
  out.write("tau.json", j.dump() + "\n");
}

using Handler = void (*)(const Params&, Outputs&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"pisot-certify", cmd_pisot_certify}, {"expand-one", cmd_expand_one},
      {"admissible", cmd_admissible},       {"orbit", cmd_orbit},
      {"parry", cmd_parry},                 {"ifs-sample", cmd_ifs_sample},
      {"cf-set", cmd_cf_set},               {"normality", cmd_normality},
      {"weyl", cmd_weyl},                   {"local-average", cmd_local_average},
      {"scenery-scan", cmd_scenery_scan},   {"phase", cmd_phase},
      {"dim", cmd_dim},                     {"resonance", cmd_resonance},
      {"marstrand-sweep", cmd_marstrand_sweep}, {"resonant-build", cmd_resonant_build},
      {"entropy-drop", cmd_entropy_drop},
  };
  return h;
}

bool type_ok(Type t, const std::string& v, const std::string& k) {
  if (v.empty()) return true;
  bool is_list = !v.empty() && v.front() == '[';
  auto each = [&](auto check) {
    for (const auto& s : split_list(v)) check(s);
  };
  switch (t) {
    case Type::Int: return !is_list && (Params::to_int(v, k), true);
    case Type::Real: return !is_list && (Params::to_real(v, k), true);
    case Type::Rational: return !is_list && (Params::to_rational(v, k), true);
    case Type::String: return !is_list;
    case Type::Bool: return !is_list && (Params::to_bool(v, k), true);
    case Type::IntList: each([&](const std::string& s) { Params::to_int(s, k); }); return true;
    case Type::RealList: each([&](const std::string& s) { Params::to_real(s, k); }); return true;
    case Type::RationalList: each([&](const std::string& s) { Params::to_rational(s, k); }); return true;
    case Type::StringList: return (split_list(v), true);
  }
  return false;
}

std::string now_utc() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

nlohmann::ordered_json manifest_json(const ExperimentConfig& cfg, const RunResult& r, double wall) {
  nlohmann::ordered_json m;
  m["version"] = version_string();
  m["command"] = cfg.command;
  m["seed"] = cfg.seed;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.params) params[k] = v;
  m["params"] = params;
  m["config"] = render_config(cfg);
  m["output_dir"] = cfg.output_dir;
  m["threads"] = max_threads();
  m["exit_code"] = r.exit_code;
  m["error"] = r.error;
  m["files"] = r.files;
  m["wall_time_s"] = wall;
  m["finished"] = now_utc();
  return m;
}

}  // namespace

// ---------------------------------------------------------------- public

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> v = [] {
    std::vector<std::string> n;
    for (const auto& [k, s] : schemas()) n.push_back(k);
    return n;
  }();
  return v;
}

double parse_real(const std::string& text) { return RealParser(trim(text)).parse(); }

std::vector<std::string> split_list(const std::string& text) {
  std::string t = trim(text);
  if (t.empty() || t.front() != '[') return {t};
  require(t.back() == ']', ErrorKind::ConfigError, "unterminated list '" + t + "'");
  std::string body = t.substr(1, t.size() - 2);
  require(body.find('[') == std::string::npos, ErrorKind::ConfigError, "nested lists are not supported");
  std::vector<std::string> out;
  if (trim(body).empty()) return out;
  std::size_t depth = 0, start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i < body.size() && body[i] == '(') ++depth;
    if (i < body.size() && body[i] == ')' && depth > 0) --depth;
    if (i == body.size() || (body[i] == ',' && depth == 0)) {
      std::string item = trim(body.substr(start, i - start));
      require(!item.empty(), ErrorKind::ConfigError, "empty list item in '" + t + "'");
      out.push_back(item);
      start = i + 1;
    }
  }
  return out;
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int no = 0;
  std::set<std::string> seen;
  while (std::getline(is, line)) {
    ++no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::ConfigError, "line " + std::to_string(no) + ": expected key = value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    require(!k.empty(), ErrorKind::ConfigError, "line " + std::to_string(no) + ": empty key");
    require(seen.insert(k).second, ErrorKind::ConfigError, "line " + std::to_string(no) + ": duplicate key '" + k + "'");
    if (k == "command") cfg.command = v;
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(Params::to_int(v, "seed"));
    else if (k == "output_dir") cfg.output_dir = v;
    else cfg.params[k] = v;
  }
  require(!cfg.command.empty(), ErrorKind::ConfigError, "config names no command");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorKind::ConfigError, "cannot open config " + path);
  return parse_config(f);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "command = " << cfg.command << "\nseed = " << cfg.seed << "\n";
  for (const auto& [k, v] : cfg.params) os << k << " = " << v << "\n";
  return os.str();
}

void validate(const ExperimentConfig& cfg) {
  auto it = schemas().find(cfg.command);
  require(it != schemas().end(), ErrorKind::ConfigError, "unknown command '" + cfg.command + "'");
  const Schema& s = it->second;
  for (const auto& [k, v] : cfg.params) {
    auto ks = std::find_if(s.begin(), s.end(), [&](const KeySpec& x) { return x.name == k; });
    require(ks != s.end(), ErrorKind::ConfigError, "unknown key '" + k + "' for " + cfg.command);
    require(type_ok(ks->type, v, k), ErrorKind::ConfigError, "key '" + k + "' has the wrong shape: '" + v + "'");
  }
  for (const KeySpec& ks : s)
    require(!ks.required || cfg.params.count(ks.name), ErrorKind::ConfigError,
            "missing required key '" + ks.name + "' for " + cfg.command);
}

std::string default_output_dir() {
  const char* e = std::getenv("NORMLAB_OUT");
  return e && *e ? std::string(e) : std::string("normlab-out");
}

RunResult run(const ExperimentConfig& cfg_in, std::ostream& log) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.output_dir.empty()) cfg.output_dir = default_output_dir();
  auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  Outputs out(cfg.output_dir);
  try {
    validate(cfg);
    Params p(cfg, schemas().at(cfg.command));
    handlers().at(cfg.command)(p, out);
  } catch (const Error& e) {
    r.exit_code = exit_code_for(e.kind());
    r.error = e.what();
  } catch (const std::exception& e) {
    r.exit_code = 2;
    r.error = e.what();
  }
  r.files = out.files();
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream mf(fs::path(cfg.output_dir) / "manifest.json");
  mf << manifest_json(cfg, r, wall).dump(2) << "\n";
  if (r.exit_code == 0)
    log << cfg.command << ": wrote " << r.files.size() << " files to " << cfg.output_dir << "\n";
  return r;
}

int replay(const std::string& manifest_path, std::ostream& log, std::ostream& err) {
  nlohmann::json m;
  try {
    std::ifstream f(manifest_path);
    require(static_cast<bool>(f), ErrorKind::ConfigError, "cannot open manifest " + manifest_path);
    m = nlohmann::json::parse(f);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "ConfigError: unreadable manifest: " << e.what() << "\n";
    return 2;
  }
  ExperimentConfig cfg;
  std::vector<std::string> files;
  int recorded = 0;
  try {
    cfg.command = m.at("command").get<std::string>();
    cfg.seed = m.at("seed").get<std::uint64_t>();
    for (const auto& [k, v] : m.at("params").items()) cfg.params[k] = v.get<std::string>();
    files = m.at("files").get<std::vector<std::string>>();
    recorded = m.at("exit_code").get<int>();
  } catch (const std::exception& e) {
    err << "ConfigError: malformed manifest: " << e.what() << "\n";
    return 2;
  }
  fs::path orig_dir = fs::path(manifest_path).parent_path();
  fs::path scratch = orig_dir / ".replay";
  std::error_code ec;
  fs::remove_all(scratch, ec);
  cfg.output_dir = scratch.string();
  std::ostringstream quiet;
  RunResult r = run(cfg, quiet);
  auto mismatch = [&](const std::string& what) {
    err << "ReplayMismatch: " << what << "\n";
    return exit_code_for(ErrorKind::ReplayMismatch);
  };
  if (r.exit_code != recorded)
    return mismatch("exit code " + std::to_string(r.exit_code) + " differs from recorded " + std::to_string(recorded));
  if (r.files != files) return mismatch("result file list differs");
  for (const auto& name : files) {
    std::ifstream a(orig_dir / name, std::ios::binary), b(scratch / name, std::ios::binary);
    if (!a) return mismatch(name + ": original file missing");
    std::string la, lb;
    for (long line = 1;; ++line) {
      bool ga = static_cast<bool>(std::getline(a, la)), gb = static_cast<bool>(std::getline(b, lb));
      if (!ga && !gb) break;
      if (ga != gb || la != lb) return mismatch(name + " line " + std::to_string(line));
    }
  }
  fs::remove_all(scratch, ec);
  log << "replay of " << cfg.command << ": " << files.size() << " files identical\n";
  if (recorded != 0) err << r.error << "\n";
  return recorded;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for beta-expansions, scenery flows and resonant measures"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  int threads = 0;
  std::string out_dir;
  app.add_option("--threads", threads, "Worker cap (results do not depend on it)");
  app.add_option("--out", out_dir, "Output directory (default $NORMLAB_OUT or ./normlab-out)");

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--set", overrides, "key=value overrides");

  std::string manifest;
  auto* replay_cmd = app.add_subcommand("replay", "Rerun a manifest and compare outputs byte for byte");
  replay_cmd->add_option("--manifest", manifest, "manifest.json of a previous run")->required();

  std::map<std::string, std::vector<std::string>> direct_args;
  std::map<std::string, std::uint64_t> direct_seed;
  for (const auto& name : command_names()) {
    auto* c = app.add_subcommand(name, "Run " + name + " with key=value arguments");
    c->add_option("params", direct_args[name], "key=value pairs");
    c->add_option("--seed", direct_seed[name], "Seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) set_max_threads(threads);

  auto apply_pairs = [](ExperimentConfig& cfg, const std::vector<std::string>& pairs) {
    for (const auto& kv : pairs) {
      std::size_t eq = kv.find('=');
      require(eq != std::string::npos, ErrorKind::ConfigError, "expected key=value, got '" + kv + "'");
      std::string k = trim(kv.substr(0, eq)), v = trim(kv.substr(eq + 1));
      if (k == "seed") cfg.seed = static_cast<std::uint64_t>(Params::to_int(v, "seed"));
      else if (k == "command") cfg.command = v;
      else cfg.params[k] = v;
    }
  };

  try {
    if (replay_cmd->parsed()) return replay(manifest, std::cout, std::cerr);
    ExperimentConfig cfg;
    if (run_cmd->parsed()) {
      cfg = parse_config_file(config_path);
      apply_pairs(cfg, overrides);
    } else {
      for (const auto& name : command_names()) {
        if (!app.got_subcommand(name)) continue;
        cfg.command = name;
        if (direct_seed[name] != 0) cfg.seed = direct_seed[name];
        apply_pairs(cfg, direct_args[name]);
      }
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    RunResult r = run(cfg, std::cout);
    if (r.exit_code != 0) std::cerr << r.error << "\n";
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace nl::cli
