// Runs every acceptance config through the experiment runner, checks the written
// results and prints one PASS/FAIL line per criterion. Exit status is 0 once all
// criteria were evaluated; --strict makes it the number of failing criteria.
// The lines are also kept in acceptance-out/summary.txt.

#include "oracles/oracles.hpp"

#include "nl/cli.hpp"
#include "nl/core.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path g_out;
std::vector<fs::path> g_runs;

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

/// Rows of a CSV file as maps from header name to cell.
std::vector<std::map<std::string, std::string>> csv(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::vector<std::string> head;
  std::vector<std::map<std::string, std::string>> rows;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string c;
    while (std::getline(ss, c, ',')) out.push_back(c);
    return out;
  };
  if (std::getline(f, line)) head = split(line);
  while (std::getline(f, line)) {
    auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < head.size() && i < cells.size(); ++i) row[head[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

double num(const std::string& s) { return std::stod(s); }

/// Runs configs/<name>.cfg into the output tree; throws when the run fails.
fs::path run(const std::string& name) {
  nl::cli::ExperimentConfig cfg = nl::cli::parse_config_file(std::string(NL_SOURCE_DIR) + "/configs/" + name + ".cfg");
  cfg.output_dir = (g_out / name).string();
  fs::remove_all(cfg.output_dir);
  std::ostringstream log;
  nl::cli::RunResult r = nl::cli::run(cfg, log);
  g_runs.push_back(cfg.output_dir);
  if (r.exit_code != 0) throw std::runtime_error(name + " exited " + std::to_string(r.exit_code) + ": " + r.error);
  return cfg.output_dir;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string f6(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

Verdict crit01() {
  fs::path d = run("crit01_garsia");
  std::map<std::string, std::vector<long long>> poly{{"golden", {-1, -1, 1}}, {"tribonacci", {-1, -1, -1, 1}}};
  int rows = 0, bad = 0, class_mismatch = 0;
  double worst = 1e300;
  for (const auto& r : csv(d / "gaps.csv")) {
    ++rows;
    double gap = num(r.at("min_scaled_gap")), c = num(r.at("garsia_constant"));
    worst = std::min(worst, gap / c);
    bad += gap < c || r.at("ok") != "1";
    double beta = oracle::dominant_root(poly.at(r.at("beta")));
    auto [classes, ogap] = oracle::value_classes(beta, std::stoi(r.at("D")), std::stoi(r.at("k")));
    class_mismatch += std::to_string(classes) != r.at("classes") || std::fabs(ogap - gap) > 1e-6;
  }
  return {rows == 40 && bad == 0 && class_mismatch == 0,
          std::to_string(rows) + " (beta, D, k) cases, min gap/garsia " + f6(worst) + ", class mismatches " +
              std::to_string(class_mismatch)};
}

Verdict crit02() {
  fs::path d = run("crit02_admissible");
  json j = load(d / "admissible.json");
  long long a = 1, b = 2;  // F_2, F_3
  bool fib = true;
  int lengths = 0;
  for (const auto& r : csv(d / "admissible.csv")) {
    ++lengths;
    long long want = b;
    fib = fib && std::stoll(r.at("admissible")) == want && r.at("equal") == "1";
    long long c = a + b;
    a = b;
    b = c;
  }
  bool eq = j.at("sets_equal").get<bool>();
  return {eq && fib && lengths == 14,
          "sets equal " + std::string(eq ? "yes" : "no") + ", counts F_{k+2} for k <= " + std::to_string(lengths) +
              (fib ? "" : " (mismatch)")};
}

Verdict crit03() {
  fs::path d = run("crit03_parry");
  json j = load(d / "parry.json");
  std::map<std::string, std::vector<long long>> poly{{"golden", {-1, -1, 1}}, {"tribonacci", {-1, -1, -1, 1}}};
  double sup = 0, residual = 0;
  for (const auto& e : j) {
    std::string name = e.at("beta");
    oracle::PiecewiseDensity o = oracle::parry_power_iteration(oracle::dominant_root(poly.at(name)));
    for (const auto& r : csv(d / ("density_" + name + ".csv"))) sup = std::max(sup, std::fabs(num(r.at("h")) - o(num(r.at("x")))));
    residual = std::max(residual, e.at("transfer_residual").get<double>());
  }
  return {sup < 1e-8 && residual < 1e-10, "sup |h - oracle| " + f6(sup) + ", transfer residual " + f6(residual)};
}

Verdict crit04() {
  fs::path d = run("crit04_local_average");
  std::map<std::string, int> below, total;
  for (const auto& r : csv(d / "local_average.csv")) {
    ++total[r.at("measure")];
    below[r.at("measure")] += r.at("below_0.05") == "1";
  }
  bool ok = total.size() == 3;
  std::string detail;
  for (const auto& [m, n] : total) {
    ok = ok && below[m] >= 9;
    detail += m + " " + std::to_string(below[m]) + "/" + std::to_string(n) + "; ";
  }
  double worst = 0;
  for (const auto& r : csv(d / "orthogonality.csv")) {
    ok = ok && std::fabs(num(r.at("correlation"))) <= num(r.at("threshold"));
    worst = std::max(worst, std::fabs(num(r.at("correlation"))) / num(r.at("threshold")));
  }
  return {ok, detail + "orthogonality |corr|/(4/sqrt N) max " + f6(worst)};
}

std::map<std::string, int> passes(const fs::path& d) {
  std::map<std::string, int> m;
  for (const auto& r : csv(d / "summary.csv")) m[r.at("measure") + "@" + r.at("base")] = std::stoi(r.at("passes"));
  return m;
}

Verdict crit05() {
  fs::path d = run("crit05_cantor_normality");
  auto p = passes(d);
  bool ones_absent = true;
  for (const auto& e : load(d / "normality.json"))
    if (e.at("base") == "3") ones_absent = ones_absent && e.at("report").at("digit_freqs").at(1).get<double>() == 0.0;
  return {p["cantor@2"] >= 9 && ones_absent,
          "base-2 PASS " + std::to_string(p["cantor@2"]) + "/10, base-3 digit 1 absent: " + (ones_absent ? "yes" : "no")};
}

Verdict crit06() {
  fs::path d = run("crit06_host");
  auto p = passes(d);
  std::vector<double> w{0.7, 0.2, 0.1};
  double worst = 0;
  for (const auto& e : load(d / "normality.json"))
    if (e.at("base") == "3")
      for (int i = 0; i < 3; ++i) worst = std::max(worst, std::fabs(e.at("report").at("digit_freqs").at(i).get<double>() - w[i]));
  return {p["bernoulli@2"] >= 9 && worst < 0.01 && p["bernoulli@3"] == 0,
          "base-2 PASS " + std::to_string(p["bernoulli@2"]) + "/10, base-3 PASS " + std::to_string(p["bernoulli@3"]) +
              "/10, max |freq - weight| " + f6(worst)};
}

Verdict crit07() {
  fs::path d = run("crit07_cf_sets");
  auto p = passes(d);
  double dim12 = -1;
  for (const auto& r : csv(d / "dim.csv"))
    if (r.at("measure") == "cf:1:2") dim12 = num(r.at("local_dim"));
  bool ok = dim12 > 0.5;
  std::string detail;
  for (const char* m : {"cf:1:2", "cf:5:6"})
    for (const char* b : {"2", "3"}) {
      int n = p[std::string(m) + "@" + b];
      ok = ok && n >= 9;
      detail += std::string(m) + " base " + b + " " + std::to_string(n) + "/10; ";
    }
  return {ok, detail + "local_dim C_{1,2} " + f6(dim12)};
}

Verdict crit08() {
  fs::path d = run("crit08_scenery");
  json j = load(d / "scenery.json");
  bool ok = j.size() == 2;
  std::string detail;
  for (const auto& e : j) {
    auto pw = e.at("powers").get<std::vector<double>>();
    auto peaks = e.at("peaks").get<std::vector<double>>();
    double bg = e.at("background").get<double>();
    auto has = [&](double f) {
      for (double q : peaks)
        if (std::fabs(q - f) < 1e-9) return true;
      return false;
    };
    double f3 = e.at("frequencies").at(0).get<double>(), f2 = e.at("frequencies").at(1).get<double>();
    if (e.at("measure") == "cantor") {
      ok = ok && has(f3) && pw[0] >= 5 * bg && !has(f2);
      detail += "cantor: power(1/log3)/background " + f6(bg > 0 ? pw[0] / bg : INFINITY) + ", peak at 1/log2 " +
                (has(f2) ? "yes" : "no") + "; ";
    } else {
      ok = ok && peaks.empty();
      detail += "lebesgue peaks " + std::to_string(peaks.size());
    }
  }
  return {ok, detail};
}

Verdict crit09() {
  fs::path d = run("crit09_phase");
  json j = load(d / "phase.json");
  const double two_pi = 2 * 3.141592653589793;
  double v1 = j.at(0).at("circular_variance"), v2 = j.at(1).at("circular_variance");
  double rot = (j.at(1).at("circular_mean").get<double>() - j.at(0).at("circular_mean").get<double>()) / two_pi;
  double want = -std::log(2.0) / std::log(3.0);
  double off = rot - want;
  off -= std::round(off);
  return {v1 < 0.1 && v2 < 0.1 && std::fabs(off) <= 0.05,
          "circular variance " + f6(v1) + " / " + f6(v2) + ", rotation " + f6(rot - std::round(rot)) +
              " cycles vs " + f6(want) + " (distance mod 1: " + f6(std::fabs(off)) + ")"};
}

Verdict crit10() {
  fs::path d = run("crit10_resonance");
  json r = load(d / "resonance.json"), dis = load(d / "dissonance.json");
  double conv = r.at("dim_conv");
  int ok_t = dis.at("dissonant");
  fs::path s = run("crit10_sweep");
  json sw = load(s / "sweep.json");
  bool log3_flag = false;
  for (const auto& row : csv(s / "sweep.csv"))
    if (std::fabs(num(row.at("t")) - std::log(3.0)) < 1e-9) log3_flag = row.at("exceptional_flag") == "1";
  return {conv <= 0.96 && r.at("resonates").get<bool>() && ok_t >= 8,
          "self-convolution entropy_dim " + f6(conv) + ", dissonant " + std::to_string(ok_t) +
              "/10 (sweep: exceptional fraction " + f6(sw.at("exceptional_fraction")) + ", t = log 3 flagged " +
              (log3_flag ? "yes" : "no") + ")"};
}

Verdict crit11() {
  fs::path d = run("crit11_entropy_drop");
  double tau = load(d / "tau.json").at("tau_entropy_dim");
  bool ok = std::fabs(tau - 0.8) < 1e-9;
  std::string detail = "tau entropy_dim " + f6(tau);
  for (const auto& e : load(d / "entropy_drop.json")) {
    const json& rep = e.at("report");
    bool res = rep.at("resonance");
    double n = rep.at("normalized");
    if (e.at("mu") == "bernoulli") ok = ok && res && n < 0.98 && rep.at("exact").get<bool>();
    else ok = ok && !res;
    detail += ", " + e.at("mu").get<std::string>() + " normalized " + f6(n) + (res ? " (drop)" : " (no drop)");
  }
  return {ok, detail};
}

Verdict crit12() {
  fs::path d = run("crit12_pisot_resonant");
  json j = load(d / "resonant.json");
  int adm = j.at("admissible_samples"), n = j.at("samples");
  bool holds = j.at("bound_holds");
  return {adm == 1000 && n == 1000 && holds && j.at("charged_words_admissible").get<bool>(),
          std::to_string(adm) + "/" + std::to_string(n) + " admissible, max mass " + f6(j.at("bound_max_mass")) +
              " vs bound " + f6(j.at("bound")) + " over " + std::to_string(j.at("bound_cylinders").get<int>()) +
              " cylinders"};
}

Verdict crit13() {
  int bad = 0, checked = 0;
  std::ostringstream log, err;
  for (int threads : {1, 3}) {
    nl::set_max_threads(threads);
    for (const fs::path& d : g_runs) {
      ++checked;
      if (nl::cli::replay((d / "manifest.json").string(), log, err) != 0) ++bad;
    }
  }
  nl::set_max_threads(0);
  std::string e = err.str();
  return {bad == 0 && checked > 0, std::to_string(checked - bad) + "/" + std::to_string(checked) +
                                       " replays identical at --threads 1 and 3" + (e.empty() ? "" : ": " + e.substr(0, e.find('\n')))};
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict = strict || std::string(argv[i]) == "--strict";
  g_out = fs::current_path() / "acceptance-out";
  fs::create_directories(g_out);
  std::vector<std::function<Verdict()>> crits{crit01, crit02, crit03, crit04, crit05, crit06, crit07,
                                               crit08, crit09, crit10, crit11, crit12, crit13};
  int failed = 0;
  std::ofstream summary(g_out / "summary.txt");
  for (std::size_t i = 0; i < crits.size(); ++i) {
    Verdict v;
    try {
      v = crits[i]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    char head[32];
    std::snprintf(head, sizeof head, "criterion %2zu: %s  ", i + 1, v.pass ? "PASS" : "FAIL");
    std::printf("%s%s\n", head, v.detail.c_str());
    std::fflush(stdout);
    summary << head << v.detail << "\n" << std::flush;
  }
  std::printf("%d of %zu criteria pass\n", static_cast<int>(crits.size()) - failed, crits.size());
  return strict ? failed : 0;
}
