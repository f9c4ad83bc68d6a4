#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "check.hpp"

#include "nl/cli.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "normlab-test-cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

cli::ExperimentConfig cfg_of(const std::string& text, const fs::path& out) {
  std::istringstream is(text);
  cli::ExperimentConfig c = cli::parse_config(is);
  c.output_dir = out.string();
  return c;
}

int call(std::vector<std::string> args) {
  args.insert(args.begin(), "normlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  std::istringstream is("# comment\ncommand = orbit\nseed = 9\nbeta = golden  # trailing\nx0 = 1/3\nn = 20\n");
  cli::ExperimentConfig c = cli::parse_config(is);
  CHECK(c.command == "orbit");
  CHECK(c.seed == 9);
  CHECK(c.params.at("beta") == "golden");
  CHECK(c.params.at("x0") == "1/3");
  CHECK_NOTHROW(cli::validate(c));
  std::istringstream again(cli::render_config(c));
  CHECK(cli::parse_config(again).params == c.params);

  std::istringstream dup("command = orbit\nn = 1\nn = 2\n");
  CHECK_ERROR(cli::parse_config(dup), ConfigError);
  std::istringstream none("beta = golden\n");
  CHECK_ERROR(cli::parse_config(none), ConfigError);
  std::istringstream junk("command = orbit\nthis line has no equals sign\n");
  CHECK_ERROR(cli::parse_config(junk), ConfigError);
}

TEST_CASE("config validation") {
  fs::path d = scratch("validate");
  CHECK_ERROR(cli::validate(cfg_of("command = orbit\nbeta = golden\nx0 = 1/3\n", d)), ConfigError);
  CHECK_ERROR(cli::validate(cfg_of("command = orbit\nbeta = golden\nx0 = 1/3\nn = 5\ncolour = red\n", d)), ConfigError);
  CHECK_ERROR(cli::validate(cfg_of("command = orbit\nbeta = golden\nx0 = 1/3\nn = five\n", d)), ConfigError);
  CHECK_ERROR(cli::validate(cfg_of("command = teleport\n", d)), ConfigError);
  CHECK_ERROR(cli::validate(cfg_of("command = parry\nbeta = [golden\n", d)), ConfigError);
  CHECK(cli::command_names().size() == 17);
}

TEST_CASE("real expressions and lists") {
  CHECK(cli::parse_real("1/log(3)") == doctest::Approx(1 / std::log(3.0)));
  CHECK(cli::parse_real("0.05*log(2)") == doctest::Approx(0.05 * std::log(2.0)));
  CHECK(cli::parse_real("200*log(3)") == doctest::Approx(200 * std::log(3.0)));
  CHECK(cli::parse_real("sqrt(2)*pi") == doctest::Approx(std::sqrt(2.0) * 3.141592653589793));
  CHECK(cli::parse_real("-(1+2)/4") == doctest::Approx(-0.75));
  CHECK_ERROR(cli::parse_real("log(3"), ConfigError);
  CHECK_ERROR(cli::parse_real("two"), ConfigError);
  CHECK(cli::split_list("[a, b,c ]") == std::vector<std::string>{"a", "b", "c"});
  CHECK(cli::split_list("[]").empty());
}

TEST_CASE("exit codes") {
  fs::path d = scratch("exit");
  std::ostringstream log;
  cli::RunResult ok = cli::run(cfg_of("command = expand-one\nbeta = golden\n", d / "ok"), log);
  CHECK(ok.exit_code == 0);
  CHECK(ok.files == std::vector<std::string>{"one.json"});
  CHECK(fs::exists(d / "ok" / "manifest.json"));

  cli::RunResult np = cli::run(cfg_of("command = pisot-certify\nminpoly = [1, -1, 1]\n", d / "notpisot"), log);
  CHECK(np.exit_code == 3);
  CHECK(np.error.rfind("NotPisot", 0) == 0);

  cli::RunResult missing = cli::run(cfg_of("command = orbit\nbeta = golden\nx0 = 1/3\n", d / "missing"), log);
  CHECK(missing.exit_code == 2);
  CHECK(missing.error.rfind("ConfigError", 0) == 0);

  cli::RunResult domain = cli::run(cfg_of("command = orbit\nbeta = golden\nx0 = 3/2\nn = 5\n", d / "domain"), log);
  CHECK(domain.exit_code == 2);

  auto m = nlohmann::json::parse(slurp(d / "notpisot" / "manifest.json"));
  CHECK(m.at("exit_code") == 3);
  CHECK(m.at("command") == "pisot-certify");
}

TEST_CASE("command line entry") {
  fs::path d = scratch("argv");
  CHECK(call({"--out", (d / "a").string(), "expand-one", "beta=golden"}) == 0);
  CHECK(fs::exists(d / "a" / "one.json"));
  CHECK(call({"--out", (d / "b").string(), "pisot-certify", "minpoly=[1, -1, 1]"}) == 3);
  CHECK(call({"--out", (d / "c").string(), "orbit", "beta=golden"}) == 2);
  CHECK(call({"--out", (d / "c").string(), "orbit", "not-a-pair"}) == 2);
  CHECK(call({"no-such-command"}) == 2);
  CHECK(call({"run", (d / "absent.cfg").string()}) == 2);
  {
    std::ofstream f(d / "w.cfg");
    f << "command = weyl\nbeta = golden\nx0 = 1/3\nn = 2000\n";
  }
  CHECK(call({"--out", (d / "w").string(), "run", (d / "w.cfg").string(), "--set", "m=[1, 2]"}) == 0);
  auto m = nlohmann::json::parse(slurp(d / "w" / "manifest.json"));
  CHECK(m.at("params").at("m") == "[1, 2]");
}

TEST_CASE("replay") {
  fs::path d = scratch("replay");
  std::ostringstream log, err;
  cli::ExperimentConfig c = cfg_of("command = ifs-sample\nlambda = [3, 5]\nn = 200\nseed = 4\n", d / "run");
  REQUIRE(cli::run(c, log).exit_code == 0);
  std::string manifest = (d / "run" / "manifest.json").string();
  for (int threads : {1, 2, 4}) {
    set_max_threads(threads);
    CHECK(cli::replay(manifest, log, err) == 0);
  }
  set_max_threads(0);

  auto m = nlohmann::json::parse(slurp(manifest));
  m["seed"] = 5;
  std::ofstream(manifest) << m.dump(2);
  std::ostringstream err2;
  CHECK(cli::replay(manifest, log, err2) == 3);
  CHECK(err2.str().rfind("ReplayMismatch", 0) == 0);

  cli::ExperimentConfig bad = cfg_of("command = pisot-certify\nminpoly = [1, -1, 1]\n", d / "failed");
  REQUIRE(cli::run(bad, log).exit_code == 3);
  std::ostringstream err3;
  CHECK(cli::replay((d / "failed" / "manifest.json").string(), log, err3) == 3);
  CHECK(err3.str().find("ReplayMismatch") == std::string::npos);

  CHECK(cli::replay((d / "nowhere.json").string(), log, err) == 2);
}
