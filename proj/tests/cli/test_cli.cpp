#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "pemwe/config.hpp"
#include "pemwe/csv_io.hpp"
#include "pemwe/fit.hpp"
#include "test_support.hpp"

using namespace pemwe;
using pemwe::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result pemwe_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

// Desk-scale overrides shared by the tests below.
const std::vector<std::string> kDesk{"--set", "dK_s=600", "--set", "k_diss1=1e-22",
                                     "--set", "k_diss2=1.947001e-34"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(pemwe_run({"--help"}).code == cli::kExitOk);
  CHECK(pemwe_run({}).code == cli::kExitUsage);
  CHECK(pemwe_run({"explode"}).code == cli::kExitUsage);
  CHECK(pemwe_run({"simulate", "--horizon-s", "soon"}).code == cli::kExitUsage);
  const auto missing = pemwe_run({"simulate", "--config", "/nonexistent/file.cfg"});
  CHECK(missing.code == cli::kExitUsage);
  CHECK(missing.err.find("/nonexistent/file.cfg") != std::string::npos);
}

TEST_CASE("simulate one day with a cycle dump") {
  TempDir dir;
  const auto r = pemwe_run({"simulate", "--horizon-s", "86400", "--dump-cycle", "0",
                            "--out-dir", dir.path().string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(data_rows(dir / "tms_hold.csv") == 2);  // one macro step plus the end row
  CHECK(data_rows(dir / "tms_hold_cycle_0.csv") == 6001);
  const auto m = nlohmann::json::parse(slurp(dir / "tms_hold.manifest.json"));
  CHECK(m["status"] == "ok");
  CHECK(m["command"] == "simulate");
  CHECK(m["profile"] == "hold");
  CHECK(m["macro_steps"] == 1);
  CHECK(m["fast_steps"].get<long>() > 0);
  CHECK(m["wall_clock_s"].get<double>() >= 0.0);
  for (const auto& name : m["outputs"]) {
    CHECK(fs::file_size(dir / name.get<std::string>()) > 0);
  }
  const auto setup = parse_setup(m["request"]["config"].get<std::string>());
  CHECK(setup.multiscale.horizon == 86400.0);
  CHECK(m["config_hash"] == hash_hex(fnv1a64(m["request"]["config"].get<std::string>())));
  CHECK(pemwe_run({"simulate", "--horizon-s", "86400", "--dump-cycle", "3", "--out-dir",
                   dir.path().string()})
            .code == cli::kExitUsage);
}

TEST_CASE("malformed configuration names the key") {
  TempDir dir;
  std::string text = read_text_file(PEMWE_DEFAULT_CONFIG_PATH);
  const auto pos = text.find("dk_s = 0.01");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "dk_s = 0.0one");
  std::ofstream(dir / "bad.cfg") << text;
  const auto cfg_before = slurp(dir / "bad.cfg");
  const auto r = pemwe_run({"simulate", "--config", (dir / "bad.cfg").string(), "--out-dir",
                            (dir / "out").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("dk_s") != std::string::npos);
  CHECK(slurp(dir / "bad.cfg") == cfg_before);
  CHECK_FALSE(fs::exists(dir / "out" / "tms_hold.csv"));
  CHECK(pemwe_run({"simulate", "--set", "no_such_key=1"}).code == cli::kExitUsage);
}

TEST_CASE("solver failure exits with 3") {
  TempDir dir;
  const auto r = pemwe_run(with({"simulate", "--profile", "square", "--horizon-s", "600",
                                 "--set", "max_periods=1", "--set", "on_nonconvergence=abort",
                                 "--out-dir", dir.path().string()},
                                kDesk));
  CHECK(r.code == cli::kExitSolver);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("reference command") {
  TempDir dir;
  CHECK(pemwe_run({"reference", "--horizon-s", "0.015", "--out-dir", dir.path().string()}).code ==
        cli::kExitUsage);
  const auto r = pemwe_run({"reference", "--horizon-s", "120", "--set", "k_diss1=0", "--set",
                            "k_diss2=0", "--fast-out", "--stride", "100", "--out-dir",
                            dir.path().string()});
  REQUIRE(r.code == cli::kExitOk);
  std::ifstream in(dir / "frp_hold.csv");
  const auto csv = read_slow_csv(in);
  CHECK(csv.n_ir.back() == csv.n_ir.front());
  CHECK(csv.t_days.size() == 121);
  CHECK(data_rows(dir / "frp_hold_fast.csv") == 121);
}

TEST_CASE("compare reports MSE and wall-clock ratio") {
  TempDir dir;
  const std::string out = dir.path().string();
  REQUIRE(pemwe_run(with({"simulate", "--horizon-s", "1200", "--out-dir", out}, kDesk)).code ==
          0);
  REQUIRE(pemwe_run(with({"reference", "--horizon-s", "1200", "--out-dir", out}, kDesk)).code ==
          0);
  auto self = pemwe_run({"compare", (dir / "tms_hold.csv").string(),
                         (dir / "tms_hold.csv").string(), "--out-dir", out});
  REQUIRE(self.code == 0);
  CHECK(self.out.find("mse_normalized = 0.000000e+00") != std::string::npos);
  const auto pair = pemwe_run({"compare", (dir / "tms_hold.csv").string(),
                               (dir / "frp_hold.csv").string(), "--out-dir", out, "--name",
                               "pair"});
  REQUIRE(pair.code == 0);
  CHECK(pair.out.find("wall_clock_ratio_b_over_a = n/a") == std::string::npos);
  const auto m = nlohmann::json::parse(slurp(dir / "pair.manifest.json"));
  CHECK(m["mse_normalized"].get<double>() <= 1e-4);
  CHECK(data_rows(dir / "pair.csv") == 3);

  fs::copy_file(dir / "tms_hold.csv", dir / "lonely.csv");
  const auto na = pemwe_run({"compare", (dir / "lonely.csv").string(),
                             (dir / "tms_hold.csv").string(), "--out-dir", out});
  CHECK(na.code == 0);
  CHECK(na.out.find("wall_clock_ratio_b_over_a = n/a") != std::string::npos);

  std::ofstream(dir / "junk.csv") << "a,b\n1,2\n";
  const auto bad = pemwe_run({"compare", (dir / "junk.csv").string(),
                              (dir / "tms_hold.csv").string(), "--out-dir", out});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("junk.csv") != std::string::npos);
}

TEST_CASE("fit smoke run, seeds and bounds") {
  TempDir dir;
  const std::string out = dir.path().string();
  const std::vector<std::string> sets{"--set", "dK_s=600", "--set", "k_r_per_Pa_s=6.14e-12",
                                      "--set", "k_diss1=2.52e-23", "--set",
                                      "k_diss2=4.906e-35"};
  REQUIRE(pemwe_run(with({"synth", "--horizon-s", "1800", "--noise", "0.01", "--seed", "4",
                          "--out-dir", out},
                         sets))
              .code == 0);
  const auto series = load_experiment_csv(dir / "synth_hold.csv");
  CHECK(series.t_days.size() == 4);
  CHECK(series.profile_tag == "hold");

  const std::vector<std::string> fit_args{
      "fit", "--data", (dir / "synth_hold.csv").string(), "--fit-set", "iterations=10",
      "--fit-set", "batch_size=4", "--fit-set", "log10_kr_min=-14", "--fit-set",
      "log10_kr_max=-9", "--fit-set", "log10_kdiss2_min=-37", "--fit-set",
      "log10_kdiss2_max=-32", "--fit-set", "initial_log10_kr=-11.6", "--fit-set",
      "initial_log10_kdiss2=-34.6", "--seed", "9"};
  const auto a = pemwe_run(with(with(fit_args, {"--out-dir", (dir / "a").string()}), sets));
  REQUIRE(a.code == 0);
  CHECK(data_rows(dir / "a" / "fit_history.csv") == 40);
  CHECK(fs::file_size(dir / "a" / "fit_best.txt") > 0);
  const auto b = pemwe_run(with(with(fit_args, {"--out-dir", (dir / "b").string()}), sets));
  REQUIRE(b.code == 0);
  CHECK(slurp(dir / "a" / "fit_history.csv") == slurp(dir / "b" / "fit_history.csv"));

  const auto bounds = pemwe_run(with(with(fit_args, {"--fit-set", "log10_kr_min=-8", "--out-dir",
                                                     (dir / "c").string()}),
                                     sets));
  CHECK(bounds.code == cli::kExitUsage);
  CHECK(pemwe_run({"fit", "--data", (dir / "none.csv").string()}).code == cli::kExitUsage);
}

TEST_CASE("every command re-runs byte-identically from its manifest") {
  TempDir dir;
  const std::string out = dir.path().string();
  REQUIRE(pemwe_run(with({"simulate", "--profile", "triangle", "--horizon-s", "1200",
                          "--dump-cycle", "1", "--out-dir", out},
                         kDesk))
              .code == 0);
  REQUIRE(pemwe_run(with({"reference", "--profile", "triangle", "--horizon-s", "600",
                          "--fast-out", "--out-dir", out},
                         kDesk))
              .code == 0);
  REQUIRE(pemwe_run({"compare", (dir / "tms_triangle.csv").string(),
                     (dir / "frp_triangle.csv").string(), "--out-dir", out})
              .code == 0);
  REQUIRE(pemwe_run(with({"synth", "--profile", "triangle", "--horizon-s", "1200", "--noise",
                          "0.02", "--out-dir", out},
                         kDesk))
              .code == 0);
  REQUIRE(pemwe_run(with({"fit", "--data", (dir / "synth_triangle.csv").string(), "--fit-set",
                          "iterations=2", "--fit-set", "batch_size=2", "--out-dir", out},
                         kDesk))
              .code == 0);

  for (const std::string stem :
       {"tms_triangle", "frp_triangle", "compare", "synth_triangle", "fit"}) {
    CAPTURE(stem);
    const fs::path manifest = dir / (stem + ".manifest.json");
    const auto m = nlohmann::json::parse(slurp(manifest));
    const fs::path again = dir / ("rerun_" + stem);
    REQUIRE(pemwe_run({"rerun", "--manifest", manifest.string(), "--out-dir", again.string()})
                .code == 0);
    for (const auto& name : m["outputs"]) {
      const auto file = name.get<std::string>();
      CAPTURE(file);
      CHECK(slurp(dir / file) == slurp(again / file));
    }
  }
  CHECK(pemwe_run({"rerun", "--manifest", (dir / "missing.json").string(), "--out-dir", out})
            .code == cli::kExitUsage);
}
