#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fdmimo/csvio.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(bool(in));
  std::string line;
  REQUIRE(bool(std::getline(in, line)));
  return line;
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "fdmimo_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args, const std::string& tag) {
  const char* bin = std::getenv("FDMIMO_BIN");
  REQUIRE(bin != nullptr);
  const fs::path out_file = work_dir() / (tag + ".stdout");
  const fs::path err_file = work_dir() / (tag + ".stderr");
  const std::string cmd = std::string(bin) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_file);
  r.err = read_file(err_file);
  return r;
}

}  // namespace

TEST_CASE("defaults land in the manifest") {
  const fs::path dir = work_dir() / "defaults";
  const RunResult r =
      run_cli("lemma_check --out " + dir.string() + " --seed 7", "defaults");
  REQUIRE(r.exit_code == 0);
  const fdmimo::KeyValueMap m =
      fdmimo::parse_kv_file((dir / "manifest.txt").string());
  CHECK(m.at("experiment") == "lemma_check");
  CHECK(m.at("seed") == "7");
  CHECK(m.at("sys.eta") == "3.5");
  CHECK(m.at("sys.n_antennas") == "100");
  CHECK(m.at("sys.p_downlink_w") == "40");
  CHECK(m.at("sys.p_si_w") == "40");
  CHECK(m.at("sys.mu_si2_db") == "10");
  CHECK(m.at("sys.noise_density_dbm_hz") == "-174");
  CHECK(m.at("sys.bandwidth_hz") == "20000000");
  CHECK(m.at("layout.kind") == "hex");
  CHECK(m.at("layout.cell_radius_m") == "500");
  CHECK(m.at("mc.trials") == "100000");
  CHECK(m.at("sys.alpha_u").empty());
  CHECK(fs::exists(dir / "lemma_check.csv"));
  CHECK(first_line(dir / "lemma_check.csv") ==
        "check,value_a,value_b,rel_diff");
}

TEST_CASE("config file with flag precedence") {
  const fs::path cfg = work_dir() / "base.cfg";
  {
    std::ofstream out(cfg);
    out << "# base settings\n"
        << "experiment=lemma_check\n"
        << "seed=2\n"
        << "sys.eta=3\n"
        << "sys.k_u=2\n";
  }
  const fs::path dir = work_dir() / "precedence";
  const RunResult r = run_cli("--config " + cfg.string() + " --out " +
                                  dir.string() + " --seed 9 --sys.eta=3.7",
                              "precedence");
  REQUIRE(r.exit_code == 0);
  const fdmimo::KeyValueMap m =
      fdmimo::parse_kv_file((dir / "manifest.txt").string());
  CHECK(m.at("seed") == "9");
  CHECK(m.at("sys.eta") == "3.7");
  CHECK(m.at("sys.k_u") == "2");
}

TEST_CASE("bad input diagnostics name the problem") {
  const fs::path dir = work_dir() / "bad";
  const RunResult unknown = run_cli(
      "lemma_check --out " + dir.string() + " --bogus.key=1", "unknown_key");
  CHECK(unknown.exit_code != 0);
  CHECK(unknown.err.find("bogus.key") != std::string::npos);

  const RunResult value = run_cli(
      "lemma_check --out " + dir.string() + " --sys.eta=abc", "bad_value");
  CHECK(value.exit_code != 0);
  CHECK(value.err.find("sys.eta") != std::string::npos);

  const RunResult noexp = run_cli("--out " + dir.string(), "no_experiment");
  CHECK(noexp.exit_code != 0);
  CHECK(noexp.err.find("experiment") != std::string::npos);

  const RunResult badexp =
      run_cli("not_an_experiment --out " + dir.string(), "bad_experiment");
  CHECK(badexp.exit_code != 0);
  CHECK(badexp.err.find("not_an_experiment") != std::string::npos);
}

TEST_CASE("manifest reruns reproduce outputs byte for byte") {
  const fs::path dir_a = work_dir() / "sweep_a";
  const std::string small =
      " --sys.k_u=2 --sys.k_d=1 --layout.tiers=1 --mc.scenarios=3"
      " --sweep.b_min=2 --sweep.b_max=3 --sweep.p_si_list_w=0,40";
  const RunResult a = run_cli(
      "se_vs_bits --out " + dir_a.string() + " --seed 5" + small, "sweep_a");
  REQUIRE(a.exit_code == 0);

  const fs::path dir_b = work_dir() / "sweep_b";
  const RunResult b =
      run_cli("--config " + (dir_a / "manifest.txt").string() + " --out " +
                  dir_b.string(),
              "sweep_b");
  REQUIRE(b.exit_code == 0);
  CHECK(read_file(dir_a / "manifest.txt") == read_file(dir_b / "manifest.txt"));
  CHECK(read_file(dir_a / "se_vs_bits.csv") ==
        read_file(dir_b / "se_vs_bits.csv"));
  CHECK(first_line(dir_a / "se_vs_bits.csv") ==
        "p_si_w,b,se_bits_hz,se_ceiling_bits_hz");
}

TEST_CASE("parallel oracle runs match serial byte for byte") {
  const std::string small =
      " --sys.k_u=1 --oc.trials=2000 --oc.n_antennas=4"
      " --layout.cell_radius_m=300";
  const fs::path dir_1 = work_dir() / "oracle_t1";
  const RunResult r1 = run_cli("oracle_check --out " + dir_1.string() +
                                   " --seed 3 --threads 1" + small,
                               "oracle_t1");
  REQUIRE(r1.exit_code == 0);
  const fs::path dir_4 = work_dir() / "oracle_t4";
  const RunResult r4 = run_cli("oracle_check --out " + dir_4.string() +
                                   " --seed 3 --threads 4" + small,
                               "oracle_t4");
  REQUIRE(r4.exit_code == 0);
  CHECK(read_file(dir_1 / "z_table.csv") == read_file(dir_4 / "z_table.csv"));
  CHECK(read_file(dir_1 / "breakdown.csv") ==
        read_file(dir_4 / "breakdown.csv"));
  CHECK(first_line(dir_1 / "z_table.csv") ==
        "link,term,closed_form_W,mc_mean_W,std_error_W,z");
  CHECK(first_line(dir_1 / "breakdown.csv") ==
        "user,link,term,value_W,sqinr,se_bps_hz");
  // The self-interference check runs with a single downlink stream unless
  // overridden, and the manifest records that.
  const fdmimo::KeyValueMap m =
      fdmimo::parse_kv_file((dir_1 / "manifest.txt").string());
  CHECK(m.at("sys.k_d") == "1");
}

TEST_CASE("distribution experiment artifact set") {
  const fs::path dir = work_dir() / "cdf";
  const RunResult r = run_cli(
      "outage_cdf --out " + dir.string() +
          " --seed 11 --mc.scenarios=4 --layout.tiers=1 --sys.k_u=1 "
          "--sys.k_d=1",
      "cdf");
  REQUIRE(r.exit_code == 0);
  for (const char* name :
       {"cdf_hex_lowres.csv", "cdf_hex_fullres.csv", "cdf_ppp_lowres.csv",
        "cdf_ppp_fullres.csv"}) {
    CHECK(fs::exists(dir / name));
    CHECK(first_line(dir / name) == "sample_db,prob");
  }
  CHECK(first_line(dir / "layout_hex.csv") == "bs_id,x_m,y_m");
  CHECK(first_line(dir / "users_ppp.csv") == "ue_id,link,x_m,y_m,bs_id");
}

TEST_CASE("power sweep artifact") {
  const fs::path dir = work_dir() / "power";
  const RunResult r = run_cli(
      "power_sweep --out " + dir.string() +
          " --seed 13 --mc.scenarios=2 --layout.tiers=1 --sys.k_u=1 "
          "--sweep.b_min=3 --sweep.b_max=4 --sweep.na_list=16,32",
      "power");
  REQUIRE(r.exit_code == 0);
  CHECK(first_line(dir / "power_sweep.csv") ==
        "scenario,b,N_a,power_W,ee_bits_per_J");
  std::istringstream in(read_file(dir / "power_sweep.csv"));
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  // Header plus 3 scenarios x 2 resolutions x 2 array sizes.
  CHECK(rows == 1 + 3 * 2 * 2);
}
