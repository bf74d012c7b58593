#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "memgate/cli.hpp"

using namespace memgate;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(MEMGATE_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("memgate_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

RunConfig run_into(const std::string& cmd, const std::string& cfg_name, const fs::path& out) {
  auto c = load_config(kConfigs / (cfg_name + ".json"));
  c.output_dir = out;
  std::ostringstream log;
  run_command(cmd, c, log);
  return c;
}

}  // namespace

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parse_config(json::parse(R"({"vdd": 1.65, "colour": 3})")), ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"sweep": {"grid": [0, 1], "configs": [], "extra": 1}})")),
               ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"devices": {"nmos": {"vth": 0.4}}})")), ConfigError);
}

TEST(Config, RejectsBadGrids) {
  EXPECT_THROW(parse_config(json::parse(R"({"sweep": {"grid": [], "configs": [{"r_up": 1e6, "r_dn": 1e6}]}})")),
               ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"sweep": {"grid": [0.2, 0.1], "configs": [{"r_up": 1e6, "r_dn": 1e6}]}})")),
               ConfigError);
  EXPECT_THROW(parse_config(json::parse(R"({"sweep": {"grid": [0, 2.0], "configs": [{"r_up": 1e6, "r_dn": 1e6}]}})")),
               ConfigError);
}

TEST(Config, RejectsMalformedJsonAndMissingFile) {
  EXPECT_THROW(load_config(kConfigs / "does_not_exist.json"), IoError);
  const auto dir = scratch("badjson");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\"vdd\": ";
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
}

TEST(Config, BundledConfigsParse) {
  for (const auto& e : fs::directory_iterator(kConfigs)) EXPECT_NO_THROW(load_config(e.path())) << e.path();
}

TEST(Cli, HeadersAreExact) {
  const auto out = scratch("headers");
  run_into("sweep", "sweep_supp_table2", out / "sweep");
  run_into("surface", "surface_nand", out / "surface");
  run_into("energy", "energy", out / "energy");
  run_into("digitize", "digitize", out / "digitize");
  run_into("texel", "texel", out / "texel");
  EXPECT_EQ(first_line(out / "sweep" / "sweep_HH.csv"), "v_in,v_out");
  EXPECT_EQ(first_line(out / "surface" / "surface.csv"), "v_a,v_b,v_out");
  EXPECT_EQ(first_line(out / "energy" / "energy.csv"),
            "model,l,r1,r2,v_out_1,v_out_2,q_leak,q_charge,q_tot,q_tot_alt,identity_rel,q_transient,"
            "oracle_rel,e_upper,e_transient,settling_fraction,toggle_equivalents");
  EXPECT_EQ(first_line(out / "digitize" / "digitize.csv"), "v_in,v_mid,v_out1,bit,i_out,on_target");
  EXPECT_EQ(first_line(out / "digitize" / "digitize_window.csv"), "i_ref,v_mid_lo,v_mid_hi,width,in_range");
  EXPECT_EQ(first_line(out / "texel" / "texel_report.csv"), "class,tag,txl1,txl2,txl3,txl4,v_out");
  EXPECT_EQ(first_line(out / "texel" / "texel_array.csv"), "texel,r0,r1_before_run,r1_after_run,v_pk");
}

TEST(Cli, RunsAreByteIdentical) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_into("texel", "texel", a);
  run_into("texel", "texel", b);
  run_into("surface", "surface_nand", a / "s");
  run_into("surface", "surface_nand", b / "s");
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
  }
}

// The gate inverts V_IN and the read-out inverts V_MID again, so the rails
// come back as the same logic level.
TEST(Cli, DigitizeRailsAreBoolean) {
  const auto out = scratch("dig");
  run_into("digitize", "digitize", out);
  std::ifstream f(out / "digitize.csv");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(f, line);
  while (std::getline(f, line)) {
    std::stringstream s(line);
    std::vector<std::string> cells;
    for (std::string cell; std::getline(s, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  ASSERT_EQ(rows.size(), 331u);
  EXPECT_DOUBLE_EQ(std::stod(rows.front()[0]), 0.0);
  EXPECT_EQ(rows.front()[3], "0");
  EXPECT_EQ(rows.back()[3], "1");
}

TEST(Cli, TexelReportCoversEveryClassAndTag) {
  const auto out = scratch("texel_rows");
  run_into("texel", "texel", out);
  std::ifstream f(out / "texel_report.csv");
  std::string line;
  std::getline(f, line);
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  EXPECT_EQ(rows, 9);
}

TEST(Cli, UnknownCommandIsRejected) {
  RunConfig c;
  std::ostringstream log;
  EXPECT_THROW(run_command("frobnicate", c, log), ConfigError);
}

TEST(Cli, MissingSectionIsAConfigError) {
  RunConfig c;
  std::ostringstream log;
  EXPECT_THROW(run_command("sweep", c, log), ConfigError);
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("exit");
  fs::create_directories(dir);
  std::ofstream(dir / "missing_dataset.json")
      << R"({"texel": {"dataset": "nowhere.csv", "r1": [19.5e3, 14.8e3, 12.7e3, 10.6e3], "target_class": 2}})";
  const std::string cli = MEMGATE_CLI;
  auto status = [&](const std::string& args) {
    const int s = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("texel --config " + (dir / "missing_dataset.json").string() + " --out " + (dir / "o").string()), 1);
  EXPECT_EQ(status("sweep --config " + (dir / "absent.json").string()), 2);
  EXPECT_EQ(status("bogus"), 1);
  EXPECT_EQ(status("digitize --config " + (kConfigs / "digitize.json").string() + " --out " + (dir / "d").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "d" / "digitize.csv"));
}
