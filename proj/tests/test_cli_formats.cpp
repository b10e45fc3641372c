#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fbh/field.hpp"
#include "fbh/wente.hpp"
#include "scenario.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using doctest::Contains;

namespace {

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "fbh_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string write_file(const std::string& name, const std::string& content) {
  fs::path p = work_dir() / name;
  std::ofstream os(p);
  os << content;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json load_json(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  json j;
  is >> j;
  return j;
}

int count_occurrences(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (std::size_t at = hay.find(needle); at != std::string::npos;
       at = hay.find(needle, at + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("config: parses keys, comments, and blank lines") {
  std::string p = write_file("ok.cfg",
                             "# a comment\n"
                             "name = demo\n"
                             "\n"
                             "domain.nodes = 65   # trailing comment\n"
                             "list.vals = 1, 2.5,3\n");
  fbhcli::Config cfg = fbhcli::parse_config(p);
  CHECK(cfg.require("name") == "demo");
  CHECK(cfg.get_int("domain.nodes", 0) == 65);
  auto vals = cfg.get_list("list.vals");
  REQUIRE(vals.size() == 3);
  CHECK(vals[1] == doctest::Approx(2.5));
  CHECK(cfg.get("absent", "fallback") == "fallback");
  CHECK(cfg.get_num("absent.num", 7.5) == doctest::Approx(7.5));
}

TEST_CASE("config: missing file is an error") {
  CHECK_THROWS_AS(fbhcli::parse_config((work_dir() / "nope.cfg").string()),
                  fbhcli::ConfigError);
}

TEST_CASE("config: a line without '=' reports its line number") {
  std::string p = write_file("noeq.cfg", "name = x\nthis line is broken\n");
  CHECK_THROWS_WITH(fbhcli::parse_config(p), Contains(":2"));
}

TEST_CASE("config: duplicate keys are rejected") {
  std::string p = write_file("dup.cfg", "a = 1\na = 2\n");
  CHECK_THROWS_WITH(fbhcli::parse_config(p), Contains("duplicate key 'a'"));
}

TEST_CASE("config: non-numeric values surface the key name") {
  std::string p = write_file("badnum.cfg", "x = not_a_number\nl = 1,oops\n");
  fbhcli::Config cfg = fbhcli::parse_config(p);
  CHECK_THROWS_WITH(cfg.get_num("x", 0.0), Contains("'x'"));
  CHECK_THROWS_WITH(cfg.get_list("l"), Contains("'l'"));
}

TEST_CASE("config: unknown_keys reports everything never read") {
  std::string p = write_file("unk.cfg", "a = 1\nb = 2\nc = 3\n");
  fbhcli::Config cfg = fbhcli::parse_config(p);
  cfg.get("a");
  auto unk = cfg.unknown_keys();
  REQUIRE(unk.size() == 2);
  CHECK(unk[0] == "b");
  CHECK(unk[1] == "c");
}

TEST_CASE("run: constants scenario writes constants.json and a manifest") {
  std::string out = (work_dir() / "constants_run").string();
  std::string p = write_file("constants.cfg",
                             "name = tiny-constants\n"
                             "kind = constants\n"
                             "out = " + out + "\n"
                             "seed = 7\n"
                             "domain.nodes = 33\n"
                             "constants.bank = 3\n");
  int rc = fbhcli::run_scenario(fbhcli::parse_config(p), 1);
  CHECK(rc == fbhcli::kOk);

  std::ifstream cis(out + "/constants.json");
  REQUIRE(cis.good());
  fbh::WenteConstants c = fbh::read_constants_json(cis);
  CHECK(c.K0 > 0.0);
  CHECK(c.eps2 == doctest::Approx(1.0 / (4.0 * 96.0 * c.K0 * c.K0)).epsilon(1e-12));
  CHECK(c.eps1 == doctest::Approx(c.eps2 / 17.0).epsilon(1e-12));

  json man = load_json(out + "/manifest.json");
  CHECK(man["kind"] == "constants");
  CHECK(man["seed"] == 7);
  CHECK(man["exit_code"] == 0);
  bool listed = false;
  for (const auto& o : man["outputs"]) listed = listed || o == "constants.json";
  CHECK(listed);
  CHECK(man.contains("constants_hash"));
}

TEST_CASE("run: constants scenario is deterministic for a fixed seed") {
  std::string outs[2];
  for (int k = 0; k < 2; ++k) {
    outs[k] = (work_dir() / ("det_const_" + std::to_string(k))).string();
    std::string p = write_file("det_const" + std::to_string(k) + ".cfg",
                               "name = det\n"
                               "kind = constants\n"
                               "out = " + outs[k] + "\n"
                               "seed = 11\n"
                               "domain.nodes = 33\n"
                               "constants.bank = 3\n");
    CHECK(fbhcli::run_scenario(fbhcli::parse_config(p), 1) == fbhcli::kOk);
  }
  CHECK(slurp(outs[0] + "/constants.json") == slurp(outs[1] + "/constants.json"));
}

TEST_CASE("run: solve scenario with a constant base converges and writes artifacts") {
  std::string out = (work_dir() / "solve_run").string();
  std::string p = write_file("solve.cfg",
                             "name = tiny-solve\n"
                             "kind = solve\n"
                             "out = " + out + "\n"
                             "domain.nodes = 33\n"
                             "family.dim = 3\n"
                             "family.base = 0,0,1\n");
  int rc = fbhcli::run_scenario(fbhcli::parse_config(p), 1);
  CHECK(rc == fbhcli::kOk);

  json man = load_json(out + "/manifest.json");
  REQUIRE(man["solves"].size() == 1);
  CHECK(man["solves"][0]["converged"] == true);
  CHECK(man["solves"][0]["energy"].get<double>() < 1e-10);

  // field CSV round-trips to the constant it encodes
  std::ifstream is(out + "/u_m1.csv");
  REQUIRE(is.good());
  fbh::Grid g(fbh::DomainSpec{fbh::DomainKind::half_disc, 0.0, 1.0, 33});
  fbh::MapField u(g, 3);
  fbh::read_csv(is, u);
  for (std::size_t idx = 0; idx < u.grid().num_nodes(); ++idx) {
    if (u.grid().node_class(idx) == fbh::NodeClass::outside) continue;
    CHECK(u(idx, 2) == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(fs::exists(out + "/energy_density.csv"));
  CHECK(fs::exists(out + "/boundary.csv"));
}

TEST_CASE("run: identical config and seed produce identical CSV bytes") {
  std::string outs[2];
  for (int k = 0; k < 2; ++k) {
    outs[k] = (work_dir() / ("det_solve_" + std::to_string(k))).string();
    std::string p = write_file("det_solve" + std::to_string(k) + ".cfg",
                               "name = det-solve\n"
                               "kind = solve\n"
                               "out = " + outs[k] + "\n"
                               "domain.nodes = 33\n"
                               "family.bubble.0.degree = 1\n"
                               "family.bubble.0.lambda0 = 0.25\n");
    fbhcli::run_scenario(fbhcli::parse_config(p), 1);
  }
  CHECK(slurp(outs[0] + "/u_m1.csv") == slurp(outs[1] + "/u_m1.csv"));
  CHECK(slurp(outs[0] + "/energy_density.csv") == slurp(outs[1] + "/energy_density.csv"));
}

TEST_CASE("run: non-converged solves exit with the dedicated code") {
  std::string out = (work_dir() / "noconv_run").string();
  std::string p = write_file("noconv.cfg",
                             "name = noconv\n"
                             "kind = solve\n"
                             "out = " + out + "\n"
                             "domain.nodes = 65\n"
                             "family.bubble.0.degree = 1\n"
                             "family.bubble.0.lambda0 = 0.25\n"
                             "solver.max_iters = 1\n"
                             "solver.tol = 1e-12\n");
  int rc = fbhcli::run_scenario(fbhcli::parse_config(p), 1);
  CHECK(rc == fbhcli::kNotConverged);
  json man = load_json(out + "/manifest.json");
  CHECK(man["exit_code"] == fbhcli::kNotConverged);
  CHECK(man["solves"][0]["converged"] == false);
}

TEST_CASE("run: unknown config keys are rejected by name") {
  std::string out = (work_dir() / "unknown_run").string();
  std::string p = write_file("unknown.cfg",
                             "name = u\n"
                             "kind = solve\n"
                             "out = " + out + "\n"
                             "domain.nodes = 33\n"
                             "family.base = 0,0,1\n"
                             "solvr.step = 0.5\n");  // typo'd key
  CHECK_THROWS_WITH(fbhcli::run_scenario(fbhcli::parse_config(p), 1),
                    Contains("solvr.step"));
}

TEST_CASE("run: bubbletree without constants.file explains what to do") {
  std::string out = (work_dir() / "bt_run").string();
  std::string p = write_file("bt.cfg",
                             "name = bt\n"
                             "kind = bubbletree\n"
                             "out = " + out + "\n"
                             "domain.nodes = 33\n"
                             "family.base = 0,0,1\n");
  CHECK_THROWS_WITH(fbhcli::run_scenario(fbhcli::parse_config(p), 1),
                    Contains("constants.file"));
}

TEST_CASE("run: unknown scenario kind is rejected") {
  std::string p = write_file("badkind.cfg",
                             "name = x\n"
                             "kind = frobnicate\n"
                             "out = " + (work_dir() / "badkind").string() + "\n");
  CHECK_THROWS_WITH(fbhcli::run_scenario(fbhcli::parse_config(p), 1),
                    Contains("frobnicate"));
}

TEST_CASE("plot: solve run with plot enabled renders SVGs") {
  std::string out = (work_dir() / "plot_run").string();
  std::string p = write_file("plot.cfg",
                             "name = plotted\n"
                             "kind = solve\n"
                             "out = " + out + "\n"
                             "domain.nodes = 33\n"
                             "family.bubble.0.degree = 1\n"
                             "family.bubble.0.lambda0 = 0.25\n"
                             "plot = true\n");
  int rc = fbhcli::run_scenario(fbhcli::parse_config(p), 1);
  CHECK(rc == fbhcli::kOk);
  CHECK(fs::exists(out + "/energy_density.svg"));
  CHECK(fs::exists(out + "/boundary.svg"));
  std::string svg = slurp(out + "/energy_density.svg");
  CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("plot: a directory without a manifest fails validation") {
  fs::path empty = work_dir() / "no_manifest";
  fs::create_directories(empty);
  CHECK(fbhcli::emit_plots(empty.string()) == fbhcli::kValidationError);
}

TEST_CASE("svg: malformed CSV cells are reported with the file name") {
  std::string p = write_file("bad.csv", "x,y,e\n0,0,abc\n");
  CHECK_THROWS_WITH(fbhcli::svg_heatmap(p, (work_dir() / "bad.svg").string()),
                    Contains("malformed CSV cell"));
}

TEST_CASE("svg: ragged CSV rows are rejected") {
  std::string p = write_file("ragged.csv", "x,y,e\n0,0,1\n0,0\n");
  CHECK_THROWS_WITH(fbhcli::svg_heatmap(p, (work_dir() / "ragged.svg").string()),
                    Contains("ragged"));
}

TEST_CASE("svg: missing required columns are named") {
  std::string p = write_file("nocol.csv", "x,y\n0,0\n");
  CHECK_THROWS_WITH(fbhcli::svg_heatmap(p, (work_dir() / "nocol.svg").string()),
                    Contains("missing column 'e'"));
}

TEST_CASE("svg: neck plot draws one energy polyline per family index") {
  std::string p = write_file("neck.csv",
                             "m,R,delta,energy,l2weak,l21theta,flux\n"
                             "1,2,0.1,1.0,0.1,0.1,0.01\n"
                             "1,4,0.05,1.5,0.1,0.1,0.01\n"
                             "2,2,0.1,1.1,0.1,0.1,0.01\n"
                             "2,4,0.04,1.6,0.1,0.1,0.01\n"
                             "2,8,0.03,1.7,0.1,0.1,0.01\n");
  std::string svg_path = (work_dir() / "neck.svg").string();
  fbhcli::svg_neck_lines(p, svg_path);
  std::string svg = slurp(svg_path);
  CHECK(count_occurrences(svg, "<polyline") == 2);
}
