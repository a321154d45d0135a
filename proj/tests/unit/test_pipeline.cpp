#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pricekit/parallel.hpp"
#include "pricekit/pipeline.hpp"

using namespace pricekit;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

RunConfig quick_config(const std::string& out_dir, int workers) {
  RunConfig cfg;
  cfg.preset = "hyb";
  cfg.sim_weeks = 52;
  cfg.seed = 17;
  cfg.bootstrap = 50;
  cfg.out_dir = out_dir;
  cfg.workers = workers;
  return cfg;
}

}  // namespace

TEST_CASE("pipeline: byte-identical bundles across runs and worker counts") {
  const fs::path base = fs::temp_directory_path() / "pricekit_test_pipeline";
  fs::remove_all(base);

  run_pipeline(quick_config((base / "w1").string(), 1));
  run_pipeline(quick_config((base / "w4").string(), 4));
  set_worker_count(0);

  const auto a = read_dir(base / "w1");
  const auto b = read_dir(base / "w4");
  REQUIRE(a.size() == b.size());
  for (const auto& [name, content] : a) {
    REQUIRE_MESSAGE(b.count(name) == 1, name);
    CHECK_MESSAGE(content == b.at(name), "bytes differ: ", name);
  }
  CHECK(a.count("manifest.json") == 1);
  CHECK(a.count("rigidity.csv") == 1);
  CHECK(a.count("hazard.csv") == 1);
  CHECK(a.count("panel.csv") == 1);
  CHECK(a.count("ground_truth.csv") == 1);
  fs::remove_all(base);
}

TEST_CASE("pipeline: different seed changes the bundle") {
  const fs::path base = fs::temp_directory_path() / "pricekit_test_seed";
  fs::remove_all(base);
  auto c1 = quick_config((base / "a").string(), 1);
  auto c2 = quick_config((base / "b").string(), 1);
  c2.seed = 18;
  run_pipeline(c1);
  run_pipeline(c2);
  set_worker_count(0);
  CHECK(read_dir(base / "a").at("panel.csv") != read_dir(base / "b").at("panel.csv"));
  fs::remove_all(base);
}

TEST_CASE("pipeline: empty or missing input fails with a stage-tagged data error") {
  RunConfig cfg;
  cfg.panel_path = "/nonexistent/panel.csv";
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("stage 'panel'"), DataError);

  RunConfig none;
  CHECK_THROWS_WITH_AS(run_pipeline(none), doctest::Contains("stage 'panel'"), DataError);

  const fs::path dir = fs::temp_directory_path() / "pricekit_test_empty";
  fs::create_directories(dir);
  std::ofstream(dir / "empty.csv")
      << "store,product,category,week,price,regular_price,private_label,aisle,shelf\n";
  RunConfig empty;
  empty.panel_path = (dir / "empty.csv").string();
  CHECK_THROWS_WITH_AS(run_pipeline(empty), doctest::Contains("empty panel"), DataError);
  fs::remove_all(dir);
}

TEST_CASE("pipeline: loading a written panel reproduces the simulated statistics") {
  const fs::path base = fs::temp_directory_path() / "pricekit_test_roundtrip";
  fs::remove_all(base);

  auto sim_cfg = quick_config((base / "sim").string(), 1);
  run_pipeline(sim_cfg);

  RunConfig load_cfg;
  load_cfg.panel_path = (base / "sim" / "panel.csv").string();
  load_cfg.seed = 17;
  load_cfg.bootstrap = 50;
  load_cfg.out_dir = (base / "load").string();
  load_cfg.store_formats["hyb"] = "HYB";
  run_pipeline(load_cfg);
  set_worker_count(0);

  const auto sim_files = read_dir(base / "sim");
  const auto load_files = read_dir(base / "load");
  // Identical statistics; only the input digest lines differ.
  auto strip_header = [](const std::string& s) {
    const auto pos = s.find('\n', s.find('\n') + 1);
    return s.substr(pos + 1);
  };
  for (const auto& name : {"rigidity.csv", "magnitude.csv", "frequency_tests.csv", "hazard.csv",
                           "sync_summary.csv", "price_endings.csv"}) {
    CHECK_MESSAGE(strip_header(sim_files.at(name)) == strip_header(load_files.at(name)), name);
  }
  fs::remove_all(base);
}

TEST_CASE("config file wires renamed columns, store formats and tie handling") {
  const auto table = parse_toml(
      "[input]\n"
      "panel = \"p.csv\"\n"
      "delimiter = \"tab\"\n"
      "[input.column]\n"
      "price = \"tx_price\"\n"
      "week = \"period\"\n"
      "[input.format]\n"
      "s1 = \"EDLP\"\n"
      "[hazard]\n"
      "ties = \"efron\"\n");
  const auto cfg = config_from_toml(table);
  CHECK(cfg.delimiter == '\t');
  CHECK(cfg.column_renames.at("price") == "tx_price");
  CHECK(cfg.column_renames.at("week") == "period");
  CHECK(cfg.store_formats.at("s1") == "EDLP");
  CHECK(cfg.efron_ties);

  // The renamed, tab-delimited panel loads.
  const fs::path dir = fs::temp_directory_path() / "pricekit_test_renames";
  fs::create_directories(dir);
  std::ofstream(dir / "p.csv")
      << "store\tproduct\tcategory\tperiod\ttx_price\tregular_price\tprivate_label\taisle\tshelf\n"
         "s1\tp1\tcat\t1\t1.99\t1.99\t0\tmiddle\ttop\n"
         "s1\tp1\tcat\t2\t1.89\t1.99\t0\tmiddle\ttop\n";
  RunConfig run = cfg;
  run.panel_path = (dir / "p.csv").string();
  const auto input = prepare_input(run);
  CHECK(input.panel.observation_count() == 2);
  CHECK(input.panel.store_format.at("s1") == "EDLP");
  fs::remove_all(dir);
}

TEST_CASE("config echo embeds every parameter") {
  RunConfig cfg;
  cfg.seed = 9;
  cfg.preset = "canadian";
  cfg.filter.max_sale_len = 4;
  const auto echo = cfg.echo();
  CHECK(echo.find("run.seed = 9") != std::string::npos);
  CHECK(echo.find("simulate.preset = \"canadian\"") != std::string::npos);
  CHECK(echo.find("filter.max_sale_len = 4") != std::string::npos);
}
