// pricekit CLI: validate / filter / analyze / simulate / report.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "pricekit/config.hpp"
#include "pricekit/panel.hpp"
#include "pricekit/parallel.hpp"
#include "pricekit/pipeline.hpp"
#include "pricekit/report.hpp"

namespace pk = pricekit;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string panel_path;
  std::string out_dir;
  std::string preset;
  long seed = -1;
  int workers = -1;
  int max_sale_len = -1;
  int ref_window = -1;
  int align_radius = -1;
  std::string endpoint_policy;
  int endpoint_margin = -1;
  int bootstrap = -1;
  bool minor_units = false;
  bool tab = false;
  bool impute_missing = false;
  std::string duration_basis;
  bool excess_kurtosis = false;
  bool efron = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Config file (key = value tree); flags win on conflict");
  cmd->add_option("--panel", f.panel_path, "Input panel file (delimited text with header)");
  cmd->add_option("--out,-o", f.out_dir, "Output directory");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--workers", f.workers, "Worker count (0 = auto); never affects output bytes");
  cmd->add_option("--max-sale-len", f.max_sale_len, "Longest temporary cut the sales filter lifts");
  cmd->add_option("--ref-window", f.ref_window, "Rolling-mode window (odd)");
  cmd->add_option("--align-radius", f.align_radius, "Reference change-point alignment radius");
  cmd->add_option("--endpoint-policy", f.endpoint_policy, "none|trim|conditional");
  cmd->add_option("--endpoint-margin", f.endpoint_margin, "Endpoint margin in weeks");
  cmd->add_option("--bootstrap", f.bootstrap, "Bootstrap replicates for confidence intervals");
  cmd->add_flag("--minor-units", f.minor_units, "Prices are integer minor units");
  cmd->add_flag("--tab", f.tab, "Tab-delimited input");
  cmd->add_flag("--impute-missing", f.impute_missing, "Carry last price forward over week gaps");
  cmd->add_option("--duration-basis", f.duration_basis,
                  "Annualized-changes path: expected (per-product) or implied (pooled)")
      ->check(CLI::IsMember({"expected", "implied"}));
  cmd->add_flag("--excess-kurtosis", f.excess_kurtosis, "Report excess instead of raw kurtosis");
  cmd->add_flag("--efron", f.efron, "Efron tie handling in the hazard fits");
}

pk::RunConfig resolve(const CommonFlags& f) {
  pk::RunConfig cfg;
  if (!f.config_path.empty()) cfg = pk::config_from_toml(pk::parse_toml_file(f.config_path));
  if (!f.panel_path.empty()) cfg.panel_path = f.panel_path;
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  if (!f.preset.empty()) cfg.preset = f.preset;
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (f.workers >= 0) cfg.workers = f.workers;
  if (f.max_sale_len > 0) cfg.filter.max_sale_len = f.max_sale_len;
  if (f.ref_window > 0) cfg.filter.ref_window = f.ref_window;
  if (f.align_radius >= 0) cfg.filter.align_radius = f.align_radius;
  if (!f.endpoint_policy.empty())
    cfg.filter.endpoint.kind = pk::parse_endpoint_policy(f.endpoint_policy);
  if (f.endpoint_margin >= 0) cfg.filter.endpoint.margin = f.endpoint_margin;
  if (f.bootstrap >= 0) cfg.bootstrap = f.bootstrap;
  if (f.minor_units) cfg.minor_units = true;
  if (f.tab) cfg.delimiter = '\t';
  if (f.impute_missing) cfg.impute_missing = true;
  if (!f.duration_basis.empty()) cfg.duration_basis_implied = f.duration_basis == "implied";
  if (f.excess_kurtosis) cfg.excess_kurtosis = true;
  if (f.efron) cfg.efron_ties = true;
  if (const char* env = std::getenv("PRICEKIT_OUT"); env && f.out_dir.empty()) cfg.out_dir = env;
  return cfg;
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const pk::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pk::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weekly retail price panels: sales filters, reference prices and rigidity statistics"};
  app.require_subcommand(1);

  CommonFlags vf, ff, af, sf, rf;

  auto* validate = app.add_subcommand("validate", "Audit a panel file and emit a validation report");
  add_common(validate, vf);

  auto* filter = app.add_subcommand("filter", "Generate the four price series and sale events");
  add_common(filter, ff);

  auto* analyze = app.add_subcommand("analyze", "Full statistics bundle for an existing panel");
  add_common(analyze, af);

  int sim_weeks = -1;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic panel with ground truth");
  add_common(simulate, sf);
  simulate->add_option("--preset", sf.preset, "Preset name (edlp|hilo|hyb|canadian) or file");
  simulate->add_option("--weeks", sim_weeks, "Weeks to simulate");

  auto* report = app.add_subcommand("report", "Run the full pipeline (simulate or load, then analyze)");
  add_common(report, rf);
  report->add_option("--preset", rf.preset, "Preset name or file for simulated input");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (validate->parsed()) {
    return run_guarded([&] {
      pk::RunConfig cfg = resolve(vf);
      if (cfg.panel_path.empty()) throw pk::DataError("stage 'panel': no --panel given");
      std::ifstream in(cfg.panel_path, std::ios::binary);
      if (!in) throw pk::DataError("stage 'panel': cannot open " + cfg.panel_path);
      pk::LoadOptions opt;
      opt.delimiter = cfg.delimiter;
      opt.minor_units = cfg.minor_units;
      const auto report_obj = pk::validate_stream(in, opt);
      const std::string json = pk::report_to_json(report_obj);
      std::cout << json;
      if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream out(std::filesystem::path(cfg.out_dir) / "validation.json",
                          std::ios::binary);
        out << json;
      }
    });
  }

  if (filter->parsed()) {
    return run_guarded([&] {
      pk::RunConfig cfg = resolve(ff);
      if (cfg.panel_path.empty()) throw pk::DataError("stage 'panel': no --panel given");
      auto input = pk::prepare_input(cfg);
      pk::Bundle bundle(input.input_digest, cfg.seed);
      pk::stage_filter(input, cfg, bundle);
      bundle.write(cfg.out_dir, cfg.echo());
      std::cout << "filter outputs written to " << cfg.out_dir << "\n";
    });
  }

  if (analyze->parsed()) {
    return run_guarded([&] {
      pk::RunConfig cfg = resolve(af);
      if (cfg.panel_path.empty() && cfg.preset.empty())
        throw pk::DataError("stage 'panel': no input: set --panel or --config with input.panel");
      const auto files = pk::run_pipeline(cfg);
      std::cout << "wrote " << files.size() << " files to " << cfg.out_dir << "\n";
    });
  }

  if (simulate->parsed()) {
    return run_guarded([&] {
      pk::RunConfig cfg = resolve(sf);
      if (cfg.preset.empty()) cfg.preset = "canadian";
      if (sim_weeks > 0) cfg.sim_weeks = sim_weeks;
      if (cfg.workers > 0) pk::set_worker_count(cfg.workers);
      auto input = pk::prepare_input(cfg);
      pk::Bundle bundle(input.input_digest, cfg.seed);
      std::ostringstream panel_csv;
      pk::write_panel(input.panel, panel_csv);
      bundle.add("panel.csv", panel_csv.str(), false);
      std::ostringstream truth_csv;
      pk::SimResult tmp;
      tmp.panel = input.panel;
      tmp.truth = input.truth;
      pk::write_ground_truth(tmp, truth_csv);
      bundle.add("ground_truth.csv", truth_csv.str(), false);
      bundle.write(cfg.out_dir, cfg.echo());
      std::cout << "simulated " << input.panel.products.size() << " products x "
                << input.panel.weeks() << " weeks into " << cfg.out_dir << "\n";
    });
  }

  if (report->parsed()) {
    return run_guarded([&] {
      pk::RunConfig cfg = resolve(rf);
      const auto files = pk::run_pipeline(cfg);
      std::cout << "wrote " << files.size() << " files to " << cfg.out_dir << "\n";
    });
  }

  return 1;
}
