// Command line front end: one scenario, sweeps, sweet-spot table, oracle
// report and the figure presets. Output is CSV on stdout or --out.
//
// Exit codes: 0 success, 2 configuration error, 3 validity flag raised
// without --force, 1 anything else.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pushgate/pushgate.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitValidity = 3;

struct Common {
  std::string config;
  std::string out;
  bool force = false;
  unsigned workers = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Scenario file (key = value lines)");
  sub->add_option("--out", c.out, "Write CSV here instead of stdout");
  sub->add_flag("--force", c.force, "Report results even when validity flags are raised");
  sub->add_option("--workers", c.workers, "Worker threads (0 = all cores)");
}

pushgate::Scenario scenario_from(const Common& c) {
  return c.config.empty() ? pushgate::Scenario{} : pushgate::load_config(c.config);
}

/// Writes to --out or stdout in binary mode so line endings stay LF.
void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw pushgate::ConfigError("cannot write " + c.out);
  f << text;
}

int report_flags(const std::vector<std::string>& failures, bool force) {
  if (failures.empty()) return 0;
  for (const auto& f : failures) std::cerr << "validity: " << f << '\n';
  if (force) {
    std::cerr << "validity flags overridden by --force\n";
    return 0;
  }
  std::cerr << "rerun with --force to accept these results\n";
  return kExitValidity;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budget and oracle tool for the two-ion pushing gate"};
  app.require_subcommand(1);
  Common common;

  auto* fidelity = app.add_subcommand("fidelity", "Infidelity budget of one scenario");
  add_common(fidelity, common);

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter");
  add_common(sweep, common);
  std::string param;
  double lo = 0.0, hi = 0.0;
  std::size_t points = 0;
  bool log_scale = false;
  sweep->add_option("--param", param, "omega|d|P|w|T|Delta|x0|z0")->required();
  sweep->add_option("--min", lo, "First grid value")->required();
  sweep->add_option("--max", hi, "Last grid value")->required();
  sweep->add_option("--points", points, "Number of grid points")->required();
  sweep->add_flag("--log", log_scale, "Logarithmic grid");

  auto* sweetspot = app.add_subcommand("sweetspot", "Sweet-spot trap frequency per distance");
  add_common(sweetspot, common);
  std::vector<double> distances_um{1.0, 10.0, 100.0};
  sweetspot->add_option("--d", distances_um, "Ion distances in um");

  auto* oracle = app.add_subcommand("oracle", "Closed forms against Monte Carlo and quadrature");
  add_common(oracle, common);
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  oracle->add_option("--samples", samples, "Monte Carlo samples");
  oracle->add_option("--seed", seed, "Seed");

  auto* figure = app.add_subcommand("figure", "Trap-frequency curves of a figure preset");
  add_common(figure, common);
  std::string preset;
  figure->add_option("--preset", preset, "fig5|fig6|fig7|fig8")
      ->required()
      ->check(CLI::IsMember({"fig5", "fig6", "fig7", "fig8"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    std::ostringstream out;
    int rc = 0;
    if (*fidelity) {
      const auto r = pushgate::total_infidelity(scenario_from(common));
      pushgate::write_csv(out, pushgate::result_header(), {pushgate::result_cells(r)});
      rc = report_flags(r.failures, common.force);
    } else if (*sweep) {
      const auto grid = pushgate::make_grid(lo, hi, points, log_scale);
      const auto res = pushgate::sweep(scenario_from(common), param, grid, common.workers);
      pushgate::write_sweep_csv(out, res);
      std::vector<std::string> failures;
      for (const auto& p : res.points) {
        if (!p.error.empty()) failures.push_back(pushgate::format_double(p.value) + ": " + p.error);
        for (const auto& f : p.result.failures)
          failures.push_back(pushgate::format_double(p.value) + ": " + f);
      }
      rc = report_flags(failures, common.force);
    } else if (*sweetspot) {
      std::vector<double> d;
      for (double v : distances_um) d.push_back(v / 1e6);
      const auto rows = pushgate::sweetspot_report(scenario_from(common), d);
      pushgate::write_sweetspot_csv(out, rows);
      std::vector<std::string> failures;
      for (const auto& r : rows)
        for (const auto& f : r.result.failures)
          failures.push_back("d=" + pushgate::format_double(r.d * 1e6) + "um: " + f);
      rc = report_flags(failures, common.force);
    } else if (*oracle) {
      const auto sc = scenario_from(common);
      const auto rep = pushgate::oracle_run(sc, samples, seed, common.workers);
      pushgate::write_oracle_csv(out, rep);
      if (rep.insufficient_statistics) std::cerr << "warning: insufficient statistics\n";
      rc = report_flags(pushgate::total_infidelity(sc).failures, common.force);
    } else if (*figure) {
      // Figures span regions where the model breaks down; the flags column
      // records that instead of failing.
      pushgate::write_figure_csv(out, pushgate::figure(preset, common.workers));
    }
    if (rc == kExitValidity) return rc;
    emit(common, out.str());
    return rc;
  } catch (const pushgate::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
