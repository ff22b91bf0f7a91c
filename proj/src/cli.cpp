#include "emg/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "emg/config_io.hpp"
#include "emg/harness.hpp"
#include "emg/results_io.hpp"
#include "emg/theory.hpp"

namespace emg {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string out_dir = "results";
  std::vector<std::string> sets;
  int threads = 0;
  bool dump_trajectory = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Config file (key = value per line)");
  cmd->add_option("--seed", o.seed, "Seed (run) and base seed (sweeps)");
  cmd->add_option("--runs", o.runs, "Replicates per grid point")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--set", o.sets, "key=value override, repeatable")->allow_extra_args(false);
  cmd->add_option("--threads", o.threads, "Worker threads; never changes results")->check(CLI::PositiveNumber);
  cmd->add_flag("--dump-trajectory", o.dump_trajectory, "Write trajectory_<seed>.csv per run");
}

std::vector<io::ConfigEntry> overrides_of(const CommonOptions& o) {
  std::vector<io::ConfigEntry> entries;
  for (const std::string& s : o.sets) entries.push_back(io::parse_override(s));
  if (o.seed) {
    entries.push_back({"seed", std::to_string(*o.seed), "--seed"});
    entries.push_back({"base_seed", std::to_string(*o.seed), "--seed"});
  }
  if (o.runs) entries.push_back({"runs_per_point", std::to_string(*o.runs), "--runs"});
  return entries;
}

std::string command_line(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

void finish(const CommonOptions& o, const SweepSpec& spec, const std::vector<io::Table>& tables, const std::string& plot,
            io::Manifest& manifest, std::ostream& out) {
  manifest.version = io::tool_version();
  manifest.spec = spec;
  manifest.config_text = io::format_config(spec);
  manifest.finished_utc = io::utc_timestamp();
  io::write_results(o.out_dir, tables, plot, manifest);
  out << "wrote " << manifest.outputs.size() << " files and manifest.json to " << o.out_dir << '\n';
}

int do_run(const CommonOptions& o, io::Manifest& manifest, std::ostream& out) {
  const std::filesystem::path path(o.config_path);
  const std::vector<io::ConfigEntry> overrides = overrides_of(o);
  const SweepSpec parsed = io::parse_config(o.config_path.empty() ? nullptr : &path, overrides);

  SweepSpec single;
  single.base = parsed.base;
  single.beta_values = {parsed.base.beta};
  single.r_values = {parsed.base.R};
  single.runs_per_point = 1;
  single.base_seed = parsed.base.seed;

  std::vector<RunResult> runs;
  runs.push_back(run_single(parsed.base, o.dump_trajectory));
  const std::vector<PointResult> points = assemble_points(single, std::move(runs));
  finish(o, single, io::result_tables(points, false), io::plot_script(FigureKind::histogram, "Single run"), manifest, out);
  return 0;
}

int do_sweep(const CommonOptions& o, io::Manifest& manifest, std::ostream& out) {
  const std::filesystem::path path(o.config_path);
  const std::vector<io::ConfigEntry> overrides = overrides_of(o);
  const SweepSpec spec = io::parse_config(o.config_path.empty() ? nullptr : &path, overrides);
  const std::vector<PointResult> points = sweep(spec, {o.threads, o.dump_trajectory});
  finish(o, spec, io::result_tables(points, true), io::plot_script(FigureKind::sigma_g, "Sweep"), manifest, out);
  return 0;
}

int do_figure(const CommonOptions& o, const std::string& name, io::Manifest& manifest, std::ostream& out) {
  const FigurePreset preset = figure_preset(name);
  const std::filesystem::path path(o.config_path);
  const std::vector<io::ConfigEntry> overrides = overrides_of(o);
  const SweepSpec spec = io::layer_config(preset.spec, o.config_path.empty() ? nullptr : &path, overrides);
  const std::vector<PointResult> points = sweep(spec, {o.threads, o.dump_trajectory || preset.dump_trajectories});
  finish(o, spec, io::result_tables(points, preset.kind == FigureKind::scatter_fit), io::plot_script(preset.kind, preset.title),
         manifest, out);
  return 0;
}

int do_theory(const CommonOptions& o, io::Manifest& manifest, std::ostream& out) {
  std::vector<io::ConfigEntry> overrides = overrides_of(o);
  double aN = 0.0;
  std::erase_if(overrides, [&aN](const io::ConfigEntry& e) {
    if (e.key != "aN") return false;
    std::size_t used = 0;
    try {
      aN = std::stod(e.value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != e.value.size()) throw ConfigError("aN", "cannot parse '" + e.value + "' as a number", e.location);
    return true;
  });
  const std::filesystem::path path(o.config_path);
  const SweepSpec spec = io::parse_config(o.config_path.empty() ? nullptr : &path, overrides);
  const RunConfig& c = spec.base;

  theory::TheoryParams params{c.N, c.R, c.D, aN, c.beta};
  params.validate();

  io::Table density{"theory_density.csv", {"g", "tau", "density", "density_normalized"}, {}};
  const double norm = theory::emg_density_normalizer(c.N);
  for (int k = 1; k < 100; ++k) {
    const double g = k / 100.0;
    const double f = theory::emg_density(g, c.N);
    density.rows.push_back({io::format_real(g), io::format_real(theory::tau(g, c.N)), io::format_real(f), io::format_real(f / norm)});
  }
  io::Table profit{"theory_profit.csv", {"beta", "profit"}, {}};
  for (int k = 0; k <= 20; ++k) {
    const double beta = k / 20.0;
    profit.rows.push_back({io::format_real(beta), io::format_real(theory::majority_roundtrip_profit(c.N, beta))});
  }
  io::Table critical{"theory_critical.csv", {"R", "g_high", "g_low"}, {}};
  for (int k = 0; k <= 20; ++k) {
    theory::TheoryParams p = params;
    p.R = 1.0 + k * 0.5;
    critical.rows.push_back({io::format_real(p.R), io::format_real(theory::critical_strategy_high(p)),
                             io::format_real(theory::critical_strategy_low(p))});
  }

  const std::string plot =
      "# gnuplot script; run from the output directory: gnuplot -p plot.gp\n"
      "set datafile separator ','\n"
      "set multiplot layout 1,3\n"
      "set xlabel 'g'\nplot 'theory_density.csv' skip 1 using 1:4 with lines title 'normalized P(g)'\n"
      "set xlabel 'beta'\nplot 'theory_profit.csv' skip 1 using 1:2 with lines title 'round-trip profit'\n"
      "set xlabel 'R'\nplot 'theory_critical.csv' skip 1 using 1:2 with lines title 'g_high', '' skip 1 using 1:3 with lines title 'g_low'\n"
      "unset multiplot\n";
  finish(o, spec, {density, profit, critical}, plot, manifest, out);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evolutionary minority game with market impact and asymmetric loss sensitivity", "emg_sim"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string figure_name;
  CLI::App* run_cmd = app.add_subcommand("run", "Single seeded run");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "(beta, R) grid with replicates");
  CLI::App* figure_cmd = app.add_subcommand("figure", "Preset grid for one figure");
  CLI::App* theory_cmd = app.add_subcommand("theory", "Tabulate the closed-form predictions");
  for (CLI::App* cmd : {run_cmd, sweep_cmd, figure_cmd, theory_cmd}) add_common(cmd, opts);
  figure_cmd->add_option("name", figure_name, "fig1a, fig1b, fig2, fig3, fig4, fig5, fig6, fig7")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  io::Manifest manifest;
  manifest.command = command_line(argc, argv);
  manifest.started_utc = io::utc_timestamp();
  try {
    if (*run_cmd) return do_run(opts, manifest, out);
    if (*sweep_cmd) return do_sweep(opts, manifest, out);
    if (*figure_cmd) return do_figure(opts, figure_name, manifest, out);
    return do_theory(opts, manifest, out);
  } catch (const UnknownFigureError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace emg
