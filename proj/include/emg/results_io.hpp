#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emg/harness.hpp"

namespace emg::io {

/// 17 significant digits: parses back to the identical double.
std::string format_real(double v);

/// A CSV table destined for `file_name` inside the output directory.
struct Table {
  std::string file_name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

Table point_results_table(std::span<const PointResult> points);
Table per_run_table(std::span<const PointResult> points);
Table histogram_table(std::span<const PointResult> points);
/// One row per regime that has runs; a, b and r_squared are empty when the
/// regime's runs cannot be fitted.
Table fit_table(const RegimeFits& fits);
/// One table per run that carries a trajectory, named trajectory_<seed>.csv.
std::vector<Table> trajectory_tables(std::span<const PointResult> points);

/// point_results, per_run, histogram, fit, then trajectories.
std::vector<Table> result_tables(std::span<const PointResult> points, bool with_fit);

/// Simple CSV reader for the files written here (no quoting).
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string sha256_hex(std::string_view bytes);

struct OutputFile {
  std::string path;    // relative to the output directory
  std::string sha256;
};

struct Manifest {
  std::string tool = "emg_sim";
  std::string version;
  std::string command;
  std::string config_text;  // resolved spec in the config grammar
  SweepSpec spec;
  std::string started_utc;
  std::string finished_utc;
  std::vector<OutputFile> outputs;

  std::string to_json() const;
};

std::string tool_version();
std::string utc_timestamp();

/// gnuplot script for the given figure kind, reading the CSVs by relative path.
std::string plot_script(FigureKind kind, const std::string& title);

/// Writes every table and the plot script into `dir`, records their digests
/// in the manifest, then writes manifest.json. Throws std::runtime_error with
/// the path on any I/O failure.
void write_results(const std::filesystem::path& dir, std::span<const Table> tables, const std::string& plot,
                   Manifest& manifest);

void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace emg::io
