#include "emg/results_io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include <openssl/evp.h>

#include "json.hpp"


namespace emg::io {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string{}; }

std::string agg_mean(const Aggregate& a) { return a.n ? format_real(a.mean) : std::string{}; }
std::string agg_se(const Aggregate& a) { return a.n ? format_real(a.se) : std::string{}; }

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Table::to_csv() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

Table point_results_table(std::span<const PointResult> points) {
  Table t{"point_results.csv",
          {"beta", "R", "sigma_g_mean", "sigma_g_se", "sigma_p_mean", "sigma_p_se", "H_mean", "H_se", "pw_mean", "pw_se",
           "n_runs", "n_low_regime", "n_high_regime"},
          {}};
  for (const PointResult& p : points) {
    t.rows.push_back({format_real(p.beta), format_real(p.R), agg_mean(p.all.sigma_g), agg_se(p.all.sigma_g),
                      agg_mean(p.all.sigma_p), agg_se(p.all.sigma_p), agg_mean(p.all.H), agg_se(p.all.H),
                      agg_mean(p.all.p_w), agg_se(p.all.p_w), std::to_string(p.all.n_runs), std::to_string(p.low.n_runs),
                      std::to_string(p.high.n_runs)});
  }
  return t;
}

Table per_run_table(std::span<const PointResult> points) {
  Table t{"per_run.csv", {"seed", "beta", "R", "g_mean", "sigma_g", "sigma_p", "H", "pw"}, {}};
  for (const PointResult& p : points) {
    for (const RunResult& r : p.runs) {
      const ObservableSummary& s = r.summary;
      t.rows.push_back({std::to_string(r.seed), format_real(r.beta), format_real(r.R), format_real(s.g_mean),
                        format_real(s.sigma_g), opt(s.sigma_p), opt(s.H), opt(s.p_w)});
    }
  }
  return t;
}

Table histogram_table(std::span<const PointResult> points) {
  Table t{"histogram.csv", {"beta", "R", "bin_left", "bin_right", "mass"}, {}};
  for (const PointResult& p : points) {
    const auto bins = static_cast<double>(p.histogram.size());
    for (std::size_t k = 0; k < p.histogram.size(); ++k) {
      t.rows.push_back({format_real(p.beta), format_real(p.R), format_real(static_cast<double>(k) / bins),
                        format_real(static_cast<double>(k + 1) / bins), format_real(p.histogram[k])});
    }
  }
  return t;
}

Table fit_table(const RegimeFits& fits) {
  Table t{"fit.csv", {"regime", "a", "b", "r_squared", "n_points"}, {}};
  auto row = [&t](const char* regime, const std::optional<LinearFit>& f, std::size_t n) {
    if (n == 0) return;
    if (f) {
      t.rows.push_back({regime, format_real(f->slope), format_real(f->intercept), format_real(f->r_squared), std::to_string(n)});
    } else {
      t.rows.push_back({regime, "", "", "", std::to_string(n)});
    }
  };
  row("low", fits.low, fits.n_low);
  row("high", fits.high, fits.n_high);
  return t;
}

std::vector<Table> trajectory_tables(std::span<const PointResult> points) {
  std::vector<Table> out;
  for (const PointResult& p : points) {
    for (const RunResult& r : p.runs) {
      if (r.trajectory.empty()) continue;
      Table t{"trajectory_" + std::to_string(r.seed) + ".csv", {"t", "price", "A", "p_tr"}, {}};
      t.rows.reserve(r.trajectory.size());
      for (const TrajectoryRow& row : r.trajectory) {
        t.rows.push_back({std::to_string(row.t), format_real(row.price), std::to_string(row.excess_demand), format_real(row.p_tr)});
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::vector<Table> result_tables(std::span<const PointResult> points, bool with_fit) {
  std::vector<Table> tables{point_results_table(points), per_run_table(points), histogram_table(points)};
  if (with_fit) {
    tables.push_back(fit_table(fit_regimes(points)));
  } else {
    tables.push_back(Table{"fit.csv", {"regime", "a", "b", "r_squared", "n_points"}, {}});
  }
  for (Table& t : trajectory_tables(points)) tables.push_back(std::move(t));
  return tables;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> cells;
    while (true) {
      const auto comma = line.find(',');
      cells.emplace_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string tool_version() { return "1.0.0"; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  const RunConfig& c = spec.base;
  j["config"] = {{"N", c.N},
                 {"m", c.m},
                 {"D", c.D},
                 {"R", c.R},
                 {"beta", c.beta},
                 {"epsilon", c.epsilon},
                 {"relax_steps", c.relax_steps},
                 {"measure_steps", c.measure_steps},
                 {"seed", c.seed},
                 {"initial_price", c.initial_price},
                 {"random_initial_holdings", c.random_initial_holdings}};
  j["sweep"] = {{"beta_values", spec.beta_values},
                {"r_values", spec.r_values},
                {"runs_per_point", spec.runs_per_point},
                {"base_seed", spec.base_seed}};
  j["base_seed"] = spec.base_seed;
  j["config_text"] = config_text;
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const OutputFile& f : outputs) files.push_back({{"path", f.path}, {"sha256", f.sha256}});
  j["outputs"] = files;
  return j.dump(2) + "\n";
}

std::string plot_script(FigureKind kind, const std::string& title) {
  std::string s = "# gnuplot script; run from the output directory: gnuplot -p plot.gp\n"
                  "set datafile separator ','\n"
                  "set key outside\n"
                  "set title '" + title + "'\n";
  switch (kind) {
    case FigureKind::histogram:
      s += "set xlabel 'g'\nset ylabel 'P(g)'\n"
           "plot 'histogram.csv' skip 1 using (($3+$4)/2):($5) with linespoints title 'all points (see columns beta, R)'\n";
      break;
    case FigureKind::sigma_g:
      s += "set xlabel 'beta'\nset ylabel 'sigma_g'\n"
           "plot 'point_results.csv' skip 1 using 1:3:4 with yerrorbars title 'sigma_g'\n";
      break;
    case FigureKind::trajectories:
      s += "set xlabel 't'\nset ylabel 'P(t)'\n"
           "files = system('ls trajectory_*.csv')\n"
           "plot for [f in files] f skip 1 using 1:2 with lines title f\n";
      break;
    case FigureKind::sigma_p:
      s += "set xlabel 'beta'\nset ylabel 'sigma_P'\n"
           "plot 'point_results.csv' skip 1 using 1:5:6 with yerrorbars title 'sigma_P'\n";
      break;
    case FigureKind::scatter_fit:
      s += "set xlabel 'mean g'\nset ylabel 'sigma_P'\n"
           "a_low = real(system(\"awk -F, '$1==\\\"low\\\"{print $2}' fit.csv\"))\n"
           "b_low = real(system(\"awk -F, '$1==\\\"low\\\"{print $3}' fit.csv\"))\n"
           "a_high = real(system(\"awk -F, '$1==\\\"high\\\"{print $2}' fit.csv\"))\n"
           "b_high = real(system(\"awk -F, '$1==\\\"high\\\"{print $3}' fit.csv\"))\n"
           "plot 'per_run.csv' skip 1 using 4:6 with points title 'runs', \\\n"
           "     [0:0.5] a_low*x + b_low title 'low-regime fit', \\\n"
           "     [0.5:1] a_high*x + b_high title 'high-regime fit'\n";
      break;
    case FigureKind::predictability:
      s += "set xlabel 'R'\nset ylabel 'H'\n"
           "plot 'point_results.csv' skip 1 using 2:7:8 with yerrorbars title 'H'\n";
      break;
    case FigureKind::winning:
      s += "set multiplot layout 1,2\n"
           "set xlabel 'R'\nset ylabel 'P_W'\n"
           "plot 'point_results.csv' skip 1 using 2:9:10 with yerrorbars title 'P_W vs R'\n"
           "set xlabel 'H'\n"
           "plot 'point_results.csv' skip 1 using 7:9 with points title 'P_W vs H'\n"
           "unset multiplot\n";
      break;
  }
  return s;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_results(const std::filesystem::path& dir, std::span<const Table> tables, const std::string& plot,
                   Manifest& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());

  manifest.outputs.clear();
  for (const Table& t : tables) {
    const std::string body = t.to_csv();
    write_file(dir / t.file_name, body);
    manifest.outputs.push_back({t.file_name, sha256_hex(body)});
  }
  write_file(dir / "plot.gp", plot);
  manifest.outputs.push_back({"plot.gp", sha256_hex(plot)});
  write_file(dir / "manifest.json", manifest.to_json());
}

}  // namespace emg::io
