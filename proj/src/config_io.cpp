#include "emg/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace emg::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const ConfigEntry& e, std::string_view text) {
  T value{};
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(e.key, "cannot parse '" + std::string(text) + "' as a number", e.location);
  }
  return value;
}

bool parse_bool(const ConfigEntry& e) {
  const std::string_view v = trim(e.value);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(e.key, "expected true or false, got '" + e.value + "'", e.location);
}

std::vector<double> parse_list(const ConfigEntry& e) {
  std::vector<double> out;
  std::string_view rest = e.value;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_number<double>(e, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

using Setter = void (*)(SweepSpec&, const ConfigEntry&);

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"N", [](SweepSpec& s, const ConfigEntry& e) { s.base.N = parse_number<int>(e, e.value); }},
      {"m", [](SweepSpec& s, const ConfigEntry& e) { s.base.m = parse_number<int>(e, e.value); }},
      {"D", [](SweepSpec& s, const ConfigEntry& e) { s.base.D = parse_number<double>(e, e.value); }},
      {"R", [](SweepSpec& s, const ConfigEntry& e) { s.base.R = parse_number<double>(e, e.value); }},
      {"beta", [](SweepSpec& s, const ConfigEntry& e) { s.base.beta = parse_number<double>(e, e.value); }},
      {"epsilon", [](SweepSpec& s, const ConfigEntry& e) { s.base.epsilon = parse_number<double>(e, e.value); }},
      {"relax_steps", [](SweepSpec& s, const ConfigEntry& e) { s.base.relax_steps = parse_number<std::int64_t>(e, e.value); }},
      {"measure_steps", [](SweepSpec& s, const ConfigEntry& e) { s.base.measure_steps = parse_number<std::int64_t>(e, e.value); }},
      {"seed", [](SweepSpec& s, const ConfigEntry& e) { s.base.seed = parse_number<std::uint64_t>(e, e.value); }},
      {"initial_price", [](SweepSpec& s, const ConfigEntry& e) { s.base.initial_price = parse_number<double>(e, e.value); }},
      {"random_initial_holdings", [](SweepSpec& s, const ConfigEntry& e) { s.base.random_initial_holdings = parse_bool(e); }},
      {"beta_values", [](SweepSpec& s, const ConfigEntry& e) { s.beta_values = parse_list(e); }},
      {"r_values", [](SweepSpec& s, const ConfigEntry& e) { s.r_values = parse_list(e); }},
      {"runs_per_point", [](SweepSpec& s, const ConfigEntry& e) { s.runs_per_point = parse_number<int>(e, e.value); }},
      {"base_seed", [](SweepSpec& s, const ConfigEntry& e) { s.base_seed = parse_number<std::uint64_t>(e, e.value); }},
  };
  return table;
}

}  // namespace

std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& source) {
  std::vector<ConfigEntry> entries;
  std::map<std::string, std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string location = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), "expected 'key = value'", location);
    }
    ConfigEntry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), location};
    if (e.key.empty()) throw ConfigError("", "missing key before '='", location);
    if (e.value.empty()) throw ConfigError(e.key, "missing value", location);
    if (const auto it = seen.find(e.key); it != seen.end()) {
      throw ConfigError(e.key, "duplicate key (first set at " + it->second + ")", location);
    }
    seen.emplace(e.key, location);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open file", path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

ConfigEntry parse_override(std::string_view assignment, const std::string& location) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError(std::string(assignment), "expected key=value", location);
  ConfigEntry e{std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))), location};
  if (e.key.empty()) throw ConfigError("", "missing key before '='", location);
  if (e.value.empty()) throw ConfigError(e.key, "missing value", location);
  return e;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

std::set<std::string> apply_entries(SweepSpec& spec, std::span<const ConfigEntry> entries) {
  std::set<std::string> assigned;
  for (const ConfigEntry& e : entries) {
    const auto it = setters().find(e.key);
    if (it == setters().end()) throw ConfigError(e.key, "unknown key", e.location);
    it->second(spec, e);
    assigned.insert(e.key);
  }
  return assigned;
}

namespace {

std::set<std::string> apply_layers(SweepSpec& spec, const std::filesystem::path* path, std::span<const ConfigEntry> overrides) {
  std::set<std::string> assigned;
  if (path) assigned.merge(apply_entries(spec, read_config_file(*path)));
  assigned.merge(apply_entries(spec, overrides));
  return assigned;
}

}  // namespace

SweepSpec parse_config(const std::filesystem::path* path, std::span<const ConfigEntry> overrides) {
  SweepSpec spec;
  const std::set<std::string> assigned = apply_layers(spec, path, overrides);
  if (!assigned.contains("beta_values")) spec.beta_values = {spec.base.beta};
  if (!assigned.contains("r_values")) spec.r_values = {spec.base.R};
  spec.validate();
  return spec;
}

SweepSpec layer_config(SweepSpec spec, const std::filesystem::path* path, std::span<const ConfigEntry> overrides) {
  apply_layers(spec, path, overrides);
  spec.validate();
  return spec;
}

std::string format_config(const SweepSpec& spec) {
  const RunConfig& c = spec.base;
  std::ostringstream out;
  out << "N = " << c.N << '\n'
      << "m = " << c.m << '\n'
      << "D = " << format_double(c.D) << '\n'
      << "R = " << format_double(c.R) << '\n'
      << "beta = " << format_double(c.beta) << '\n'
      << "epsilon = " << format_double(c.epsilon) << '\n'
      << "relax_steps = " << c.relax_steps << '\n'
      << "measure_steps = " << c.measure_steps << '\n'
      << "seed = " << c.seed << '\n'
      << "initial_price = " << format_double(c.initial_price) << '\n'
      << "random_initial_holdings = " << (c.random_initial_holdings ? "true" : "false") << '\n'
      << "beta_values = " << join(spec.beta_values) << '\n'
      << "r_values = " << join(spec.r_values) << '\n'
      << "runs_per_point = " << spec.runs_per_point << '\n'
      << "base_seed = " << spec.base_seed << '\n';
  return out.str();
}

}  // namespace emg::io
