#include "evospec/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include "json.hpp"
#include <sstream>
#include <stdexcept>
#include <vector>

namespace evospec {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

json grid_json(const TFGrid& g) {
  return json{{"I", g.I()}, {"J", g.J()}, {"N", g.N}, {"K", g.K}, {"B", g.spacing}, {"buffer", g.buffer}};
}

json psr_json(const PsrReport& r, const TFGrid& grid) {
  json j;
  j["test"] = "psr";
  j["statistics"] = {{"S_T", r.S_T},
                     {"S_F", r.S_F},
                     {"S_IR", r.S_IR},
                     {"sigma2", r.sigma2},
                     {"S_T_over_sigma2", r.S_T / r.sigma2},
                     {"S_F_over_sigma2", r.S_F / r.sigma2},
                     {"S_IR_over_sigma2", r.S_IR / r.sigma2}};
  j["df"] = {{"S_T", r.df_T}, {"S_F", r.df_F}, {"S_IR", r.df_IR}};
  j["thresholds"] = {{"S_T", r.threshold_T}, {"S_F", r.threshold_F}, {"S_IR", r.threshold_IR}};
  j["alpha"] = r.alpha;
  j["decision"] = to_string(r.decision);
  j["um_flag"] = r.um_flag;
  j["grid"] = grid_json(grid);
  return j;
}

json rs_json(const RsReport& r, const TFGrid& grid) {
  json j;
  j["test"] = "rs";
  j["statistics"] = {{"t_R", r.t_R}, {"SS_R", r.SS_R}, {"row_mean_ranks", r.row_mean_ranks}};
  j["df"] = {{"t_R", r.df}};
  j["thresholds"] = {{"t_R", r.threshold}};
  j["alpha"] = r.alpha;
  j["decision"] = to_string(r.decision);
  j["grid"] = grid_json(grid);
  return j;
}

}  // namespace

TimeSeries parse_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  bool seen_data = false;
  TimeSeries out;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() > 2) {
      throw std::runtime_error(source + ": line " + std::to_string(lineno) + ": expected 1 or 2 columns, found " +
                               std::to_string(cells.size()));
    }
    std::vector<std::optional<double>> parsed;
    for (const auto& c : cells) parsed.push_back(parse_number(c));
    const bool numeric = std::all_of(parsed.begin(), parsed.end(), [](const auto& v) { return v.has_value(); });
    if (!numeric) {
      if (!seen_data && lineno == 1) continue;  // header
      std::size_t bad = 0;
      while (parsed[bad]) ++bad;
      throw std::runtime_error(source + ": line " + std::to_string(lineno) + ": cannot parse '" +
                               trim(cells[bad]) + "' as a number");
    }
    if (seen_data && cells.size() != columns) {
      throw std::runtime_error(source + ": line " + std::to_string(lineno) + ": column count changed from " +
                               std::to_string(columns) + " to " + std::to_string(cells.size()));
    }
    columns = cells.size();
    seen_data = true;
    const double v = *parsed.back();
    if (!std::isfinite(v)) {
      throw std::runtime_error(source + ": line " + std::to_string(lineno) + ": value is not finite");
    }
    out.values.push_back(v);
  }
  if (out.values.empty()) throw std::runtime_error(source + ": no data values found");
  out.meta = "loaded from " + source;
  return out;
}

TimeSeries load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

TimeSeries log_diff(const TimeSeries& x) {
  if (x.size() < 2) throw std::domain_error("log_diff: need at least 2 values");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x.values[i] > 0.0)) {
      throw std::domain_error("log_diff: value at index " + std::to_string(i) + " is not strictly positive");
    }
  }
  TimeSeries out;
  out.origin = x.origin + 1;
  out.meta = x.meta.empty() ? "log first difference" : x.meta + "; log first difference";
  out.values.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) out.values.push_back(std::log(x.values[i]) - std::log(x.values[i - 1]));
  return out;
}

std::string series_csv(const TimeSeries& x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (double v : x.values) os << v << '\n';
  return os.str();
}

std::string report_json(const PsrReport& rep, const TFGrid& grid) { return psr_json(rep, grid).dump(2) + "\n"; }

std::string report_json(const RsReport& rep, const TFGrid& grid) { return rs_json(rep, grid).dump(2) + "\n"; }

std::string report_json(const PsrReport& psr, const RsReport& rs, const TFGrid& grid) {
  return json::array({psr_json(psr, grid), rs_json(rs, grid)}).dump(2) + "\n";
}

std::string mc_summary_json(const McSummary& s) {
  json j;
  j["model"] = s.model;
  j["M"] = s.M;
  j["T"] = s.T;
  j["alpha"] = s.alpha;
  j["seed"] = s.seed;
  j["included"] = s.included;
  j["exclusions"] = s.exclusions;
  if (!s.first_exclusion.empty()) j["first_exclusion"] = s.first_exclusion;
  j["rejections"] = {{"psr", s.psr_rejections}, {"rs", s.rs_rejections}};
  j["empirical_rate"] = {{"psr", s.psr_rate}, {"rs", s.rs_rate}};
  j["ci95"] = {{"psr", {s.psr_ci.lo, s.psr_ci.hi}}, {"rs", {s.rs_ci.lo, s.rs_ci.hi}}};
  j["grid"] = grid_json(s.grid);
  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("failed writing output file: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace evospec
