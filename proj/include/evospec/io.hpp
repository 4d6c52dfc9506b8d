#pragma once

#include <optional>
#include <string>

#include "evospec/estimator.hpp"
#include "evospec/montecarlo.hpp"
#include "evospec/simulate.hpp"
#include "evospec/stattest.hpp"

namespace evospec {

/// Reads one value per line, or "index,value" pairs, with an optional single
/// header line. Throws std::runtime_error naming the offending line.
TimeSeries load_csv(const std::string& path);
TimeSeries parse_csv(const std::string& text, const std::string& source = "<memory>");

/// d_t = ln x_t - ln x_{t-1}. Throws std::domain_error naming the first
/// non-positive index.
TimeSeries log_diff(const TimeSeries& x);

/// One value per line, full precision.
std::string series_csv(const TimeSeries& x);

/// TestReport JSON documents. Numbers are written with round-trip precision.
std::string report_json(const PsrReport& rep, const TFGrid& grid);
std::string report_json(const RsReport& rep, const TFGrid& grid);
/// Both reports as a JSON array (PSR first).
std::string report_json(const PsrReport& psr, const RsReport& rs, const TFGrid& grid);

std::string mc_summary_json(const McSummary& s);

/// Writes to a sibling temporary file and renames it over path, so a failed
/// run never leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace evospec
