#pragma once

#include <string>
#include <vector>

#include "evospec/estimator.hpp"

namespace evospec {

/// Variance-stabilized log spectra W_ij = ln f(t_i, w_j) - psi(K) + ln K,
/// approximately N(0, psi'(K)) for K >= 5.
struct LogSpectraTable {
  int I = 0;
  int J = 0;
  int K = 0;
  double sigma2 = 0.0;
  std::vector<double> W;  // I x J, row-major
  std::vector<std::string> warnings;

  double at(int i, int j) const { return W[static_cast<std::size_t>(i * J + j)]; }

  /// Table from raw entries; sigma2 is set to trigamma(K).
  static LogSpectraTable from_values(int I, int J, int K, std::vector<double> values);
};

LogSpectraTable log_table(const SpectralEstimate& est);

enum class Decision { stationary, non_stationary };
const char* to_string(Decision d);

struct PsrReport {
  double S_T = 0.0;
  double S_F = 0.0;
  double S_IR = 0.0;
  double sigma2 = 0.0;
  int df_T = 0;
  int df_F = 0;
  int df_IR = 0;
  double alpha = 0.05;
  double threshold_T = 0.0;
  double threshold_F = 0.0;
  double threshold_IR = 0.0;
  /// Set when the interaction test was not significant and the between-times
  /// stage ran.
  bool um_flag = false;
  Decision decision = Decision::stationary;
};

/// Two-way ANOVA test: the interaction/residual stage first, then between
/// times. S_F is reported but never gates the decision.
PsrReport psr_test(const LogSpectraTable& table, double alpha);

struct RsReport {
  double t_R = 0.0;
  double SS_R = 0.0;
  std::vector<double> row_mean_ranks;
  int df = 0;
  double alpha = 0.05;
  double threshold = 0.0;
  Decision decision = Decision::stationary;
};

/// Mid-ranks (1 = smallest, ties share their mean rank) of each column
/// across rows. Same layout as the table.
std::vector<double> column_midranks(const LogSpectraTable& table);

/// Friedman-type rank test with ranking inside each frequency column.
RsReport rs_test(const LogSpectraTable& table, double alpha);

}  // namespace evospec
