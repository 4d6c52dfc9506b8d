#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace evospec {

/// Length N (odd), angular half-bandwidth W and taper count K of a Slepian
/// taper family.
struct TaperSpec {
  int N = 0;
  double W = 0.0;
  int K = 0;

  /// Largest taper count the resolution admits, floor(N W / pi).
  int max_tapers() const;
  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

/// K discrete prolate spheroidal sequences, centered on lags
/// u = -(N-1)/2 .. (N-1)/2 and scaled so that 2*pi*sum_u g_k(u)^2 = 1.
///
/// Immutable once built; safe to share between threads.
class TaperSet {
 public:
  TaperSet(TaperSpec spec, std::vector<double> tapers, std::vector<double> eigenvalues);

  const TaperSpec& spec() const { return spec_; }
  int N() const { return spec_.N; }
  int K() const { return spec_.K; }
  double W() const { return spec_.W; }
  int half_length() const { return (spec_.N - 1) / 2; }

  /// Taper k indexed by position n = u + (N-1)/2.
  std::span<const double> taper(int k) const;
  double at(int k, int lag) const { return taper(k)[static_cast<std::size_t>(lag + half_length())]; }

  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// Per-taper widths sum_u |u| |g_k(u)|.
  const std::vector<double>& widths() const { return widths_; }

 private:
  TaperSpec spec_;
  std::vector<double> tapers_;  // K x N, row-major
  std::vector<double> eigenvalues_;
  std::vector<double> widths_;
};

/// Top-K Slepian tapers for any length N >= 2 (odd or even), normalized and
/// sign-fixed but without eigenvalues. Row-major K x N. Used by sweeps that
/// only need taper shapes.
std::vector<double> slepian_tapers(int N, double W, int K);

/// Taper k alone (0-based), identical to row k of slepian_tapers.
std::vector<double> slepian_taper(int N, double W, int k);

/// Concentration eigenvalue v' S v of a unit-norm sequence v against the sinc
/// kernel S[u,u'] = sin(W(u-u')) / (pi (u-u')), S[u,u] = W / pi.
double concentration(std::span<const double> v, double W);

/// Builds the TaperSet for a validated spec.
TaperSet compute_dpss(const TaperSpec& spec);

/// Averaged spectral window rho_K(lambda) = (1/K) sum_k |G_k(lambda)|^2.
std::vector<double> spectral_window(const TaperSet& ts, std::span<const double> lambdas);
double spectral_window(const TaperSet& ts, double lambda);

/// L1 distance between rho_K and the ideal band-pass (1/2W) 1_[-W,W] on
/// [-pi, pi], by adaptive Gauss-Kronrod quadrature.
double l1_concentration(const TaperSet& ts);

/// sum_u |u| |g(u)| for a taper stored on centered lags (any length; for even
/// lengths the lags are half-integers).
double taper_width(std::span<const double> g);

/// B_g^(K): the largest width over the tapers of the set.
double width_Bg(const TaperSet& ts);

/// Taper cache: header line "N,W,K" with the values, then K rows of N
/// numbers. Written with enough digits to round-trip exactly.
void write_taper_csv(const TaperSet& ts, const std::string& path);
TaperSet read_taper_csv(const std::string& path);

}  // namespace evospec
