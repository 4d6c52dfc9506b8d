#include "evospec/taper.hpp"

#include <lapacke.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace evospec {

namespace {

constexpr double kPi = std::numbers::pi;

// Absorbs rounding in N*W/pi when W is built as an exact multiple of pi/N.
constexpr double kFloorSlack = 1e-9;

std::string describe(const TaperSpec& s) {
  std::ostringstream os;
  os << "(N=" << s.N << ", W=" << s.W << ", K=" << s.K << ")";
  return os.str();
}

void fix_sign(std::span<double> g, int k) {
  const double center = 0.5 * (static_cast<double>(g.size()) - 1.0);
  double score = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    // Even tapers: positive sum. Odd tapers: positive over the leading half.
    score += (k % 2 == 0) ? g[n] : (center - static_cast<double>(n)) * g[n];
  }
  if (score < 0.0) {
    for (double& v : g) v = -v;
  }
}

}  // namespace

int TaperSpec::max_tapers() const {
  return static_cast<int>(std::floor(N * W / kPi + kFloorSlack));
}

void TaperSpec::validate() const {
  if (N < 3) throw std::invalid_argument("taper length N must be >= 3 " + describe(*this));
  if (N % 2 == 0) throw std::invalid_argument("taper length N must be odd " + describe(*this));
  if (!(W * N >= 2.0 * kPi * (1.0 - kFloorSlack)) || !(W < kPi)) {
    throw std::invalid_argument("resolution W must satisfy 2*pi/N <= W < pi " + describe(*this));
  }
  if (K < 1) throw std::invalid_argument("taper count K must be >= 1 " + describe(*this));
  if (K > max_tapers()) {
    throw std::invalid_argument("taper count K exceeds floor(N*W/pi) = " + std::to_string(max_tapers()) + " " +
                                describe(*this));
  }
}

TaperSet::TaperSet(TaperSpec spec, std::vector<double> tapers, std::vector<double> eigenvalues)
    : spec_(spec), tapers_(std::move(tapers)), eigenvalues_(std::move(eigenvalues)) {
  const auto expected = static_cast<std::size_t>(spec_.N) * static_cast<std::size_t>(spec_.K);
  if (tapers_.size() != expected) throw std::invalid_argument("TaperSet: taper storage does not match K x N");
  if (eigenvalues_.size() != static_cast<std::size_t>(spec_.K)) {
    throw std::invalid_argument("TaperSet: expected one eigenvalue per taper");
  }
  widths_.reserve(static_cast<std::size_t>(spec_.K));
  for (int k = 0; k < spec_.K; ++k) widths_.push_back(taper_width(taper(k)));
}

std::span<const double> TaperSet::taper(int k) const {
  if (k < 0 || k >= spec_.K) throw std::out_of_range("TaperSet: taper index out of range");
  const auto n = static_cast<std::size_t>(spec_.N);
  return {tapers_.data() + static_cast<std::size_t>(k) * n, n};
}

namespace {

// Eigenvectors ranked first..first+count-1 from the top of a symmetric
// tridiagonal matrix, in descending order. Column-major n x count.
std::vector<double> top_eigenvectors(std::vector<double> diag, std::vector<double> off, int first, int count) {
  const auto n = static_cast<lapack_int>(diag.size());
  off.resize(diag.size(), 0.0);
  lapack_int found = 0;
  lapack_int tryrac = 1;
  std::vector<double> values(diag.size());
  std::vector<double> vectors(diag.size() * static_cast<std::size_t>(count));
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0,
                                         n - first - count + 1, n - first, &found, values.data(), vectors.data(), n,
                                         count, support.data(), &tryrac);
  if (info != 0 || found != count) {
    throw std::runtime_error("slepian_tapers: tridiagonal eigensolver failed (info=" + std::to_string(info) + ")");
  }
  // LAPACK returns ascending order.
  std::vector<double> out(vectors.size());
  for (int c = 0; c < count; ++c) {
    std::copy_n(vectors.data() + static_cast<std::size_t>(count - 1 - c) * diag.size(), diag.size(),
                out.data() + static_cast<std::size_t>(c) * diag.size());
  }
  return out;
}

// The tridiagonal matrix with diagonal ((N-1)/2 - n)^2 cos W and off-diagonal
// n (N - n) / 2 commutes with the sinc concentration operator; its leading
// eigenvectors are the Slepian sequences. The matrix is persymmetric, so even
// tapers (symmetric) and odd tapers (antisymmetric) come from two half-size
// problems. Splitting keeps the eigenvalues of each problem well separated.
struct HalfProblem {
  std::vector<double> d, e;
  int first = 0;  // x_j = v[first + j]
};

HalfProblem half_problem(int N, double W, bool even) {
  const double cw = std::cos(W);
  auto d = [&](int n) {
    const double c = 0.5 * (N - 1) - n;
    return c * c * cw;
  };
  auto e = [&](int n) { return 0.5 * n * static_cast<double>(N - n); };  // couples n-1 and n
  const int m = N / 2;
  HalfProblem h;
  if (N % 2 == 1) {
    if (even) {
      h.first = m;
      for (int j = 0; j <= m; ++j) h.d.push_back(d(m + j));
      for (int j = 1; j <= m; ++j) h.e.push_back(e(m + j));
      // Symmetrizing the center row scales the first coupling by sqrt(2).
      if (!h.e.empty()) h.e[0] *= std::sqrt(2.0);
    } else {
      h.first = m + 1;
      for (int j = 1; j <= m; ++j) h.d.push_back(d(m + j));
      for (int j = 2; j <= m; ++j) h.e.push_back(e(m + j));
    }
  } else {
    h.first = m;
    for (int j = 0; j < m; ++j) h.d.push_back(d(m + j));
    h.d[0] += even ? e(m) : -e(m);
    for (int j = 1; j < m; ++j) h.e.push_back(e(m + j));
  }
  return h;
}

// Unfolds half vector x of taper k into v, normalizes and fixes the sign.
void unfold(const HalfProblem& h, const double* x, int k, std::span<double> v) {
  const int N = static_cast<int>(v.size());
  const bool even = k % 2 == 0;
  for (std::size_t j = 0; j < h.d.size(); ++j) {
    double val = x[j];
    if (even && N % 2 == 1 && j == 0) val *= std::sqrt(2.0);
    const int right = h.first + static_cast<int>(j);
    const int left = N - 1 - right;
    v[static_cast<std::size_t>(right)] = val;
    v[static_cast<std::size_t>(left)] = even ? val : -val;
  }
  double norm = 0.0;
  for (double t : v) norm += t * t;
  norm = std::sqrt(norm);
  const double scale = 1.0 / std::sqrt(2.0 * kPi);
  for (double& t : v) t *= scale / norm;
  fix_sign(v, k);
}

void check_slepian_args(int N, double W, int K) {
  if (N < 2 || K < 1 || K > N) throw std::invalid_argument("slepian_tapers: need N >= 2 and 1 <= K <= N");
  if (!(W > 0.0 && W < kPi)) throw std::invalid_argument("slepian_tapers: need 0 < W < pi");
}

}  // namespace

std::vector<double> slepian_tapers(int N, double W, int K) {
  check_slepian_args(N, W, K);
  const HalfProblem even = half_problem(N, W, true);
  const HalfProblem odd = half_problem(N, W, false);
  const int n_even = (K + 1) / 2;
  const int n_odd = K / 2;
  const auto even_vecs = n_even ? top_eigenvectors(even.d, even.e, 0, n_even) : std::vector<double>{};
  const auto odd_vecs = n_odd ? top_eigenvectors(odd.d, odd.e, 0, n_odd) : std::vector<double>{};

  std::vector<double> out(static_cast<std::size_t>(N) * static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    const auto& h = k % 2 == 0 ? even : odd;
    const auto& vecs = k % 2 == 0 ? even_vecs : odd_vecs;
    unfold(h, vecs.data() + static_cast<std::size_t>(k / 2) * h.d.size(), k,
           std::span<double>(out.data() + static_cast<std::size_t>(k) * static_cast<std::size_t>(N),
                             static_cast<std::size_t>(N)));
  }
  return out;
}

std::vector<double> slepian_taper(int N, double W, int k) {
  check_slepian_args(N, W, k + 1);
  const HalfProblem h = half_problem(N, W, k % 2 == 0);
  const auto x = top_eigenvectors(h.d, h.e, k / 2, 1);
  std::vector<double> out(static_cast<std::size_t>(N), 0.0);
  unfold(h, x.data(), k, out);
  return out;
}

double concentration(std::span<const double> v, double W) {
  const std::size_t n = v.size();
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  double acc = (W / kPi) * norm2;
  for (std::size_t d = 1; d < n; ++d) {
    double lagged = 0.0;
    for (std::size_t i = 0; i + d < n; ++i) lagged += v[i] * v[i + d];
    const double dd = static_cast<double>(d);
    acc += 2.0 * std::sin(W * dd) / (kPi * dd) * lagged;
  }
  return acc / norm2;
}

TaperSet compute_dpss(const TaperSpec& spec) {
  spec.validate();
  auto tapers = slepian_tapers(spec.N, spec.W, spec.K);
  std::vector<double> eig;
  eig.reserve(static_cast<std::size_t>(spec.K));
  const auto n = static_cast<std::size_t>(spec.N);
  for (int k = 0; k < spec.K; ++k) {
    eig.push_back(concentration({tapers.data() + static_cast<std::size_t>(k) * n, n}, spec.W));
  }
  return TaperSet(spec, std::move(tapers), std::move(eig));
}

double spectral_window(const TaperSet& ts, double lambda) {
  const int h = ts.half_length();
  const int N = ts.N();
  // e^{-i lambda u} for u = -h..h by rotation from the left end.
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(N));
  const std::complex<double> step = std::polar(1.0, -lambda);
  phase[0] = std::polar(1.0, lambda * h);
  for (int n = 1; n < N; ++n) {
    // Re-anchor periodically to bound accumulated rounding.
    phase[static_cast<std::size_t>(n)] =
        (n % 64 == 0) ? std::polar(1.0, -lambda * (n - h)) : phase[static_cast<std::size_t>(n - 1)] * step;
  }
  double sum = 0.0;
  for (int k = 0; k < ts.K(); ++k) {
    const auto g = ts.taper(k);
    std::complex<double> G = 0.0;
    for (int n = 0; n < N; ++n) G += g[static_cast<std::size_t>(n)] * phase[static_cast<std::size_t>(n)];
    sum += std::norm(G);
  }
  return sum / ts.K();
}

std::vector<double> spectral_window(const TaperSet& ts, std::span<const double> lambdas) {
  std::vector<double> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(spectral_window(ts, l));
  return out;
}

double l1_concentration(const TaperSet& ts) {
  using boost::math::quadrature::gauss_kronrod;
  const double W = ts.W();
  const double ideal = 1.0 / (2.0 * W);
  // rho_K is even in lambda, so integrate over [0, pi] and double. Panels of
  // roughly half an oscillation period keep each Kronrod call well resolved.
  const double panel = kPi / ts.N();
  auto integrate = [&](double a, double b, auto&& f) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      total += gauss_kronrod<double, 31>::integrate(f, a + p * width, a + (p + 1) * width, 12, 1e-10);
    }
    return total;
  };
  const double inside = integrate(0.0, W, [&](double l) { return std::abs(spectral_window(ts, l) - ideal); });
  const double outside = integrate(W, kPi, [&](double l) { return spectral_window(ts, l); });
  return 2.0 * (inside + outside);
}

double taper_width(std::span<const double> g) {
  const double center = 0.5 * (static_cast<double>(g.size()) - 1.0);
  double acc = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) acc += std::abs(static_cast<double>(n) - center) * std::abs(g[n]);
  return acc;
}

double width_Bg(const TaperSet& ts) {
  return *std::max_element(ts.widths().begin(), ts.widths().end());
}

void write_taper_csv(const TaperSet& ts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open taper cache for writing: " + path);
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << ts.N() << ',' << ts.W() << ',' << ts.K() << '\n';
  for (int k = 0; k < ts.K(); ++k) {
    const auto g = ts.taper(k);
    for (std::size_t n = 0; n < g.size(); ++n) out << (n ? "," : "") << g[n];
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing taper cache: " + path);
}

TaperSet read_taper_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open taper cache: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("taper cache is empty: " + path);
  TaperSpec spec;
  {
    std::istringstream hs(line);
    char c1 = 0, c2 = 0;
    if (!(hs >> spec.N >> c1 >> spec.W >> c2 >> spec.K) || c1 != ',' || c2 != ',') {
      throw std::runtime_error("taper cache header must be 'N,W,K': " + path);
    }
  }
  spec.validate();
  std::vector<double> tapers;
  tapers.reserve(static_cast<std::size_t>(spec.N) * static_cast<std::size_t>(spec.K));
  for (int k = 0; k < spec.K; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("taper cache truncated at row " + std::to_string(k + 2));
    std::istringstream rs(line);
    std::string cell;
    int count = 0;
    while (std::getline(rs, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || !std::isfinite(v)) {
        throw std::runtime_error("taper cache row " + std::to_string(k + 2) + ": bad number '" + cell + "'");
      }
      tapers.push_back(v);
      ++count;
    }
    if (count != spec.N) throw std::runtime_error("taper cache row " + std::to_string(k + 2) + " has wrong length");
  }
  std::vector<double> eig;
  const auto n = static_cast<std::size_t>(spec.N);
  for (int k = 0; k < spec.K; ++k) eig.push_back(concentration({tapers.data() + k * n, n}, spec.W));
  return TaperSet(spec, std::move(tapers), std::move(eig));
}

}  // namespace evospec
