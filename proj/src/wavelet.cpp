#include "rdg/wavelet.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <sstream>

#include "rdg/parallel.hpp"

namespace rdg {

namespace {

double bump_hat(double w) {
  w = std::abs(w);
  if (w <= 0.5 || w >= 2.5) return 0.0;
  const double u = (w - 1.5) * (w - 1.5);
  return std::exp(-1.0 / (1.0 - u));
}

// (d/dx)^k exp(-x^2/2) = (-1)^k He_k(x) exp(-x^2/2), probabilists' Hermite
double hermite_he(int k, double x) {
  double h0 = 1.0;
  if (k == 0) return h0;
  double h1 = x;
  for (int i = 1; i < k; ++i) {
    const double h2 = x * h1 - i * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

struct BumpTables {
  std::shared_ptr<const std::vector<double>> table;
  double radius;
  double step;
};

// Space-domain table of the Fourier bump via a long inverse FFT. Period 8192
// resolves the bump's edge layers; only |x| <= radius is retained (the tail
// beyond is ~1e-13 of the peak).
BumpTables build_bump_table() {
  const double radius = 256.0;
  const double step = 1.0 / 128.0;
  const size_t nfft = 1 << 20;  // period nfft*step = 8192
  const double period = nfft * step;
  const double dw = kTwoPi / period;
  std::vector<complexd> buf(nfft, complexd{});
  const size_t kmax = static_cast<size_t>(std::ceil(2.5 / dw)) + 2;
  for (size_t k = 1; k <= kmax && k < nfft / 2; ++k) {
    const double val = bump_hat(k * dw);
    buf[k] = complexd(val, 0.0);
    buf[nfft - k] = complexd(val, 0.0);
  }
  fft_pow2(buf, true);  // psi(j*step) = (1/step) * IDFT_j[psihat]
  const int nh = static_cast<int>(radius / step);
  auto tab = std::make_shared<std::vector<double>>(2 * nh + 1);
  for (int j = -nh; j <= nh; ++j) {
    const size_t idx = static_cast<size_t>((j + static_cast<int>(nfft)) % nfft);
    (*tab)[j + nh] = buf[idx].real() / step;
  }
  return {tab, radius, step};
}

const BumpTables& bump_tables() {
  static const BumpTables t = build_bump_table();
  return t;
}

}  // namespace

void WaveletProfile::build_tables() {
  if (kind_ == WaveletKind::FourierBump) {
    const BumpTables& bt = bump_tables();
    table_ = bt.table;
    table_radius_ = bt.radius;
    table_step_ = bt.step;
  } else if (kind_ == WaveletKind::GaussDerivative) {
    table_radius_ = 16.0 + gauss_order_;
    table_step_ = 1.0 / 512.0;
    const int nh = static_cast<int>(table_radius_ / table_step_);
    auto tab = std::make_shared<std::vector<double>>(2 * nh + 1);
    for (int j = -nh; j <= nh; ++j) (*tab)[j + nh] = eval_space_exact(j * table_step_);
    table_ = tab;
  } else {
    // custom Fourier profile: direct cosine transform on a fine frequency grid
    table_radius_ = 96.0;
    table_step_ = 1.0 / 128.0;
    const int nh = static_cast<int>(table_radius_ / table_step_);
    auto tab = std::make_shared<std::vector<double>>(2 * nh + 1);
    for (int j = -nh; j <= nh; ++j) (*tab)[j + nh] = eval_space_exact(j * table_step_);
    table_ = tab;
  }
  // cumulative |psi| for boundary-domination flags
  const auto& tab = *table_;
  auto cdf = std::make_shared<std::vector<double>>(tab.size(), 0.0);
  KahanSum acc;
  for (size_t i = 1; i < tab.size(); ++i) {
    acc.add(0.5 * (std::abs(tab[i - 1]) + std::abs(tab[i])) * table_step_);
    (*cdf)[i] = acc.get();
  }
  const double total = acc.get();
  if (total > 0.0)
    for (auto& c : *cdf) c /= total;
  abs_cdf_ = cdf;
  double dc = 0.0;
  for (size_t i = 0; i < tab.size(); ++i) {
    const double x = -table_radius_ + i * table_step_;
    const double w = (1.0 + std::abs(x));
    dc = std::max(dc, std::abs(tab[i]) * w * w * w * w);
  }
  decay_c_ = dc;
}

WaveletProfile WaveletProfile::fourier_bump() {
  WaveletProfile p;
  p.name_ = "bump";
  p.kind_ = WaveletKind::FourierBump;
  p.lizorkin_order_ = -1;
  p.fourier_support_min_ = 0.5;
  p.fourier_support_max_ = 2.5;
  p.build_tables();
  return p;
}

WaveletProfile WaveletProfile::gauss_derivative(int k) {
  if (k < 1) throw InvalidInputError("gauss_derivative: order must be >= 1");
  if (k > 12) throw InvalidInputError("gauss_derivative: order too large (max 12)");
  WaveletProfile p;
  p.name_ = "gauss:" + std::to_string(k);
  p.kind_ = WaveletKind::GaussDerivative;
  p.gauss_order_ = k;
  p.lizorkin_order_ = k;
  p.fourier_support_min_ = 0.0;
  p.fourier_support_max_ = 0.0;
  p.build_tables();
  return p;
}

WaveletProfile WaveletProfile::from_fourier(const std::string& name,
                                            const std::function<double(double)>& fhat,
                                            double support_min, double support_max,
                                            int lizorkin_order) {
  WaveletProfile p;
  p.name_ = name;
  p.kind_ = WaveletKind::Custom;
  p.custom_fhat_ = fhat;
  p.lizorkin_order_ = lizorkin_order;
  p.fourier_support_min_ = support_min;
  p.fourier_support_max_ = support_max;
  p.build_tables();
  return p;
}

complexd WaveletProfile::eval_fourier(double w) const {
  switch (kind_) {
    case WaveletKind::FourierBump:
      return complexd(bump_hat(w), 0.0);
    case WaveletKind::GaussDerivative: {
      // (iw)^k sqrt(2 pi) exp(-w^2/2)
      const double mag = std::sqrt(kTwoPi) * std::exp(-0.5 * w * w);
      complexd iw(0.0, w);
      complexd p(1.0, 0.0);
      for (int i = 0; i < gauss_order_; ++i) p *= iw;
      return p * mag;
    }
    default:
      return complexd(custom_fhat_(w), 0.0);
  }
}

double WaveletProfile::eval_space_exact(double x) const {
  if (kind_ == WaveletKind::GaussDerivative) {
    const double sign = (gauss_order_ % 2 == 0) ? 1.0 : -1.0;
    return sign * hermite_he(gauss_order_, x) * std::exp(-0.5 * x * x);
  }
  // psi(x) = (1/pi) int fhat(w) cos(w x) dw over the (compact) support
  const double lo = fourier_support_min_;
  const double hi = fourier_support_max_ > 0 ? fourier_support_max_ : 16.0;
  const int n = 4096;
  const double h = (hi - lo) / n;
  KahanSum acc;
  for (int i = 0; i <= n; ++i) {
    const double w = lo + i * h;
    const double fh =
        (kind_ == WaveletKind::FourierBump) ? bump_hat(w) : custom_fhat_(w);
    const double term = fh * std::cos(w * x);
    acc.add((i == 0 || i == n) ? 0.5 * term : term);
  }
  return acc.get() * h / kPi;
}

double WaveletProfile::eval_space(double x) const {
  const auto& tab = *table_;
  const double u = (x + table_radius_) / table_step_;
  const double fl = std::floor(u);
  const int i1 = static_cast<int>(fl);
  // outermost cells hold values at the 1e-13 level; treat them as 0
  if (i1 < 1 || i1 + 2 >= static_cast<int>(tab.size())) return 0.0;
  double w[4];
  catmull_rom_weights(u - fl, w);
  return w[0] * tab[i1 - 1] + w[1] * tab[i1] + w[2] * tab[i1 + 1] + w[3] * tab[i1 + 2];
}

double WaveletProfile::abs_mass_below(double x) const {
  const auto& cdf = *abs_cdf_;
  const double u = (x + table_radius_) / table_step_;
  if (u <= 0.0) return 0.0;
  if (u >= static_cast<double>(cdf.size() - 1)) return 1.0;
  const int i = static_cast<int>(u);
  const double t = u - i;
  return cdf[i] * (1.0 - t) + cdf[i + 1] * t;
}

WaveletProfile make_wavelet(const std::string& spec) {
  if (spec == "bump" || spec == "fourier_bump") return WaveletProfile::fourier_bump();
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  if (head == "gauss" || head == "gauss_derivative") {
    if (colon == std::string::npos)
      throw InvalidInputError("make_wavelet: gauss needs an order, e.g. gauss:2");
    const int k = std::stoi(spec.substr(colon + 1));
    return WaveletProfile::gauss_derivative(k);
  }
  throw InvalidInputError("make_wavelet: unknown kind '" + spec + "'");
}

namespace {

// lattice alignment of gb against the signal grid; returns the integer shift s
// with x_i - b_k = h*(i - k + s)
int lattice_shift(const Grid1D& gx, const Grid1D& gb) {
  const double h = gx.step;
  if (std::abs(gb.step - h) > 1e-12 * h)
    throw InvalidInputError("cwt: offset grid step must equal the signal step");
  const double s = (gx.origin - gb.origin) / h;
  const double r = std::round(s);
  if (std::abs(s - r) > 1e-9)
    throw InvalidInputError("cwt: offset grid must lie on the signal lattice");
  return static_cast<int>(r);
}

}  // namespace

WaveletCoefficients1D cwt(std::span<const double> signal, const Grid1D& gx,
                          const WaveletProfile& psi, const Grid1D& gb, const LogGrid& ga,
                          CwtMethod method) {
  if (static_cast<int>(signal.size()) != gx.count)
    throw InvalidInputError("cwt: signal length does not match grid");
  for (double v : signal)
    if (!std::isfinite(v)) throw NumericError("cwt: non-finite signal sample");
  const int nx = gx.count, nb = gb.count, na = ga.count;
  const int s = lattice_shift(gx, gb);
  const double h = gx.step;

  WaveletCoefficients1D out(gb, ga);

  // weighted signal (trapezoid over the x window)
  std::vector<double> g(nx);
  for (int i = 0; i < nx; ++i) g[i] = signal[i] * trap_weight(i, nx, h);

  const int m_len = nx + nb - 1;  // kernel lattice offsets m = i - k + s, shifted by C = nb-1
  const double xmin = gx.origin, xmax = gx.back();

  parallel_for(na, [&](int j) {
    const double a = ga.node(j);
    const double inv_a = 1.0 / a;
    std::vector<double> ker(m_len);
    for (int q = 0; q < m_len; ++q) {
      const int m = q - (nb - 1) + s;
      ker[q] = inv_a * psi.eval_space(m * h * inv_a);
    }
    if (method == CwtMethod::Direct) {
      for (int k = 0; k < nb; ++k) {
        KahanSum acc;
        const int base = (nb - 1) - k;
        for (int i = 0; i < nx; ++i) acc.add(g[i] * ker[i + base]);
        out.at(j, k) = complexd(acc.get(), 0.0);
      }
    } else {
      // cross-correlation c[k] = sum_i g[i] ker[i + C - k] via zero-padded FFT
      const size_t L = next_pow2(static_cast<size_t>(m_len + nx));
      std::vector<complexd> A(L, complexd{}), B(L, complexd{});
      for (int i = 0; i < nx; ++i) A[i] = complexd(g[i], 0.0);
      for (int q = 0; q < m_len; ++q) B[q] = complexd(ker[q], 0.0);
      fft_pow2(A, false);
      fft_pow2(B, false);
      for (size_t t = 0; t < L; ++t) A[t] = std::conj(A[t]) * B[t];
      fft_pow2(A, true);
      // corr[m] = sum_i g[i] ker[i+m]; real for real inputs up to roundoff
      const int C = nb - 1;
      for (int k = 0; k < nb; ++k) {
        const size_t idx = static_cast<size_t>(C - k);
        out.at(j, k) = A[idx];
      }
    }
    // boundary-domination flags: |psi| mass outside the signal window
    for (int k = 0; k < nb; ++k) {
      const double b = gb.node(k);
      const double lo = (xmin - b) * inv_a, hi = (xmax - b) * inv_a;
      const double outside = psi.abs_mass_below(lo) + (1.0 - psi.abs_mass_below(hi));
      if (outside > 1e-6) out.flags[static_cast<size_t>(j) * nb + k] = 1;
    }
  });
  return out;
}

complexd cwt_at(std::span<const double> signal, const Grid1D& gx, const WaveletProfile& psi,
                double b, double a) {
  if (!(a > 0.0)) throw InvalidInputError("cwt_at: scale must be positive");
  const double inv_a = 1.0 / a;
  KahanSum acc;
  for (int i = 0; i < gx.count; ++i) {
    const double arg = (gx.node(i) - b) * inv_a;
    acc.add(signal[i] * psi.eval_space(arg) * trap_weight(i, gx.count, gx.step));
  }
  return complexd(acc.get() * inv_a, 0.0);
}

std::vector<complexd> wavelet_synthesis(const WaveletCoefficients1D& phi,
                                        const WaveletProfile& psi, const Grid1D& target) {
  const int nb = phi.grid_b.count, na = phi.grid_a.count;
  for (const auto& c : phi.v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericError("wavelet_synthesis: non-finite coefficient");
  std::vector<complexd> out(target.count, complexd{});
  parallel_for(target.count, [&](int ip) {
    const double p = target.node(ip);
    complexd acc{};
    for (int j = 0; j < na; ++j) {
      const double a = phi.grid_a.node(j);
      const double wl = phi.grid_a.log_weight(j);  // da/a
      const double inv_a = 1.0 / a;
      complexd row{};
      for (int k = 0; k < nb; ++k) {
        const double kv = psi.eval_space((p - phi.grid_b.node(k)) * inv_a);
        if (kv != 0.0) row += phi.at(j, k) * (kv * trap_weight(k, nb, phi.grid_b.step));
      }
      acc += row * (wl * inv_a);
    }
    out[ip] = acc;
  });
  return out;
}

namespace {

// effective vanishing order near w=0: -1 means psihat vanishes identically on
// a neighborhood of 0
int order_near_zero(const WaveletProfile& p) {
  if (p.is_lizorkin() && p.eval_fourier(1e-9) == complexd{}) return -1;
  return p.lizorkin_order();
}

struct HalfLineIntegral {
  complexd value;
  double tail_bound;
};

// int over +-(wmin, wmax) of conj(psihat) etahat |w|^-n, trapezoid in log w
HalfLineIntegral k_quadrature(const WaveletProfile& psi, const WaveletProfile& eta, int n,
                              double wmin, double wmax, int nodes, double sign) {
  const double tau0 = std::log(wmin), tau1 = std::log(wmax);
  const double dt = (tau1 - tau0) / (nodes - 1);
  complexd acc{};
  for (int i = 0; i < nodes; ++i) {
    const double w = std::exp(tau0 + i * dt);
    // dw/|w|^n = e^{(1-n) tau} dtau
    const double jac = std::pow(w, 1 - n);
    complexd term = std::conj(psi.eval_fourier(sign * w)) * eta.eval_fourier(sign * w) * jac;
    if (i == 0 || i == nodes - 1) term *= 0.5;
    acc += term;
  }
  return {acc * dt, 0.0};
}

}  // namespace

ReconstructionConstant reconstruction_constant(const WaveletProfile& psi,
                                               const WaveletProfile& eta, int n, int refine) {
  if (n < 1) throw InvalidInputError("reconstruction_constant: n must be >= 1");
  const int k1 = order_near_zero(psi), k2 = order_near_zero(eta);
  double inner_bound = 0.0;
  const double wmin = 1e-6;
  if (k1 >= 0 && k2 >= 0) {
    const int ksum = k1 + k2;
    if (ksum < n)
      throw NumericError("reconstruction_constant: K undefined (pair not integrable near 0: "
                         "vanishing orders " +
                         std::to_string(k1) + "+" + std::to_string(k2) + " < n=" +
                         std::to_string(n) + ")");
    // |psihat| <= sqrt(2 pi) w^k near 0 for the Gaussian-derivative family
    const double c = kTwoPi;  // sqrt(2 pi)^2
    inner_bound = 2.0 * c * std::pow(wmin, ksum - n + 1) / (ksum - n + 1);
  }
  double wmax = 16.0;
  if (psi.is_lizorkin() && eta.is_lizorkin()) {
    // compact supports: integrate just past the smaller one
    wmax = 16.0;
  }
  const int nodes = 4096 * std::max(1, refine) + 1;
  const auto ip = k_quadrature(psi, eta, n, wmin, wmax, nodes, +1.0);
  const auto im = k_quadrature(psi, eta, n, wmin, wmax, nodes, -1.0);
  complexd K = (ip.value + im.value) * std::pow(kTwoPi, n - 1);
  const double outer_bound = 4.0 * kTwoPi * std::exp(-wmax * wmax / 2.0);
  ReconstructionConstant rc{K, inner_bound + outer_bound};
  if (std::abs(K) < 1e-10)
    throw DegeneratePairError("reconstruction_constant: degenerate pair (|K| = " +
                              std::to_string(std::abs(K)) + " < 1e-10)");
  return rc;
}

complexd calderon_constant(const WaveletProfile& psi, const WaveletProfile& eta) {
  const int k1 = order_near_zero(psi), k2 = order_near_zero(eta);
  if (k1 >= 0 && k2 >= 0 && k1 + k2 < 1)
    throw NumericError("calderon_constant: pair not integrable near 0");
  const auto ip = k_quadrature(psi, eta, 1, 1e-8, 16.0, 200001, +1.0);
  const auto im = k_quadrature(psi, eta, 1, 1e-8, 16.0, 200001, -1.0);
  const complexd cp = ip.value, cm = im.value;
  const double scale = std::max(std::abs(cp), 1e-30);
  if (std::abs(cp - cm) > 1e-8 * scale)
    throw NumericError("calderon_constant: half-line constants disagree (parity-mixed pair); "
                       "the one-sided identity does not hold");
  if (std::abs(cp) < 1e-10)
    throw DegeneratePairError("calderon_constant: degenerate pair");
  return cp;
}

MomentReport vanishing_moments_check(const WaveletProfile& psi, int max_order, double tol) {
  if (max_order < 0) throw InvalidInputError("vanishing_moments_check: max_order must be >= 0");
  MomentReport rep;
  rep.max_order = max_order;
  // window and step chosen per family: the integrand x^m psi must both decay
  // into the window and stay clear of eval roundoff amplified by x^m
  double W, h;
  if (psi.kind() == WaveletKind::GaussDerivative) {
    W = 24.0;
    h = 1.0 / 64.0;
  } else {
    W = std::min(480.0, psi.support_radius() * 1.875);
    h = 1.0;  // alias-free for band-limited psi (bandwidth < 2 pi / h)
  }
  const int nn = static_cast<int>(W / h);
  std::vector<double> pv(2 * nn + 1);
  for (int i = -nn; i <= nn; ++i) pv[i + nn] = psi.eval_space_exact(i * h);
  rep.normalized.resize(max_order + 1);
  for (int m = 0; m <= max_order; ++m) {
    KahanSum num, den;
    for (int i = -nn; i <= nn; ++i) {
      const double x = i * h;
      const double xm = (m == 0) ? 1.0 : std::pow(x, m);
      const double w = (i == -nn || i == nn) ? 0.5 : 1.0;
      num.add(w * xm * pv[i + nn]);
      den.add(w * std::abs(xm) * std::abs(pv[i + nn]));
    }
    const double d = std::max(den.get() * h, 1e-300);
    rep.normalized[m] = std::abs(num.get() * h) / d;
  }
  rep.worst = 0.0;
  rep.first_failure = -1;
  for (int m = 0; m <= max_order; ++m) {
    rep.worst = std::max(rep.worst, rep.normalized[m]);
    if (rep.first_failure < 0 && rep.normalized[m] > tol) rep.first_failure = m;
  }
  rep.pass = rep.first_failure < 0;
  return rep;
}

}  // namespace rdg
