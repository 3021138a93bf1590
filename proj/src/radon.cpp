#include "rdg/radon.hpp"

#include <algorithm>

#include "rdg/parallel.hpp"

namespace rdg {

double boundary_decay_ratio(const Field2D& f) {
  double peak = 0.0;
  for (double x : f.v) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (int ix = 0; ix < f.nx(); ++ix) {
    edge = std::max(edge, std::abs(f.at(0, ix)));
    edge = std::max(edge, std::abs(f.at(f.ny() - 1, ix)));
  }
  for (int iy = 0; iy < f.ny(); ++iy) {
    edge = std::max(edge, std::abs(f.at(iy, 0)));
    edge = std::max(edge, std::abs(f.at(iy, f.nx() - 1)));
  }
  return edge / peak;
}

namespace {

Sinogram radon_direct(const Field2D& f, const SphereGrid& sphere, const Grid1D& gp) {
  const double hline = std::min(f.gx.step, f.gy.step);
  const double half_diag = 0.5 * std::hypot(f.gx.length(), f.gy.length());
  const int nhalf = static_cast<int>(std::ceil(half_diag / hline)) + 1;
  const int ns = 2 * nhalf + 1;  // symmetric s-range keeps antipodal symmetry exact
  if (ns < 8) throw InvalidInputError("radon: grid too coarse (fewer than 8 samples per line)");

  Sinogram out(sphere, gp);
  parallel_for(sphere.count, [&](int d) {
    double ux, uy;
    sphere.direction(d, ux, uy);
    const double px = -uy, py = ux;  // u-perp
    for (int ip = 0; ip < gp.count; ++ip) {
      const double p = gp.node(ip);
      const double bx = p * ux, by = p * uy;
      KahanSum acc;
      for (int is = -nhalf; is <= nhalf; ++is) {
        const double s = is * hline;
        const double val = interp2_cubic(f, bx + s * px, by + s * py);
        acc.add((is == -nhalf || is == nhalf) ? 0.5 * val : val);
      }
      out.at(d, ip) = acc.get() * hline;
    }
  });
  return out;
}

struct SpectrumGrid {
  std::vector<complexd> s;  // fftshifted smooth spectrum fhat(xi)
  int px = 0, py = 0;
  double dkx = 0.0, dky = 0.0;  // lattice spacing in xi

  // bicubic interpolation in xi; zero outside the represented square
  complexd sample(double kx, double ky) const {
    const double ux = kx / dkx + px / 2;
    const double uy = ky / dky + py / 2;
    const double flx = std::floor(ux), fly = std::floor(uy);
    const int ix1 = static_cast<int>(flx), iy1 = static_cast<int>(fly);
    if (ix1 < 1 || ix1 + 2 >= px || iy1 < 1 || iy1 + 2 >= py) return complexd{};
    double wx[4], wy[4];
    catmull_rom_weights(ux - flx, wx);
    catmull_rom_weights(uy - fly, wy);
    complexd acc{};
    for (int a = 0; a < 4; ++a) {
      complexd row{};
      const complexd* base = &s[static_cast<size_t>(iy1 - 1 + a) * px + (ix1 - 1)];
      for (int b = 0; b < 4; ++b) row += wx[b] * base[b];
      acc += wy[a] * row;
    }
    return acc;
  }
};

// 2x zero-padded 2-D spectrum with the grid-origin phase removed, so the
// sampled array is the smooth continuous transform fhat on a fine lattice.
SpectrumGrid field_spectrum(const Field2D& f) {
  SpectrumGrid sg;
  sg.px = static_cast<int>(next_pow2(static_cast<size_t>(2 * f.nx())));
  sg.py = static_cast<int>(next_pow2(static_cast<size_t>(2 * f.ny())));
  const double dx = f.gx.step, dy = f.gy.step;
  sg.dkx = kTwoPi / (sg.px * dx);
  sg.dky = kTwoPi / (sg.py * dy);

  // row FFTs then column FFTs
  std::vector<complexd> buf(static_cast<size_t>(sg.px) * sg.py, complexd{});
  for (int iy = 0; iy < f.ny(); ++iy)
    for (int ix = 0; ix < f.nx(); ++ix)
      buf[static_cast<size_t>(iy) * sg.px + ix] = complexd(f.at(iy, ix), 0.0);
  parallel_for(f.ny(), [&](int iy) {
    std::vector<complexd> row(sg.px);
    std::copy_n(buf.begin() + static_cast<size_t>(iy) * sg.px, sg.px, row.begin());
    fft_pow2(row, false);
    std::copy_n(row.begin(), sg.px, buf.begin() + static_cast<size_t>(iy) * sg.px);
  });
  parallel_for(sg.px, [&](int ix) {
    std::vector<complexd> col(sg.py);
    for (int iy = 0; iy < sg.py; ++iy) col[iy] = buf[static_cast<size_t>(iy) * sg.px + ix];
    fft_pow2(col, false);
    for (int iy = 0; iy < sg.py; ++iy) buf[static_cast<size_t>(iy) * sg.px + ix] = col[iy];
  });

  // fftshift + continuous normalization dx dy e^{-i xi . x00}
  sg.s.assign(buf.size(), complexd{});
  const double x0 = f.gx.origin, y0 = f.gy.origin;
  for (int ky = 0; ky < sg.py; ++ky) {
    const int my = ky - sg.py / 2;  // signed lattice index
    const int wy = (my + sg.py) % sg.py;
    const double xiy = my * sg.dky;
    for (int kx = 0; kx < sg.px; ++kx) {
      const int mx = kx - sg.px / 2;
      const int wx = (mx + sg.px) % sg.px;
      const double xix = mx * sg.dkx;
      const double phase = -(xix * x0 + xiy * y0);
      sg.s[static_cast<size_t>(ky) * sg.px + kx] =
          buf[static_cast<size_t>(wy) * sg.px + wx] * complexd(std::cos(phase), std::sin(phase)) *
          (dx * dy);
    }
  }
  return sg;
}

Sinogram radon_fourier(const Field2D& f, const SphereGrid& sphere, const Grid1D& gp) {
  const SpectrumGrid sg = field_spectrum(f);
  const int np = gp.count;
  const size_t M = next_pow2(static_cast<size_t>(2 * np));
  const double dp = gp.step;
  const double dw = kTwoPi / (static_cast<double>(M) * dp);

  Sinogram out(sphere, gp);
  parallel_for(sphere.count, [&](int d) {
    double ux, uy;
    sphere.direction(d, ux, uy);
    std::vector<complexd> slice(M, complexd{});
    const int half = static_cast<int>(M) / 2;
    for (int q = -half; q < half; ++q) {
      const double w = q * dw;
      const complexd val = sg.sample(w * ux, w * uy);
      // carry the p-origin phase so the inverse DFT lands on the p lattice
      const double ph = w * gp.origin;
      slice[static_cast<size_t>((q + static_cast<int>(M)) % static_cast<int>(M))] =
          val * complexd(std::cos(ph), std::sin(ph));
    }
    fft_pow2(slice, true);
    const double norm = 1.0 / dp;
    for (int ip = 0; ip < np; ++ip)
      out.at(d, ip) = slice[static_cast<size_t>(ip)].real() * norm * static_cast<double>(M) /
                      static_cast<double>(M);
  });
  return out;
}

}  // namespace

Sinogram radon(const Field2D& f, const SphereGrid& sphere, const Grid1D& gp, RadonMethod method) {
  f.check_finite();
  gp.validate();
  Sinogram out = (method == RadonMethod::Direct) ? radon_direct(f, sphere, gp)
                                                 : radon_fourier(f, sphere, gp);
  out.nondecaying_input = boundary_decay_ratio(f) > 1e-10;
  return out;
}

DualRadonResult dual_radon(const Sinogram& rho, const Grid1D& gx, const Grid1D& gy) {
  for (double x : rho.v)
    if (!std::isfinite(x)) throw NumericError("dual_radon: non-finite sinogram value");
  DualRadonResult res;
  res.field = Field2D(gx, gy);
  const int nd = rho.sphere.count;
  std::vector<double> dirx(nd), diry(nd);
  for (int d = 0; d < nd; ++d) rho.sphere.direction(d, dirx[d], diry[d]);
  const double w = rho.sphere.weight();
  const double pmin = rho.grid_p.origin, pmax = rho.grid_p.back();
  std::vector<long> covered(gy.count, 0);
  parallel_for(gy.count, [&](int iy) {
    const double y = gy.node(iy);
    long cov = 0;
    for (int ix = 0; ix < gx.count; ++ix) {
      const double x = gx.node(ix);
      KahanSum acc;
      for (int d = 0; d < nd; ++d) {
        const double p = x * dirx[d] + y * diry[d];
        if (p >= pmin && p <= pmax) ++cov;
        const std::span<const double> row(rho.v.data() + static_cast<size_t>(d) * rho.grid_p.count,
                                          static_cast<size_t>(rho.grid_p.count));
        acc.add(interp1_cubic(row, rho.grid_p, p));
      }
      res.field.at(iy, ix) = acc.get() * w;
    }
    covered[iy] = cov;
  });
  long total_cov = 0;
  for (long c : covered) total_cov += c;
  res.coverage = static_cast<double>(total_cov) /
                 (static_cast<double>(gx.count) * gy.count * nd);
  return res;
}

std::pair<Sinogram, Sinogram> radon_dilation_pair(const Field2D& f, double lambda,
                                                  const SphereGrid& sphere, const Grid1D& gp) {
  if (!(lambda > 0.0)) throw InvalidInputError("radon_dilation_pair: lambda must be positive");
  Sinogram lhs = radon(resample_dilated(f, lambda), sphere, gp);

  // rhs: lambda^{-(n-1)} Rf(u, lambda p), resampled in p from a sinogram of f
  // computed on a grid wide enough to cover lambda * p
  const double need = std::max(std::abs(gp.origin), std::abs(gp.back())) * lambda;
  const double dp = gp.step;
  const int nh = static_cast<int>(std::ceil(need / dp)) + 2;
  const Grid1D gp_wide(-nh * dp, dp, 2 * nh + 1);
  Sinogram base = radon(f, sphere, gp_wide);
  Sinogram rhs(sphere, gp);
  const double scale = std::pow(lambda, -(kSpaceDim - 1));
  for (int d = 0; d < sphere.count; ++d) {
    const std::span<const double> row(base.v.data() + static_cast<size_t>(d) * gp_wide.count,
                                      static_cast<size_t>(gp_wide.count));
    for (int ip = 0; ip < gp.count; ++ip)
      rhs.at(d, ip) = scale * interp1_cubic(row, gp_wide, lambda * gp.node(ip));
  }
  rhs.nondecaying_input = base.nondecaying_input;
  return {std::move(lhs), std::move(rhs)};
}

}  // namespace rdg
