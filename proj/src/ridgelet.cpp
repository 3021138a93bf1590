#include "rdg/ridgelet.hpp"

#include <algorithm>
#include <numeric>

#include "rdg/parallel.hpp"

namespace rdg {

namespace {

struct SortedProjection {
  std::vector<double> t;   // x.u, ascending
  std::vector<double> wf;  // matching f * trapezoid weight
  double tmin = 0.0, tmax = 0.0;
};

SortedProjection project_and_sort(const Field2D& f, double ux, double uy) {
  const int nx = f.nx(), ny = f.ny();
  SortedProjection sp;
  const size_t n = static_cast<size_t>(nx) * ny;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> tv(n);
  for (int iy = 0; iy < ny; ++iy) {
    const double yv = f.gy.node(iy) * uy;
    for (int ix = 0; ix < nx; ++ix)
      tv[static_cast<size_t>(iy) * nx + ix] = f.gx.node(ix) * ux + yv;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return tv[a] < tv[b]; });
  sp.t.resize(n);
  sp.wf.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const int id = order[i];
    const int iy = id / nx, ix = id % nx;
    sp.t[i] = tv[id];
    sp.wf[i] = f.at(iy, ix) * trap_weight(ix, nx, f.gx.step) * trap_weight(iy, ny, f.gy.step);
  }
  sp.tmin = sp.t.front();
  sp.tmax = sp.t.back();
  return sp;
}

}  // namespace

Grid1D radon_offset_grid(const Field2D& f, const Grid1D& gb) {
  const double half_diag = 0.5 * std::hypot(f.gx.length(), f.gy.length());
  const double db = gb.step;
  // extend the b lattice in both directions so it stays aligned with gb
  const int lo = static_cast<int>(std::floor((-half_diag - db - gb.origin) / db));
  const int hi = static_cast<int>(std::ceil((half_diag + db - gb.origin) / db));
  return Grid1D(gb.origin + lo * db, db, hi - lo + 1);
}

RidgeletCoefficients ridgelet_direct(const Field2D& f, const WaveletProfile& psi,
                                     const SphereGrid& sphere, const Grid1D& gb,
                                     const LogGrid& ga) {
  f.check_finite();
  RidgeletCoefficients out(sphere, gb, ga);
  out.provenance = Provenance::Direct;
  const int na = ga.count, nb = gb.count;
  const double radius = psi.support_radius();

  parallel_for(sphere.count, [&](int d) {
    double ux, uy;
    sphere.direction(d, ux, uy);
    const SortedProjection sp = project_and_sort(f, ux, uy);
    const size_t n = sp.t.size();
    for (int j = 0; j < na; ++j) {
      const double a = ga.node(j);
      const double inv_a = 1.0 / a;
      const double reach = radius * a;
      for (int k = 0; k < nb; ++k) {
        const double b = gb.node(k);
        const size_t lo = std::lower_bound(sp.t.begin(), sp.t.end(), b - reach) - sp.t.begin();
        const size_t hi = std::upper_bound(sp.t.begin() + lo, sp.t.end(), b + reach) -
                          sp.t.begin();
        double acc = 0.0;
        for (size_t i = lo; i < hi; ++i)
          acc += sp.wf[i] * psi.eval_space((sp.t[i] - b) * inv_a);
        out.at(d, j, k) = complexd(acc * inv_a, 0.0);
        // boundary flag: wavelet mass outside the projected field window
        const double lo_arg = (sp.tmin - b) * inv_a, hi_arg = (sp.tmax - b) * inv_a;
        const double outside = psi.abs_mass_below(lo_arg) + (1.0 - psi.abs_mass_below(hi_arg));
        if (outside > 1e-6) out.flags[out.idx(d, j, k)] = 1;
      }
    }
  });
  return out;
}

RidgeletCoefficients ridgelet_via_radon(const Field2D& f, const WaveletProfile& psi,
                                        const SphereGrid& sphere, const Grid1D& gb,
                                        const LogGrid& ga) {
  const Grid1D gp = radon_offset_grid(f, gb);
  const Sinogram sino = radon(f, sphere, gp);
  RidgeletCoefficients out(sphere, gb, ga);
  out.provenance = Provenance::ViaRadon;
  const int na = ga.count, nb = gb.count;
  parallel_for(sphere.count, [&](int d) {
    const std::span<const double> row(sino.v.data() + static_cast<size_t>(d) * gp.count,
                                      static_cast<size_t>(gp.count));
    const WaveletCoefficients1D w = cwt(row, gp, psi, gb, ga, CwtMethod::Fft);
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nb; ++k) {
        out.at(d, j, k) = w.at(j, k);
        out.flags[out.idx(d, j, k)] = w.flag(j, k);
      }
  });
  return out;
}

Field2D ridgelet_synthesis(const RidgeletCoefficients& phi, const WaveletProfile& psi,
                           const Grid1D& gx, const Grid1D& gy, SynthesisMode mode,
                           double* imag_ratio) {
  for (const auto& c : phi.v)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericError("ridgelet_synthesis: non-finite coefficient");
  const int nd = phi.sphere.count, na = phi.grid_a.count, nb = phi.grid_b.count;
  const double wu = phi.sphere.weight();
  Field2D out(gx, gy);
  KahanSum imag_norm, real_norm;

  if (mode == SynthesisMode::Exact) {
    std::vector<complexd> cell(static_cast<size_t>(gx.count) * gy.count, complexd{});
    parallel_for(gy.count, [&](int iy) {
      const double y = gy.node(iy);
      for (int ix = 0; ix < gx.count; ++ix) {
        const double x = gx.node(ix);
        complexd acc{};
        for (int d = 0; d < nd; ++d) {
          double ux, uy;
          phi.sphere.direction(d, ux, uy);
          const double t = x * ux + y * uy;
          for (int j = 0; j < na; ++j) {
            const double a = phi.grid_a.node(j);
            const double wl = phi.grid_a.log_weight(j);
            const double inv_a = 1.0 / a;
            // measure db da du / a^n with da = a dtau: weight a^{1-n} dtau, n = 2
            const double scale = wu * wl * inv_a * inv_a;
            complexd row{};
            for (int k = 0; k < nb; ++k) {
              const double kv = psi.eval_space((t - phi.grid_b.node(k)) * inv_a);
              if (kv != 0.0) row += phi.at(d, j, k) * (kv * trap_weight(k, nb, phi.grid_b.step));
            }
            acc += row * scale;
          }
        }
        cell[static_cast<size_t>(iy) * gx.count + ix] = acc;
      }
    });
    for (int iy = 0; iy < gy.count; ++iy)
      for (int ix = 0; ix < gx.count; ++ix) {
        const complexd c = cell[static_cast<size_t>(iy) * gx.count + ix];
        out.at(iy, ix) = c.real();
        real_norm.add(c.real() * c.real());
        imag_norm.add(c.imag() * c.imag());
      }
  } else {
    // factorized: G_d(t) = sum_{j,k} Phi (1/a^2) psi((t-b)/a) w_b w_tau, then
    // out(x) = sum_d wu G_d(x.u_d) with cubic interpolation on a fine t grid
    const double half_diag = 0.5 * std::hypot(gx.length(), gy.length());
    const double tstep = 0.5 * phi.grid_b.step;
    const int nt_half = static_cast<int>(std::ceil((half_diag + phi.grid_b.step) / tstep)) + 2;
    const Grid1D tgrid(-nt_half * tstep, tstep, 2 * nt_half + 1);
    const double radius = psi.support_radius();

    std::vector<std::vector<complexd>> ridge(nd);
    parallel_for(nd, [&](int d) {
      std::vector<complexd> g(tgrid.count, complexd{});
      for (int j = 0; j < na; ++j) {
        const double a = phi.grid_a.node(j);
        const double inv_a = 1.0 / a;
        const double scale = phi.grid_a.log_weight(j) * inv_a * inv_a;
        const double reach = radius * a;
        for (int k = 0; k < nb; ++k) {
          const complexd c =
              phi.at(d, j, k) * (scale * trap_weight(k, nb, phi.grid_b.step));
          if (c == complexd{}) continue;
          const double b = phi.grid_b.node(k);
          int it0 = static_cast<int>(std::ceil((b - reach - tgrid.origin) / tstep));
          int it1 = static_cast<int>(std::floor((b + reach - tgrid.origin) / tstep));
          it0 = std::max(it0, 0);
          it1 = std::min(it1, tgrid.count - 1);
          for (int it = it0; it <= it1; ++it) {
            const double kv = psi.eval_space((tgrid.node(it) - b) * inv_a);
            if (kv != 0.0) g[it] += c * kv;
          }
        }
      }
      ridge[d] = std::move(g);
    });

    std::vector<complexd> cell(static_cast<size_t>(gx.count) * gy.count, complexd{});
    parallel_for(gy.count, [&](int iy) {
      const double y = gy.node(iy);
      for (int ix = 0; ix < gx.count; ++ix) {
        const double x = gx.node(ix);
        complexd acc{};
        for (int d = 0; d < nd; ++d) {
          double ux, uy;
          phi.sphere.direction(d, ux, uy);
          acc += interp1_cubic(std::span<const complexd>(ridge[d]), tgrid, x * ux + y * uy);
        }
        cell[static_cast<size_t>(iy) * gx.count + ix] = acc * wu;
      }
    });
    for (int iy = 0; iy < gy.count; ++iy)
      for (int ix = 0; ix < gx.count; ++ix) {
        const complexd c = cell[static_cast<size_t>(iy) * gx.count + ix];
        out.at(iy, ix) = c.real();
        real_norm.add(c.real() * c.real());
        imag_norm.add(c.imag() * c.imag());
      }
  }
  if (imag_ratio)
    *imag_ratio = real_norm.get() > 0.0 ? std::sqrt(imag_norm.get() / real_norm.get()) : 0.0;
  return out;
}

ReconstructResult reconstruct(const Field2D& f, const WaveletProfile& psi,
                              const WaveletProfile& eta, const SphereGrid& sphere,
                              const Grid1D& gb, const LogGrid& ga, SynthesisMode mode) {
  const ReconstructionConstant K = reconstruction_constant(psi, eta, kSpaceDim);
  const RidgeletCoefficients coeff = ridgelet_via_radon(f, psi, sphere, gb, ga);
  // divide the coefficients by K, then synthesize with eta
  RidgeletCoefficients scaled = coeff;
  const complexd inv_k = 1.0 / K.value;
  for (auto& c : scaled.v) c *= inv_k;
  ReconstructResult res;
  res.K = K.value;
  res.recon = ridgelet_synthesis(scaled, eta, f.gx, f.gy, mode);
  res.rel_l2_error = rel_l2_diff(res.recon.v, f.v);
  return res;
}

RidgeletCoefficients scale_multiplier(const RidgeletCoefficients& f, double s) {
  RidgeletCoefficients out = f;
  for (int j = 0; j < f.grid_a.count; ++j) {
    const double w = std::pow(f.grid_a.node(j), s);
    for (int d = 0; d < f.sphere.count; ++d)
      for (int k = 0; k < f.grid_b.count; ++k) out.at(d, j, k) *= w;
  }
  return out;
}

PairedCoefficients pair_directions(const RidgeletCoefficients& f,
                                   std::span<const double> phi_samples) {
  if (static_cast<int>(phi_samples.size()) != f.sphere.count)
    throw InvalidInputError("pair_directions: window sampling does not match the sphere grid");
  PairedCoefficients out;
  out.grid_b = f.grid_b;
  out.grid_a = f.grid_a;
  out.m.assign(static_cast<size_t>(f.grid_a.count) * f.grid_b.count, complexd{});
  const double wu = f.sphere.weight();
  for (int j = 0; j < f.grid_a.count; ++j) {
    const double an = std::pow(f.grid_a.node(j), -(kSpaceDim - 1));
    for (int k = 0; k < f.grid_b.count; ++k) {
      complexd acc{};
      for (int d = 0; d < f.sphere.count; ++d) acc += f.at(d, j, k) * phi_samples[d];
      out.at(j, k) = acc * (wu * an);
    }
  }
  return out;
}

double decay_seminorm(const RidgeletCoefficients& f, int s, int r, int l, int m, int k) {
  if (l < 0 || l > 2 || m < 0 || m > 2 || k < 0 || k > 1)
    throw InvalidInputError("decay_seminorm: need 0<=l,m<=2 and 0<=k<=1");
  const int nd = f.sphere.count, na = f.grid_a.count, nb = f.grid_b.count;
  if (na < 2 * l + 1 + 2 || nb < 2 * m + 1 + 2)
    throw InvalidInputError("decay_seminorm: grid too small for requested difference order");

  std::vector<complexd> work(f.v.begin(), f.v.end());
  auto at = [&](std::vector<complexd>& w, int d, int j, int kk) -> complexd& {
    return w[(static_cast<size_t>(d) * na + j) * nb + kk];
  };

  // Laplace-Beltrami on S^1 is d^2/dtheta^2; periodic central difference
  if (k == 1) {
    std::vector<complexd> next(work.size());
    const double dth = kTwoPi / nd;
    for (int d = 0; d < nd; ++d) {
      const int dm = (d + nd - 1) % nd, dp = (d + 1) % nd;
      for (int j = 0; j < na; ++j)
        for (int kk = 0; kk < nb; ++kk)
          at(next, d, j, kk) =
              (at(work, dp, j, kk) - 2.0 * at(work, d, j, kk) + at(work, dm, j, kk)) / (dth * dth);
    }
    work.swap(next);
  }

  // d/db, uniform central differences (applied m times)
  const double db = f.grid_b.step;
  for (int pass = 0; pass < m; ++pass) {
    std::vector<complexd> next(work.size(), complexd{});
    for (int d = 0; d < nd; ++d)
      for (int j = 0; j < na; ++j)
        for (int kk = 1; kk + 1 < nb; ++kk)
          at(next, d, j, kk) = (at(work, d, j, kk + 1) - at(work, d, j, kk - 1)) / (2.0 * db);
    work.swap(next);
  }

  // d/da on the geometric grid, non-uniform central formulas (applied once or twice)
  for (int pass = 0; pass < l; ++pass) {
    std::vector<complexd> next(work.size(), complexd{});
    for (int j = 1; j + 1 < na; ++j) {
      const double hm = f.grid_a.node(j) - f.grid_a.node(j - 1);
      const double hp = f.grid_a.node(j + 1) - f.grid_a.node(j);
      const double cm = -hp / (hm * (hm + hp));
      const double c0 = (hp - hm) / (hm * hp);
      const double cp = hm / (hp * (hm + hp));
      for (int d = 0; d < nd; ++d)
        for (int kk = 0; kk < nb; ++kk)
          at(next, d, j, kk) = cm * at(work, d, j - 1, kk) + c0 * at(work, d, j, kk) +
                               cp * at(work, d, j + 1, kk);
    }
    work.swap(next);
  }

  double sup = 0.0;
  for (int d = 0; d < nd; ++d)
    for (int j = l; j < na - l; ++j) {
      const double a = f.grid_a.node(j);
      const double wa = std::pow(a + 1.0 / a, s);
      for (int kk = m; kk < nb - m; ++kk) {
        const double wb = std::pow(1.0 + std::abs(f.grid_b.node(kk)), r);
        sup = std::max(sup, wa * wb * std::abs(at(work, d, j, kk)));
      }
    }
  return sup;
}

}  // namespace rdg
