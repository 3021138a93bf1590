#include "rdg/numerics.hpp"

#include <sstream>

#include "rdg/parallel.hpp"

namespace rdg {

double trapezoid(std::span<const double> values, double step) {
  if (values.size() < 2) throw InvalidInputError("trapezoid: need at least 2 samples");
  if (!(step > 0.0)) throw InvalidInputError("trapezoid: step must be positive");
  KahanSum acc;
  acc.add(0.5 * values.front());
  for (size_t i = 1; i + 1 < values.size(); ++i) acc.add(values[i]);
  acc.add(0.5 * values.back());
  return acc.get() * step;
}

namespace {

// shared index/fraction split for cubic stencils
inline void stencil_at(const Grid1D& g, double x, int& i1, double& t) {
  const double u = (x - g.origin) / g.step;
  double fl = std::floor(u);
  i1 = static_cast<int>(fl);
  t = u - fl;
}

template <typename T>
T interp1_cubic_impl(std::span<const T> v, const Grid1D& g, double x) {
  int i1;
  double t;
  stencil_at(g, x, i1, t);
  if (i1 <= -2 || i1 >= g.count + 1) return T{};
  double w[4];
  catmull_rom_weights(t, w);
  T acc{};
  for (int k = 0; k < 4; ++k) {
    const int idx = i1 - 1 + k;
    if (idx >= 0 && idx < g.count) acc += w[k] * v[idx];
  }
  return acc;
}

}  // namespace

double interp1_cubic(std::span<const double> values, const Grid1D& g, double x) {
  return interp1_cubic_impl(values, g, x);
}

complexd interp1_cubic(std::span<const complexd> values, const Grid1D& g, double x) {
  return interp1_cubic_impl(values, g, x);
}

double interp2_cubic(const Field2D& f, double x, double y) {
  int ix1, iy1;
  double tx, ty;
  stencil_at(f.gx, x, ix1, tx);
  stencil_at(f.gy, y, iy1, ty);
  if (ix1 <= -2 || ix1 >= f.nx() + 1 || iy1 <= -2 || iy1 >= f.ny() + 1) return 0.0;
  double wx[4], wy[4];
  catmull_rom_weights(tx, wx);
  catmull_rom_weights(ty, wy);
  double acc = 0.0;
  for (int ky = 0; ky < 4; ++ky) {
    const int iy = iy1 - 1 + ky;
    if (iy < 0 || iy >= f.ny()) continue;
    double row = 0.0;
    for (int kx = 0; kx < 4; ++kx) {
      const int ix = ix1 - 1 + kx;
      if (ix >= 0 && ix < f.nx()) row += wx[kx] * f.at(iy, ix);
    }
    acc += wy[ky] * row;
  }
  return acc;
}

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_pow2(std::vector<complexd>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_pow2(n)) throw InvalidInputError("fft_pow2: length must be a power of two");
  // bit reversal
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
    const complexd wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      complexd w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const complexd u = a[i + k];
        const complexd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

Field2D sample_function(const std::function<double(double, double)>& expr, const Grid1D& gx,
                        const Grid1D& gy) {
  gx.validate();
  gy.validate();
  Field2D out(gx, gy);
  for (int iy = 0; iy < gy.count; ++iy) {
    const double y = gy.node(iy);
    for (int ix = 0; ix < gx.count; ++ix) {
      const double x = gx.node(ix);
      const double val = expr(x, y);
      if (!std::isfinite(val)) {
        std::ostringstream os;
        os << "sample_function: non-finite value at node (x=" << x << ", y=" << y << ")";
        throw NumericError(os.str());
      }
      out.at(iy, ix) = val;
    }
  }
  return out;
}

Field2D resample_dilated(const Field2D& f, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidInputError("resample_dilated: lambda must be positive");
  if (lambda == 1.0) return f;
  Field2D out(f.gx, f.gy);
  parallel_for(f.ny(), [&](int iy) {
    const double y = f.gy.node(iy) * lambda;
    for (int ix = 0; ix < f.nx(); ++ix) {
      out.at(iy, ix) = interp2_cubic(f, f.gx.node(ix) * lambda, y);
    }
  });
  return out;
}

}  // namespace rdg
