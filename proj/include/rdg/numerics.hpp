#pragma once

#include <functional>
#include <span>

#include "rdg/types.hpp"

namespace rdg {

// Neumaier compensated accumulator; keeps long reductions order-stable in
// accuracy even when the summand magnitudes vary wildly.
struct KahanSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double get() const { return s + c; }
};

double trapezoid(std::span<const double> values, double step);

// trapezoid end-weight helper: w(i) = step, halved at both ends
inline double trap_weight(int i, int n, double step) {
  return (i == 0 || i == n - 1) ? 0.5 * step : step;
}

// Catmull-Rom cubic weights for the fractional offset t in [0,1] between the
// middle two of four consecutive samples.
inline void catmull_rom_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

// 1-D Catmull-Rom interpolation of samples on a uniform grid; samples outside
// the grid are taken as 0.
double interp1_cubic(std::span<const double> values, const Grid1D& g, double x);
complexd interp1_cubic(std::span<const complexd> values, const Grid1D& g, double x);

// 2-D separable Catmull-Rom interpolation on a Field2D; outside -> 0.
double interp2_cubic(const Field2D& f, double x, double y);

// In-place complex radix-2 FFT; n must be a power of two. inverse applies the
// conjugate transform including the 1/n factor.
void fft_pow2(std::vector<complexd>& data, bool inverse);
bool is_pow2(size_t n);
size_t next_pow2(size_t n);

// [OPERATIONS on fields]

Field2D sample_function(const std::function<double(double, double)>& expr, const Grid1D& gx,
                        const Grid1D& gy);

// f_lambda(x) = f(lambda*x) on the same grid, cubic resampling, outside -> 0.
Field2D resample_dilated(const Field2D& f, double lambda);

}  // namespace rdg
