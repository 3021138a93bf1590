#pragma once

#include "rdg/numerics.hpp"
#include "rdg/types.hpp"

namespace rdg {

// Samples of Rf(u,p) on direction x offset; antipodal symmetry
// value(theta+pi, p) = value(theta, -p) holds for transforms of real fields.
struct Sinogram {
  SphereGrid sphere;
  Grid1D grid_p;
  std::vector<double> v;
  bool nondecaying_input = false;  // field did not decay to 1e-10 of its peak at the boundary

  Sinogram() = default;
  Sinogram(const SphereGrid& s, const Grid1D& gp)
      : sphere(s), grid_p(gp), v(static_cast<size_t>(s.count) * gp.count, 0.0) {}
  double& at(int dir, int ip) { return v[static_cast<size_t>(dir) * grid_p.count + ip]; }
  double at(int dir, int ip) const { return v[static_cast<size_t>(dir) * grid_p.count + ip]; }
};

enum class RadonMethod { Direct, FourierSlice };

// Rf(u,p) = integral of f over the line x.u = p. Direct: trapezoid along the
// line sampled at min(dx,dy) through cubic interpolation. FourierSlice:
// central-slice evaluation on a 2x zero-padded FFT of the field.
Sinogram radon(const Field2D& f, const SphereGrid& sphere, const Grid1D& gp,
               RadonMethod method = RadonMethod::Direct);

struct DualRadonResult {
  Field2D field;
  double coverage = 1.0;  // fraction of (x,u) pairs with x.u inside the p window
};

// R* rho(x) = int_{S^1} rho(u, x.u) du by sphere-weighted quadrature with
// cubic interpolation in p; off-grid offsets contribute 0 and lower coverage.
DualRadonResult dual_radon(const Sinogram& rho, const Grid1D& gx, const Grid1D& gy);

// Both sides of the dilation identity R f_lambda(u,p) = lambda^{-(n-1)} Rf(u, lambda p):
// first  = radon(resample_dilated(f, lambda))
// second = lambda^{-1} Rf(u, lambda p) resampled from radon(f)
std::pair<Sinogram, Sinogram> radon_dilation_pair(const Field2D& f, double lambda,
                                                  const SphereGrid& sphere, const Grid1D& gp);

// max boundary magnitude relative to the interior peak (decay diagnostic)
double boundary_decay_ratio(const Field2D& f);

}  // namespace rdg
