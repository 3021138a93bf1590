#pragma once

#include "rdg/radon.hpp"
#include "rdg/wavelet.hpp"

namespace rdg {

enum class Provenance { Direct, ViaRadon };

// R_psi f(u,b,a) on direction x scale x offset (function-sense values,
// psi_{u,b,a}(x) = (1/a) psi((x.u - b)/a)).
struct RidgeletCoefficients {
  SphereGrid sphere;
  Grid1D grid_b;
  LogGrid grid_a;
  std::vector<complexd> v;
  std::vector<uint8_t> flags;  // boundary-dominated cells
  Provenance provenance = Provenance::Direct;

  RidgeletCoefficients() = default;
  RidgeletCoefficients(const SphereGrid& s, const Grid1D& gb, const LogGrid& ga)
      : sphere(s),
        grid_b(gb),
        grid_a(ga),
        v(static_cast<size_t>(s.count) * gb.count * ga.count, complexd{}),
        flags(static_cast<size_t>(s.count) * gb.count * ga.count, 0) {}

  size_t idx(int dir, int ja, int kb) const {
    return (static_cast<size_t>(dir) * grid_a.count + ja) * grid_b.count + kb;
  }
  complexd& at(int dir, int ja, int kb) { return v[idx(dir, ja, kb)]; }
  complexd at(int dir, int ja, int kb) const { return v[idx(dir, ja, kb)]; }
};

// brute-force 2-D quadrature of f against every ridgelet
RidgeletCoefficients ridgelet_direct(const Field2D& f, const WaveletProfile& psi,
                                     const SphereGrid& sphere, const Grid1D& gb,
                                     const LogGrid& ga);

// Radon transform followed by a per-direction 1-D CWT (the rad-rid factorization)
RidgeletCoefficients ridgelet_via_radon(const Field2D& f, const WaveletProfile& psi,
                                        const SphereGrid& sphere, const Grid1D& gb,
                                        const LogGrid& ga);

enum class SynthesisMode {
  Fast,   // per-direction 1-D synthesis on a fine ridge profile, then back-projection
  Exact,  // literal triple quadrature per output node (slow; reference)
};

// R^t_psi Phi(x) = int Phi(u,b,a) psi_{u,b,a}(x) db da du / a^n
Field2D ridgelet_synthesis(const RidgeletCoefficients& phi, const WaveletProfile& psi,
                           const Grid1D& gx, const Grid1D& gy,
                           SynthesisMode mode = SynthesisMode::Fast,
                           double* imag_ratio = nullptr);

struct ReconstructResult {
  Field2D recon;
  double rel_l2_error = 0.0;
  complexd K;
};

// (1/K_{psi,eta}) R^t_eta R_psi f with the via-radon analysis path
ReconstructResult reconstruct(const Field2D& f, const WaveletProfile& psi,
                              const WaveletProfile& eta, const SphereGrid& sphere,
                              const Grid1D& gb, const LogGrid& ga,
                              SynthesisMode mode = SynthesisMode::Fast);

// (J_s F)(u,b,a) = a^s F(u,b,a)
RidgeletCoefficients scale_multiplier(const RidgeletCoefficients& f, double s);

// <F(u,b,a), phi(u)>_u = a^{-(n-1)} sum_j w_j F(u_j,b,a) phi(u_j), per (a,b)
struct PairedCoefficients {
  Grid1D grid_b;
  LogGrid grid_a;
  std::vector<complexd> m;  // (scale, offset)
  complexd& at(int ja, int kb) { return m[static_cast<size_t>(ja) * grid_b.count + kb]; }
  complexd at(int ja, int kb) const { return m[static_cast<size_t>(ja) * grid_b.count + kb]; }
};

PairedCoefficients pair_directions(const RidgeletCoefficients& f,
                                   std::span<const double> phi_samples);

// sup over the grid of (a+1/a)^s (1+|b|)^r |d_a^l d_b^m Lap_u^k F|; central
// finite differences, interior nodes only; diagnostic counterpart of the
// S(Y^3) seminorms. Requires l,m <= 2 and k <= 1.
double decay_seminorm(const RidgeletCoefficients& f, int s, int r, int l, int m, int k);

// internal p-grid used by the via-radon path: extends the b-lattice to cover
// the field's circumradius so line mass never falls outside the offset window
Grid1D radon_offset_grid(const Field2D& f, const Grid1D& gb);

}  // namespace rdg
