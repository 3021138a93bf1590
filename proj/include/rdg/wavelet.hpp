#pragma once

#include <memory>

#include "rdg/numerics.hpp"
#include "rdg/types.hpp"

namespace rdg {

enum class WaveletKind { FourierBump, GaussDerivative, Custom };

// Univariate analysis wavelet with space- and Fourier-domain evaluators.
//
// fourier_bump:        psihat(w) = exp(-1/(1-(|w|-3/2)^2)) on 1/2 < |w| < 5/2,
//                      0 elsewhere; all moments vanish (lizorkin_order = inf).
// gauss_derivative(k): psi(x) = d^k/dx^k exp(-x^2/2); psihat(w) =
//                      (iw)^k sqrt(2 pi) exp(-w^2/2); exactly k vanishing moments.
//
// Space evaluation is backed by a dense table (cubic interpolation) for the
// transform hot paths; eval_space_exact is the slow reference used by oracles.
class WaveletProfile {
 public:
  static WaveletProfile fourier_bump();
  static WaveletProfile gauss_derivative(int k);
  // arbitrary Fourier-domain profile (real, even); used for custom test pairs
  static WaveletProfile from_fourier(const std::string& name,
                                     const std::function<double(double)>& fhat, double support_min,
                                     double support_max, int lizorkin_order);

  const std::string& name() const { return name_; }
  WaveletKind kind() const { return kind_; }
  // number of certified vanishing moments; -1 encodes "all" (Lizorkin)
  int lizorkin_order() const { return lizorkin_order_; }
  bool is_lizorkin() const { return lizorkin_order_ < 0; }

  complexd eval_fourier(double w) const;
  double eval_space(double x) const;        // table-backed, fast
  double eval_space_exact(double x) const;  // direct quadrature / closed form

  // half-width beyond which |psi| is numerically negligible
  double support_radius() const { return table_radius_; }
  // integral of |psi| over (-inf, x], normalized to total mass 1
  double abs_mass_below(double x) const;
  // numeric decay certificate: C with |psi(x)| <= C (1+|x|)^-4 on the table window
  double decay_constant() const { return decay_c_; }

 private:
  WaveletProfile() = default;
  void build_tables();

  std::string name_;
  WaveletKind kind_ = WaveletKind::FourierBump;
  int gauss_order_ = 0;
  int lizorkin_order_ = -1;
  std::function<double(double)> custom_fhat_;
  double fourier_support_min_ = 0.0;  // psihat vanishes identically on |w| < this
  double fourier_support_max_ = 0.0;  // and on |w| > this (0 = unbounded)

  double table_radius_ = 0.0;
  double table_step_ = 0.0;
  std::shared_ptr<const std::vector<double>> table_;      // psi on [-R, R]
  std::shared_ptr<const std::vector<double>> abs_cdf_;    // cumulative |psi|, normalized
  double decay_c_ = 0.0;
};

WaveletProfile make_wavelet(const std::string& spec);  // "bump" | "gauss:<k>"

// Coefficients W(b,a), indexed (scale, offset). flags marks boundary-dominated
// cells (wavelet mass outside the signal window above 1e-6 of its total).
struct WaveletCoefficients1D {
  Grid1D grid_b;
  LogGrid grid_a;
  std::vector<complexd> v;
  std::vector<uint8_t> flags;

  WaveletCoefficients1D() = default;
  WaveletCoefficients1D(const Grid1D& gb, const LogGrid& ga)
      : grid_b(gb),
        grid_a(ga),
        v(static_cast<size_t>(gb.count) * ga.count, complexd{}),
        flags(static_cast<size_t>(gb.count) * ga.count, 0) {}
  complexd& at(int ja, int kb) { return v[static_cast<size_t>(ja) * grid_b.count + kb]; }
  complexd at(int ja, int kb) const { return v[static_cast<size_t>(ja) * grid_b.count + kb]; }
  uint8_t flag(int ja, int kb) const { return flags[static_cast<size_t>(ja) * grid_b.count + kb]; }
};

enum class CwtMethod { Direct, Fft };

// L1-normalized CWT: W(b,a) = int f(x) (1/a) conj(psi((x-b)/a)) dx by trapezoid
// over the signal grid. gb must lie on the signal lattice (same step, aligned
// origin) so that the direct and FFT paths evaluate identical discrete sums.
WaveletCoefficients1D cwt(std::span<const double> signal, const Grid1D& gx,
                          const WaveletProfile& psi, const Grid1D& gb, const LogGrid& ga,
                          CwtMethod method = CwtMethod::Fft);

// single-point transform, arbitrary (b,a); plain quadrature over the grid
complexd cwt_at(std::span<const double> signal, const Grid1D& gx, const WaveletProfile& psi,
                double b, double a);

// M_psi Phi(p) = int int (1/a) psi((p-b)/a) Phi(b,a) db da/a
std::vector<complexd> wavelet_synthesis(const WaveletCoefficients1D& phi,
                                        const WaveletProfile& psi, const Grid1D& target);

struct ReconstructionConstant {
  complexd value;
  double error_bound;  // inner-cutoff + outer-tail estimate
};

// K_{psi,eta} = (2 pi)^{n-1} int conj(psihat) etahat |w|^-n dw, log-symmetric
// quadrature on +-[1e-6, w_max]. Throws NumericError when the pairing is not
// integrable near 0, DegeneratePairError when |K| < 1e-10.
ReconstructionConstant reconstruction_constant(const WaveletProfile& psi,
                                               const WaveletProfile& eta, int n,
                                               int refine = 1);

// one-sided Calderon constant int_0^inf conj(psihat) etahat dw/w governing the
// 1-D identity f = (1/c) M_eta W_psi f; checks the two half-lines agree
complexd calderon_constant(const WaveletProfile& psi, const WaveletProfile& eta);

struct MomentReport {
  int max_order = 0;
  // normalized moments |int x^m psi| / int |x|^m |psi| per order
  std::vector<double> normalized;
  double worst = 0.0;
  int first_failure = -1;  // -1 = pass
  bool pass = false;
};

MomentReport vanishing_moments_check(const WaveletProfile& psi, int max_order, double tol);

}  // namespace rdg
