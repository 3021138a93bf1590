#pragma once

#include <memory>
#include <optional>

#include "rdg/ridgelet.hpp"

namespace rdg {

enum class Regime { Origin, Infinity };

struct SlowlyVaryingModel {
  enum class Kind { Constant, LogPower };
  Kind kind = Kind::Constant;
  double c = 1.0;     // positive amplitude
  double beta = 0.0;  // exponent of (e + |log lambda|)

  double eval(double lambda) const {
    if (kind == Kind::Constant) return c;
    return c * std::pow(kEuler + std::abs(std::log(lambda)), beta);
  }
  static constexpr double kEuler = 2.718281828459045235;
};

// Radial model distribution with a known dilation sinogram; all entries are
// isotropic so one offset profile serves every direction.
class GalleryEntry {
 public:
  std::string name;
  Regime regime = Regime::Infinity;
  bool supports_origin = false;
  double alpha = 0.0;
  SlowlyVaryingModel true_L;
  bool has_quasiasymptotic = true;
  std::string limit_descriptor;

  // R f_lambda(u, p) (radial in p); lambda=1 gives the plain sinogram profile
  double sinogram_profile(double lambda, double p) const;
  bool singular_at_zero() const;
  // average of the profile over |p| <= half (regularizes the p=0 cell)
  double profile_cell_average(double lambda, double half) const;

  // closed-form limit pairing <R_psi g(u,b,a), phi(u)>_u for the entry's
  // limit distribution g, with phi_integral = int_{S^1} phi du; independent
  // high-resolution quadrature (oracle quality)
  complexd limit_pairing(const WaveletProfile& psi, double b, double a,
                         double phi_integral) const;

  bool has_field() const;
  double field(double x, double y) const;  // singular entries return inf at 0

  // internal model parameters
  double eps = 0.5;     // gaussian surrogate width
  double ralpha = -1.0; // riesz / log_riesz exponent
  double rbeta = 0.0;   // log_riesz exponent

  enum class Model { GaussianDeltaSurrogate, Riesz, LogRiesz, Oscillatory };
  Model model = Model::Riesz;

 private:
  friend GalleryEntry gallery(const std::string& spec);
  struct ProfileTable;
  std::shared_ptr<const ProfileTable> table_;  // for quadrature-backed profiles
};

// specs: "gaussian_delta_surrogate[:eps]", "riesz:<alpha>",
//        "log_riesz:<alpha>:<beta>", "oscillatory_counterexample"
GalleryEntry gallery(const std::string& spec);

// analytic Riesz constant: Radon(|x|^alpha) = c_alpha |p|^{alpha+1} (finite
// part; alpha = -1 is the log case and has no constant)
double riesz_radon_constant(double alpha);

struct Probe {
  double b = 0.0, a = 1.0;  // b^2 + a^2 = 1, a > 0
};

struct ProbeSet {
  std::vector<Probe> probes;
  std::vector<double> lambdas;
  std::vector<std::vector<double>> windows;  // phi sampled on the sphere grid
  SphereGrid sphere{64};
};

ProbeSet make_probe_set(const SphereGrid& sphere, int n_probes, int n_windows, double lam_lo,
                        double lam_hi, int n_lambda, uint64_t seed);

struct Orbit {
  std::vector<complexd> F;
  std::vector<uint8_t> mask;  // 1 = valid sample
};

// <R_psi f(u, lambda b, lambda a), phi(u)>_u along the dilation orbit,
// computed by transforming the dilated input at the fixed probe (resample
// route, exact for gallery profiles)
Orbit gallery_orbit(const GalleryEntry& g, const WaveletProfile& psi, const Probe& probe,
                    double phi_integral, std::span<const double> lambdas);

// same quantity read from a fixed paired coefficient field at (lambda b,
// lambda a) by cubic interpolation in (b, log a) (coefficient-flow route)
Orbit flow_orbit(const PairedCoefficients& paired, const Probe& probe,
                 std::span<const double> lambdas);

// resample-route orbit for a sampled field input
Orbit field_orbit(const Field2D& f, const WaveletProfile& psi, const SphereGrid& sphere,
                  std::span<const double> phi, const Probe& probe,
                  std::span<const double> lambdas);

// sinogram-level wavelet orbit (int phi du) * W_psi(Rf)(lambda b, lambda a);
// its degree exceeds the field degree by n-1 = 1
Orbit gallery_radon_orbit(const GalleryEntry& g, const WaveletProfile& psi, const Probe& probe,
                          double phi_integral, std::span<const double> lambdas);

// paired coefficient field of a gallery entry on explicit grids (cheap:
// profile-backed); includes the a^{-(n-1)} pairing factor
PairedCoefficients gallery_paired_field(const GalleryEntry& g, const WaveletProfile& psi,
                                        double phi_integral, const Grid1D& gb, const LogGrid& ga,
                                        double lambda = 1.0);

enum class OrbitVerdict { Converged, Oscillatory, Divergent, Indeterminate };

const char* to_string(OrbitVerdict v);

struct DegreeFit {
  double alpha = 0.0;
  SlowlyVaryingModel L;
  double bias_gamma = 0.0;  // fitted 1/(e+|log lambda|) finite-lambda correction
  complexd M;               // fitted limit amplitude (with sign/phase)
  double rms = 0.0;
  OrbitVerdict verdict = OrbitVerdict::Indeterminate;
  std::vector<double> residuals;
};

// log|F| regression: power-law tail fit first, then the four-term model
// log c + alpha log(lam) + beta log(e+|log lam|) + gamma/(e+|log lam|)
DegreeFit estimate_degree(const Orbit& orbit, std::span<const double> lambdas, Regime regime);

struct ProbeReport {
  double b = 0.0, a = 1.0;
  OrbitVerdict verdict = OrbitVerdict::Indeterminate;
  complexd M;       // tail limit of F/(lam^alpha L(lam))
  double drift = 0.0;  // relative tail fluctuation of the normalized ratio
  double alpha_probe = 0.0;
};

struct BoundFit {
  bool found = false;
  int l = -1, m = -1;
  std::vector<double> C;  // per window
};

struct TauberianReport {
  bool alpha_determined = false;
  double alpha_hat = 0.0;
  SlowlyVaryingModel L_hat;
  double bias_gamma = 0.0;
  std::vector<ProbeReport> probes;  // probe-major, window-major flattening
  int n_windows = 1;
  BoundFit bound;
  std::string verdict;  // "quasiasymptotic" | "not quasiasymptotic" | "indeterminate"
  double fit_rms = 0.0;
};

// convergence tolerance of the tail Cauchy criterion in condition (5.4) checks
inline constexpr double kTailDriftTol = 1e-2;

// Classifies per-probe orbit convergence against a given (alpha, L) pair and
// fits the growth bound exponents; the verdict asserts "quasiasymptotic" iff
// every probe/window orbit converges and the bound search succeeds.
TauberianReport tauberian_check(const std::vector<std::vector<Orbit>>& orbits,  // [probe][window]
                                const ProbeSet& ps, double alpha_hat,
                                const SlowlyVaryingModel& L_hat, double bias_gamma,
                                Regime regime);

struct BoundednessResult {
  bool found = false;
  int l = -1, m = -1;
  std::vector<double> C;  // per window
};

// Smallest (l, m) <= (10,10), ordered by l+m then l, for which the per-member
// sup of |M(b,a)| / ((a+1/a)^l (1+|b|)^m) stays flat across the (ordered)
// family; C reported per window.
BoundednessResult boundedness_fit(
    const std::vector<std::vector<PairedCoefficients>>& family_per_window,
    std::span<const double> member_labels);

struct ScalingConfig {
  Regime regime = Regime::Infinity;
  int ndir = 64;
  int n_probes = 8;
  int n_windows = 1;
  int n_lambda = 24;
  double lam_lo = 0.0, lam_hi = 0.0;  // 0 = regime default ([1,64] resp. [1/64,1])
  uint64_t seed = 0;
  std::string wavelet = "bump";
};

struct OrbitRecord {
  int probe = 0, window = 0;
  double lambda = 0.0;
  complexd F;
  bool valid = true;
};

struct ScalingResult {
  TauberianReport report;
  std::vector<OrbitRecord> rows;
  ProbeSet ps;
  std::vector<DegreeFit> probe_fits;  // window-0 fit per probe
};

ScalingResult run_scaling(const GalleryEntry& g, const ScalingConfig& cfg);
ScalingResult run_scaling(const Field2D& f, const ScalingConfig& cfg);

}  // namespace rdg
