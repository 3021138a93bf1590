#include "rdg/selftest.hpp"

#include <sstream>

#include <json.hpp>

#include "rdg/asymptotics.hpp"
#include "rdg/io.hpp"

namespace rdg {

namespace {

struct Harness {
  SelftestReport rep;
  void check(const std::string& name, double value, double tol) {
    SelftestCheck c{name, value, tol, value <= tol};
    if (!c.pass) ++rep.failures;
    rep.checks.push_back(c);
  }
  void check_true(const std::string& name, bool ok) {
    SelftestCheck c{name, ok ? 0.0 : 1.0, 0.5, ok};
    if (!ok) ++rep.failures;
    rep.checks.push_back(c);
  }
};

Field2D gaussian_field(double half_extent, int n, double sharp = 1.0) {
  return sample_function(
      [sharp](double x, double y) { return std::exp(-sharp * (x * x + y * y)); },
      Grid1D::centered(half_extent, n), Grid1D::centered(half_extent, n));
}

}  // namespace

SelftestReport run_selftest(bool quick, bool inject_synthesis_bug) {
  Harness h;
  const int res = quick ? 32 : 64;
  const int ndir = quick ? 16 : 32;
  const int nb = quick ? 65 : 129;
  const int na = quick ? 16 : 24;

  // --- numerics ---
  {
    std::vector<double> v{1.0, 1.0, 1.0};
    h.check("trapezoid.constant", std::abs(trapezoid(v, 0.5) - 1.0), 1e-15);
    std::vector<double> w{0.0, 1.0, 2.0};
    h.check("trapezoid.affine", std::abs(trapezoid(w, 1.0) - 2.0), 1e-15);
    const LogGrid lg(0.0625, 8.0, 33);
    double worst = 0.0;
    const double r0 = lg.node(1) / lg.node(0);
    for (int j = 1; j + 1 < lg.count; ++j)
      worst = std::max(worst, std::abs(lg.node(j + 1) / lg.node(j) - r0));
    h.check("loggrid.geometric_ratio", worst, 1e-12);

    const Field2D f = gaussian_field(8.0, res);
    const Field2D f2 = resample_dilated(resample_dilated(f, 2.0), 0.5);
    double err = 0.0;
    for (int iy = res / 4; iy < 3 * res / 4; ++iy)
      for (int ix = res / 4; ix < 3 * res / 4; ++ix)
        err = std::max(err, std::abs(f2.at(iy, ix) - f.at(iy, ix)));
    h.check("resample.roundtrip_interior", err, 2e-4);
  }

  const WaveletProfile bump = make_wavelet("bump");
  const WaveletProfile gd2 = make_wavelet("gauss:2");

  // --- wavelets ---
  {
    const MomentReport mr = vanishing_moments_check(bump, 6, 1e-8);
    h.check_true("wavelet.bump_moments_vanish", mr.pass);
    const MomentReport mg = vanishing_moments_check(gd2, 2, 1e-8);
    h.check_true("wavelet.gauss2_moment2_nonzero", !mg.pass && mg.first_failure == 2);
    h.check("wavelet.bump_decay_certificate",
            bump.decay_constant() < 1e4 ? 0.0 : bump.decay_constant(), 0.5);

    // fast/slow equivalence and linearity on a synthetic signal
    const Grid1D gx = Grid1D::centered(16.0, 512);
    std::vector<double> sig(gx.count), sig2(gx.count), mix(gx.count);
    for (int i = 0; i < gx.count; ++i) {
      const double x = gx.node(i);
      sig[i] = std::exp(-x * x) * std::cos(3.0 * x);
      sig2[i] = std::exp(-0.5 * x * x);
      mix[i] = 2.0 * sig[i] - 0.25 * sig2[i];
    }
    const Grid1D gb = Grid1D::centered(8.0, 257);
    const LogGrid ga(0.125, 4.0, na);
    const auto wf = cwt(sig, gx, bump, gb, ga, CwtMethod::Fft);
    const auto wd = cwt(sig, gx, bump, gb, ga, CwtMethod::Direct);
    h.check("cwt.fast_slow_equivalence", rel_l2_diff(wf.v, wd.v), 1e-8);

    const auto w2 = cwt(sig2, gx, bump, gb, ga);
    const auto wm = cwt(mix, gx, bump, gb, ga);
    std::vector<complexd> lin(wm.v.size());
    for (size_t i = 0; i < lin.size(); ++i) lin[i] = 2.0 * wf.v[i] - 0.25 * w2.v[i];
    h.check("cwt.linearity", rel_l2_diff(lin, wm.v), 1e-12);

    // dilation covariance: W f(lam.)(b,a) = W f(lam b, lam a)
    const double lam = 2.0;
    std::vector<double> sdil(gx.count);
    for (int i = 0; i < gx.count; ++i) {
      const double x = gx.node(i) * lam;
      sdil[i] = std::exp(-x * x) * std::cos(3.0 * x);
    }
    double worst = 0.0;
    for (double bq : {-1.0, 0.0, 0.5}) {
      for (double aq : {0.25, 0.5, 1.0}) {
        const complexd lhs = cwt_at(sdil, gx, bump, bq, aq);
        const complexd rhs = cwt_at(sig, gx, bump, lam * bq, lam * aq);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
    h.check("cwt.dilation_covariance", worst, 1e-6);

    const auto K = reconstruction_constant(bump, bump, 2);
    h.check_true("K.self_pair_real_positive",
                 K.value.real() > 0.0 && std::abs(K.value.imag()) < 1e-12);
    const auto K2 = reconstruction_constant(bump, bump, 2, 2);
    h.check("K.refinement_stability", std::abs(K.value - K2.value), 1e-8);
    bool degenerate_caught = false;
    try {
      (void)reconstruction_constant(make_wavelet("gauss:1"), gd2, 2);
    } catch (const DegeneratePairError&) {
      degenerate_caught = true;
    }
    h.check_true("K.odd_pair_degenerate", degenerate_caught);

    // 1-D identity with a wide scale window (truncation-dominated otherwise)
    const LogGrid gai(1.0 / 32.0, 64.0, quick ? 40 : 56);
    const Grid1D gbi = Grid1D::centered(16.0, 513);
    const auto wi = cwt(sig, gx, bump, gbi, gai);
    const auto rec = wavelet_synthesis(wi, bump, gx);
    const complexd c = calderon_constant(bump, bump);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < gx.count; ++i) {
      const double r = (rec[i] / c).real() - sig[i];
      num += r * r;
      den += sig[i] * sig[i];
    }
    h.check("wavelet.inversion_wide_scales", std::sqrt(num / den), 2e-2);
  }

  // --- radon ---
  {
    const Field2D f = gaussian_field(8.0, res);
    const SphereGrid sphere(ndir);
    const Grid1D gp = Grid1D::centered(8.0, nb);
    const Sinogram sd = radon(f, sphere, gp, RadonMethod::Direct);
    const Sinogram sf = radon(f, sphere, gp, RadonMethod::FourierSlice);
    h.check("radon.gaussian_center_oracle",
            std::abs(sd.at(0, nb / 2) - std::sqrt(kPi)), 2e-4);
    h.check("radon.direct_vs_fourier_slice", rel_l2_diff(sf.v, sd.v), 1e-4);

    double anti = 0.0;
    for (int d = 0; d < ndir / 2; ++d)
      for (int ip = 0; ip < nb; ++ip)
        anti = std::max(anti,
                        std::abs(sd.at(d, ip) - sd.at(d + ndir / 2, nb - 1 - ip)));
    h.check("radon.antipodal_symmetry", anti, 1e-8);

    const auto pair = radon_dilation_pair(gaussian_field(8.0, res, 4.0), 2.0, sphere, gp);
    h.check("radon.dilation_identity", rel_l2_diff(pair.first.v, pair.second.v), 1e-3);

    // dual transform: constant sinogram back-projects to 2 pi
    Sinogram ones(sphere, gp);
    std::fill(ones.v.begin(), ones.v.end(), 1.0);
    const auto dual = dual_radon(ones, f.gx, f.gy);
    double worst = 0.0;
    for (double x : dual.field.v) worst = std::max(worst, std::abs(x - kTwoPi));
    h.check("radon.dual_constant", worst, 1e-10);

    // duality <Rf, rho> = <f, R* rho>
    Sinogram rho(sphere, gp);
    for (int d = 0; d < ndir; ++d)
      for (int ip = 0; ip < nb; ++ip) {
        const double p = gp.node(ip);
        rho.at(d, ip) = std::exp(-p * p) * (1.0 + 0.5 * std::cos(sphere.theta(d)));
      }
    KahanSum lhs;
    for (int d = 0; d < ndir; ++d)
      for (int ip = 0; ip < nb; ++ip)
        lhs.add(sd.at(d, ip) * rho.at(d, ip) * sphere.weight() *
                trap_weight(ip, nb, gp.step));
    const auto rstar = dual_radon(rho, f.gx, f.gy);
    KahanSum rhs;
    for (int iy = 0; iy < f.ny(); ++iy)
      for (int ix = 0; ix < f.nx(); ++ix)
        rhs.add(f.at(iy, ix) * rstar.field.at(iy, ix) * trap_weight(ix, f.nx(), f.gx.step) *
                trap_weight(iy, f.ny(), f.gy.step));
    h.check("radon.duality_pairing",
            std::abs(lhs.get() - rhs.get()) / std::abs(rhs.get()), 1e-4);
  }

  // --- ridgelet ---
  {
    const int rr = quick ? 32 : 48;
    const Field2D f = gaussian_field(8.0, rr);
    const SphereGrid sphere(quick ? 12 : 24);
    const Grid1D gb = Grid1D::centered(8.0, quick ? 65 : 97);
    const LogGrid ga(0.25, 4.0, quick ? 10 : 14);
    const auto cd = ridgelet_direct(f, gd2, sphere, gb, ga);
    const auto cr = ridgelet_via_radon(f, gd2, sphere, gb, ga);
    h.check("ridgelet.path_equivalence", rel_l2_diff(cd.v, cr.v), 1e-3);

    // J_s o J_{-s} = id and the pairing consistency with J_{1-n}
    const auto js = scale_multiplier(scale_multiplier(cr, 1.7), -1.7);
    h.check("ridgelet.scale_multiplier_inverse", rel_l2_diff(js.v, cr.v), 1e-12);
    std::vector<double> phi(sphere.count, 1.0);
    const auto paired = pair_directions(cr, phi);
    const auto jcoeff = scale_multiplier(cr, -(kSpaceDim - 1));
    double worst = 0.0;
    for (int j = 0; j < ga.count; ++j)
      for (int k = 0; k < gb.count; ++k) {
        complexd acc{};
        for (int d = 0; d < sphere.count; ++d) acc += jcoeff.at(d, j, k) * sphere.weight();
        worst = std::max(worst, std::abs(acc - paired.at(j, k)));
      }
    h.check("ridgelet.pairing_matches_J_multiplier", worst, 1e-12);

    // synthesis modes agree
    const Grid1D gxy = Grid1D::centered(8.0, quick ? 24 : 32);
    const Field2D s_fast = ridgelet_synthesis(cr, gd2, gxy, gxy, SynthesisMode::Fast);
    const Field2D s_exact = ridgelet_synthesis(cr, gd2, gxy, gxy, SynthesisMode::Exact);
    h.check("ridgelet.synthesis_fast_vs_exact", rel_l2_diff(s_fast.v, s_exact.v), 1e-4);

    // inversion at a wide scale window; the injected measure bug must break it
    const LogGrid gaw(1.0 / 8.0, 32.0, quick ? 16 : 24);
    const SphereGrid sphw(quick ? 24 : 32);
    const Grid1D gbw = Grid1D::centered(8.0, quick ? 129 : 129);
    RidgeletCoefficients coeff = ridgelet_via_radon(f, bump, sphw, gbw, gaw);
    if (inject_synthesis_bug) coeff = scale_multiplier(coeff, 2.0 * kSpaceDim);
    const auto K = reconstruction_constant(bump, bump, kSpaceDim);
    for (auto& cval : coeff.v) cval /= K.value;
    const Field2D rec = ridgelet_synthesis(coeff, bump, f.gx, f.gy);
    h.check("ridgelet.inversion_wide_scales", rel_l2_diff(rec.v, f.v), 8e-2);
  }

  // --- asymptotics ---
  {
    // synthetic degree fits
    std::vector<double> lams(24);
    const LogGrid lg(1.0, 1000.0, 24);
    for (int i = 0; i < 24; ++i) lams[i] = lg.node(i);
    Orbit o1;
    o1.F.resize(24);
    o1.mask.assign(24, 1);
    for (int i = 0; i < 24; ++i) o1.F[i] = complexd(3.0 / lams[i], 0.0);
    const DegreeFit f1 = estimate_degree(o1, lams, Regime::Infinity);
    h.check("degree.exact_power_alpha", std::abs(f1.alpha + 1.0), 1e-10);
    h.check("degree.exact_power_amplitude", std::abs(std::abs(f1.M) - 3.0), 1e-8);

    Orbit o2;
    o2.F.resize(24);
    o2.mask.assign(24, 1);
    for (int i = 0; i < 24; ++i)
      o2.F[i] = complexd(std::pow(lams[i], -2.0) *
                             std::pow(SlowlyVaryingModel::kEuler + std::log(lams[i]), 1.5),
                         0.0);
    const DegreeFit f2 = estimate_degree(o2, lams, Regime::Infinity);
    h.check("degree.logpower_alpha", std::abs(f2.alpha + 2.0), 0.05);
    h.check("degree.logpower_beta", std::abs(f2.L.beta - 1.5), 0.1);

    // gallery orbits through the transform pipeline
    const GalleryEntry riesz1 = gallery("riesz:-1");
    ScalingConfig cfg;
    cfg.ndir = quick ? 16 : 32;
    cfg.n_probes = quick ? 4 : 6;
    cfg.n_lambda = quick ? 12 : 16;
    const ScalingResult r1 = run_scaling(riesz1, cfg);
    h.check("scaling.riesz_alpha", std::abs(r1.report.alpha_hat + 1.0), 0.05);
    h.check_true("scaling.riesz_verdict", r1.report.verdict == "quasiasymptotic");

    const ScalingResult rosc = run_scaling(gallery("oscillatory_counterexample"), cfg);
    h.check_true("scaling.oscillatory_not_quasi",
                 rosc.report.verdict == "not quasiasymptotic");
    h.check_true("scaling.oscillatory_bound_finite", rosc.report.bound.found);

    // mode equivalence (resample vs coefficient flow) on the riesz entry
    const WaveletProfile psi = make_wavelet("gauss:2");
    const Probe probe{std::cos(0.9), std::sin(0.9)};
    std::vector<double> lam2(10);
    const LogGrid lg2(1.0, 8.0, 10);
    for (int i = 0; i < 10; ++i) lam2[i] = lg2.node(i);
    const Orbit ores = gallery_orbit(riesz1, psi, probe, kTwoPi, lam2);
    const Grid1D gbf = Grid1D::centered(12.0, 385);
    const LogGrid gaf(0.25, 12.0, 40);
    const PairedCoefficients pc = gallery_paired_field(riesz1, psi, kTwoPi, gbf, gaf);
    const Orbit oflow = flow_orbit(pc, probe, lam2);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
      if (oflow.mask[i])
        worst = std::max(worst, std::abs(oflow.F[i] - ores.F[i]) / std::abs(ores.F[i]));
    h.check("scaling.mode_equivalence", worst, 2e-3);
  }

  // --- io round trips ---
  {
    const Field2D f = gaussian_field(4.0, 16);
    const std::string tmp = "/tmp/rdg_selftest_field.rfld";
    write_field(f, tmp);
    const Field2D g = read_field(tmp);
    h.check_true("io.field_roundtrip",
                 f.v == g.v && f.gx.origin == g.gx.origin && f.gx.step == g.gx.step);
    std::remove(tmp.c_str());
  }

  return h.rep;
}

std::string SelftestReport::to_json() const {
  nlohmann::ordered_json j;
  j["failures"] = failures;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["value"] = c.value;
    cj["tol"] = c.tol;
    cj["pass"] = c.pass;
    arr.push_back(cj);
  }
  j["checks"] = arr;
  return j.dump(2);
}

}  // namespace rdg
