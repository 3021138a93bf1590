#include "ridgekit.h"

#include <cstring>
#include <fstream>
#include <string>

#include "rdg/io.hpp"
#include "rdg/parallel.hpp"
#include "rdg/selftest.hpp"

namespace {

thread_local std::string g_last_error;

struct HandleError {
  rdg_status code;
};

rdg_status fail(rdg_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
rdg_status guarded(Fn&& fn) {
  try {
    fn();
    return RDG_OK;
  } catch (const rdg::DegeneratePairError& e) {
    return fail(RDG_E_DEGENERATE, e.what());
  } catch (const rdg::IoError& e) {
    return fail(RDG_E_IO, e.what());
  } catch (const rdg::NumericError& e) {
    return fail(RDG_E_NUMERIC, e.what());
  } catch (const rdg::InvalidInputError& e) {
    return fail(RDG_E_INVALID, e.what());
  } catch (const std::exception& e) {
    return fail(RDG_E_UNKNOWN, e.what());
  }
}

rdg::ScalingConfig to_config(const rdg_scaling_params* sp) {
  rdg::ScalingConfig cfg;
  if (!sp) return cfg;
  cfg.regime = sp->regime_origin ? rdg::Regime::Origin : rdg::Regime::Infinity;
  if (sp->ndir > 0) cfg.ndir = sp->ndir;
  if (sp->n_probes > 0) cfg.n_probes = sp->n_probes;
  if (sp->n_windows > 0) cfg.n_windows = sp->n_windows;
  if (sp->n_lambda > 0) cfg.n_lambda = sp->n_lambda;
  cfg.lam_lo = sp->lam_lo;
  cfg.lam_hi = sp->lam_hi;
  cfg.seed = sp->seed;
  if (sp->wavelet) cfg.wavelet = sp->wavelet;
  return cfg;
}

struct Grids {
  rdg::SphereGrid sphere;
  rdg::Grid1D gb;
  rdg::LogGrid ga;
};

Grids to_grids(const rdg_params* p) {
  rdg_params d{64, 257, 48, 8.0, 0.0625, 8.0};
  if (p) {
    if (p->ndir > 0) d.ndir = p->ndir;
    if (p->nb > 0) d.nb = p->nb;
    if (p->na > 0) d.na = p->na;
    if (p->extent > 0) d.extent = p->extent;
    if (p->amin > 0) d.amin = p->amin;
    if (p->amax > 0) d.amax = p->amax;
  }
  return {rdg::SphereGrid(d.ndir), rdg::Grid1D::centered(d.extent, d.nb),
          rdg::LogGrid(d.amin, d.amax, d.na)};
}

}  // namespace

struct rdg_field {
  rdg::Field2D f;
};
struct rdg_sinogram {
  rdg::Sinogram s;
};
struct rdg_wavelet {
  rdg::WaveletProfile w;
};
struct rdg_coeffs {
  rdg::RidgeletCoefficients c;
};
struct rdg_report {
  rdg::ScalingResult r;
};

extern "C" {

const char* rdg_last_error(void) { return g_last_error.c_str(); }

const char* rdg_version(void) { return "ridgekit 1.0.0"; }

void rdg_set_threads(int n) { rdg::set_threads(n); }

rdg_status rdg_wavelet_create(const char* spec, rdg_wavelet** out) {
  if (!spec || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = new rdg_wavelet{rdg::make_wavelet(spec)}; });
}

void rdg_wavelet_free(rdg_wavelet* w) { delete w; }

rdg_status rdg_field_load(const char* path, rdg_field** out) {
  if (!path || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = new rdg_field{rdg::read_field(path)}; });
}

rdg_status rdg_field_save(const rdg_field* f, const char* path) {
  if (!f || !path) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { rdg::write_field(f->f, path); });
}

rdg_status rdg_field_save_csv(const rdg_field* f, const char* path) {
  if (!f || !path) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { rdg::write_field_csv(f->f, path); });
}

rdg_status rdg_field_gallery(const char* gallery_spec, int res, double extent, rdg_field** out) {
  if (!gallery_spec || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] {
    const rdg::GalleryEntry g = rdg::gallery(gallery_spec);
    const rdg::Grid1D gx = rdg::Grid1D::centered(extent > 0 ? extent : 8.0, res > 1 ? res : 128);
    *out = new rdg_field{
        rdg::sample_function([&](double x, double y) { return g.field(x, y); }, gx, gx)};
  });
}

rdg_status rdg_field_dims(const rdg_field* f, int* nx, int* ny) {
  if (!f || !nx || !ny) return fail(RDG_E_INVALID, "null argument");
  *nx = f->f.nx();
  *ny = f->f.ny();
  return RDG_OK;
}

rdg_status rdg_field_rel_l2(const rdg_field* a, const rdg_field* b, double* out) {
  if (!a || !b || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = rdg::rel_l2_diff(a->f.v, b->f.v); });
}

void rdg_field_free(rdg_field* f) { delete f; }

rdg_status rdg_radon(const rdg_field* f, int ndir, int np, double extent,
                     rdg_radon_method method, rdg_sinogram** out) {
  if (!f || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] {
    const rdg::SphereGrid sphere(ndir > 0 ? ndir : 64);
    const rdg::Grid1D gp = rdg::Grid1D::centered(extent > 0 ? extent : 8.0, np > 1 ? np : 257);
    *out = new rdg_sinogram{rdg::radon(
        f->f, sphere, gp,
        method == RDG_RADON_FOURIER_SLICE ? rdg::RadonMethod::FourierSlice
                                          : rdg::RadonMethod::Direct)};
  });
}

rdg_status rdg_sinogram_save(const rdg_sinogram* s, const char* path) {
  if (!s || !path) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { rdg::write_sinogram(s->s, path); });
}

rdg_status rdg_sinogram_load(const char* path, rdg_sinogram** out) {
  if (!path || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = new rdg_sinogram{rdg::read_sinogram(path)}; });
}

rdg_status rdg_sinogram_rel_l2(const rdg_sinogram* a, const rdg_sinogram* b, double* out) {
  if (!a || !b || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = rdg::rel_l2_diff(a->s.v, b->s.v); });
}

void rdg_sinogram_free(rdg_sinogram* s) { delete s; }

rdg_status rdg_ridgelet(const rdg_field* f, const rdg_wavelet* psi, const rdg_params* params,
                        rdg_ridgelet_method method, rdg_coeffs** out) {
  if (!f || !psi || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] {
    const Grids g = to_grids(params);
    *out = new rdg_coeffs{method == RDG_RIDGELET_DIRECT
                              ? rdg::ridgelet_direct(f->f, psi->w, g.sphere, g.gb, g.ga)
                              : rdg::ridgelet_via_radon(f->f, psi->w, g.sphere, g.gb, g.ga)};
  });
}

rdg_status rdg_coeffs_save(const rdg_coeffs* c, const char* path) {
  if (!c || !path) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { rdg::write_ridgelet_coeffs(c->c, path); });
}

rdg_status rdg_coeffs_load(const char* path, rdg_coeffs** out) {
  if (!path || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = new rdg_coeffs{rdg::read_ridgelet_coeffs(path)}; });
}

rdg_status rdg_coeffs_rel_l2(const rdg_coeffs* a, const rdg_coeffs* b, double* out) {
  if (!a || !b || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = rdg::rel_l2_diff(a->c.v, b->c.v); });
}

void rdg_coeffs_free(rdg_coeffs* c) { delete c; }

rdg_status rdg_synthesize(const rdg_coeffs* c, const rdg_wavelet* eta, int res, double extent,
                          rdg_field** out) {
  if (!c || !eta || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] {
    const rdg::Grid1D gx = rdg::Grid1D::centered(extent > 0 ? extent : 8.0, res > 1 ? res : 128);
    *out = new rdg_field{rdg::ridgelet_synthesis(c->c, eta->w, gx, gx)};
  });
}

rdg_status rdg_reconstruct(const rdg_field* f, const rdg_wavelet* psi, const rdg_wavelet* eta,
                           const rdg_params* params, rdg_field** out, double* rel_l2,
                           double* k_re, double* k_im) {
  if (!f || !psi || !eta || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] {
    const Grids g = to_grids(params);
    rdg::ReconstructResult res = rdg::reconstruct(f->f, psi->w, eta->w, g.sphere, g.gb, g.ga);
    if (rel_l2) *rel_l2 = res.rel_l2_error;
    if (k_re) *k_re = res.K.real();
    if (k_im) *k_im = res.K.imag();
    *out = new rdg_field{std::move(res.recon)};
  });
}

rdg_status rdg_reconstruction_constant(const rdg_wavelet* psi, const rdg_wavelet* eta, int n,
                                       double* k_re, double* k_im, double* err_bound) {
  if (!psi || !eta) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] {
    const rdg::ReconstructionConstant k =
        rdg::reconstruction_constant(psi->w, eta->w, n > 0 ? n : rdg::kSpaceDim);
    if (k_re) *k_re = k.value.real();
    if (k_im) *k_im = k.value.imag();
    if (err_bound) *err_bound = k.error_bound;
  });
}

rdg_status rdg_scaling_gallery(const char* gallery_spec, const rdg_scaling_params* sp,
                               rdg_report** out) {
  if (!gallery_spec || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] {
    *out = new rdg_report{rdg::run_scaling(rdg::gallery(gallery_spec), to_config(sp))};
  });
}

rdg_status rdg_scaling_field(const rdg_field* f, const rdg_scaling_params* sp, rdg_report** out) {
  if (!f || !out) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { *out = new rdg_report{rdg::run_scaling(f->f, to_config(sp))}; });
}

rdg_status rdg_report_write_json(const rdg_report* r, const char* path) {
  if (!r || !path) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { rdg::write_report_json(r->r.report, path); });
}

rdg_status rdg_report_write_orbits_csv(const rdg_report* r, const char* path) {
  if (!r || !path) return fail(RDG_E_INVALID, "null argument");
  return guarded([&] { rdg::write_orbit_csv(r->r.rows, path); });
}

rdg_status rdg_report_verdict(const rdg_report* r, int* verdict) {
  if (!r || !verdict) return fail(RDG_E_INVALID, "null argument");
  const std::string& v = r->r.report.verdict;
  if (v == "quasiasymptotic")
    *verdict = 0;
  else if (v == "not quasiasymptotic")
    *verdict = 1;
  else
    *verdict = 2;
  return RDG_OK;
}

rdg_status rdg_report_alpha(const rdg_report* r, double* alpha_hat, int* determined) {
  if (!r) return fail(RDG_E_INVALID, "null argument");
  if (alpha_hat) *alpha_hat = r->r.report.alpha_hat;
  if (determined) *determined = r->r.report.alpha_determined ? 1 : 0;
  return RDG_OK;
}

void rdg_report_free(rdg_report* r) { delete r; }

rdg_status rdg_selftest(int quick, int inject, const char* json_path, int* n_failures) {
  return guarded([&] {
    const rdg::SelftestReport rep = rdg::run_selftest(quick != 0, inject != 0);
    if (n_failures) *n_failures = rep.failures;
    if (json_path) {
      std::ofstream os(json_path);
      if (!os) throw rdg::IoError(std::string("cannot open for writing: ") + json_path);
      os << rep.to_json() << '\n';
    }
  });
}

}  // extern "C"
