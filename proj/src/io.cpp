#include "rdg/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace rdg {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_doubles(std::ofstream& os, const double* data, size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& is, double* data, size_t n, const std::string& path) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<size_t>(is.gcount()) != n * sizeof(double))
    throw IoError("truncated payload in " + path);
}

ordered_json read_header(std::ifstream& is, const std::string& path, const std::string& magic) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("missing header line in " + path);
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const std::exception& e) {
    throw IoError("malformed header in " + path + ": " + e.what());
  }
  if (!j.contains("magic") || j["magic"] != magic)
    throw IoError(path + ": expected magic '" + magic + "'");
  return j;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  return is;
}

}  // namespace

void write_field(const Field2D& f, const std::string& path) {
  auto os = open_out(path);
  ordered_json j;
  j["magic"] = "RFLD1";
  j["nx"] = f.nx();
  j["ny"] = f.ny();
  j["x0"] = f.gx.origin;
  j["y0"] = f.gy.origin;
  j["dx"] = f.gx.step;
  j["dy"] = f.gy.step;
  os << j.dump() << '\n';
  write_doubles(os, f.v.data(), f.v.size());
  if (!os) throw IoError("write failed: " + path);
}

Field2D read_field(const std::string& path) {
  auto is = open_in(path);
  const ordered_json j = read_header(is, path, "RFLD1");
  Field2D f(Grid1D(j.at("x0").get<double>(), j.at("dx").get<double>(), j.at("nx").get<int>()),
            Grid1D(j.at("y0").get<double>(), j.at("dy").get<double>(), j.at("ny").get<int>()));
  read_doubles(is, f.v.data(), f.v.size(), path);
  f.check_finite();
  return f;
}

void write_field_csv(const Field2D& f, const std::string& path) {
  auto os = open_out(path);
  os << "x,y,value\n";
  os << std::setprecision(17);
  for (int iy = 0; iy < f.ny(); ++iy)
    for (int ix = 0; ix < f.nx(); ++ix)
      os << f.gx.node(ix) << ',' << f.gy.node(iy) << ',' << f.at(iy, ix) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

void write_sinogram(const Sinogram& s, const std::string& path) {
  auto os = open_out(path);
  ordered_json j;
  j["magic"] = "RSG1";
  j["ntheta"] = s.sphere.count;
  j["np"] = s.grid_p.count;
  j["p0"] = s.grid_p.origin;
  j["dp"] = s.grid_p.step;
  j["flag_nondecaying"] = s.nondecaying_input;
  os << j.dump() << '\n';
  write_doubles(os, s.v.data(), s.v.size());
  if (!os) throw IoError("write failed: " + path);
}

Sinogram read_sinogram(const std::string& path) {
  auto is = open_in(path);
  const ordered_json j = read_header(is, path, "RSG1");
  Sinogram s(SphereGrid(j.at("ntheta").get<int>()),
             Grid1D(j.at("p0").get<double>(), j.at("dp").get<double>(), j.at("np").get<int>()));
  if (j.contains("flag_nondecaying")) s.nondecaying_input = j["flag_nondecaying"].get<bool>();
  read_doubles(is, s.v.data(), s.v.size(), path);
  return s;
}

namespace {

LogGrid grid_from_a_values(const ordered_json& j) {
  const auto av = j.at("a_values").get<std::vector<double>>();
  if (av.size() < 2) throw IoError("a_values must hold at least two scales");
  return LogGrid(av.front(), av.back(), static_cast<int>(av.size()));
}

ordered_json a_values_json(const LogGrid& g) {
  std::vector<double> av(g.count);
  for (int j = 0; j < g.count; ++j) av[j] = g.node(j);
  return ordered_json(av);
}

}  // namespace

void write_wavelet_coeffs(const WaveletCoefficients1D& w, const std::string& path) {
  auto os = open_out(path);
  ordered_json j;
  j["magic"] = "RWC1";
  j["nb"] = w.grid_b.count;
  j["na"] = w.grid_a.count;
  j["b0"] = w.grid_b.origin;
  j["db"] = w.grid_b.step;
  j["a_values"] = a_values_json(w.grid_a);
  os << j.dump() << '\n';
  write_doubles(os, reinterpret_cast<const double*>(w.v.data()), 2 * w.v.size());
  if (!os) throw IoError("write failed: " + path);
}

WaveletCoefficients1D read_wavelet_coeffs(const std::string& path) {
  auto is = open_in(path);
  const ordered_json j = read_header(is, path, "RWC1");
  WaveletCoefficients1D w(
      Grid1D(j.at("b0").get<double>(), j.at("db").get<double>(), j.at("nb").get<int>()),
      grid_from_a_values(j));
  read_doubles(is, reinterpret_cast<double*>(w.v.data()), 2 * w.v.size(), path);
  return w;
}

void write_ridgelet_coeffs(const RidgeletCoefficients& c, const std::string& path) {
  auto os = open_out(path);
  ordered_json j;
  j["magic"] = "RCF1";
  j["ntheta"] = c.sphere.count;
  j["nb"] = c.grid_b.count;
  j["na"] = c.grid_a.count;
  j["b0"] = c.grid_b.origin;
  j["db"] = c.grid_b.step;
  j["a_values"] = a_values_json(c.grid_a);
  j["provenance"] = (c.provenance == Provenance::Direct) ? "direct" : "via_radon";
  os << j.dump() << '\n';
  write_doubles(os, reinterpret_cast<const double*>(c.v.data()), 2 * c.v.size());
  if (!os) throw IoError("write failed: " + path);
}

RidgeletCoefficients read_ridgelet_coeffs(const std::string& path) {
  auto is = open_in(path);
  const ordered_json j = read_header(is, path, "RCF1");
  RidgeletCoefficients c(
      SphereGrid(j.at("ntheta").get<int>()),
      Grid1D(j.at("b0").get<double>(), j.at("db").get<double>(), j.at("nb").get<int>()),
      grid_from_a_values(j));
  const std::string prov = j.value("provenance", "direct");
  c.provenance = (prov == "via_radon") ? Provenance::ViaRadon : Provenance::Direct;
  read_doubles(is, reinterpret_cast<double*>(c.v.data()), 2 * c.v.size(), path);
  return c;
}

std::string report_to_json(const TauberianReport& rep) {
  ordered_json j;
  j["alpha_hat"] = rep.alpha_hat;
  j["alpha_determined"] = rep.alpha_determined;
  ordered_json l;
  l["kind"] = (rep.L_hat.kind == SlowlyVaryingModel::Kind::Constant) ? "constant" : "log_power";
  l["c"] = rep.L_hat.c;
  l["beta"] = rep.L_hat.beta;
  j["L"] = l;
  ordered_json probes = ordered_json::array();
  for (const auto& p : rep.probes) {
    ordered_json pj;
    pj["b"] = p.b;
    pj["a"] = p.a;
    pj["verdict"] = to_string(p.verdict);
    pj["M_re"] = p.M.real();
    pj["M_im"] = p.M.imag();
    pj["drift"] = p.drift;
    probes.push_back(pj);
  }
  j["probes"] = probes;
  ordered_json b;
  b["l"] = rep.bound.l;
  b["m"] = rep.bound.m;
  b["C"] = rep.bound.C;
  b["found"] = rep.bound.found;
  j["bound"] = b;
  j["verdict"] = rep.verdict;
  j["residuals"] = rep.fit_rms;
  return j.dump(2);
}

void write_report_json(const TauberianReport& rep, const std::string& path) {
  auto os = open_out(path);
  os << report_to_json(rep) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

void write_orbit_csv(const std::vector<OrbitRecord>& rows, const std::string& path) {
  auto os = open_out(path);
  os << "lambda,probe_index,window_index,re,im\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    if (!r.valid) continue;
    os << r.lambda << ',' << r.probe << ',' << r.window << ',' << r.F.real() << ','
       << r.F.imag() << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace rdg
