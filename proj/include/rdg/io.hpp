#pragma once

#include <string>

#include "rdg/asymptotics.hpp"

namespace rdg {

// .rfld: one JSON header line {"magic":"RFLD1","nx","ny","x0","y0","dx","dy"}
// then nx*ny little-endian binary64, row-major with y as the slow index
void write_field(const Field2D& f, const std::string& path);
Field2D read_field(const std::string& path);
void write_field_csv(const Field2D& f, const std::string& path);  // x,y,value lines

// .rsg: {"magic":"RSG1","ntheta","np","p0","dp","flag_nondecaying"} + binary64,
// direction-major
void write_sinogram(const Sinogram& s, const std::string& path);
Sinogram read_sinogram(const std::string& path);

// .rwc1: {"magic":"RWC1","nb","na","b0","db","a_values":[...]} + interleaved
// (re,im) binary64, scale-major
void write_wavelet_coeffs(const WaveletCoefficients1D& w, const std::string& path);
WaveletCoefficients1D read_wavelet_coeffs(const std::string& path);

// .rcf: {"magic":"RCF1","ntheta","nb","na","b0","db","a_values":[...],
// "provenance"} + complex binary64, direction-major then scale then offset
void write_ridgelet_coeffs(const RidgeletCoefficients& c, const std::string& path);
RidgeletCoefficients read_ridgelet_coeffs(const std::string& path);

std::string report_to_json(const TauberianReport& rep);
void write_report_json(const TauberianReport& rep, const std::string& path);

// lambda,probe_index,window_index,re,im
void write_orbit_csv(const std::vector<OrbitRecord>& rows, const std::string& path);

}  // namespace rdg
