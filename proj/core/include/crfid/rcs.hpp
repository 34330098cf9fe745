#pragma once

#include "crfid/touchstone.hpp"

#include <vector>

namespace crfid {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

/// Calibrated monostatic RCS signature on the canonical grid.
struct RcsSignature {
    std::vector<double> frequencies_hz;
    std::vector<double> rcs_m2;
    bool filtered = false;

    std::size_t size() const { return rcs_m2.size(); }
};

/// Square flat metal plate of known analytic RCS, used as calibration reference.
struct ReferencePlate {
    double side_m = 0.025;

    double area_m2() const { return side_m * side_m; }
};

/// Throws DataError unless frequencies and values match in size, are
/// non-empty, frequencies increase strictly, and all values are finite.
void validate_signature(const RcsSignature& sig);

/// Physical-optics RCS of the flat plate: 4*pi*A^2 / lambda^2 with lambda = c/f.
double sigma_ref(const ReferencePlate& plate, double frequency_hz);

/// Pointwise calibration:
///   rcs(f) = |(S11_tag - S11_iso) / (S11_ref - S11_iso)|^2 * sigma_ref(plate, f)
/// All three sweeps must share the canonical grid; the reference separation
/// |S11_ref - S11_iso| must stay above the denominator floor at every point.
RcsSignature calibrate(const FrequencySweep& tag, const FrequencySweep& iso, const FrequencySweep& ref,
                       const ReferencePlate& plate, const CanonicalGrid& grid = {});

/// Report scale: 10*log10(max(rcs, 1e-12)) in dB relative to 1 m^2.
std::vector<double> to_dbsm(const RcsSignature& sig);

inline constexpr double kDenominatorFloor = 1e-9;
inline constexpr double kDbsmFloor = 1e-12;

} // namespace crfid
