#include "crfid/rcs.hpp"

#include "crfid/errors.hpp"

#include <cmath>
#include <string>

namespace crfid {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_canonical(const FrequencySweep& sweep, const CanonicalGrid& grid, const char* name) {
    validate_sweep(sweep);
    if (!on_canonical_grid(sweep, grid)) {
        throw DataError(std::string("calibrate: ") + name + " sweep is not on the canonical grid");
    }
}

} // namespace

void validate_signature(const RcsSignature& sig) {
    if (sig.rcs_m2.empty()) {
        throw DataError("signature: empty");
    }
    if (sig.frequencies_hz.size() != sig.rcs_m2.size()) {
        throw DataError("signature: frequency and value counts differ");
    }
    for (std::size_t i = 0; i < sig.size(); ++i) {
        if (!std::isfinite(sig.rcs_m2[i]) || !std::isfinite(sig.frequencies_hz[i])) {
            throw DataError("signature: non-finite entry at index " + std::to_string(i));
        }
        if (i > 0 && !(sig.frequencies_hz[i] > sig.frequencies_hz[i - 1])) {
            throw DataError("signature: frequencies must be strictly increasing");
        }
    }
}

double sigma_ref(const ReferencePlate& plate, double frequency_hz) {
    if (!(plate.side_m > 0.0)) {
        throw DataError("sigma_ref: plate side must be positive");
    }
    if (!(frequency_hz > 0.0)) {
        throw DataError("sigma_ref: frequency must be positive");
    }
    const double lambda = kSpeedOfLight / frequency_hz;
    const double a = plate.area_m2();
    return 4.0 * kPi * a * a / (lambda * lambda);
}

RcsSignature calibrate(const FrequencySweep& tag, const FrequencySweep& iso, const FrequencySweep& ref,
                       const ReferencePlate& plate, const CanonicalGrid& grid) {
    require_canonical(tag, grid, "tag");
    require_canonical(iso, grid, "isolation");
    require_canonical(ref, grid, "reference");

    RcsSignature out;
    out.frequencies_hz = tag.frequencies_hz;
    out.rcs_m2.resize(tag.size());
    out.filtered = false;

    for (std::size_t i = 0; i < tag.size(); ++i) {
        const std::complex<double> num = tag.s11[i] - iso.s11[i];
        const std::complex<double> den = ref.s11[i] - iso.s11[i];
        if (std::abs(den) < kDenominatorFloor) {
            throw NumericError("calibrate: reference separation below floor at frequency index " +
                               std::to_string(i) + " (unusable reference measurement)");
        }
        // |num/den|^2 as norm(num)/norm(den): avoids complex-division rounding,
        // so tag == ref gives a ratio of exactly 1.
        const double ratio_sq = std::norm(num) / std::norm(den);
        out.rcs_m2[i] = ratio_sq * sigma_ref(plate, tag.frequencies_hz[i]);
    }
    return out;
}

std::vector<double> to_dbsm(const RcsSignature& sig) {
    std::vector<double> out(sig.size());
    for (std::size_t i = 0; i < sig.size(); ++i) {
        out[i] = 10.0 * std::log10(std::max(sig.rcs_m2[i], kDbsmFloor));
    }
    return out;
}

} // namespace crfid
