#pragma once

#include <vector>

#include "crfid/rcs.hpp"

namespace crfid {

// Low-pass Butterworth applied forward-backward (zero phase).
struct FilterSpec {
    int order = 4;
    double cutoff = 0.1; // fraction of Nyquist for the uniformly indexed sequence

    void validate() const; // throws DataError: order must be even >= 2, cutoff in (0, 1)
};

// One second-order section, a0 normalized to 1.
struct Biquad {
    double b0, b1, b2;
    double a1, a2;
};

// Digital design: analog prototype poles, bilinear transform with frequency
// prewarping, conjugate pairs grouped into biquads, each section's DC gain
// normalized to 1.
std::vector<Biquad> design_butterworth(const FilterSpec& spec);

// |H(e^{j*pi*wn})| of the cascade at normalized frequency wn in [0, 1].
double sos_magnitude(const std::vector<Biquad>& sos, double wn);

// Zero-phase filtering: odd-reflection padding (3 x 6 coefficients = 18
// samples per edge), steady-state initial conditions, forward and reverse
// passes, padding trimmed. Throws DataError if x.size() <= 18. No clamping.
std::vector<double> filtfilt(const std::vector<double>& x, const FilterSpec& spec);

// Same, keeping the frequency axis; output clamped >= 0 and marked filtered.
RcsSignature filtfilt(const RcsSignature& sig, const FilterSpec& spec);

} // namespace crfid
