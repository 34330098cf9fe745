#include "crfid/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "crfid/errors.hpp"

namespace crfid {

namespace {

constexpr int kPadLen = 18; // 3 x 6 coefficients per section

// Steady-state delay-line state (transposed direct form II) for a constant
// input x0; returns the section's steady-state output level.
struct SectionState {
    double z1, z2;
};

SectionState steady_state(const Biquad& s, double x0, double* y_out) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double y0 = gain * x0;
    SectionState st;
    st.z2 = s.b2 * x0 - s.a2 * y0;
    st.z1 = (s.b1 + s.b2) * x0 - (s.a1 + s.a2) * y0;
    *y_out = y0;
    return st;
}

// Single forward pass through the cascade, in place.
void sosfilt(const std::vector<Biquad>& sos, std::vector<double>& x) {
    double level = x.empty() ? 0.0 : x.front();
    for (const Biquad& s : sos) {
        double y0 = 0.0;
        SectionState st = steady_state(s, level, &y0);
        for (double& v : x) {
            const double in = v;
            const double out = s.b0 * in + st.z1;
            st.z1 = s.b1 * in - s.a1 * out + st.z2;
            st.z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
        level = y0;
    }
}

} // namespace

void FilterSpec::validate() const {
    if (order < 2 || order % 2 != 0)
        throw DataError("filter: order must be an even integer >= 2, got " + std::to_string(order));
    if (!(cutoff > 0.0) || !(cutoff < 1.0))
        throw DataError("filter: normalized cutoff must lie in (0, 1)");
}

std::vector<Biquad> design_butterworth(const FilterSpec& spec) {
    spec.validate();
    const int n = spec.order;
    const double omega = std::tan(std::numbers::pi * spec.cutoff / 2.0); // prewarped
    std::vector<Biquad> sos;
    sos.reserve(static_cast<std::size_t>(n / 2));
    for (int k = 0; k < n / 2; ++k) {
        // Conjugate pole pair of the analog prototype, scaled to omega:
        // s^2 + B s + C with B = -2 Re(p), C = |p|^2.
        const double theta = std::numbers::pi * (2.0 * k + 1.0) / (2.0 * n) + std::numbers::pi / 2.0;
        const double B = -2.0 * omega * std::cos(theta);
        const double C = omega * omega;
        const double a0 = 1.0 + B + C;
        Biquad s;
        s.b0 = C / a0;
        s.b1 = 2.0 * C / a0;
        s.b2 = C / a0;
        s.a1 = (2.0 * C - 2.0) / a0;
        s.a2 = (1.0 - B + C) / a0;
        // Pin the section's DC gain to 1.
        const double g = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
        s.b0 /= g;
        s.b1 /= g;
        s.b2 /= g;
        sos.push_back(s);
    }
    return sos;
}

double sos_magnitude(const std::vector<Biquad>& sos, double wn) {
    const std::complex<double> z = std::polar(1.0, std::numbers::pi * wn);
    const std::complex<double> zi = 1.0 / z;
    std::complex<double> h = 1.0;
    for (const Biquad& s : sos)
        h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
    return std::abs(h);
}

std::vector<double> filtfilt(const std::vector<double>& x, const FilterSpec& spec) {
    const std::vector<Biquad> sos = design_butterworth(spec);
    const std::size_t n = x.size();
    if (n <= static_cast<std::size_t>(kPadLen))
        throw DataError("filter: signature too short for zero-phase filtering (need > " +
                        std::to_string(kPadLen) + " points, got " + std::to_string(n) + ")");

    // Odd reflection about the first and last samples.
    std::vector<double> ext;
    ext.reserve(n + 2 * kPadLen);
    for (int i = kPadLen; i >= 1; --i) ext.push_back(2.0 * x.front() - x[static_cast<std::size_t>(i)]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (int i = 1; i <= kPadLen; ++i)
        ext.push_back(2.0 * x.back() - x[n - 1 - static_cast<std::size_t>(i)]);

    sosfilt(sos, ext);
    std::reverse(ext.begin(), ext.end());
    sosfilt(sos, ext);
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + kPadLen, ext.begin() + kPadLen + static_cast<std::ptrdiff_t>(n));
}

RcsSignature filtfilt(const RcsSignature& sig, const FilterSpec& spec) {
    RcsSignature out;
    out.frequencies_hz = sig.frequencies_hz;
    out.rcs_m2 = filtfilt(sig.rcs_m2, spec);
    for (double& v : out.rcs_m2) v = std::max(v, 0.0);
    out.filtered = true;
    return out;
}

} // namespace crfid
