#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "crfid/dsp.hpp"
#include "crfid/errors.hpp"

using namespace crfid;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> dip_signal(int n, int center, double width) {
    std::vector<double> x(static_cast<std::size_t>(n), 2.0e-3);
    for (int i = 0; i < n; ++i) {
        const double d = (i - center) / width;
        x[static_cast<std::size_t>(i)] -= 1.2e-3 * std::exp(-0.5 * d * d);
    }
    return x;
}

int argmin(const std::vector<double>& x) {
    return static_cast<int>(std::min_element(x.begin(), x.end()) - x.begin());
}

} // namespace

TEST_CASE("filter specs validate order and cutoff") {
    CHECK_NOTHROW(FilterSpec{}.validate());
    CHECK_THROWS_AS((FilterSpec{3, 0.1}).validate(), DataError);
    CHECK_THROWS_AS((FilterSpec{0, 0.1}).validate(), DataError);
    CHECK_THROWS_AS((FilterSpec{4, 0.0}).validate(), DataError);
    CHECK_THROWS_AS((FilterSpec{4, 1.0}).validate(), DataError);
}

TEST_CASE("fourth-order design hits the Butterworth anchor points") {
    const std::vector<Biquad> sos = design_butterworth(FilterSpec{4, 0.1});
    REQUIRE(sos.size() == 2);

    const double dc = sos_magnitude(sos, 0.0);
    CHECK(dc == doctest::Approx(1.0).epsilon(1e-9));

    // -3.0103 dB at the cutoff (|H| = 1/sqrt(2))
    const double at_cut = 20.0 * std::log10(sos_magnitude(sos, 0.1));
    CHECK(std::abs(at_cut - (-3.0103)) < 0.1);

    // at least 40 dB down at Nyquist
    const double at_nyq = 20.0 * std::log10(std::max(sos_magnitude(sos, 1.0), 1e-300));
    CHECK(at_nyq < -40.0);

    // monotone decreasing magnitude (maximally flat low-pass)
    double prev = dc;
    for (double wn = 0.02; wn <= 0.98; wn += 0.02) {
        const double mag = sos_magnitude(sos, wn);
        CHECK(mag <= prev + 1e-12);
        prev = mag;
    }
}

TEST_CASE("the asymptotic rolloff matches the order") {
    for (int order : {2, 4, 6}) {
        const std::vector<Biquad> sos = design_butterworth(FilterSpec{order, 0.1});
        REQUIRE(static_cast<int>(sos.size()) == order / 2);
        // analog-prototype slope: ~6.02*order dB per octave well above cutoff
        const double m1 = 20.0 * std::log10(sos_magnitude(sos, 0.2));
        const double m2 = 20.0 * std::log10(sos_magnitude(sos, 0.4));
        CHECK(m1 - m2 > 6.02 * order - 3.0);
    }
}

TEST_CASE("filtfilt preserves constants and acts linearly") {
    const FilterSpec spec;
    const std::vector<double> c(64, 3.1415e-3);
    const std::vector<double> fc = filtfilt(c, spec);
    REQUIRE(fc.size() == c.size());
    for (double v : fc) CHECK(v == doctest::Approx(3.1415e-3).epsilon(1e-9));

    // linearity: filt(a + b) = filt(a) + filt(b)
    const std::vector<double> a = dip_signal(64, 20, 3.0);
    std::vector<double> b(64);
    for (int i = 0; i < 64; ++i) b[static_cast<std::size_t>(i)] = 1e-4 * std::sin(0.3 * i);
    std::vector<double> ab(64);
    for (int i = 0; i < 64; ++i) ab[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)];
    const std::vector<double> fa = filtfilt(a, spec), fb = filtfilt(b, spec), fab = filtfilt(ab, spec);
    for (int i = 0; i < 64; ++i)
        CHECK(fab[static_cast<std::size_t>(i)] ==
              doctest::Approx(fa[static_cast<std::size_t>(i)] + fb[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("zero-phase filtering leaves dip locations in place") {
    const FilterSpec spec;
    for (int center : {60, 205, 349, 500, 620}) {
        const std::vector<double> x = dip_signal(700, center, 6.0);
        const std::vector<double> y = filtfilt(x, spec);
        CHECK(std::abs(argmin(y) - center) <= 1);
    }
}

TEST_CASE("filtering attenuates high-frequency noise") {
    std::vector<double> x = dip_signal(700, 300, 6.0);
    std::vector<double> noisy = x;
    for (int i = 0; i < 700; ++i)
        noisy[static_cast<std::size_t>(i)] += 5e-5 * ((i % 2 == 0) ? 1.0 : -1.0); // Nyquist tone
    const std::vector<double> y = filtfilt(noisy, FilterSpec{});
    double resid = 0.0;
    for (int i = 50; i < 650; ++i)
        resid = std::max(resid, std::abs(y[static_cast<std::size_t>(i)] -
                                         filtfilt(x, FilterSpec{})[static_cast<std::size_t>(i)]));
    CHECK(resid < 5e-6); // the alternating tone is ~fully removed
}

TEST_CASE("short inputs are rejected, the boundary length passes") {
    const FilterSpec spec;
    CHECK_THROWS_AS(filtfilt(std::vector<double>(18, 1.0), spec), DataError);
    CHECK_NOTHROW(filtfilt(std::vector<double>(19, 1.0), spec));
}

TEST_CASE("the signature overload clamps negatives and marks the result") {
    RcsSignature sig;
    for (int i = 0; i < 64; ++i) {
        sig.frequencies_hz.push_back(3.1e9 + 1e7 * i);
        sig.rcs_m2.push_back(i == 32 ? -5.0e-3 : 1.0e-5); // deep negative spike
    }
    const RcsSignature out = filtfilt(sig, FilterSpec{});
    CHECK(out.filtered);
    CHECK(out.frequencies_hz == sig.frequencies_hz);
    for (double v : out.rcs_m2) CHECK(v >= 0.0);
}

TEST_CASE("design is deterministic") {
    const std::vector<Biquad> a = design_butterworth(FilterSpec{4, 0.1});
    const std::vector<Biquad> b = design_butterworth(FilterSpec{4, 0.1});
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].b0 == b[i].b0);
        CHECK(a[i].a1 == b[i].a1);
        CHECK(a[i].a2 == b[i].a2);
    }
}
