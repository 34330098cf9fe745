#pragma once

#include <array>

namespace crfid {

// Frequency band [lo_hz, hi_hz] on the 3.1-10.6 GHz sweep axis.
struct Band {
    double lo_hz;
    double hi_hz;

    bool contains(double f_hz) const { return f_hz >= lo_hz && f_hz <= hi_hz; }
};

// W1-W3 hold the three ID resonances, W4 the capacitive sensing resonance.
inline constexpr std::array<Band, 4> kWindows{{
    {3.1e9, 4.2e9},
    {4.2e9, 5.2e9},
    {5.2e9, 6.3e9},
    {6.3e9, 10.6e9},
}};

} // namespace crfid
