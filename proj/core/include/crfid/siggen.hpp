#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "crfid/rcs.hpp"
#include "crfid/touchstone.hpp"

namespace crfid {

// Tag placement relative to the reader antenna.
enum class Position { P1, P2, P3, P4 }; // 200mm/0deg, 200mm/45deg, 300mm/0deg, 300mm/45deg

// Mechanical deformation applied to the tag substrate.
enum class Deformation { Ci, Cii, Ciii, Civ, Cv }; // flat, bend 50:50, bend 25:75, cyl r=40mm, cyl r=10mm

inline constexpr int kNumPositions = 4;
inline constexpr int kNumCases = 5;
inline constexpr int kNumTagIds = 8;

int position_index(Position p);
int case_index(Deformation c);
const char* position_name(Position p);
const char* case_name(Deformation c);
Position parse_position(const std::string& s); // throws ParseError
Deformation parse_case(const std::string& s);  // throws ParseError

// One measurement label: which tag, where, how deformed, which repeat.
struct TagLabel {
    int tag_id = 0;              // 3-bit code b2b1b0, value 0-7
    double capacitance_pf = 0.1; // sensing capacitor, one of GeneratorConfig::capacitances_pf
    Position position = Position::P1;
    Deformation deformation = Deformation::Ci;
    int reading = 0; // repeat index within the group
};

// Gaussian dip in the RCS trace.
struct Ring {
    double center_hz;
    double depth_m2;
    double width_hz;
};

// Knobs for the parametric signature model. All defaults validate() clean.
struct GeneratorConfig {
    double baseline_m2 = 2.0e-3;

    // Structural dip present on every tag, independent of the encoded bits.
    Ring null_ring{3.25e9, 0.6e-3, 0.08e9};

    // ID rings: ring k sits in window k; bit k = 1 -> deep dip, 0 -> residual stub.
    std::array<double, 3> id_center_hz{3.70e9, 4.70e9, 5.75e9};
    double id_depth_deep_m2 = 1.2e-3;
    double id_depth_residual_m2 = 0.15e-3;
    double id_width_hz = 0.10e9;

    // Sensing ring: center at f0 / sqrt(1 + C/C0), strictly decreasing in C.
    double sensing_f0_hz = 9.6e9;
    double sensing_c0_pf = 1.0;
    double sensing_depth_m2 = 1.0e-3;
    double sensing_width_hz = 0.12e9;

    std::array<double, 3> capacitances_pf{0.1, 0.3, 0.8};

    // Position effects: global amplitude scale, additive noise sigma, tilt ripple.
    std::array<double, 4> position_amplitude{1.0, 0.85, 0.80, 0.68};
    std::array<double, 4> position_noise_sigma_m2{2.0e-5, 3.0e-5, 4.0e-5, 6.0e-5};
    std::array<double, 4> position_ripple_amp_m2{0.0, 1.5e-5, 0.0, 2.5e-5};
    double ripple_period_hz = 0.9e9;

    // Case effects: relative frequency detune (fixed part + per-reading Gaussian
    // jitter) and dip-depth damping.
    std::array<double, 5> case_detune{0.0, 0.004, 0.007, -0.008, 0.015};
    std::array<double, 5> case_detune_jitter{0.0, 0.001, 0.0015, 0.002, 0.004};
    std::array<double, 5> case_depth_damping{1.0, 0.95, 0.90, 0.85, 0.80};

    // Ciii at P4 is deliberately the hardest cell of the 4x5 grid.
    double ciii_p4_detune_mult = 3.0;
    double ciii_p4_noise_mult = 2.5;

    // Minimum separation between bit=1 and bit=0 window-minimum depths
    // required of noiseless P1/Ci signatures (checked by validate()).
    double bit_margin_m2 = 0.4e-3;

    int readings_per_group = 20;
    std::uint64_t master_seed = 42;
    CanonicalGrid grid{};
    ReferencePlate plate{};

    // Copy with every stochastic term zeroed (noise, ripple, detune jitter).
    GeneratorConfig noiseless() const;

    // Throws DataError if ring centers leave their windows, depths/widths are
    // non-positive, or the noiseless bit margin cannot hold.
    void validate() const;
};

// Sensing dip center for a capacitance value, Hz.
double sensing_center_hz(const GeneratorConfig& cfg, double capacitance_pf);

// Index of `capacitance_pf` in cfg.capacitances_pf; throws DataError if absent.
int capacitance_index(const GeneratorConfig& cfg, double capacitance_pf);

// Throws DataError unless the label is consistent with cfg.
void validate_label(const TagLabel& label, const GeneratorConfig& cfg);

// Synthesize one RCS signature on cfg.grid. Deterministic in (label, cfg, seed).
RcsSignature synth_rcs(const TagLabel& label, const GeneratorConfig& cfg, std::uint64_t seed);

struct SweepTriple {
    FrequencySweep tag;
    FrequencySweep iso;
    FrequencySweep ref;
};

// Construct S11 sweeps whose calibration reproduces synth_rcs(label, cfg, seed).
// The default iso/ref profiles keep |ref - iso| = 0.25 across the band.
SweepTriple synth_sweeps(const TagLabel& label, const GeneratorConfig& cfg, std::uint64_t seed);

// Same, with caller-supplied background/reference S11 profiles (length = grid
// points). Throws NumericError if the profiles are degenerate (|ref - iso|
// below the calibration floor anywhere).
SweepTriple synth_sweeps(const TagLabel& label, const GeneratorConfig& cfg, std::uint64_t seed,
                         const std::vector<std::complex<double>>& iso_s11,
                         const std::vector<std::complex<double>>& ref_s11);

struct LabeledSignature {
    TagLabel label;
    RcsSignature signature;
};

// Full factorial sweep: tag_id x capacitance x position x case x reading, in
// that loop order. Per-row seed is derived from cfg.master_seed and the label
// counters, so the output is order-stable and a prefix of readings is a
// prefix of the full dataset.
std::vector<LabeledSignature> build_dataset(const GeneratorConfig& cfg);

// Seed for one row; exposed so tools can regenerate single rows.
std::uint64_t label_seed(const GeneratorConfig& cfg, const TagLabel& label);

} // namespace crfid
