#include "crfid/siggen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "crfid/bands.hpp"
#include "crfid/errors.hpp"
#include "crfid/rng.hpp"

namespace crfid {

namespace {

const char* const kPositionNames[kNumPositions] = {"P1", "P2", "P3", "P4"};
const char* const kCaseNames[kNumCases] = {"Ci", "Cii", "Ciii", "Civ", "Cv"};

std::string label_string(const TagLabel& label) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "id%d_%gpF_%s_%s_r%d", label.tag_id, label.capacitance_pf,
                  position_name(label.position), case_name(label.deformation), label.reading);
    return buf;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw DataError(msg);
}

} // namespace

int position_index(Position p) { return static_cast<int>(p); }
int case_index(Deformation c) { return static_cast<int>(c); }
const char* position_name(Position p) { return kPositionNames[position_index(p)]; }
const char* case_name(Deformation c) { return kCaseNames[case_index(c)]; }

Position parse_position(const std::string& s) {
    for (int i = 0; i < kNumPositions; ++i)
        if (s == kPositionNames[i]) return static_cast<Position>(i);
    throw ParseError("unknown position '" + s + "' (expected P1..P4)");
}

Deformation parse_case(const std::string& s) {
    for (int i = 0; i < kNumCases; ++i)
        if (s == kCaseNames[i]) return static_cast<Deformation>(i);
    throw ParseError("unknown deformation case '" + s + "' (expected Ci, Cii, Ciii, Civ, Cv)");
}

GeneratorConfig GeneratorConfig::noiseless() const {
    GeneratorConfig quiet = *this;
    quiet.position_noise_sigma_m2.fill(0.0);
    quiet.position_ripple_amp_m2.fill(0.0);
    quiet.case_detune_jitter.fill(0.0);
    return quiet;
}

double sensing_center_hz(const GeneratorConfig& cfg, double capacitance_pf) {
    require(capacitance_pf > 0.0, "generator: capacitance must be positive");
    return cfg.sensing_f0_hz / std::sqrt(1.0 + capacitance_pf / cfg.sensing_c0_pf);
}

int capacitance_index(const GeneratorConfig& cfg, double capacitance_pf) {
    for (std::size_t i = 0; i < cfg.capacitances_pf.size(); ++i)
        if (std::abs(cfg.capacitances_pf[i] - capacitance_pf) <= 1e-12) return static_cast<int>(i);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", capacitance_pf);
    throw DataError("generator: capacitance " + std::string(buf) + " pF is not one of the configured values");
}

void validate_label(const TagLabel& label, const GeneratorConfig& cfg) {
    if (label.tag_id < 0 || label.tag_id >= kNumTagIds)
        throw DataError("generator: tag_id must be in 0..7, got " + std::to_string(label.tag_id));
    capacitance_index(cfg, label.capacitance_pf);
    if (label.reading < 0 || label.reading >= cfg.readings_per_group)
        throw DataError("generator: reading " + std::to_string(label.reading) + " outside 0.." +
                        std::to_string(cfg.readings_per_group - 1));
}

void GeneratorConfig::validate() const {
    require(baseline_m2 > 0.0, "generator: baseline_m2 must be positive");
    require(null_ring.depth_m2 >= 0.0 && null_ring.width_hz > 0.0,
            "generator: null ring needs depth >= 0 and width > 0");
    require(id_depth_residual_m2 >= 0.0, "generator: residual ID depth must be >= 0");
    require(id_depth_deep_m2 > id_depth_residual_m2,
            "generator: deep ID depth must exceed the residual depth");
    require(id_width_hz > 0.0, "generator: ID ring width must be positive");
    for (int k = 0; k < 3; ++k)
        require(kWindows[k].contains(id_center_hz[k]),
                "generator: ID ring " + std::to_string(k + 1) + " center outside its window");

    require(sensing_f0_hz > 0.0 && sensing_c0_pf > 0.0, "generator: sensing map parameters must be positive");
    require(sensing_depth_m2 > 0.0 && sensing_width_hz > 0.0,
            "generator: sensing ring needs positive depth and width");
    for (std::size_t j = 0; j < capacitances_pf.size(); ++j) {
        require(capacitances_pf[j] > 0.0, "generator: capacitances must be positive");
        if (j > 0)
            require(capacitances_pf[j] > capacitances_pf[j - 1],
                    "generator: capacitances must be strictly ascending");
        const double fs = sensing_center_hz(*this, capacitances_pf[j]);
        require(fs > kWindows[3].lo_hz && fs <= kWindows[3].hi_hz,
                "generator: sensing center for one capacitance leaves the sensing window");
    }

    for (int p = 0; p < kNumPositions; ++p) {
        require(position_amplitude[p] > 0.0, "generator: position amplitudes must be positive");
        require(position_noise_sigma_m2[p] >= 0.0, "generator: noise sigmas must be >= 0");
        require(position_ripple_amp_m2[p] >= 0.0, "generator: ripple amplitudes must be >= 0");
    }
    require(ripple_period_hz > 0.0, "generator: ripple period must be positive");
    for (int c = 0; c < kNumCases; ++c) {
        require(case_depth_damping[c] > 0.0 && case_depth_damping[c] <= 1.0,
                "generator: depth damping must lie in (0, 1]");
        require(std::abs(case_detune[c]) < 0.05, "generator: case detune must stay below 5%");
        require(case_detune_jitter[c] >= 0.0 && case_detune_jitter[c] < 0.02,
                "generator: detune jitter must lie in [0, 0.02)");
    }
    require(ciii_p4_detune_mult >= 1.0 && ciii_p4_noise_mult >= 1.0,
            "generator: Ciii/P4 difficulty multipliers must be >= 1");
    require(bit_margin_m2 > 0.0, "generator: bit margin must be positive");
    require(readings_per_group >= 1, "generator: readings_per_group must be >= 1");
    require(grid.n_points >= 2 && grid.f_start_hz > 0.0 && grid.f_stop_hz > grid.f_start_hz,
            "generator: invalid frequency grid");
    require(plate.side_m > 0.0, "generator: reference plate side must be positive");

    // Bit separability, measured on actual noiseless P1/Ci signatures: for
    // every ID window the shallowest bit=1 minimum must clear the deepest
    // bit=0 minimum by the configured margin.
    const GeneratorConfig quiet = noiseless();
    const std::vector<double> freqs = grid.frequencies();
    const double amp_p1 = position_amplitude[0];
    std::array<double, 3> depth_bit1{};
    std::array<double, 3> depth_bit0{};
    depth_bit1.fill(std::numeric_limits<double>::infinity());
    depth_bit0.fill(-std::numeric_limits<double>::infinity());
    for (int id = 0; id < kNumTagIds; ++id) {
        const TagLabel lab{id, capacitances_pf[0], Position::P1, Deformation::Ci, 0};
        const RcsSignature sig = synth_rcs(lab, quiet, 0);
        for (int k = 0; k < 3; ++k) {
            double wmin = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < freqs.size(); ++i)
                if (kWindows[k].contains(freqs[i])) wmin = std::min(wmin, sig.rcs_m2[i]);
            const double depth = amp_p1 * baseline_m2 - wmin;
            if ((id >> k) & 1)
                depth_bit1[k] = std::min(depth_bit1[k], depth);
            else
                depth_bit0[k] = std::max(depth_bit0[k], depth);
        }
    }
    for (int k = 0; k < 3; ++k)
        require(depth_bit1[k] - depth_bit0[k] >= bit_margin_m2,
                "generator: bit margin violated in window " + std::to_string(k + 1));
}

RcsSignature synth_rcs(const TagLabel& label, const GeneratorConfig& cfg, std::uint64_t seed) {
    validate_label(label, cfg);
    const int p = position_index(label.position);
    const int c = case_index(label.deformation);

    Rng rng(seed);
    // Draw order is part of the format: jitter, ripple phase, then one noise
    // draw per grid point. Noiseless configs multiply the draws by zero, so
    // the deterministic part is identical across readings.
    const double zj = rng.gaussian();
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

    double detune = cfg.case_detune[c] + cfg.case_detune_jitter[c] * zj;
    double sigma = cfg.position_noise_sigma_m2[p];
    if (label.deformation == Deformation::Ciii && label.position == Position::P4) {
        detune *= cfg.ciii_p4_detune_mult;
        sigma *= cfg.ciii_p4_noise_mult;
    }
    const double damp = cfg.case_depth_damping[c];
    const double amp = cfg.position_amplitude[p];
    const double ripple = cfg.position_ripple_amp_m2[p];

    std::array<Ring, 5> rings;
    rings[0] = cfg.null_ring;
    for (int k = 0; k < 3; ++k) {
        const bool bit = (label.tag_id >> k) & 1;
        rings[k + 1] = {cfg.id_center_hz[k],
                        bit ? cfg.id_depth_deep_m2 : cfg.id_depth_residual_m2, cfg.id_width_hz};
    }
    rings[4] = {sensing_center_hz(cfg, label.capacitance_pf), cfg.sensing_depth_m2, cfg.sensing_width_hz};

    RcsSignature out;
    out.frequencies_hz = cfg.grid.frequencies();
    out.rcs_m2.resize(out.frequencies_hz.size());
    out.filtered = false;
    for (std::size_t i = 0; i < out.frequencies_hz.size(); ++i) {
        const double f = out.frequencies_hz[i];
        double dips = 0.0;
        for (const Ring& ring : rings) {
            const double center = ring.center_hz * (1.0 + detune);
            const double t = (f - center) / ring.width_hz;
            dips += ring.depth_m2 * damp * std::exp(-0.5 * t * t);
        }
        double v = amp * (cfg.baseline_m2 - dips);
        v += ripple * std::sin(2.0 * std::numbers::pi * f / cfg.ripple_period_hz + phase);
        v += sigma * rng.gaussian();
        out.rcs_m2[i] = std::max(v, 0.0);
    }
    return out;
}

SweepTriple synth_sweeps(const TagLabel& label, const GeneratorConfig& cfg, std::uint64_t seed) {
    const std::size_t n = static_cast<std::size_t>(cfg.grid.n_points);
    std::vector<std::complex<double>> iso(n), ref(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
        iso[i] = std::polar(0.20, 0.8 + 2.0 * std::numbers::pi * 0.4 * u);
        ref[i] = iso[i] + std::polar(0.25, -0.5 + 2.0 * std::numbers::pi * 0.7 * u);
    }
    return synth_sweeps(label, cfg, seed, iso, ref);
}

SweepTriple synth_sweeps(const TagLabel& label, const GeneratorConfig& cfg, std::uint64_t seed,
                         const std::vector<std::complex<double>>& iso_s11,
                         const std::vector<std::complex<double>>& ref_s11) {
    const std::size_t n = static_cast<std::size_t>(cfg.grid.n_points);
    if (iso_s11.size() != n || ref_s11.size() != n)
        throw DataError("generator: iso/ref profiles must match the grid point count");

    const RcsSignature rcs = synth_rcs(label, cfg, seed);
    const std::string tag_name = label_string(label);

    SweepTriple out;
    out.tag.frequencies_hz = rcs.frequencies_hz;
    out.tag.source_id = "synth:" + tag_name + ":tag";
    out.iso.frequencies_hz = rcs.frequencies_hz;
    out.iso.source_id = "synth:" + tag_name + ":iso";
    out.ref.frequencies_hz = rcs.frequencies_hz;
    out.ref.source_id = "synth:" + tag_name + ":ref";
    out.tag.s11.resize(n);
    out.iso.s11 = iso_s11;
    out.ref.s11 = ref_s11;

    // Invert the calibration: S11_tag = iso + (ref - iso) * sqrt(rcs / sigma_ref).
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> den = ref_s11[i] - iso_s11[i];
        if (std::abs(den) < kDenominatorFloor)
            throw NumericError("generator: degenerate reference profile (|ref - iso| < floor) at point " +
                               std::to_string(i));
        const double r = std::sqrt(rcs.rcs_m2[i] / sigma_ref(cfg.plate, rcs.frequencies_hz[i]));
        out.tag.s11[i] = iso_s11[i] + den * r;
    }
    return out;
}

std::uint64_t label_seed(const GeneratorConfig& cfg, const TagLabel& label) {
    return derive_seed(cfg.master_seed,
                       {static_cast<std::uint64_t>(label.tag_id),
                        static_cast<std::uint64_t>(capacitance_index(cfg, label.capacitance_pf)),
                        static_cast<std::uint64_t>(position_index(label.position)),
                        static_cast<std::uint64_t>(case_index(label.deformation)),
                        static_cast<std::uint64_t>(label.reading)});
}

std::vector<LabeledSignature> build_dataset(const GeneratorConfig& cfg) {
    cfg.validate();
    std::vector<LabeledSignature> out;
    out.reserve(static_cast<std::size_t>(kNumTagIds) * cfg.capacitances_pf.size() * kNumPositions *
                kNumCases * static_cast<std::size_t>(cfg.readings_per_group));
    for (int id = 0; id < kNumTagIds; ++id)
        for (double cap : cfg.capacitances_pf)
            for (int p = 0; p < kNumPositions; ++p)
                for (int c = 0; c < kNumCases; ++c)
                    for (int r = 0; r < cfg.readings_per_group; ++r) {
                        const TagLabel lab{id, cap, static_cast<Position>(p),
                                           static_cast<Deformation>(c), r};
                        out.push_back({lab, synth_rcs(lab, cfg, label_seed(cfg, lab))});
                    }
    return out;
}

} // namespace crfid
