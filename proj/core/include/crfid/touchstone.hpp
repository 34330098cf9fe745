#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace crfid {

/// Uniform frequency grid shared by every stage of the pipeline:
/// 700 points spanning 3.1-10.6 GHz inclusive of both endpoints.
struct CanonicalGrid {
    double f_start_hz = 3.1e9;
    double f_stop_hz = 10.6e9;
    int n_points = 700;

    double spacing_hz() const { return (f_stop_hz - f_start_hz) / (n_points - 1); }

    /// frequency(i) = f_start + (f_stop - f_start) * i / (n - 1); exact at both ends.
    double frequency(int i) const {
        return f_start_hz + (f_stop_hz - f_start_hz) * static_cast<double>(i) / (n_points - 1);
    }

    std::vector<double> frequencies() const;
};

/// One measured or simulated reflection sweep: (frequency, S11) pairs.
/// Frequencies are strictly increasing and stay inside the UWB band
/// (3.1-10.6 GHz) up to a small grid tolerance.
struct FrequencySweep {
    std::vector<double> frequencies_hz;
    std::vector<std::complex<double>> s11;
    std::string source_id;

    std::size_t size() const { return frequencies_hz.size(); }
};

/// Throws DataError if lengths mismatch or frequencies are not strictly increasing.
void validate_sweep(const FrequencySweep& sweep);

/// True when the sweep's frequencies equal the grid pointwise within rel_tol.
bool on_canonical_grid(const FrequencySweep& sweep, const CanonicalGrid& grid, double rel_tol = 1e-9);

/// Parse a two-port Touchstone v1 (.s2p) stream. S11 is taken from the first
/// data pair; S21/S12/S22 are read and discarded. Frequencies are converted
/// to Hz and S11 to rectangular form whatever the source format (RI/MA/DB).
/// Touchstone v2 ([Version] keyword) is rejected.
FrequencySweep parse_s2p(std::istream& in, const std::string& source_id = "");
FrequencySweep parse_s2p_text(const std::string& text, const std::string& source_id = "");
FrequencySweep read_s2p_file(const std::string& path);

/// Serialize as `# GHZ S RI R 50` with 12 significant digits. The S21/S12/S22
/// columns are written as zeros. Round-trips through parse_s2p within 1e-9.
std::string write_s2p(const FrequencySweep& sweep);
void write_s2p_file(const FrequencySweep& sweep, const std::string& path);

/// Linear interpolation of Re/Im independently onto the grid frequencies.
/// The sweep must cover [grid.f_start, grid.f_stop].
FrequencySweep resample_to_grid(const FrequencySweep& sweep, const CanonicalGrid& grid);

} // namespace crfid
