#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crfid/bands.hpp"
#include "crfid/rcs.hpp"

namespace crfid {

// Bump when feature names, order, or definitions change; stored in model files.
inline constexpr int kCatalogVersion = 1;

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;
};

// Row-major dense matrix with named columns.
struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<double> data;
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;

    double at(std::size_t r, std::size_t c) const { return data[r * n_cols + c]; }
    double* row(std::size_t r) { return data.data() + r * n_cols; }
    const double* row(std::size_t r) const { return data.data() + r * n_cols; }
};

// The four extraction windows: [lo, hi) for W1-W3, [lo, hi] for the last.
struct WindowSpec {
    std::array<Band, 4> bands = kWindows;

    bool in_window(int w, double f_hz) const;
    void validate() const; // bands must tile [lo, hi] without overlap
};

// Names of the fixed full-band catalog (46 features), in output order.
const std::vector<std::string>& catalog_feature_names();

// Names of the 8 windowed features: w{1..4}_argmin_hz, w{1..4}_min_m2.
const std::vector<std::string>& windowed_feature_names();

// Full-band catalog over the RCS sequence: statistical moments and order
// statistics, temporal shape measures, DFT-based spectral descriptors
// (mean-removed, rectangular window, one-sided spectrum, bin-index units;
// stat kurtosis is excess, spectral kurtosis is plain), energy and a
// 16-bin histogram entropy (nats). Degenerate inputs (constant signal,
// zero variance/energy) map to 0 — never NaN/Inf.
// Throws DataError on unfiltered input or an empty signature.
FeatureVector extract_catalog(const RcsSignature& sig);

// Per-window argmin frequency and minimum magnitude; ties toward the lowest
// frequency. Throws DataError on unfiltered input or a window that contains
// no grid points.
FeatureVector extract_windowed(const RcsSignature& sig, const WindowSpec& windows = {});

// Catalog followed by windowed features (54 columns).
FeatureVector extract_all(const RcsSignature& sig, const WindowSpec& windows = {});

// Stack per-row vectors into a matrix; throws DataError on schema mismatch.
FeatureMatrix stack(const std::vector<FeatureVector>& rows);

// Copy of the columns with a nonzero mask entry (mask length = n_cols).
FeatureMatrix select_columns(const FeatureMatrix& m, const std::vector<std::uint8_t>& mask);

// Copy of the listed rows, in the given order.
FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<int>& rows);

// Elements of y at the listed positions.
std::vector<double> select_values(const std::vector<double>& y, const std::vector<int>& rows);

// Z-score standardization fitted on the training matrix.
struct ScalerStats {
    std::vector<double> mean;
    std::vector<double> std_dev; // population std; values < 1e-12 replaced by 1
};

inline constexpr double kScalerStdFloor = 1e-12;

ScalerStats fit_scaler(const FeatureMatrix& train);              // throws DataError on empty input
FeatureMatrix apply_scaler(const ScalerStats& stats, const FeatureMatrix& m);

} // namespace crfid
