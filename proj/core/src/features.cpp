#include "crfid/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "crfid/errors.hpp"

namespace crfid {

namespace {

double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Linear-interpolation quantile on a pre-sorted copy (numpy default scheme).
double quantile(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

int sign_of(double v) { return v < 0.0 ? -1 : 1; }

double autocorr(const std::vector<double>& x, double mu, double var_n, std::size_t lag) {
    if (x.size() <= lag || var_n <= 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = lag; i < x.size(); ++i) s += (x[i] - mu) * (x[i - lag] - mu);
    return s / var_n;
}

} // namespace

bool WindowSpec::in_window(int w, double f_hz) const {
    const Band& b = bands[static_cast<std::size_t>(w)];
    if (w + 1 == static_cast<int>(bands.size())) return f_hz >= b.lo_hz && f_hz <= b.hi_hz;
    return f_hz >= b.lo_hz && f_hz < b.hi_hz;
}

void WindowSpec::validate() const {
    for (std::size_t w = 0; w < bands.size(); ++w) {
        if (!(bands[w].lo_hz < bands[w].hi_hz)) throw DataError("windows: empty band");
        if (w > 0 && bands[w].lo_hz != bands[w - 1].hi_hz)
            throw DataError("windows: bands must tile the sweep without gaps or overlap");
    }
}

const std::vector<std::string>& catalog_feature_names() {
    static const std::vector<std::string> names{
        // statistical
        "mean", "std", "variance", "skewness", "kurtosis", "min", "max", "peak_to_peak",
        "median", "quantile25", "quantile75", "iqr", "rms", "mean_abs_dev",
        // temporal
        "zero_crossings", "slope_sign_changes", "total_variation", "mean_abs_diff",
        "autocorr_lag1", "autocorr_lag5", "autocorr_lag10", "trend_slope", "trend_intercept",
        "count_above_mean", "count_below_mean", "first_argmin_frac", "first_argmax_frac",
        "energy_ratio_first_half",
        // spectral
        "spectral_centroid", "spectral_spread", "spectral_skewness", "spectral_kurtosis",
        "spectral_rolloff85", "spectral_rolloff95", "spectral_dominant_bin",
        "spectral_dominant_mag", "band_energy_q1", "band_energy_q2", "band_energy_q3",
        "band_energy_q4", "spectral_entropy", "spectral_flatness",
        // energy
        "energy", "histogram_entropy", "total_sum", "mean_power"};
    return names;
}

const std::vector<std::string>& windowed_feature_names() {
    static const std::vector<std::string> names{"w1_argmin_hz", "w1_min_m2", "w2_argmin_hz",
                                                "w2_min_m2",    "w3_argmin_hz", "w3_min_m2",
                                                "w4_argmin_hz", "w4_min_m2"};
    return names;
}

FeatureVector extract_catalog(const RcsSignature& sig) {
    if (!sig.filtered) throw DataError("features: signature must be filtered before extraction");
    const std::vector<double>& x = sig.rcs_m2;
    const std::size_t n = x.size();
    if (n == 0) throw DataError("features: empty signature");
    const double dn = static_cast<double>(n);

    FeatureVector out;
    out.names = catalog_feature_names();
    out.values.reserve(out.names.size());
    auto push = [&out](double v) { out.values.push_back(v); };

    // --- statistical ---
    const double mu = mean_of(x);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, abs_dev = 0.0;
    for (double v : x) {
        const double d = v - mu;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        abs_dev += std::abs(d);
    }
    const double var = m2 / dn;
    const double sd = std::sqrt(var);
    const double skew = sd > 0.0 ? (m3 / dn) / (sd * sd * sd) : 0.0;
    const double kurt = sd > 0.0 ? (m4 / dn) / (var * var) - 3.0 : 0.0;

    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    const double xmin = sorted.front();
    const double xmax = sorted.back();
    const double q1 = quantile(sorted, 0.25);
    const double q2 = quantile(sorted, 0.50);
    const double q3 = quantile(sorted, 0.75);

    double energy = 0.0, total = 0.0;
    for (double v : x) {
        energy += v * v;
        total += v;
    }

    push(mu);
    push(sd);
    push(var);
    push(skew);
    push(kurt);
    push(xmin);
    push(xmax);
    push(xmax - xmin);
    push(q2);
    push(q1);
    push(q3);
    push(q3 - q1);
    push(std::sqrt(energy / dn));
    push(abs_dev / dn);

    // --- temporal ---
    int zc = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (sign_of(x[i] - mu) != sign_of(x[i - 1] - mu)) ++zc;
    int ssc = 0;
    double tv = 0.0;
    for (std::size_t i = 1; i < n; ++i) tv += std::abs(x[i] - x[i - 1]);
    for (std::size_t i = 2; i < n; ++i) {
        const double d1 = x[i - 1] - x[i - 2];
        const double d2 = x[i] - x[i - 1];
        if (d1 * d2 < 0.0) ++ssc;
    }

    // Least-squares line over the index axis 0..n-1.
    double slope = 0.0, intercept = x[0];
    if (n > 1) {
        const double tmu = (dn - 1.0) / 2.0;
        double stt = 0.0, stx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double dt = static_cast<double>(i) - tmu;
            stt += dt * dt;
            stx += dt * (x[i] - mu);
        }
        slope = stx / stt;
        intercept = mu - slope * tmu;
    }

    int above = 0, below = 0;
    for (double v : x) {
        if (v > mu) ++above;
        if (v < mu) ++below;
    }
    std::size_t argmin = 0, argmax = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (x[i] < x[argmin]) argmin = i;
        if (x[i] > x[argmax]) argmax = i;
    }
    double first_half = 0.0;
    for (std::size_t i = 0; i < n / 2; ++i) first_half += x[i] * x[i];

    push(static_cast<double>(zc));
    push(static_cast<double>(ssc));
    push(tv);
    push(n > 1 ? tv / (dn - 1.0) : 0.0);
    push(autocorr(x, mu, m2, 1));
    push(autocorr(x, mu, m2, 5));
    push(autocorr(x, mu, m2, 10));
    push(slope);
    push(intercept);
    push(static_cast<double>(above));
    push(static_cast<double>(below));
    push(n > 1 ? static_cast<double>(argmin) / (dn - 1.0) : 0.0);
    push(n > 1 ? static_cast<double>(argmax) / (dn - 1.0) : 0.0);
    push(energy > 0.0 ? first_half / energy : 0.0);

    // --- spectral (one-sided DFT of the mean-removed sequence) ---
    const std::size_t m = n / 2 + 1;
    std::vector<double> power(m, 0.0);
    std::vector<double> mag(m, 0.0);
    {
        // Exact twiddle table indexed by (j*k) mod n: no recurrence drift.
        std::vector<std::complex<double>> tw(n);
        for (std::size_t t = 0; t < n; ++t)
            tw[t] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(t) / dn);
        for (std::size_t k = 0; k < m; ++k) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t j = 0; j < n; ++j) acc += (x[j] - mu) * tw[(j * k) % n];
            mag[k] = std::abs(acc);
            power[k] = std::norm(acc);
        }
    }
    double ptot = 0.0;
    for (double p : power) ptot += p;

    double centroid = 0.0, spread = 0.0, sskew = 0.0, skurt = 0.0;
    double roll85 = 0.0, roll95 = 0.0, sentropy = 0.0, flatness = 0.0;
    std::size_t dom = 0;
    std::array<double, 4> bandq{0.0, 0.0, 0.0, 0.0};
    if (ptot > 0.0) {
        for (std::size_t k = 0; k < m; ++k) centroid += static_cast<double>(k) * power[k] / ptot;
        double v2 = 0.0, v3 = 0.0, v4 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = static_cast<double>(k) - centroid;
            const double q = power[k] / ptot;
            v2 += d * d * q;
            v3 += d * d * d * q;
            v4 += d * d * d * d * q;
        }
        spread = std::sqrt(v2);
        if (spread > 0.0) {
            sskew = v3 / (spread * spread * spread);
            skurt = v4 / (v2 * v2);
        }
        double cum = 0.0;
        bool got85 = false, got95 = false;
        for (std::size_t k = 0; k < m; ++k) {
            cum += power[k];
            if (!got85 && cum >= 0.85 * ptot) {
                roll85 = static_cast<double>(k);
                got85 = true;
            }
            if (!got95 && cum >= 0.95 * ptot) {
                roll95 = static_cast<double>(k);
                got95 = true;
            }
        }
        for (std::size_t k = 1; k < m; ++k)
            if (mag[k] > mag[dom]) dom = k;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t band = std::min<std::size_t>(k * 4 / m, 3);
            bandq[band] += power[k] / ptot;
        }
        for (std::size_t k = 0; k < m; ++k) {
            const double q = power[k] / ptot;
            if (q > 0.0) sentropy -= q * std::log(q);
        }
        if (m > 1) sentropy /= std::log(static_cast<double>(m));
        bool any_zero = false;
        double logsum = 0.0;
        for (double p : power) {
            if (p <= 0.0) {
                any_zero = true;
                break;
            }
            logsum += std::log(p);
        }
        flatness = any_zero ? 0.0 : std::exp(logsum / static_cast<double>(m)) /
                                        (ptot / static_cast<double>(m));
    }

    push(centroid);
    push(spread);
    push(sskew);
    push(skurt);
    push(roll85);
    push(roll95);
    push(static_cast<double>(dom));
    push(mag[dom]);
    for (double b : bandq) push(b);
    push(sentropy);
    push(flatness);

    // --- energy / entropy ---
    double hentropy = 0.0;
    if (xmax > xmin) {
        std::array<int, 16> counts{};
        const double scale = 16.0 / (xmax - xmin);
        for (double v : x) {
            const int b = std::min(15, static_cast<int>((v - xmin) * scale));
            ++counts[static_cast<std::size_t>(b)];
        }
        for (int c : counts)
            if (c > 0) {
                const double p = static_cast<double>(c) / dn;
                hentropy -= p * std::log(p);
            }
    }

    push(energy);
    push(hentropy);
    push(total);
    push(energy / dn);
    return out;
}

FeatureVector extract_windowed(const RcsSignature& sig, const WindowSpec& windows) {
    if (!sig.filtered) throw DataError("features: signature must be filtered before extraction");
    validate_signature(sig);
    windows.validate();

    FeatureVector out;
    out.names = windowed_feature_names();
    out.values.reserve(8);
    for (int w = 0; w < 4; ++w) {
        double best_f = 0.0;
        double best_v = std::numeric_limits<double>::infinity();
        bool seen = false;
        for (std::size_t i = 0; i < sig.frequencies_hz.size(); ++i) {
            if (!windows.in_window(w, sig.frequencies_hz[i])) continue;
            if (!seen || sig.rcs_m2[i] < best_v) { // strict <: ties keep the lowest frequency
                best_v = sig.rcs_m2[i];
                best_f = sig.frequencies_hz[i];
                seen = true;
            }
        }
        if (!seen)
            throw DataError("features: window " + std::to_string(w + 1) + " contains no grid points");
        out.values.push_back(best_f);
        out.values.push_back(best_v);
    }
    return out;
}

FeatureVector extract_all(const RcsSignature& sig, const WindowSpec& windows) {
    FeatureVector out = extract_catalog(sig);
    FeatureVector win = extract_windowed(sig, windows);
    out.names.insert(out.names.end(), win.names.begin(), win.names.end());
    out.values.insert(out.values.end(), win.values.begin(), win.values.end());
    return out;
}

FeatureMatrix stack(const std::vector<FeatureVector>& rows) {
    if (rows.empty()) throw DataError("features: cannot stack zero rows");
    FeatureMatrix m;
    m.names = rows.front().names;
    m.n_rows = rows.size();
    m.n_cols = m.names.size();
    m.data.reserve(m.n_rows * m.n_cols);
    for (const FeatureVector& fv : rows) {
        if (fv.names != m.names) throw DataError("features: inconsistent feature schema across rows");
        if (fv.values.size() != m.n_cols) throw DataError("features: row width does not match schema");
        m.data.insert(m.data.end(), fv.values.begin(), fv.values.end());
    }
    return m;
}

FeatureMatrix select_columns(const FeatureMatrix& m, const std::vector<std::uint8_t>& mask) {
    if (mask.size() != m.n_cols) throw DataError("features: column mask length does not match the matrix");
    FeatureMatrix out;
    for (std::size_t c = 0; c < m.n_cols; ++c)
        if (mask[c]) {
            if (!m.names.empty()) out.names.push_back(m.names[c]);
            ++out.n_cols;
        }
    if (out.n_cols == 0) throw DataError("features: column mask selects nothing");
    out.n_rows = m.n_rows;
    out.data.reserve(out.n_rows * out.n_cols);
    for (std::size_t r = 0; r < m.n_rows; ++r)
        for (std::size_t c = 0; c < m.n_cols; ++c)
            if (mask[c]) out.data.push_back(m.at(r, c));
    return out;
}

FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<int>& rows) {
    FeatureMatrix out;
    out.names = m.names;
    out.n_cols = m.n_cols;
    out.n_rows = rows.size();
    out.data.reserve(out.n_rows * out.n_cols);
    for (int r : rows) {
        if (r < 0 || static_cast<std::size_t>(r) >= m.n_rows)
            throw DataError("features: row index out of range");
        out.data.insert(out.data.end(), m.row(static_cast<std::size_t>(r)),
                        m.row(static_cast<std::size_t>(r)) + m.n_cols);
    }
    return out;
}

std::vector<double> select_values(const std::vector<double>& y, const std::vector<int>& rows) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (int r : rows) {
        if (r < 0 || static_cast<std::size_t>(r) >= y.size())
            throw DataError("features: row index out of range");
        out.push_back(y[static_cast<std::size_t>(r)]);
    }
    return out;
}

ScalerStats fit_scaler(const FeatureMatrix& train) {
    if (train.n_rows == 0 || train.n_cols == 0) throw DataError("scaler: empty training matrix");
    ScalerStats st;
    st.mean.assign(train.n_cols, 0.0);
    st.std_dev.assign(train.n_cols, 0.0);
    const double dn = static_cast<double>(train.n_rows);
    for (std::size_t r = 0; r < train.n_rows; ++r)
        for (std::size_t c = 0; c < train.n_cols; ++c) st.mean[c] += train.at(r, c);
    for (double& v : st.mean) v /= dn;
    for (std::size_t r = 0; r < train.n_rows; ++r)
        for (std::size_t c = 0; c < train.n_cols; ++c) {
            const double d = train.at(r, c) - st.mean[c];
            st.std_dev[c] += d * d;
        }
    for (double& v : st.std_dev) {
        v = std::sqrt(v / dn);
        if (v < kScalerStdFloor) v = 1.0;
    }
    return st;
}

FeatureMatrix apply_scaler(const ScalerStats& stats, const FeatureMatrix& m) {
    if (stats.mean.size() != m.n_cols || stats.std_dev.size() != m.n_cols)
        throw DataError("scaler: stats width does not match the matrix");
    FeatureMatrix out = m;
    for (std::size_t r = 0; r < out.n_rows; ++r)
        for (std::size_t c = 0; c < out.n_cols; ++c)
            out.data[r * out.n_cols + c] = (m.at(r, c) - stats.mean[c]) / stats.std_dev[c];
    return out;
}

} // namespace crfid
