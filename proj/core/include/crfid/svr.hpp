#pragma once

#include <cstdint>
#include <vector>

#include "crfid/features.hpp"

namespace crfid {

struct SvrParams {
    double C = 1.0;
    double epsilon = 0.1;
    double gamma = -1.0; // <= 0 means 1/n_features
    double tol = 1e-3;   // KKT violation threshold
    long max_iter = 200000;
    std::size_t cache_bytes = 256ull << 20; // kernel row cache budget
};

struct SvrModel {
    FeatureMatrix support_vectors; // names empty; one row per support vector
    std::vector<double> coeffs;    // alpha - alpha* per support vector
    double b = 0.0;
    double gamma = 0.1;
    double C = 1.0;
    double epsilon = 0.1;
    bool converged = true;
    long n_iter = 0;
    double kkt_violation = 0.0; // final max violation (m - M)

    double predict_row(const double* x) const;
    std::vector<double> predict(const FeatureMatrix& X) const;
};

// Epsilon-insensitive SVR with an RBF kernel, trained by sequential minimal
// optimization over the 2n-variable dual with maximal-violating-pair working
// set selection. Stops when the KKT violation falls below params.tol; hitting
// max_iter returns the model with converged = false. Throws DataError if any
// feature column mean exceeds 0.5 in magnitude (input not standardized).
SvrModel fit_svr(const FeatureMatrix& X, const std::vector<double>& y, const SvrParams& params = {});

} // namespace crfid
