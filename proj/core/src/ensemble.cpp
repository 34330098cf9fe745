#include "crfid/ensemble.hpp"

#include <cmath>
#include <numeric>

#include "crfid/errors.hpp"
#include "crfid/rng.hpp"

namespace crfid {

std::vector<double> ForestModel::predict(const FeatureMatrix& X) const {
    std::vector<double> out(X.n_rows, 0.0);
    for (const DecisionTree& t : trees)
        for (std::size_t r = 0; r < X.n_rows; ++r) out[r] += t.predict_row(X.row(r));
    for (double& v : out) v /= static_cast<double>(trees.size());
    return out;
}

double ForestModel::predict_row(const double* x) const {
    double s = 0.0;
    for (const DecisionTree& t : trees) s += t.predict_row(x);
    return s / static_cast<double>(trees.size());
}

std::vector<double> ForestModel::feature_importance(std::size_t n_features) const {
    std::vector<double> imp(n_features, 0.0);
    for (const DecisionTree& t : trees) {
        const std::vector<double> ti = t.feature_importance(n_features);
        for (std::size_t i = 0; i < n_features; ++i) imp[i] += ti[i];
    }
    for (double& v : imp) v /= static_cast<double>(trees.size());
    return imp;
}

ForestModel fit_random_forest(const FeatureMatrix& X, const std::vector<double>& y,
                              const ForestParams& params) {
    if (params.n_estimators < 1) throw DataError("forest: n_estimators must be >= 1");
    const int p = static_cast<int>(X.n_cols);
    TreeParams tp;
    tp.max_depth = params.max_depth;
    tp.min_samples_split = params.min_samples_split;
    if (params.max_features < 0)
        tp.max_features = (p + 2) / 3; // ceil(p/3)
    else if (params.max_features == 0 || params.max_features >= p)
        tp.max_features = 0;
    else
        tp.max_features = params.max_features;

    ForestModel model;
    model.trees.reserve(static_cast<std::size_t>(params.n_estimators));
    std::vector<int> rows(X.n_rows);
    for (int t = 0; t < params.n_estimators; ++t) {
        Rng rng(derive_seed(params.seed, {static_cast<std::uint64_t>(t)}));
        if (params.bootstrap) {
            for (std::size_t i = 0; i < X.n_rows; ++i)
                rows[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(X.n_rows)));
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        model.trees.push_back(fit_decision_tree_on(X, y, rows, tp, &rng));
    }
    return model;
}

std::vector<double> GbtModel::predict(const FeatureMatrix& X) const {
    std::vector<double> out(X.n_rows, f0);
    for (const DecisionTree& t : trees)
        for (std::size_t r = 0; r < X.n_rows; ++r) out[r] += learning_rate * t.predict_row(X.row(r));
    return out;
}

double GbtModel::predict_row(const double* x) const {
    double s = f0;
    for (const DecisionTree& t : trees) s += learning_rate * t.predict_row(x);
    return s;
}

std::vector<double> GbtModel::feature_importance(std::size_t n_features) const {
    std::vector<double> imp(n_features, 0.0);
    if (trees.empty()) return imp;
    for (const DecisionTree& t : trees) {
        const std::vector<double> ti = t.feature_importance(n_features);
        for (std::size_t i = 0; i < n_features; ++i) imp[i] += ti[i];
    }
    for (double& v : imp) v /= static_cast<double>(trees.size());
    return imp;
}

GbtModel fit_gbt(const FeatureMatrix& X, const std::vector<double>& y, const GbtParams& params) {
    if (params.n_rounds < 0) throw DataError("gbt: n_rounds must be >= 0");
    if (y.empty() || y.size() != X.n_rows) throw DataError("gbt: target length does not match the matrix");

    GbtModel model;
    model.learning_rate = params.learning_rate;
    double sum = 0.0;
    for (double v : y) sum += v;
    model.f0 = sum / static_cast<double>(y.size());

    TreeParams tp;
    tp.max_depth = params.max_depth;
    tp.min_samples_split = params.min_samples_split;

    std::vector<double> residual(y.size());
    std::vector<double> current(y.size(), model.f0);
    std::vector<int> rows(X.n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    model.trees.reserve(static_cast<std::size_t>(params.n_rounds));
    for (int m = 0; m < params.n_rounds; ++m) {
        for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - current[i];
        DecisionTree t = fit_decision_tree_on(X, residual, rows, tp, nullptr);
        for (std::size_t i = 0; i < y.size(); ++i)
            current[i] += params.learning_rate * t.predict_row(X.row(i));
        model.trees.push_back(std::move(t));
    }
    return model;
}

} // namespace crfid
