#pragma once

#include <cstdint>
#include <vector>

#include "crfid/tree.hpp"

namespace crfid {

struct ForestParams {
    int n_estimators = 100;
    int max_depth = 10;
    int min_samples_split = 2;
    int max_features = -1; // -1 = ceil(p/3); 0 or >= p = all features
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct ForestModel {
    std::vector<DecisionTree> trees;

    std::vector<double> predict(const FeatureMatrix& X) const; // mean over trees
    double predict_row(const double* x) const;
    std::vector<double> feature_importance(std::size_t n_features) const; // mean of tree importances
};

// Bagged regression forest: tree t trains on a bootstrap resample drawn from
// a seed derived by tree index, with per-split feature subsampling.
ForestModel fit_random_forest(const FeatureMatrix& X, const std::vector<double>& y,
                              const ForestParams& params = {});

struct GbtParams {
    int n_rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    int min_samples_split = 2;
};

struct GbtModel {
    double f0 = 0.0; // initial constant = mean(y)
    double learning_rate = 0.1;
    std::vector<DecisionTree> trees;

    std::vector<double> predict(const FeatureMatrix& X) const;
    double predict_row(const double* x) const;
    std::vector<double> feature_importance(std::size_t n_features) const;
};

// Squared-loss gradient boosting: each round fits a depth-limited tree to the
// current residuals and steps by the learning rate. Deterministic (no row or
// feature sampling).
GbtModel fit_gbt(const FeatureMatrix& X, const std::vector<double>& y, const GbtParams& params = {});

} // namespace crfid
