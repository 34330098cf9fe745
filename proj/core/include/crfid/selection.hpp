#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "crfid/ensemble.hpp"
#include "crfid/svr.hpp"
#include "crfid/tree.hpp"

namespace crfid {

enum class ModelKind { DT, RF, GBT, SVR };

const char* model_kind_name(ModelKind k);          // "dt" / "rf" / "gbt" / "svr"
ModelKind parse_model_kind(const std::string& s);  // throws ParseError

// Union of the classical hyperparameters; each fit reads its own subset.
struct ClassicalParams {
    int max_depth = 10;
    int min_samples_split = 2;
    int n_estimators = 100;
    double learning_rate = 0.1;
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double svr_gamma = -1.0; // <= 0 means 1/n_features
    std::uint64_t seed = 0;
};

using ClassicalModel = std::variant<DecisionTree, ForestModel, GbtModel, SvrModel>;

ModelKind kind_of(const ClassicalModel& model);
ClassicalModel fit_classical(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
                             const ClassicalParams& params);
std::vector<double> predict_classical(const ClassicalModel& model, const FeatureMatrix& X);

// Per-row fold id in [0, k): seeded shuffle, then contiguous chunks whose
// sizes differ by at most one row.
std::vector<int> make_folds(std::size_t n_rows, int k, std::uint64_t seed);

// Mean k-fold CV RMSE of one configuration under a fixed fold assignment.
double cv_rmse(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
               const std::vector<int>& folds, int n_folds, const ClassicalParams& params);

struct RfeStep {
    std::vector<std::uint8_t> mask;
    int n_features = 0;
    double mean_rmse = 0.0;
};

struct RfeResult {
    std::vector<std::uint8_t> mask; // winning feature subset
    std::vector<RfeStep> curve;     // one entry per elimination step
};

// Recursive feature elimination with k-fold CV: each step scores the active
// subset, then drops the 10% (at least one) lowest-importance features —
// impurity importance for the tree models, permutation importance on fold 0
// for SVR. Returns the mask with the lowest mean CV RMSE; ties go to the
// smaller subset.
RfeResult rfe_cv(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
                 int cv_folds, const ClassicalParams& params);

struct GridEntry {
    ClassicalParams params;
    std::vector<double> fold_rmse;
    double mean_rmse = 0.0;
};

struct GridResult {
    ClassicalParams best;
    std::vector<GridEntry> table; // one entry per config, in grid order
};

// Exhaustive evaluation of the configs under one shared fold assignment;
// lowest mean CV RMSE wins, ties to the earlier grid entry.
GridResult grid_search_cv(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
                          const std::vector<ClassicalParams>& grid, int cv_folds,
                          std::uint64_t fold_seed);

// The stock hyperparameter grid for one model kind.
std::vector<ClassicalParams> default_grid(ModelKind kind, std::size_t n_features,
                                          std::uint64_t seed);

} // namespace crfid
