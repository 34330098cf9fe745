#pragma once

#include <cstdint>
#include <vector>

#include "crfid/features.hpp"

namespace crfid {

class Rng;

struct TreeParams {
    int max_depth = 10;        // root is depth 0; nodes at max_depth become leaves
    int min_samples_split = 2; // nodes with fewer rows become leaves
    int max_features = 0;      // per-split feature subsample; 0 = use all features
};

// Flat node storage; nodes[0] is the root, children allocated in preorder.
struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf: mean of routed targets
    double gain = 0.0;  // split: decrease in sum of squared errors
    int n_samples = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    double predict_row(const double* x) const;
    std::vector<double> predict(const FeatureMatrix& X) const;

    // Impurity importance: total SSE decrease attributed to each feature,
    // normalized to sum 1 (all zeros for a single-leaf tree).
    std::vector<double> feature_importance(std::size_t n_features) const;
};

// CART regression tree, variance-reduction criterion. Candidate thresholds
// are midpoints between consecutive distinct sorted feature values; the best
// split is chosen with ties (relative gain difference <= 1e-9) broken toward
// the lowest feature index, then the lowest threshold. Throws DataError on
// empty/mismatched input or non-finite features.
DecisionTree fit_decision_tree(const FeatureMatrix& X, const std::vector<double>& y,
                               const TreeParams& params = {});

// Same, restricted to `rows`; `rng` drives per-split feature subsampling when
// params.max_features is in (0, n_cols). Used by the ensemble fits.
DecisionTree fit_decision_tree_on(const FeatureMatrix& X, const std::vector<double>& y,
                                  const std::vector<int>& rows, const TreeParams& params, Rng* rng);

// Relative tie tolerance shared with the brute-force test oracle.
inline constexpr double kSplitTieEps = 1e-9;

} // namespace crfid
