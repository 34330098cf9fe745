#include "crfid/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crfid/errors.hpp"
#include "crfid/rng.hpp"

namespace crfid {

namespace {

struct Builder {
    const FeatureMatrix& X;
    const std::vector<double>& y;
    const TreeParams& params;
    Rng* rng;
    std::vector<TreeNode> nodes;
    std::vector<int> feature_pool; // scratch for per-split subsampling

    // True when `gain` beats `best` by more than the shared tie tolerance.
    static bool strictly_better(double gain, double best) {
        return gain > best + kSplitTieEps * std::max(std::abs(gain), std::abs(best));
    }

    int build(std::vector<int>& rows, int depth) {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        const double n = static_cast<double>(rows.size());

        double sum = 0.0;
        for (int r : rows) sum += y[static_cast<std::size_t>(r)];
        const double mean = sum / n;
        double sse = 0.0;
        for (int r : rows) {
            const double d = y[static_cast<std::size_t>(r)] - mean;
            sse += d * d;
        }
        nodes[static_cast<std::size_t>(id)].value = mean;
        nodes[static_cast<std::size_t>(id)].n_samples = static_cast<int>(rows.size());

        if (depth >= params.max_depth || rows.size() < static_cast<std::size_t>(params.min_samples_split) ||
            sse <= 0.0)
            return id;

        // Features examined this split, ascending so the first best found is
        // the lowest-index / lowest-threshold winner.
        const int p = static_cast<int>(X.n_cols);
        feature_pool.resize(static_cast<std::size_t>(p));
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
        int n_try = p;
        if (params.max_features > 0 && params.max_features < p && rng != nullptr) {
            n_try = params.max_features;
            for (int i = 0; i < n_try; ++i) {
                const std::size_t j = static_cast<std::size_t>(i) +
                                      static_cast<std::size_t>(rng->below(static_cast<std::uint64_t>(p - i)));
                std::swap(feature_pool[static_cast<std::size_t>(i)], feature_pool[j]);
            }
            std::sort(feature_pool.begin(), feature_pool.begin() + n_try);
        }

        double best_gain = kSplitTieEps * sse; // minimum meaningful reduction
        int best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::pair<double, double>> vals(rows.size()); // (x_f, y)
        for (int fi = 0; fi < n_try; ++fi) {
            const int f = feature_pool[static_cast<std::size_t>(fi)];
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const std::size_t r = static_cast<std::size_t>(rows[k]);
                vals[k] = {X.at(r, static_cast<std::size_t>(f)), y[r]};
            }
            std::sort(vals.begin(), vals.end());

            double sl = 0.0, ql = 0.0;
            const double st = sum;
            double qt = 0.0;
            for (auto& v : vals) qt += v.second * v.second;
            for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
                sl += vals[k].second;
                ql += vals[k].second * vals[k].second;
                if (!(vals[k + 1].first > vals[k].first)) continue; // no boundary here
                const double nl = static_cast<double>(k + 1);
                const double nr = n - nl;
                const double sr = st - sl;
                const double qr = qt - ql;
                const double sse_l = ql - sl * sl / nl;
                const double sse_r = qr - sr * sr / nr;
                const double gain = sse - (sse_l + sse_r);
                if (strictly_better(gain, best_gain)) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = (vals[k].first + vals[k + 1].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) return id; // no split decreases the variance

        std::vector<int> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (int r : rows) {
            if (X.at(static_cast<std::size_t>(r), static_cast<std::size_t>(best_feature)) <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes[static_cast<std::size_t>(id)].feature = best_feature;
        nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        nodes[static_cast<std::size_t>(id)].gain = best_gain;
        const int left = build(left_rows, depth + 1);
        nodes[static_cast<std::size_t>(id)].left = left;
        const int right = build(right_rows, depth + 1);
        nodes[static_cast<std::size_t>(id)].right = right;
        return id;
    }
};

} // namespace

double DecisionTree::predict_row(const double* x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
        i = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

std::vector<double> DecisionTree::predict(const FeatureMatrix& X) const {
    std::vector<double> out(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) out[r] = predict_row(X.row(r));
    return out;
}

std::vector<double> DecisionTree::feature_importance(std::size_t n_features) const {
    std::vector<double> imp(n_features, 0.0);
    double total = 0.0;
    for (const TreeNode& nd : nodes)
        if (nd.feature >= 0) {
            imp[static_cast<std::size_t>(nd.feature)] += nd.gain;
            total += nd.gain;
        }
    if (total > 0.0)
        for (double& v : imp) v /= total;
    return imp;
}

DecisionTree fit_decision_tree(const FeatureMatrix& X, const std::vector<double>& y,
                               const TreeParams& params) {
    std::vector<int> rows(X.n_rows);
    std::iota(rows.begin(), rows.end(), 0);
    return fit_decision_tree_on(X, y, rows, params, nullptr);
}

DecisionTree fit_decision_tree_on(const FeatureMatrix& X, const std::vector<double>& y,
                                  const std::vector<int>& rows, const TreeParams& params, Rng* rng) {
    if (X.n_rows == 0 || X.n_cols == 0) throw DataError("tree: empty feature matrix");
    if (y.size() != X.n_rows) throw DataError("tree: target length does not match the matrix");
    if (rows.empty()) throw DataError("tree: no training rows");
    for (double v : X.data)
        if (!std::isfinite(v)) throw DataError("tree: non-finite feature value");
    for (int r : rows)
        if (r < 0 || static_cast<std::size_t>(r) >= X.n_rows || !std::isfinite(y[static_cast<std::size_t>(r)]))
            throw DataError("tree: invalid row index or non-finite target");

    Builder b{X, y, params, rng, {}, {}};
    b.nodes.reserve(rows.size() * 2);
    std::vector<int> root_rows = rows;
    b.build(root_rows, 0);
    DecisionTree t;
    t.nodes = std::move(b.nodes);
    return t;
}

} // namespace crfid
