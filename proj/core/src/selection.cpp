#include "crfid/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crfid/errors.hpp"
#include "crfid/metrics.hpp"
#include "crfid/rng.hpp"

namespace crfid {

namespace {

constexpr double kScoreTie = 1e-12;

bool tied(double a, double b) { return std::abs(a - b) <= kScoreTie * std::max({1.0, std::abs(a), std::abs(b)}); }

std::vector<int> rows_where(const std::vector<int>& folds, int fold, bool in_fold) {
    std::vector<int> out;
    for (std::size_t i = 0; i < folds.size(); ++i)
        if ((folds[i] == fold) == in_fold) out.push_back(static_cast<int>(i));
    return out;
}

// Feature scores driving elimination order (higher = keep).
std::vector<double> importance_for(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
                                   const std::vector<int>& folds, const ClassicalParams& params,
                                   int step) {
    if (kind != ModelKind::SVR) {
        const ClassicalModel model = fit_classical(kind, X, y, params);
        if (kind == ModelKind::DT) return std::get<DecisionTree>(model).feature_importance(X.n_cols);
        if (kind == ModelKind::RF) return std::get<ForestModel>(model).feature_importance(X.n_cols);
        return std::get<GbtModel>(model).feature_importance(X.n_cols);
    }
    // Permutation importance on held-out fold 0.
    const std::vector<int> held = rows_where(folds, 0, true);
    const std::vector<int> rest = rows_where(folds, 0, false);
    const ClassicalModel model =
        fit_classical(kind, select_rows(X, rest), select_values(y, rest), params);
    const std::vector<double> y_held = select_values(y, held);
    FeatureMatrix Xh = select_rows(X, held);
    const double base = rmse(predict_classical(model, Xh), y_held);
    std::vector<double> imp(X.n_cols, 0.0);
    std::vector<double> saved(Xh.n_rows);
    for (std::size_t c = 0; c < X.n_cols; ++c) {
        for (std::size_t r = 0; r < Xh.n_rows; ++r) saved[r] = Xh.at(r, c);
        std::vector<double> shuffled = saved;
        Rng rng(derive_seed(params.seed, {0xBEEFull, static_cast<std::uint64_t>(step),
                                          static_cast<std::uint64_t>(c)}));
        rng.shuffle(shuffled);
        for (std::size_t r = 0; r < Xh.n_rows; ++r) Xh.data[r * Xh.n_cols + c] = shuffled[r];
        imp[c] = rmse(predict_classical(model, Xh), y_held) - base;
        for (std::size_t r = 0; r < Xh.n_rows; ++r) Xh.data[r * Xh.n_cols + c] = saved[r];
    }
    return imp;
}

} // namespace

const char* model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::DT: return "dt";
        case ModelKind::RF: return "rf";
        case ModelKind::GBT: return "gbt";
        case ModelKind::SVR: return "svr";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& s) {
    if (s == "dt") return ModelKind::DT;
    if (s == "rf") return ModelKind::RF;
    if (s == "gbt") return ModelKind::GBT;
    if (s == "svr") return ModelKind::SVR;
    throw ParseError("unknown model kind '" + s + "' (expected dt, rf, gbt, or svr)");
}

ModelKind kind_of(const ClassicalModel& model) {
    switch (model.index()) {
        case 0: return ModelKind::DT;
        case 1: return ModelKind::RF;
        case 2: return ModelKind::GBT;
        default: return ModelKind::SVR;
    }
}

ClassicalModel fit_classical(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
                             const ClassicalParams& params) {
    switch (kind) {
        case ModelKind::DT: {
            TreeParams tp;
            tp.max_depth = params.max_depth;
            tp.min_samples_split = params.min_samples_split;
            return fit_decision_tree(X, y, tp);
        }
        case ModelKind::RF: {
            ForestParams fp;
            fp.n_estimators = params.n_estimators;
            fp.max_depth = params.max_depth;
            fp.min_samples_split = params.min_samples_split;
            fp.seed = params.seed;
            return fit_random_forest(X, y, fp);
        }
        case ModelKind::GBT: {
            GbtParams gp;
            gp.n_rounds = params.n_estimators;
            gp.learning_rate = params.learning_rate;
            gp.max_depth = params.max_depth;
            gp.min_samples_split = params.min_samples_split;
            return fit_gbt(X, y, gp);
        }
        case ModelKind::SVR: {
            SvrParams sp;
            sp.C = params.svr_c;
            sp.epsilon = params.svr_epsilon;
            sp.gamma = params.svr_gamma;
            return fit_svr(X, y, sp);
        }
    }
    throw DataError("fit_classical: unreachable model kind");
}

std::vector<double> predict_classical(const ClassicalModel& model, const FeatureMatrix& X) {
    return std::visit([&X](const auto& m) { return m.predict(X); }, model);
}

std::vector<int> make_folds(std::size_t n_rows, int k, std::uint64_t seed) {
    if (k < 2) throw DataError("cv: need at least 2 folds");
    if (n_rows < static_cast<std::size_t>(k)) throw DataError("cv: fewer rows than folds");
    std::vector<int> order(n_rows);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, {0xF01Dull}));
    rng.shuffle(order);
    std::vector<int> folds(n_rows);
    // Contiguous chunks of the shuffled order; first (n mod k) folds get one extra.
    const std::size_t base = n_rows / static_cast<std::size_t>(k);
    const std::size_t extra = n_rows % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) folds[static_cast<std::size_t>(order[pos++])] = f;
    }
    return folds;
}

double cv_rmse(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
               const std::vector<int>& folds, int n_folds, const ClassicalParams& params) {
    double total = 0.0;
    for (int f = 0; f < n_folds; ++f) {
        const std::vector<int> train = rows_where(folds, f, false);
        const std::vector<int> test = rows_where(folds, f, true);
        const ClassicalModel model =
            fit_classical(kind, select_rows(X, train), select_values(y, train), params);
        total += rmse(predict_classical(model, select_rows(X, test)), select_values(y, test));
    }
    return total / static_cast<double>(n_folds);
}

RfeResult rfe_cv(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
                 int cv_folds, const ClassicalParams& params) {
    if (X.n_cols == 0) throw DataError("rfe: no features");
    const std::vector<int> folds = make_folds(X.n_rows, cv_folds, params.seed);

    RfeResult result;
    std::vector<std::uint8_t> active(X.n_cols, 1);
    int n_active = static_cast<int>(X.n_cols);
    for (int step = 0;; ++step) {
        const FeatureMatrix Xa = select_columns(X, active);
        RfeStep rec;
        rec.mask = active;
        rec.n_features = n_active;
        rec.mean_rmse = cv_rmse(kind, Xa, y, folds, cv_folds, params);
        result.curve.push_back(rec);
        if (n_active == 1) break;

        const std::vector<double> imp_active = importance_for(kind, Xa, y, folds, params, step);
        // Map back to original indices.
        std::vector<std::pair<double, std::size_t>> ranked; // (importance, original index)
        std::size_t ai = 0;
        for (std::size_t c = 0; c < X.n_cols; ++c)
            if (active[c]) ranked.emplace_back(imp_active[ai++], c);
        // Drop the lowest-importance 10%; ties drop the higher original index.
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second;
        });
        const int k = std::max(1, n_active / 10);
        for (int i = 0; i < k; ++i) active[ranked[static_cast<std::size_t>(i)].second] = 0;
        n_active -= k;
    }

    const RfeStep* best = &result.curve.front();
    for (const RfeStep& s : result.curve) {
        if (s.mean_rmse < best->mean_rmse - kScoreTie * std::max(1.0, best->mean_rmse)) {
            best = &s;
        } else if (tied(s.mean_rmse, best->mean_rmse) && s.n_features < best->n_features) {
            best = &s;
        }
    }
    result.mask = best->mask;
    return result;
}

GridResult grid_search_cv(ModelKind kind, const FeatureMatrix& X, const std::vector<double>& y,
                          const std::vector<ClassicalParams>& grid, int cv_folds,
                          std::uint64_t fold_seed) {
    if (grid.empty()) throw DataError("grid search: empty grid");
    const std::vector<int> folds = make_folds(X.n_rows, cv_folds, fold_seed);

    GridResult result;
    result.table.reserve(grid.size());
    std::size_t best_idx = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        GridEntry e;
        e.params = grid[g];
        double total = 0.0;
        for (int f = 0; f < cv_folds; ++f) {
            const std::vector<int> train = rows_where(folds, f, false);
            const std::vector<int> test = rows_where(folds, f, true);
            const ClassicalModel model =
                fit_classical(kind, select_rows(X, train), select_values(y, train), grid[g]);
            e.fold_rmse.push_back(rmse(predict_classical(model, select_rows(X, test)),
                                       select_values(y, test)));
            total += e.fold_rmse.back();
        }
        e.mean_rmse = total / static_cast<double>(cv_folds);
        result.table.push_back(std::move(e));
        if (result.table[g].mean_rmse <
            result.table[best_idx].mean_rmse - kScoreTie * std::max(1.0, result.table[best_idx].mean_rmse))
            best_idx = g;
    }
    result.best = result.table[best_idx].params;
    return result;
}

std::vector<ClassicalParams> default_grid(ModelKind kind, std::size_t n_features,
                                          std::uint64_t seed) {
    std::vector<ClassicalParams> grid;
    ClassicalParams base;
    base.seed = seed;
    if (kind == ModelKind::SVR) {
        for (double c : {1.0, 10.0, 100.0})
            for (double eps : {0.01, 0.1})
                for (double gamma : {1.0 / static_cast<double>(n_features), 0.1}) {
                    ClassicalParams p = base;
                    p.svr_c = c;
                    p.svr_epsilon = eps;
                    p.svr_gamma = gamma;
                    grid.push_back(p);
                }
        return grid;
    }
    for (int depth : {5, 10, 20})
        for (int mss : {2, 10}) {
            if (kind == ModelKind::DT) {
                ClassicalParams p = base;
                p.max_depth = depth;
                p.min_samples_split = mss;
                grid.push_back(p);
                continue;
            }
            for (int trees : {100, 300}) {
                if (kind == ModelKind::RF) {
                    ClassicalParams p = base;
                    p.max_depth = depth;
                    p.min_samples_split = mss;
                    p.n_estimators = trees;
                    grid.push_back(p);
                } else {
                    for (double lr : {0.05, 0.1}) {
                        ClassicalParams p = base;
                        p.max_depth = depth;
                        p.min_samples_split = mss;
                        p.n_estimators = trees;
                        p.learning_rate = lr;
                        grid.push_back(p);
                    }
                }
            }
        }
    return grid;
}

} // namespace crfid
