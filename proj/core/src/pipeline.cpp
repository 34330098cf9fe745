#include "crfid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "crfid/errors.hpp"
#include "crfid/rng.hpp"

namespace crfid {

namespace {

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> targets_of(const std::vector<LabeledSignature>& rows, Task task) {
    std::vector<double> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        y[i] = task == Task::Id ? static_cast<double>(rows[i].label.tag_id)
                                : rows[i].label.capacitance_pf;
    return y;
}

std::vector<double> gather(const std::vector<double>& v, const std::vector<int>& idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[static_cast<std::size_t>(idx[i])];
    return out;
}

FeatureMatrix cols_by_index(const FeatureMatrix& m, const std::vector<int>& cols) {
    std::vector<std::uint8_t> mask(m.n_cols, 0);
    for (int c : cols) {
        if (c < 0 || static_cast<std::size_t>(c) >= m.n_cols)
            throw DataError("pipeline: selected column out of range");
        mask[static_cast<std::size_t>(c)] = 1;
    }
    return select_columns(m, mask);
}

// Inference in fixed-size chunks so wide first conv layers stay in memory.
std::vector<double> cnn_predict(const CnnModel& model, const FeatureMatrix& X,
                                const std::vector<int>& idx) {
    constexpr std::size_t kChunk = 128;
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t lo = 0; lo < idx.size(); lo += kChunk) {
        const std::size_t hi = std::min(idx.size(), lo + kChunk);
        const std::vector<int> part(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                                    idx.begin() + static_cast<std::ptrdiff_t>(hi));
        const std::vector<double> p = forward_infer(model, to_tensor(X, part));
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

std::vector<int> all_rows(std::size_t n) {
    std::vector<int> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
    return idx;
}

} // namespace

CaseTable per_case_report(const std::vector<double>& predictions,
                          const std::vector<double>& targets,
                          const std::vector<TagLabel>& labels) {
    if (predictions.size() != targets.size() || predictions.size() != labels.size())
        throw DataError("per-case report: size mismatch");
    std::array<std::array<std::vector<double>, kNumCases>, kNumPositions> errs;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int p = position_index(labels[i].position);
        const int c = case_index(labels[i].deformation);
        errs[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)].push_back(
            std::abs(predictions[i] - targets[i]));
    }
    CaseTable table{};
    for (int p = 0; p < kNumPositions; ++p)
        for (int c = 0; c < kNumCases; ++c) {
            const std::vector<double>& e = errs[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
            if (e.empty())
                throw DataError(std::string("per-case report: no rows for ") +
                                position_name(static_cast<Position>(p)) + "/" +
                                case_name(static_cast<Deformation>(c)));
            CaseCell& cell = table[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
            cell.n = static_cast<int>(e.size());
            double sq = 0.0, mean = 0.0;
            for (double v : e) {
                sq += v * v;
                mean += v;
            }
            mean /= static_cast<double>(e.size());
            cell.rmse = std::sqrt(sq / static_cast<double>(e.size()));
            double var = 0.0;
            for (double v : e) var += (v - mean) * (v - mean);
            cell.std_abs_err = std::sqrt(var / static_cast<double>(e.size()));
        }
    return table;
}

PipelineResult run_pipeline(const std::vector<LabeledSignature>& rows, const PipelineConfig& cfg) {
    if (rows.empty()) throw DataError("pipeline: empty dataset");
    cfg.filter.validate();
    if (cfg.use_cnn) cfg.arch.validate();

    std::vector<TagLabel> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = rows[i].label;
    const Split split = stratified_split(labels, cfg.seed);
    const std::vector<double> y = targets_of(rows, cfg.task);

    // Filter, then build the full design matrix.
    FeatureMatrix X;
    {
        const WindowSpec windows{};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const RcsSignature filtered = filtfilt(rows[i].signature, cfg.filter);
            if (cfg.use_cnn) {
                if (X.names.empty()) {
                    X.n_cols = filtered.rcs_m2.size();
                    X.names.resize(X.n_cols);
                    for (std::size_t c = 0; c < X.n_cols; ++c) X.names[c] = "f" + std::to_string(c);
                }
                if (filtered.rcs_m2.size() != X.n_cols) throw DataError("pipeline: ragged rows");
                X.data.insert(X.data.end(), filtered.rcs_m2.begin(), filtered.rcs_m2.end());
            } else {
                const FeatureVector fv = extract_all(filtered, windows);
                if (X.names.empty()) {
                    X.names = fv.names;
                    X.n_cols = fv.names.size();
                }
                X.data.insert(X.data.end(), fv.values.begin(), fv.values.end());
            }
            ++X.n_rows;
        }
    }

    // Standardize with train-row statistics only.
    const ScalerStats scaler = fit_scaler(select_rows(X, split.train));
    const FeatureMatrix Xs = apply_scaler(scaler, X);

    EvalReport report;
    report.task = cfg.task;
    ModelFile mf;
    mf.task = cfg.task;
    mf.grid = cfg.grid;
    mf.filter = cfg.filter;

    std::vector<double> train_pred, val_pred, test_pred;

    const std::vector<double> y_train = gather(y, split.train);
    const std::vector<double> y_val = gather(y, split.val);
    const std::vector<double> y_test = gather(y, split.test);

    if (cfg.use_cnn) {
        report.model_name = cfg.arch.name;
        mf.is_cnn = true;
        mf.raw_signature_input = true;
        mf.feature_names = Xs.names;
        mf.selected = all_rows(Xs.n_cols);
        mf.scaler = scaler;
        report.n_features = static_cast<int>(Xs.n_cols);

        CnnModel model = make_cnn(cfg.arch, static_cast<int>(Xs.n_cols), cfg.seed);
        TrainConfig tc = cfg.train;
        tc.verbose = cfg.verbose;
        const Tensor x_train = to_tensor(Xs, split.train);
        const Tensor x_val = to_tensor(Xs, split.val);
        report.history = train_cnn(model, x_train, y_train, x_val, y_val, tc);

        train_pred = cnn_predict(model, Xs, split.train);
        val_pred = cnn_predict(model, Xs, split.val);
        report.train_rmse = rmse(train_pred, y_train);
        report.val_rmse = rmse(val_pred, y_val);
        report.overfit_warning = report.val_rmse > 1.5 * report.train_rmse;

        if (!report.overfit_warning) {
            // Refit on train+val for the epochs the monitored fit kept.
            std::vector<int> dev = split.train;
            dev.insert(dev.end(), split.val.begin(), split.val.end());
            std::sort(dev.begin(), dev.end());
            CnnModel refit = make_cnn(cfg.arch, static_cast<int>(Xs.n_cols), cfg.seed);
            TrainConfig rc = tc;
            rc.monitor_val = false;
            rc.max_epochs = report.history.best_epoch + 1;
            train_cnn(refit, to_tensor(Xs, dev), gather(y, dev), Tensor{}, {}, rc);
            model = std::move(refit);
        }
        test_pred = cnn_predict(model, Xs, split.test);
        mf.cnn = std::move(model);
    } else {
        report.model_name = model_kind_name(cfg.kind);
        ClassicalParams params = cfg.params;
        if (params.seed == 0) params.seed = derive_seed(cfg.seed, {7});

        FeatureMatrix x_train = select_rows(Xs, split.train);
        std::vector<int> selected = all_rows(Xs.n_cols);

        if (cfg.rfe) {
            const RfeResult rfe = rfe_cv(cfg.kind, x_train, y_train, cfg.cv_folds, params);
            std::vector<int> keep;
            for (std::size_t c = 0; c < rfe.mask.size(); ++c)
                if (rfe.mask[c]) keep.push_back(static_cast<int>(c));
            selected = keep;
            x_train = cols_by_index(x_train, selected);
        }
        if (cfg.grid_search) {
            const GridResult grid = grid_search_cv(
                cfg.kind, x_train, y_train,
                default_grid(cfg.kind, x_train.n_cols, params.seed), cfg.cv_folds,
                derive_seed(cfg.seed, {8}));
            params = grid.best;
        }
        report.n_features = static_cast<int>(selected.size());

        const FeatureMatrix xs_sel =
            selected.size() == Xs.n_cols ? Xs : cols_by_index(Xs, selected);
        ClassicalModel model = fit_classical(cfg.kind, x_train, y_train, params);
        train_pred = predict_classical(model, select_rows(xs_sel, split.train));
        val_pred = predict_classical(model, select_rows(xs_sel, split.val));
        report.train_rmse = rmse(train_pred, y_train);
        report.val_rmse = rmse(val_pred, y_val);
        report.overfit_warning = report.val_rmse > 1.5 * report.train_rmse;

        if (!report.overfit_warning) {
            std::vector<int> dev = split.train;
            dev.insert(dev.end(), split.val.begin(), split.val.end());
            std::sort(dev.begin(), dev.end());
            model = fit_classical(cfg.kind, select_rows(xs_sel, dev), gather(y, dev), params);
        }
        test_pred = predict_classical(model, select_rows(xs_sel, split.test));

        mf.kind = cfg.kind;
        mf.selected = selected;
        mf.feature_names.reserve(selected.size());
        for (int c : selected) mf.feature_names.push_back(Xs.names[static_cast<std::size_t>(c)]);
        mf.scaler.mean.reserve(selected.size());
        mf.scaler.std_dev.reserve(selected.size());
        for (int c : selected) {
            mf.scaler.mean.push_back(scaler.mean[static_cast<std::size_t>(c)]);
            mf.scaler.std_dev.push_back(scaler.std_dev[static_cast<std::size_t>(c)]);
        }
        mf.classical = std::move(model);
    }

    const double range = task_range(cfg.task);
    report.test_rmse = rmse(test_pred, y_test);
    report.train_nrmse_pct = normalized_rmse(report.train_rmse, range);
    report.val_nrmse_pct = normalized_rmse(report.val_rmse, range);
    report.test_nrmse_pct = normalized_rmse(report.test_rmse, range);
    report.test_decode_accuracy = decode_accuracy(cfg.task, test_pred, y_test);
    report.test_pred = test_pred;
    report.test_truth = y_test;

    std::vector<TagLabel> test_labels;
    test_labels.reserve(split.test.size());
    for (int r : split.test) test_labels.push_back(labels[static_cast<std::size_t>(r)]);
    report.per_case = per_case_report(test_pred, y_test, test_labels);

    PipelineResult result;
    result.model = std::move(mf);
    result.report = std::move(report);
    return result;
}

std::vector<double> model_predict(const ModelFile& model, const std::vector<RcsSignature>& sigs) {
    if (sigs.empty()) throw DataError("predict: no input signatures");

    FeatureMatrix X;
    const WindowSpec windows{};
    for (const RcsSignature& sig : sigs) {
        if (static_cast<int>(sig.rcs_m2.size()) != model.grid.n_points)
            throw DataError("predict: signature length " + std::to_string(sig.rcs_m2.size()) +
                            " does not match the model grid (" +
                            std::to_string(model.grid.n_points) + " points)");
        const RcsSignature filtered = sig.filtered ? sig : filtfilt(sig, model.filter);
        if (model.raw_signature_input) {
            if (X.names.empty()) {
                X.n_cols = filtered.rcs_m2.size();
                X.names.resize(X.n_cols);
                for (std::size_t c = 0; c < X.n_cols; ++c) X.names[c] = "f" + std::to_string(c);
            }
            X.data.insert(X.data.end(), filtered.rcs_m2.begin(), filtered.rcs_m2.end());
        } else {
            const FeatureVector fv = extract_all(filtered, windows);
            if (X.names.empty()) {
                X.names = fv.names;
                X.n_cols = fv.names.size();
            }
            X.data.insert(X.data.end(), fv.values.begin(), fv.values.end());
        }
        ++X.n_rows;
    }

    FeatureMatrix sel = cols_by_index(X, model.selected);
    if (sel.n_cols != model.scaler.mean.size())
        throw DataError("predict: model preprocessing metadata mismatch");
    sel = apply_scaler(model.scaler, sel);

    if (model.is_cnn) return cnn_predict(model.cnn, sel, all_rows(sel.n_rows));
    return predict_classical(model.classical, sel);
}

void write_report_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "model,task,train_rmse,val_rmse,test_rmse,train_nrmse_pct,val_nrmse_pct,"
           "test_nrmse_pct,test_decode_accuracy,n_features,overfit_warning\n";
    out << report.model_name << ',' << task_name(report.task) << ',' << g12(report.train_rmse)
        << ',' << g12(report.val_rmse) << ',' << g12(report.test_rmse) << ','
        << g12(report.train_nrmse_pct) << ',' << g12(report.val_nrmse_pct) << ','
        << g12(report.test_nrmse_pct) << ',' << g12(report.test_decode_accuracy) << ','
        << report.n_features << ',' << (report.overfit_warning ? 1 : 0) << '\n';
    if (!out) throw DataError("cannot write " + path);
}

void write_per_case_csv(const std::string& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "model,task,position,case,rmse,std_abs_err,n\n";
    for (int p = 0; p < kNumPositions; ++p)
        for (int c = 0; c < kNumCases; ++c) {
            const CaseCell& cell = report.per_case[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
            out << report.model_name << ',' << task_name(report.task) << ','
                << position_name(static_cast<Position>(p)) << ','
                << case_name(static_cast<Deformation>(c)) << ',' << g12(cell.rmse) << ','
                << g12(cell.std_abs_err) << ',' << cell.n << '\n';
        }
    if (!out) throw DataError("cannot write " + path);
}

void write_loss_csv(const std::string& path, const TrainHistory& history) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        out << e << ',' << g12(history.train_loss[e]) << ',';
        if (e < history.val_loss.size()) out << g12(history.val_loss[e]);
        out << '\n';
    }
    if (!out) throw DataError("cannot write " + path);
}

} // namespace crfid
