#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crfid/cnn_train.hpp"
#include "crfid/dsp.hpp"
#include "crfid/metrics.hpp"
#include "crfid/model_io.hpp"
#include "crfid/selection.hpp"
#include "crfid/siggen.hpp"
#include "crfid/split.hpp"

namespace crfid {

struct CaseCell {
    double rmse = 0.0;
    double std_abs_err = 0.0; // population std of |error| within the cell
    int n = 0;
};

using CaseTable = std::array<std::array<CaseCell, kNumCases>, kNumPositions>;

struct EvalReport {
    Task task = Task::Id;
    std::string model_name;
    double train_rmse = 0.0, val_rmse = 0.0, test_rmse = 0.0;
    double train_nrmse_pct = 0.0, val_nrmse_pct = 0.0, test_nrmse_pct = 0.0;
    double test_decode_accuracy = 0.0;
    bool overfit_warning = false; // val RMSE exceeded 1.5x train RMSE; refit skipped
    int n_features = 0;
    CaseTable per_case{};
    std::vector<double> test_pred, test_truth; // in split.test row order
    TrainHistory history;                      // CNN runs only
};

struct PipelineConfig {
    Task task = Task::Id;
    bool use_cnn = false;
    ModelKind kind = ModelKind::GBT; // classical path
    ClassicalParams params{};
    bool rfe = false;         // recursive feature elimination (classical)
    bool grid_search = false; // hyperparameter grid search (classical)
    ArchitectureSpec arch{};  // CNN path
    TrainConfig train{};
    FilterSpec filter{};
    CanonicalGrid grid{};
    int cv_folds = 3;
    std::uint64_t seed = 42;
    bool verbose = false;
};

struct PipelineResult {
    ModelFile model;
    EvalReport report;
};

// filter -> features (classical) or standardized raw signal (CNN) -> fit on
// train -> record validation RMSE -> refit on train+val unless the 1.5x
// overfitting gate fires -> evaluate on test. Deterministic given cfg.seed.
PipelineResult run_pipeline(const std::vector<LabeledSignature>& rows, const PipelineConfig& cfg);

// Per-(position x case) RMSE and std of absolute errors. Throws DataError
// when any of the 20 cells has no rows.
CaseTable per_case_report(const std::vector<double>& predictions,
                          const std::vector<double>& targets,
                          const std::vector<TagLabel>& labels);

// Applies the model file's recorded preprocessing to raw (unfiltered)
// signatures on the model's grid and returns predictions.
std::vector<double> model_predict(const ModelFile& model, const std::vector<RcsSignature>& sigs);

// Report artifacts, byte-stable for fixed inputs.
void write_report_csv(const std::string& path, const EvalReport& report);
void write_per_case_csv(const std::string& path, const EvalReport& report);
void write_loss_csv(const std::string& path, const TrainHistory& history);

} // namespace crfid
