#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crfid/errors.hpp"
#include "crfid/pipeline.hpp"

using namespace crfid;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small but fully populated factorial dataset (8 x 3 x 4 x 5 x readings).
std::vector<LabeledSignature> small_dataset(int readings) {
    GeneratorConfig cfg;
    cfg.readings_per_group = readings;
    return build_dataset(cfg);
}

} // namespace

TEST_CASE("the classical pipeline learns the tag id on a small dataset") {
    const std::vector<LabeledSignature> rows = small_dataset(5); // 2400 rows
    PipelineConfig cfg;
    cfg.task = Task::Id;
    cfg.kind = ModelKind::GBT;
    cfg.params.n_estimators = 60;
    cfg.params.max_depth = 4;
    const PipelineResult res = run_pipeline(rows, cfg);

    CHECK(res.report.task == Task::Id);
    CHECK(res.report.n_features == 54);
    CHECK(res.report.test_rmse < 0.6);
    CHECK(res.report.test_decode_accuracy > 0.9);
    CHECK(res.report.test_pred.size() == res.report.test_truth.size());
    CHECK(res.report.model_name == "gbt");

    // normalized rmse: percent of the 0..7 target span
    CHECK(res.report.test_nrmse_pct ==
          doctest::Approx(100.0 * res.report.test_rmse / 7.0).epsilon(1e-9));

    // the saved model file reproduces the reported test predictions
    std::vector<RcsSignature> test_sigs;
    std::vector<TagLabel> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = rows[i].label;
    const Split split = stratified_split(labels, cfg.seed);
    for (int r : split.test) test_sigs.push_back(rows[static_cast<std::size_t>(r)].signature);
    const std::vector<double> again = model_predict(res.model, test_sigs);
    REQUIRE(again.size() == res.report.test_pred.size());
    for (std::size_t i = 0; i < again.size(); ++i)
        CHECK(again[i] == doctest::Approx(res.report.test_pred[i]).epsilon(1e-12));
}

TEST_CASE("the per-case table covers the full grid and matches direct math") {
    const std::vector<LabeledSignature> rows = small_dataset(2);
    std::vector<double> pred(rows.size()), truth(rows.size());
    std::vector<TagLabel> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        labels[i] = rows[i].label;
        truth[i] = labels[i].tag_id;
        pred[i] = truth[i] + (i % 3 == 0 ? 0.3 : -0.1); // deterministic error pattern
    }
    const CaseTable table = per_case_report(pred, truth, labels);

    double n_total = 0.0;
    for (int p = 0; p < kNumPositions; ++p)
        for (int c = 0; c < kNumCases; ++c) {
            const CaseCell& cell = table[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
            CHECK(cell.n == 8 * 3 * 2); // ids x caps x readings
            n_total += cell.n;
            CHECK(cell.rmse > 0.0);
            CHECK(std::isfinite(cell.std_abs_err));
        }
    CHECK(n_total == rows.size());

    // spot-check one cell against a direct computation
    double sq = 0.0, abs_sum = 0.0, abs_sq = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (labels[i].position != Position::P2 || labels[i].deformation != Deformation::Ciii) continue;
        const double e = pred[i] - truth[i];
        sq += e * e;
        abs_sum += std::abs(e);
        abs_sq += e * e;
        ++n;
    }
    const CaseCell& cell = table[1][2];
    CHECK(cell.rmse == doctest::Approx(std::sqrt(sq / n)).epsilon(1e-12));
    const double mean_abs = abs_sum / n;
    CHECK(cell.std_abs_err == doctest::Approx(std::sqrt(abs_sq / n - mean_abs * mean_abs)).epsilon(1e-9));

    // missing cells are an error: the first 30 rows never visit P4
    std::vector<TagLabel> partial(labels.begin(), labels.begin() + 30);
    std::vector<double> short_pred(pred.begin(), pred.begin() + 30);
    std::vector<double> short_truth(truth.begin(), truth.begin() + 30);
    CHECK_THROWS_AS(per_case_report(short_pred, short_truth, partial), DataError);
}

TEST_CASE("rfe and grid search reduce or keep features and stay deterministic") {
    const std::vector<LabeledSignature> rows = small_dataset(5); // 2400 rows
    PipelineConfig cfg;
    cfg.task = Task::Sensing;
    cfg.kind = ModelKind::DT;
    cfg.rfe = true;
    cfg.cv_folds = 3;
    const PipelineResult a = run_pipeline(rows, cfg);
    const PipelineResult b = run_pipeline(rows, cfg);

    CHECK(a.report.n_features <= 54);
    CHECK(a.report.n_features >= 1);
    CHECK(a.report.test_pred == b.report.test_pred);
    CHECK(a.report.test_rmse == b.report.test_rmse);
    CHECK(a.model.selected == b.model.selected);
    CHECK(static_cast<int>(a.model.selected.size()) == a.report.n_features);
}

TEST_CASE("report csv writers are byte-stable and carry the headline numbers") {
    const std::vector<LabeledSignature> rows = small_dataset(5);
    PipelineConfig cfg;
    cfg.task = Task::Id;
    cfg.kind = ModelKind::DT;
    cfg.params.max_depth = 6;
    const PipelineResult res = run_pipeline(rows, cfg);

    const std::string rp = temp_path("crfid_report.csv");
    const std::string cp = temp_path("crfid_cases.csv");
    const std::string rp2 = temp_path("crfid_report2.csv");
    write_report_csv(rp, res.report);
    write_per_case_csv(cp, res.report);
    write_report_csv(rp2, res.report);
    CHECK(slurp(rp) == slurp(rp2));

    const std::string report_text = slurp(rp);
    CHECK(report_text.find("test_rmse") != std::string::npos);
    CHECK(report_text.find("decode_accuracy") != std::string::npos);
    const std::string case_text = slurp(cp);
    CHECK(case_text.find("position") != std::string::npos);
    CHECK(case_text.find("P4") != std::string::npos);
    CHECK(case_text.find("Cv") != std::string::npos);
    // 20 cells + header
    CHECK(std::count(case_text.begin(), case_text.end(), '\n') == 21);

    std::remove(rp.c_str());
    std::remove(cp.c_str());
    std::remove(rp2.c_str());
}

TEST_CASE("loss csv mirrors the recorded history") {
    TrainHistory h;
    h.train_loss = {1.0, 0.5, 0.25};
    h.val_loss = {1.1, 0.7, 0.6};
    h.best_epoch = 2;
    const std::string lp = temp_path("crfid_loss.csv");
    write_loss_csv(lp, h);
    const std::string text = slurp(lp);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4); // header + 3 epochs
    CHECK(text.find("epoch,train_loss,val_loss") == 0);
    CHECK(text.find("0,1,1.1") != std::string::npos);
    std::remove(lp.c_str());
}

TEST_CASE("a tiny cnn run flows through the same pipeline") {
    GeneratorConfig g;
    g.readings_per_group = 5;
    const std::vector<LabeledSignature> rows = build_dataset(g);

    PipelineConfig cfg;
    cfg.task = Task::Id;
    cfg.use_cnn = true;
    cfg.arch = reduced_spec(model_4_spec(), 1.0 / 32.0, "m4_micro");
    cfg.train.max_epochs = 2;
    cfg.train.batch_size = 64;
    cfg.train.patience = 2;
    const PipelineResult res = run_pipeline(rows, cfg);

    CHECK(res.report.model_name == "m4_micro");
    CHECK(res.report.history.train_loss.size() <= 2);
    CHECK(!res.report.history.train_loss.empty());
    CHECK(res.report.test_pred.size() == res.report.test_truth.size());
    CHECK(res.model.is_cnn);

    // the persisted CNN reproduces the reported test predictions
    std::vector<TagLabel> labels(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = rows[i].label;
    const Split split = stratified_split(labels, cfg.seed);
    std::vector<RcsSignature> test_sigs;
    for (int r : split.test) test_sigs.push_back(rows[static_cast<std::size_t>(r)].signature);
    const std::vector<double> again = model_predict(res.model, test_sigs);
    REQUIRE(again.size() == res.report.test_pred.size());
    for (std::size_t i = 0; i < again.size(); ++i)
        CHECK(again[i] == doctest::Approx(res.report.test_pred[i]).epsilon(1e-12));
}

TEST_CASE("pipeline rejects unusable input") {
    PipelineConfig cfg;
    CHECK_THROWS_AS(run_pipeline({}, cfg), DataError);

    // single-row dataset cannot be stratified
    GeneratorConfig g;
    g.readings_per_group = 1;
    std::vector<LabeledSignature> rows = build_dataset(g);
    rows.resize(1);
    CHECK_THROWS_AS(run_pipeline(rows, cfg), DataError);
}
