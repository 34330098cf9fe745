#include "crfid/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "crfid/dataset_io.hpp"
#include "crfid/errors.hpp"
#include "crfid/kv_config.hpp"
#include "crfid/model_io.hpp"
#include "crfid/pipeline.hpp"
#include "crfid/rcs.hpp"
#include "crfid/siggen.hpp"
#include "crfid/touchstone.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace crfid::cli {

namespace {

std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value, std::uint64_t fallback) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("CRFID_SEED")) {
        std::uint64_t v = 0;
        const std::string_view s(env);
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
            throw UsageError("CRFID_SEED must be a non-negative integer, got '" + std::string(s) +
                             "'");
        return v;
    }
    return fallback;
}

std::uint32_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return crc32(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
}

void write_manifest(const std::string& path, const ordered_json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("cannot write " + path);
}

std::string g4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// ---- generate ----------------------------------------------------------

struct GenerateOpts {
    std::string out_dir;
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double scale = 1.0;
    int s2p_rows = 0;
};

int cmd_generate(const GenerateOpts& opt) {
    GeneratorConfig cfg =
        opt.config_path.empty() ? GeneratorConfig{} : load_generator_config(opt.config_path);
    cfg.master_seed = resolve_seed(opt.seed_given, opt.seed, cfg.master_seed);
    if (!(opt.scale > 0.0 && opt.scale <= 1.0)) throw UsageError("--scale must lie in (0, 1]");
    cfg.readings_per_group = std::max(
        1, static_cast<int>(std::llround(cfg.readings_per_group * opt.scale)));
    cfg.validate();

    fs::create_directories(opt.out_dir);
    const std::vector<LabeledSignature> rows = build_dataset(cfg);

    const std::string csv_path = (fs::path(opt.out_dir) / "dataset.csv").string();
    const std::string cfg_path = (fs::path(opt.out_dir) / "generator_config.txt").string();
    write_dataset_csv(csv_path, rows);
    save_generator_config(cfg_path, cfg);

    if (opt.s2p_rows > 0) {
        const fs::path dir = fs::path(opt.out_dir) / "s2p";
        fs::create_directories(dir);
        const int n = std::min<int>(opt.s2p_rows, static_cast<int>(rows.size()));
        for (int i = 0; i < n; ++i) {
            const TagLabel& label = rows[static_cast<std::size_t>(i)].label;
            const SweepTriple triple = synth_sweeps(label, cfg, label_seed(cfg, label));
            char stem[96];
            std::snprintf(stem, sizeof stem, "row%04d_id%d_%gpF_%s_%s_r%d", i, label.tag_id,
                          label.capacitance_pf, position_name(label.position),
                          case_name(label.deformation), label.reading);
            write_s2p_file(triple.tag, (dir / (std::string(stem) + "_tag.s2p")).string());
            write_s2p_file(triple.iso, (dir / (std::string(stem) + "_iso.s2p")).string());
            write_s2p_file(triple.ref, (dir / (std::string(stem) + "_ref.s2p")).string());
        }
    }

    ordered_json manifest;
    manifest["subcommand"] = "generate";
    manifest["config"] = opt.config_path;
    manifest["seed"] = cfg.master_seed;
    manifest["scale"] = opt.scale;
    manifest["readings_per_group"] = cfg.readings_per_group;
    manifest["rows"] = rows.size();
    manifest["grid"] = {{"start_hz", cfg.grid.f_start_hz},
                        {"stop_hz", cfg.grid.f_stop_hz},
                        {"points", cfg.grid.n_points}};
    manifest["outputs"] = {{"dataset", csv_path}, {"generator_config", cfg_path}};
    manifest["config_digest"] = file_digest(cfg_path);
    write_manifest((fs::path(opt.out_dir) / "manifest.json").string(), manifest);

    std::cout << "wrote " << rows.size() << " rows to " << csv_path << '\n';
    return 0;
}

// ---- train -------------------------------------------------------------

struct TrainOpts {
    std::string dataset;
    std::string task;
    std::string model;
    std::string out_dir = ".";
    std::string config_path;
    std::uint64_t seed = 42;
    bool seed_given = false;
    int epochs = 0; // 0 = default
    double scale = 1.0;
    bool rfe = false;
    bool grid_search = false;
    bool verbose = false;
};

ArchitectureSpec arch_for(const std::string& model, double scale) {
    ArchitectureSpec spec;
    if (model == "cnn1")
        spec = model_1_spec();
    else if (model == "cnn2")
        spec = model_2_spec();
    else if (model == "cnn3")
        spec = model_3_spec();
    else
        spec = model_4_spec();
    if (scale != 1.0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s_s%g", spec.name.c_str(), scale);
        spec = reduced_spec(spec, scale, buf);
    }
    return spec;
}

int cmd_train(const TrainOpts& opt) {
    Task task;
    try {
        task = parse_task(opt.task);
    } catch (const crfid::ParseError& e) {
        throw UsageError(e.what());
    }
    const bool is_cnn = opt.model.rfind("cnn", 0) == 0;
    if (is_cnn) {
        if (opt.model != "cnn1" && opt.model != "cnn2" && opt.model != "cnn3" &&
            opt.model != "cnn4")
            throw UsageError("--model must be one of dt, rf, gbt, svr, cnn1, cnn2, cnn3, cnn4");
        const bool id_arch = opt.model == "cnn1" || opt.model == "cnn3";
        if (id_arch && task != Task::Id)
            throw UsageError(opt.model + " is an ID architecture; use --task id");
        if (!id_arch && task != Task::Sensing)
            throw UsageError(opt.model + " is a sensing architecture; use --task sensing");
        if (!(opt.scale > 0.0 && opt.scale <= 1.0)) throw UsageError("--scale must lie in (0, 1]");
    }

    PipelineConfig pc;
    pc.task = task;
    pc.seed = resolve_seed(opt.seed_given, opt.seed, 42);
    pc.rfe = opt.rfe;
    pc.grid_search = opt.grid_search;
    pc.verbose = opt.verbose;
    if (!opt.config_path.empty()) {
        const GeneratorConfig gen = load_generator_config(opt.config_path);
        pc.grid = gen.grid;
    }
    if (is_cnn) {
        pc.use_cnn = true;
        pc.arch = arch_for(opt.model, opt.scale);
        pc.train.seed = pc.seed;
        if (opt.epochs > 0) pc.train.max_epochs = opt.epochs;
    } else {
        try {
            pc.kind = parse_model_kind(opt.model);
        } catch (const crfid::ParseError& e) {
            throw UsageError(e.what());
        }
        if (opt.epochs > 0) throw UsageError("--epochs applies to CNN models only");
    }

    const std::vector<LabeledSignature> rows = read_dataset_csv(opt.dataset, pc.grid);
    const PipelineResult result = run_pipeline(rows, pc);

    fs::create_directories(opt.out_dir);
    const std::string stem = opt.model + "_" + task_name(task);
    const auto path_of = [&](const char* suffix) {
        return (fs::path(opt.out_dir) / (stem + suffix)).string();
    };
    save_model(path_of(".model"), result.model);
    write_report_csv(path_of("_report.csv"), result.report);
    write_per_case_csv(path_of("_per_case.csv"), result.report);
    if (pc.use_cnn) write_loss_csv(path_of("_loss.csv"), result.report.history);

    ordered_json manifest;
    manifest["subcommand"] = "train";
    manifest["config"] = opt.config_path;
    manifest["dataset"] = opt.dataset;
    manifest["task"] = task_name(task);
    manifest["model"] = opt.model;
    manifest["seed"] = pc.seed;
    manifest["rows"] = rows.size();
    manifest["rfe"] = opt.rfe;
    manifest["grid_search"] = opt.grid_search;
    if (pc.use_cnn) {
        manifest["epochs"] = pc.train.max_epochs;
        manifest["scale"] = opt.scale;
        manifest["architecture"] = pc.arch.name;
        manifest["best_epoch"] = result.report.history.best_epoch;
        manifest["stopped_early"] = result.report.history.stopped_early;
    }
    manifest["outputs"] = {{"model", path_of(".model")}, {"report", path_of("_report.csv")},
                           {"per_case", path_of("_per_case.csv")}};
    if (pc.use_cnn) manifest["outputs"]["loss_history"] = path_of("_loss.csv");
    manifest["model_digest"] = file_digest(path_of(".model"));
    write_manifest(path_of("_manifest.json"), manifest);

    const EvalReport& r = result.report;
    std::printf("%-10s %-8s %10s %10s %10s %9s %11s\n", "model", "task", "train_rmse", "val_rmse",
                "test_rmse", "nrmse_pct", "decode_acc");
    std::printf("%-10s %-8s %10s %10s %10s %9s %11s\n", r.model_name.c_str(),
                task_name(r.task), g4(r.train_rmse).c_str(), g4(r.val_rmse).c_str(),
                g4(r.test_rmse).c_str(), g4(r.test_nrmse_pct).c_str(),
                g4(r.test_decode_accuracy).c_str());
    if (r.overfit_warning)
        std::fprintf(stderr,
                     "warning: validation RMSE %.4f exceeds 1.5x training RMSE %.4f; "
                     "model kept its train-only fit\n",
                     r.val_rmse, r.train_rmse);
    return 0;
}

// ---- predict -----------------------------------------------------------

struct PredictOpts {
    std::string model_path;
    std::string csv;
    std::string tag, iso, ref;
    std::string out;
    double plate_side_m = 0.025;
};

int cmd_predict(const PredictOpts& opt) {
    const bool have_triple = !opt.tag.empty() || !opt.iso.empty() || !opt.ref.empty();
    if (have_triple && (opt.tag.empty() || opt.iso.empty() || opt.ref.empty()))
        throw UsageError("--tag, --iso, and --ref must be given together");
    if (have_triple == !opt.csv.empty())
        throw UsageError("give either --csv or an --tag/--iso/--ref sweep triple");

    const ModelFile model = load_model(opt.model_path);

    std::vector<RcsSignature> sigs;
    std::vector<double> actual; // empty when ground truth is unavailable
    if (!opt.csv.empty()) {
        const std::vector<LabeledSignature> rows = read_dataset_csv(opt.csv, model.grid);
        sigs.reserve(rows.size());
        actual.reserve(rows.size());
        for (const LabeledSignature& r : rows) {
            sigs.push_back(r.signature);
            actual.push_back(model.task == Task::Id ? static_cast<double>(r.label.tag_id)
                                                    : r.label.capacitance_pf);
        }
    } else {
        const FrequencySweep tag = resample_to_grid(read_s2p_file(opt.tag), model.grid);
        const FrequencySweep iso = resample_to_grid(read_s2p_file(opt.iso), model.grid);
        const FrequencySweep ref = resample_to_grid(read_s2p_file(opt.ref), model.grid);
        sigs.push_back(calibrate(tag, iso, ref, ReferencePlate{opt.plate_side_m}, model.grid));
    }

    const std::vector<double> pred = model_predict(model, sigs);

    std::string csv_text = "actual,predicted,decoded,abs_error\n";
    std::printf("%10s %12s %9s %10s\n", "actual", "predicted", "decoded", "abs_error");
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double decoded = decode(model.task, pred[i]);
        char num[40], dec[40];
        std::snprintf(num, sizeof num, "%.6g", pred[i]);
        std::snprintf(dec, sizeof dec, "%g", decoded);
        if (!actual.empty()) {
            char act[40], err[40];
            std::snprintf(act, sizeof act, "%g", actual[i]);
            std::snprintf(err, sizeof err, "%.6g", std::abs(pred[i] - actual[i]));
            csv_text += std::string(act) + "," + num + "," + dec + "," + err + "\n";
            std::printf("%10s %12s %9s %10s\n", act, num, dec, err);
        } else {
            csv_text += std::string(",") + num + "," + dec + ",\n";
            std::printf("%10s %12s %9s %10s\n", "-", num, dec, "-");
        }
    }
    if (!opt.out.empty()) {
        std::ofstream out(opt.out, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + opt.out + " for writing");
        out << csv_text;
        if (!out) throw DataError("cannot write " + opt.out);
    }
    return 0;
}

// ---- report ------------------------------------------------------------

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

struct ReportOpts {
    std::vector<std::string> inputs;
    std::string out_dir = ".";
};

int cmd_report(const ReportOpts& opt) {
    const std::string report_header =
        "model,task,train_rmse,val_rmse,test_rmse,train_nrmse_pct,val_nrmse_pct,"
        "test_nrmse_pct,test_decode_accuracy,n_features,overfit_warning";
    const std::string case_header = "model,task,position,case,rmse,std_abs_err,n";

    std::vector<std::string> summary_rows;
    std::vector<std::string> case_rows;
    for (const std::string& path : opt.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open " + path);
        std::string header, row;
        if (!std::getline(in, header) || !std::getline(in, row))
            throw crfid::ParseError(path + ": not a report CSV");
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (!row.empty() && row.back() == '\r') row.pop_back();
        if (header != report_header)
            throw crfid::ParseError(path + ": schema mismatch (expected a train report CSV)");
        if (split_line(row).size() != split_line(report_header).size())
            throw crfid::ParseError(path + ": malformed report row");
        summary_rows.push_back(row);

        // Sibling per-case file written by the same train run, if present.
        const std::string suffix = "_report.csv";
        if (path.size() > suffix.size() &&
            path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
            const std::string case_path =
                path.substr(0, path.size() - suffix.size()) + "_per_case.csv";
            std::ifstream cin_(case_path, std::ios::binary);
            if (cin_) {
                std::string chead;
                if (!std::getline(cin_, chead)) continue;
                if (!chead.empty() && chead.back() == '\r') chead.pop_back();
                if (chead != case_header)
                    throw crfid::ParseError(case_path + ": schema mismatch");
                std::string cr;
                while (std::getline(cin_, cr)) {
                    if (!cr.empty() && cr.back() == '\r') cr.pop_back();
                    if (!cr.empty()) case_rows.push_back(cr);
                }
            }
        }
    }

    fs::create_directories(opt.out_dir);
    const std::string summary_path = (fs::path(opt.out_dir) / "summary.csv").string();
    {
        std::ofstream out(summary_path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + summary_path + " for writing");
        out << report_header << '\n';
        for (const std::string& r : summary_rows) out << r << '\n';
    }
    if (!case_rows.empty()) {
        const std::string case_path = (fs::path(opt.out_dir) / "per_case.csv").string();
        std::ofstream out(case_path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open " + case_path + " for writing");
        out << case_header << '\n';
        for (const std::string& r : case_rows) out << r << '\n';
    }

    std::printf("%-12s %-8s %10s %10s %10s %9s %11s\n", "model", "task", "train_rmse", "val_rmse",
                "test_rmse", "nrmse_pct", "decode_acc");
    for (const std::string& r : summary_rows) {
        const std::vector<std::string> f = split_line(r);
        std::printf("%-12s %-8s %10s %10s %10s %9s %11s\n", f[0].c_str(), f[1].c_str(),
                    f[2].c_str(), f[3].c_str(), f[4].c_str(), f[7].c_str(), f[8].c_str());
    }
    std::printf("wrote %s (%zu rows)\n", summary_path.c_str(), summary_rows.size());
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"chipless-RFID reading pipeline: synthetic data, training, prediction"};
    app.name("crfid");
    app.set_version_flag("--version", "crfid 1.0.0");
    app.require_subcommand(1);

    GenerateOpts gen;
    CLI::App* g = app.add_subcommand("generate", "synthesize a labeled RCS dataset");
    g->add_option("--out", gen.out_dir, "output directory")->required();
    g->add_option("--config", gen.config_path, "generator key=value config file");
    CLI::Option* g_seed = g->add_option("--seed", gen.seed, "master seed (overrides config and CRFID_SEED)");
    g->add_option("--scale", gen.scale, "readings-per-group scale factor in (0, 1]")
        ->default_val(1.0);
    g->add_option("--s2p", gen.s2p_rows, "also write .s2p sweep triples for the first N rows")
        ->default_val(0);

    TrainOpts tr;
    CLI::App* t = app.add_subcommand("train", "fit a model and write model + report files");
    t->add_option("dataset", tr.dataset, "dataset CSV from `generate`")
        ->required()
        ->check(CLI::ExistingFile);
    t->add_option("--task", tr.task, "id | sensing")->required();
    t->add_option("--model", tr.model, "dt | rf | gbt | svr | cnn1 | cnn2 | cnn3 | cnn4")
        ->required();
    t->add_option("--out", tr.out_dir, "output directory")->default_val(".");
    t->add_option("--config", tr.config_path, "generator config (frequency grid source)");
    CLI::Option* t_seed = t->add_option("--seed", tr.seed, "pipeline seed (overrides CRFID_SEED)");
    t->add_option("--epochs", tr.epochs, "max training epochs (CNN models)");
    t->add_option("--scale", tr.scale, "CNN width scale in (0, 1]")->default_val(1.0);
    t->add_flag("--rfe", tr.rfe, "recursive feature elimination (classical models)");
    t->add_flag("--grid-search", tr.grid_search, "hyperparameter grid search (classical models)");
    t->add_flag("--verbose", tr.verbose, "per-epoch loss to stderr");

    PredictOpts pr;
    CLI::App* p = app.add_subcommand("predict", "score sweeps with a saved model");
    p->add_option("--model", pr.model_path, "model file from `train`")
        ->required()
        ->check(CLI::ExistingFile);
    p->add_option("--csv", pr.csv, "dataset CSV to score")->check(CLI::ExistingFile);
    p->add_option("--tag", pr.tag, "tag sweep .s2p")->check(CLI::ExistingFile);
    p->add_option("--iso", pr.iso, "isolation (empty chamber) sweep .s2p")
        ->check(CLI::ExistingFile);
    p->add_option("--ref", pr.ref, "reference plate sweep .s2p")->check(CLI::ExistingFile);
    p->add_option("--plate-side", pr.plate_side_m, "reference plate side, meters")
        ->default_val(0.025);
    p->add_option("--out", pr.out, "write predictions CSV here");

    ReportOpts rp;
    CLI::App* r = app.add_subcommand("report", "merge train reports into a summary table");
    r->add_option("reports", rp.inputs, "train *_report.csv files")
        ->required()
        ->check(CLI::ExistingFile);
    r->add_option("--out", rp.out_dir, "output directory")->default_val(".");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend()); // CLI11 convention
        app.parse(reversed);
        if (app.got_subcommand(g)) {
            gen.seed_given = g_seed->count() > 0;
            return cmd_generate(gen);
        }
        if (app.got_subcommand(t)) {
            tr.seed_given = t_seed->count() > 0;
            return cmd_train(tr);
        }
        if (app.got_subcommand(p)) return cmd_predict(pr);
        return cmd_report(rp);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const crfid::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace crfid::cli
