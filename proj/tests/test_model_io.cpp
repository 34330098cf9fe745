#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "crfid/errors.hpp"
#include "crfid/model_io.hpp"
#include "crfid/rng.hpp"

using namespace crfid;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

FeatureMatrix toy_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    FeatureMatrix X;
    X.n_rows = n;
    X.n_cols = p;
    X.data.resize(n * p);
    Rng rng(seed);
    for (double& v : X.data) v = rng.uniform(-1.0, 1.0);
    for (std::size_t c = 0; c < p; ++c) X.names.push_back("f" + std::to_string(c));
    return X;
}

std::vector<double> toy_targets(const FeatureMatrix& X) {
    std::vector<double> y(X.n_rows);
    for (std::size_t r = 0; r < X.n_rows; ++r) y[r] = 2.0 * X.at(r, 0) - X.at(r, 1);
    return y;
}

ModelFile classical_file(ModelKind kind) {
    const FeatureMatrix X = toy_matrix(40, 4, 5);
    const std::vector<double> y = toy_targets(X);
    ClassicalParams params;
    params.n_estimators = 10;
    params.seed = 9;

    ModelFile f;
    f.task = Task::Sensing;
    f.is_cnn = false;
    f.kind = kind;
    f.grid = CanonicalGrid{3.1e9, 10.6e9, 700};
    f.feature_names = X.names;
    f.selected = {0, 1, 2, 3};
    f.scaler = fit_scaler(X);
    f.classical = fit_classical(kind, apply_scaler(f.scaler, X), y, params);
    return f;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("classical models survive a save/load round trip bit-exactly") {
    for (ModelKind kind : {ModelKind::DT, ModelKind::RF, ModelKind::GBT, ModelKind::SVR}) {
        CAPTURE(model_kind_name(kind));
        const ModelFile f = classical_file(kind);
        const std::string path = temp_path("crfid_model_io_rt.model");
        save_model(path, f);
        const ModelFile g = load_model(path);

        CHECK(g.task == f.task);
        CHECK(g.is_cnn == f.is_cnn);
        CHECK(g.kind == f.kind);
        CHECK(g.grid.f_start_hz == f.grid.f_start_hz);
        CHECK(g.grid.n_points == f.grid.n_points);
        CHECK(g.feature_names == f.feature_names);
        CHECK(g.selected == f.selected);
        CHECK(g.scaler.mean == f.scaler.mean);
        CHECK(g.scaler.std_dev == f.scaler.std_dev);

        const FeatureMatrix X = toy_matrix(15, 4, 77);
        CHECK(predict_classical(g.classical, X) == predict_classical(f.classical, X));
        std::remove(path.c_str());
    }
}

TEST_CASE("cnn models survive a save/load round trip bit-exactly") {
    ModelFile f;
    f.task = Task::Id;
    f.is_cnn = true;
    f.raw_signature_input = true;
    f.grid = CanonicalGrid{3.1e9, 10.6e9, 40};
    ArchitectureSpec spec;
    spec.name = "io_micro";
    spec.layers = {LayerSpec::conv(3, 5), LayerSpec::pool(), LayerSpec::batch_norm(),
                   LayerSpec::dropout(0.4), LayerSpec::flatten(), LayerSpec::dense(6, true),
                   LayerSpec::dense(1, false)};
    f.cnn = make_cnn(spec, 40, 33);
    Rng rng(13);
    for (double& v : f.cnn.running_mean) v = rng.uniform(-1.0, 1.0);
    for (double& v : f.cnn.running_var) v = rng.uniform(0.5, 2.0);
    for (std::size_t c = 0; c < 40; ++c) {
        f.feature_names.push_back("bin" + std::to_string(c));
        f.selected.push_back(static_cast<int>(c));
    }
    FeatureMatrix train = toy_matrix(8, 40, 3);
    f.scaler = fit_scaler(train);

    const std::string path = temp_path("crfid_model_io_cnn.model");
    save_model(path, f);
    const ModelFile g = load_model(path);

    CHECK(g.is_cnn);
    CHECK(g.raw_signature_input);
    CHECK(g.cnn.spec.name == "io_micro");
    CHECK(g.cnn.params == f.cnn.params);
    CHECK(g.cnn.running_mean == f.cnn.running_mean);
    CHECK(g.cnn.running_var == f.cnn.running_var);

    Tensor x;
    x.resize(3, 40, 1);
    Rng xr(21);
    for (double& v : x.data) v = xr.uniform(-2.0, 2.0);
    CHECK(forward_infer(g.cnn, x) == forward_infer(f.cnn, x));
    std::remove(path.c_str());
}

TEST_CASE("corruption, truncation, and bad headers are rejected") {
    const ModelFile f = classical_file(ModelKind::GBT);
    const std::string path = temp_path("crfid_model_io_bad.model");
    save_model(path, f);
    const std::string good = slurp(path);
    REQUIRE(good.size() > 64);

    SUBCASE("flipped payload byte fails the checksum") {
        std::string bad = good;
        bad[good.size() / 2] = static_cast<char>(bad[good.size() / 2] ^ 0x40);
        spit(path, bad);
        CHECK_THROWS_AS(load_model(path), ParseError);
    }
    SUBCASE("truncation is detected") {
        spit(path, good.substr(0, good.size() - 9));
        CHECK_THROWS_AS(load_model(path), ParseError);
        spit(path, good.substr(0, 3));
        CHECK_THROWS_AS(load_model(path), ParseError);
    }
    SUBCASE("wrong magic is rejected") {
        std::string bad = good;
        bad[0] = 'X';
        // keep the trailer honest so only the magic check can fire
        const std::uint32_t c =
            crc32(reinterpret_cast<const unsigned char*>(bad.data()), bad.size() - 4);
        for (int i = 0; i < 4; ++i)
            bad[bad.size() - 4 + static_cast<std::size_t>(i)] =
                static_cast<char>((c >> (8 * i)) & 0xff);
        spit(path, bad);
        CHECK_THROWS_AS(load_model(path), ParseError);
    }
    SUBCASE("unknown version is rejected") {
        std::string bad = good;
        bad[4] = static_cast<char>(kModelFormatVersion + 1); // little-endian low byte
        const std::uint32_t c =
            crc32(reinterpret_cast<const unsigned char*>(bad.data()), bad.size() - 4);
        for (int i = 0; i < 4; ++i)
            bad[bad.size() - 4 + static_cast<std::size_t>(i)] =
                static_cast<char>((c >> (8 * i)) & 0xff);
        spit(path, bad);
        CHECK_THROWS_AS(load_model(path), ParseError);
    }
    SUBCASE("missing file is reported") {
        CHECK_THROWS_AS(load_model(temp_path("crfid_no_such.model")), DataError);
    }
    std::remove(path.c_str());
}

TEST_CASE("the crc32 implementation matches the reference vector") {
    // IEEE 802.3 check value for the ASCII digits "123456789"
    const unsigned char digits[] = "123456789";
    CHECK(crc32(digits, 9) == 0xCBF43926u);
    CHECK(crc32(digits, 0) == 0x0u);
}
