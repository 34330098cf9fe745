#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "crfid/dataset_io.hpp"
#include "crfid/errors.hpp"
#include "crfid/siggen.hpp"

using namespace crfid;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::vector<LabeledSignature> tiny_dataset(GeneratorConfig& cfg) {
    cfg.readings_per_group = 1;
    std::vector<LabeledSignature> rows;
    for (int id : {0, 5, 7}) {
        TagLabel label;
        label.tag_id = id;
        label.capacitance_pf = cfg.capacitances_pf[static_cast<std::size_t>(id) % 3];
        label.position = id == 5 ? Position::P3 : Position::P1;
        label.deformation = id == 7 ? Deformation::Cv : Deformation::Ci;
        rows.push_back({label, synth_rcs(label, cfg, label_seed(cfg, label))});
    }
    return rows;
}

std::string first_line(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("dataset rows round trip through the CSV at writer precision") {
    GeneratorConfig cfg;
    const std::vector<LabeledSignature> rows = tiny_dataset(cfg);
    const std::string path = temp_path("crfid_ds_rt.csv");
    write_dataset_csv(path, rows);

    const std::vector<LabeledSignature> back = read_dataset_csv(path, cfg.grid);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].label.tag_id == rows[i].label.tag_id);
        CHECK(back[i].label.capacitance_pf == rows[i].label.capacitance_pf);
        CHECK(back[i].label.position == rows[i].label.position);
        CHECK(back[i].label.deformation == rows[i].label.deformation);
        CHECK(back[i].label.reading == rows[i].label.reading);
        // values travel as 9 significant digits
        REQUIRE(back[i].signature.rcs_m2.size() == rows[i].signature.rcs_m2.size());
        for (std::size_t j = 0; j < rows[i].signature.rcs_m2.size(); ++j)
            CHECK(std::abs(back[i].signature.rcs_m2[j] - rows[i].signature.rcs_m2[j]) <=
                  1e-8 * std::max(1e-6, std::abs(rows[i].signature.rcs_m2[j])));
        CHECK(back[i].signature.frequencies_hz == rows[i].signature.frequencies_hz);
    }
    std::remove(path.c_str());
}

TEST_CASE("writing the same rows twice produces identical bytes") {
    GeneratorConfig cfg;
    const std::vector<LabeledSignature> rows = tiny_dataset(cfg);
    const std::string a = temp_path("crfid_ds_a.csv");
    const std::string b = temp_path("crfid_ds_b.csv");
    write_dataset_csv(a, rows);
    write_dataset_csv(b, rows);
    CHECK(slurp(a) == slurp(b));
    std::remove(a.c_str());
    std::remove(b.c_str());
}

TEST_CASE("the header names the label columns and the bins") {
    GeneratorConfig cfg;
    const std::vector<LabeledSignature> rows = tiny_dataset(cfg);
    const std::string path = temp_path("crfid_ds_header.csv");
    write_dataset_csv(path, rows);
    const std::string header = first_line(path);
    CHECK(header.rfind("tag_id,capacitance_pf,position,case,reading,f0,", 0) == 0);
    CHECK(header.find(",f699") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("a serialized row starts with its label fields") {
    GeneratorConfig cfg;
    const std::vector<LabeledSignature> rows = tiny_dataset(cfg);
    const std::string line = dataset_csv_row(rows[1]);
    CHECK(line.rfind("5,0.8,P3,Ci,0,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 5 + 699);
}

TEST_CASE("malformed CSVs are rejected with ParseError") {
    const std::string path = temp_path("crfid_ds_bad.csv");
    GeneratorConfig cfg;
    const CanonicalGrid grid = cfg.grid;
    const auto write = [&](const std::string& text) {
        std::ofstream out(path, std::ios::trunc);
        out << text;
    };

    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_dataset_csv(temp_path("crfid_no_such.csv"), grid), DataError);
    }
    SUBCASE("wrong header") {
        write("id,cap\n1,0.1\n");
        CHECK_THROWS_AS(read_dataset_csv(path, grid), ParseError);
    }
    SUBCASE("wrong column count") {
        std::string text = "tag_id,capacitance_pf,position,case,reading";
        for (int i = 0; i < 700; ++i) text += ",f" + std::to_string(i);
        text += "\n1,0.1,P1,Ci,0,1.0,2.0\n";
        write(text);
        CHECK_THROWS_AS(read_dataset_csv(path, grid), ParseError);
    }
    SUBCASE("non-numeric value") {
        GeneratorConfig c2;
        std::vector<LabeledSignature> rows = tiny_dataset(c2);
        write_dataset_csv(path, rows);
        std::ifstream in(path);
        std::string all((std::istreambuf_iterator<char>(in)), {});
        in.close();
        const std::size_t pos = all.find(",0.00", all.find('\n'));
        REQUIRE(pos != std::string::npos);
        all.replace(pos + 1, 5, "zippy");
        write(all);
        CHECK_THROWS_AS(read_dataset_csv(path, grid), ParseError);
    }
    SUBCASE("out-of-range tag id") {
        GeneratorConfig c2;
        std::vector<LabeledSignature> rows = tiny_dataset(c2);
        rows[0].label.tag_id = 11;
        write_dataset_csv(path, rows);
        CHECK_THROWS_AS(read_dataset_csv(path, grid), ParseError);
    }
    std::remove(path.c_str());
}

TEST_CASE("empty datasets are rejected on write") {
    CHECK_THROWS_AS(write_dataset_csv(temp_path("crfid_ds_empty.csv"), {}), DataError);
}
