#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "crfid/errors.hpp"
#include "crfid/kv_config.hpp"

using namespace crfid;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

} // namespace

TEST_CASE("defaults round trip exactly through save and load") {
    GeneratorConfig cfg;
    cfg.master_seed = 1234567;
    cfg.readings_per_group = 7;
    cfg.baseline_m2 = 1.9e-3;
    cfg.case_detune[4] = 0.0175;
    const std::string path = temp_path("crfid_kv_rt.txt");
    save_generator_config(path, cfg);
    const GeneratorConfig back = load_generator_config(path);

    CHECK(back.baseline_m2 == cfg.baseline_m2);
    CHECK(back.master_seed == cfg.master_seed);
    CHECK(back.readings_per_group == cfg.readings_per_group);
    CHECK(back.case_detune == cfg.case_detune);
    CHECK(back.id_center_hz == cfg.id_center_hz);
    CHECK(back.position_amplitude == cfg.position_amplitude);
    CHECK(back.grid.f_start_hz == cfg.grid.f_start_hz);
    CHECK(back.grid.f_stop_hz == cfg.grid.f_stop_hz);
    CHECK(back.grid.n_points == cfg.grid.n_points);
    CHECK(back.plate.side_m == cfg.plate.side_m);
    CHECK(back.sensing_f0_hz == cfg.sensing_f0_hz);
    CHECK(back.ciii_p4_detune_mult == cfg.ciii_p4_detune_mult);

    // a second save of the loaded config is byte-identical
    const std::string path2 = temp_path("crfid_kv_rt2.txt");
    save_generator_config(path2, back);
    std::ifstream a(path), b(path2);
    const std::string sa((std::istreambuf_iterator<char>(a)), {});
    const std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
    const std::string path = temp_path("crfid_kv_loose.txt");
    spit(path, "# tuned run\n\n  baseline_m2 =  2.5e-3  \nmaster_seed=9\n");
    const GeneratorConfig cfg = load_generator_config(path);
    CHECK(cfg.baseline_m2 == 2.5e-3);
    CHECK(cfg.master_seed == 9);
    CHECK(cfg.readings_per_group == 20); // untouched default
    std::remove(path.c_str());
}

TEST_CASE("malformed files are rejected") {
    const std::string path = temp_path("crfid_kv_bad.txt");

    SUBCASE("unknown key") {
        spit(path, "not_a_knob = 1\n");
        CHECK_THROWS_AS(load_generator_config(path), ParseError);
    }
    SUBCASE("missing equals") {
        spit(path, "baseline_m2 2.5e-3\n");
        CHECK_THROWS_AS(load_generator_config(path), ParseError);
    }
    SUBCASE("bad number") {
        spit(path, "baseline_m2 = squid\n");
        CHECK_THROWS_AS(load_generator_config(path), ParseError);
    }
    SUBCASE("wrong array arity") {
        spit(path, "id_center_hz = 3.7e9, 4.7e9\n");
        CHECK_THROWS_AS(load_generator_config(path), ParseError);
    }
    SUBCASE("values that fail validation") {
        spit(path, "id_width_hz = -1\n");
        CHECK_THROWS_AS(load_generator_config(path), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_generator_config(temp_path("crfid_kv_nope.txt")), DataError);
    }
    std::remove(path.c_str());
}
