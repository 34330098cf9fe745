#include "crfid/kv_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>

#include "crfid/errors.hpp"

namespace crfid {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double to_double(std::string_view tok, const std::string& where) {
    double v = 0.0;
    const std::string_view t = trim(tok);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size())
        throw ParseError(where + ": bad number '" + std::string(t) + "'");
    return v;
}

std::vector<double> to_array(std::string_view val, std::size_t n, const std::string& where) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= val.size()) {
        const std::size_t comma = val.find(',', start);
        const std::string_view tok =
            comma == std::string_view::npos ? val.substr(start) : val.substr(start, comma - start);
        out.push_back(to_double(tok, where));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.size() != n)
        throw ParseError(where + ": expected " + std::to_string(n) + " values, got " +
                         std::to_string(out.size()));
    return out;
}

using Setter = std::function<void(GeneratorConfig&, std::string_view, const std::string&)>;

template <std::size_t N>
Setter arr_setter(std::array<double, N> GeneratorConfig::* field) {
    return [field](GeneratorConfig& cfg, std::string_view val, const std::string& where) {
        const std::vector<double> v = to_array(val, N, where);
        std::copy(v.begin(), v.end(), (cfg.*field).begin());
    };
}

Setter dbl_setter(double GeneratorConfig::* field) {
    return [field](GeneratorConfig& cfg, std::string_view val, const std::string& where) {
        cfg.*field = to_double(val, where);
    };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> m = {
        {"baseline_m2", dbl_setter(&GeneratorConfig::baseline_m2)},
        {"null_center_hz",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             c.null_ring.center_hz = to_double(v, w);
         }},
        {"null_depth_m2",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             c.null_ring.depth_m2 = to_double(v, w);
         }},
        {"null_width_hz",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             c.null_ring.width_hz = to_double(v, w);
         }},
        {"id_center_hz", arr_setter(&GeneratorConfig::id_center_hz)},
        {"id_depth_deep_m2", dbl_setter(&GeneratorConfig::id_depth_deep_m2)},
        {"id_depth_residual_m2", dbl_setter(&GeneratorConfig::id_depth_residual_m2)},
        {"id_width_hz", dbl_setter(&GeneratorConfig::id_width_hz)},
        {"sensing_f0_hz", dbl_setter(&GeneratorConfig::sensing_f0_hz)},
        {"sensing_c0_pf", dbl_setter(&GeneratorConfig::sensing_c0_pf)},
        {"sensing_depth_m2", dbl_setter(&GeneratorConfig::sensing_depth_m2)},
        {"sensing_width_hz", dbl_setter(&GeneratorConfig::sensing_width_hz)},
        {"capacitances_pf", arr_setter(&GeneratorConfig::capacitances_pf)},
        {"position_amplitude", arr_setter(&GeneratorConfig::position_amplitude)},
        {"position_noise_sigma_m2", arr_setter(&GeneratorConfig::position_noise_sigma_m2)},
        {"position_ripple_amp_m2", arr_setter(&GeneratorConfig::position_ripple_amp_m2)},
        {"ripple_period_hz", dbl_setter(&GeneratorConfig::ripple_period_hz)},
        {"case_detune", arr_setter(&GeneratorConfig::case_detune)},
        {"case_detune_jitter", arr_setter(&GeneratorConfig::case_detune_jitter)},
        {"case_depth_damping", arr_setter(&GeneratorConfig::case_depth_damping)},
        {"ciii_p4_detune_mult", dbl_setter(&GeneratorConfig::ciii_p4_detune_mult)},
        {"ciii_p4_noise_mult", dbl_setter(&GeneratorConfig::ciii_p4_noise_mult)},
        {"bit_margin_m2", dbl_setter(&GeneratorConfig::bit_margin_m2)},
        {"readings_per_group",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             const double d = to_double(v, w);
             c.readings_per_group = static_cast<int>(d);
             if (c.readings_per_group != d) throw ParseError(w + ": expected an integer");
         }},
        {"master_seed",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             const std::string_view t = trim(v);
             std::uint64_t s = 0;
             const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
             if (ec != std::errc{} || p != t.data() + t.size())
                 throw ParseError(w + ": bad seed '" + std::string(t) + "'");
             c.master_seed = s;
         }},
        {"grid_start_hz",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             c.grid.f_start_hz = to_double(v, w);
         }},
        {"grid_stop_hz",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             c.grid.f_stop_hz = to_double(v, w);
         }},
        {"grid_points",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             const double d = to_double(v, w);
             c.grid.n_points = static_cast<int>(d);
             if (c.grid.n_points != d) throw ParseError(w + ": expected an integer");
         }},
        {"plate_side_m",
         [](GeneratorConfig& c, std::string_view v, const std::string& w) {
             c.plate.side_m = to_double(v, w);
         }},
    };
    return m;
}

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

template <std::size_t N>
std::string g12(const std::array<double, N>& v) {
    std::string s;
    for (std::size_t i = 0; i < N; ++i) {
        if (i) s += ", ";
        s += g12(v[i]);
    }
    return s;
}

} // namespace

GeneratorConfig load_generator_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);

    GeneratorConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = trim(line);
        if (const std::size_t hash = s.find('#'); hash != std::string_view::npos)
            s = trim(s.substr(0, hash));
        if (s.empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        const std::size_t eq = s.find('=');
        if (eq == std::string_view::npos) throw ParseError(where + ": expected key = value");
        const std::string_view key = trim(s.substr(0, eq));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ParseError(where + ": unknown key '" + std::string(key) + "'");
        it->second(cfg, s.substr(eq + 1), where);
    }
    cfg.validate();
    return cfg;
}

void save_generator_config(const std::string& path, const GeneratorConfig& cfg) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << "# signature generator configuration\n";
    out << "baseline_m2 = " << g12(cfg.baseline_m2) << '\n';
    out << "null_center_hz = " << g12(cfg.null_ring.center_hz) << '\n';
    out << "null_depth_m2 = " << g12(cfg.null_ring.depth_m2) << '\n';
    out << "null_width_hz = " << g12(cfg.null_ring.width_hz) << '\n';
    out << "id_center_hz = " << g12(cfg.id_center_hz) << '\n';
    out << "id_depth_deep_m2 = " << g12(cfg.id_depth_deep_m2) << '\n';
    out << "id_depth_residual_m2 = " << g12(cfg.id_depth_residual_m2) << '\n';
    out << "id_width_hz = " << g12(cfg.id_width_hz) << '\n';
    out << "sensing_f0_hz = " << g12(cfg.sensing_f0_hz) << '\n';
    out << "sensing_c0_pf = " << g12(cfg.sensing_c0_pf) << '\n';
    out << "sensing_depth_m2 = " << g12(cfg.sensing_depth_m2) << '\n';
    out << "sensing_width_hz = " << g12(cfg.sensing_width_hz) << '\n';
    out << "capacitances_pf = " << g12(cfg.capacitances_pf) << '\n';
    out << "position_amplitude = " << g12(cfg.position_amplitude) << '\n';
    out << "position_noise_sigma_m2 = " << g12(cfg.position_noise_sigma_m2) << '\n';
    out << "position_ripple_amp_m2 = " << g12(cfg.position_ripple_amp_m2) << '\n';
    out << "ripple_period_hz = " << g12(cfg.ripple_period_hz) << '\n';
    out << "case_detune = " << g12(cfg.case_detune) << '\n';
    out << "case_detune_jitter = " << g12(cfg.case_detune_jitter) << '\n';
    out << "case_depth_damping = " << g12(cfg.case_depth_damping) << '\n';
    out << "ciii_p4_detune_mult = " << g12(cfg.ciii_p4_detune_mult) << '\n';
    out << "ciii_p4_noise_mult = " << g12(cfg.ciii_p4_noise_mult) << '\n';
    out << "bit_margin_m2 = " << g12(cfg.bit_margin_m2) << '\n';
    out << "readings_per_group = " << cfg.readings_per_group << '\n';
    out << "master_seed = " << cfg.master_seed << '\n';
    out << "grid_start_hz = " << g12(cfg.grid.f_start_hz) << '\n';
    out << "grid_stop_hz = " << g12(cfg.grid.f_stop_hz) << '\n';
    out << "grid_points = " << cfg.grid.n_points << '\n';
    out << "plate_side_m = " << g12(cfg.plate.side_m) << '\n';
    if (!out) throw DataError("cannot write " + path);
}

} // namespace crfid
