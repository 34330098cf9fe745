#include "crfid/touchstone.hpp"

#include "crfid/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace crfid {

namespace {

constexpr double kPi = 3.14159265358979323846;

enum class NumFormat { RI, MA, DB };

struct OptionLine {
    double freq_to_hz = 1e9;
    NumFormat format = NumFormat::MA;
    double resistance = 50.0; // parsed, unused downstream (Eq-style ratios)
};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

double parse_number(const std::string& tok, int line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError("s2p line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    }
    return v;
}

OptionLine parse_option_line(const std::string& line, int line_no) {
    OptionLine opt;
    auto toks = split_ws(line);
    // toks[0] == "#"
    bool want_resistance = false;
    bool unit_seen = false, param_seen = false, format_seen = false;
    for (std::size_t i = 1; i < toks.size(); ++i) {
        std::string t = upper(toks[i]);
        if (want_resistance) {
            opt.resistance = parse_number(toks[i], line_no);
            want_resistance = false;
        } else if (t == "HZ" || t == "KHZ" || t == "MHZ" || t == "GHZ") {
            if (unit_seen) throw ParseError("s2p line " + std::to_string(line_no) + ": duplicate frequency unit");
            unit_seen = true;
            opt.freq_to_hz = t == "HZ" ? 1.0 : t == "KHZ" ? 1e3 : t == "MHZ" ? 1e6 : 1e9;
        } else if (t == "S" || t == "Y" || t == "Z" || t == "G" || t == "H") {
            if (param_seen) throw ParseError("s2p line " + std::to_string(line_no) + ": duplicate parameter token");
            param_seen = true;
            if (t != "S") {
                throw ParseError("s2p line " + std::to_string(line_no) + ": unsupported parameter '" + t +
                                 "' (only S-parameters)");
            }
        } else if (t == "RI" || t == "MA" || t == "DB") {
            if (format_seen) throw ParseError("s2p line " + std::to_string(line_no) + ": duplicate format token");
            format_seen = true;
            opt.format = t == "RI" ? NumFormat::RI : t == "MA" ? NumFormat::MA : NumFormat::DB;
        } else if (t == "R") {
            want_resistance = true;
        } else {
            throw ParseError("s2p line " + std::to_string(line_no) + ": unknown option token '" + toks[i] + "'");
        }
    }
    if (want_resistance) {
        throw ParseError("s2p line " + std::to_string(line_no) + ": R token without resistance value");
    }
    return opt;
}

std::complex<double> to_rectangular(double a, double b, NumFormat fmt) {
    switch (fmt) {
    case NumFormat::RI:
        return {a, b};
    case NumFormat::MA:
        return std::polar(a, b * kPi / 180.0);
    case NumFormat::DB:
        return std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
    }
    return {};
}

} // namespace

std::vector<double> CanonicalGrid::frequencies() const {
    std::vector<double> f(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) f[static_cast<std::size_t>(i)] = frequency(i);
    return f;
}

void validate_sweep(const FrequencySweep& sweep) {
    if (sweep.frequencies_hz.size() != sweep.s11.size()) {
        throw DataError("sweep: frequency/S11 length mismatch (" + std::to_string(sweep.frequencies_hz.size()) +
                        " vs " + std::to_string(sweep.s11.size()) + ")");
    }
    for (std::size_t i = 1; i < sweep.frequencies_hz.size(); ++i) {
        if (!(sweep.frequencies_hz[i] > sweep.frequencies_hz[i - 1])) {
            throw DataError("sweep: frequencies not strictly increasing at index " + std::to_string(i));
        }
    }
}

bool on_canonical_grid(const FrequencySweep& sweep, const CanonicalGrid& grid, double rel_tol) {
    if (sweep.size() != static_cast<std::size_t>(grid.n_points)) return false;
    for (int i = 0; i < grid.n_points; ++i) {
        double want = grid.frequency(i);
        if (std::abs(sweep.frequencies_hz[static_cast<std::size_t>(i)] - want) > rel_tol * want) return false;
    }
    return true;
}

FrequencySweep parse_s2p(std::istream& in, const std::string& source_id) {
    FrequencySweep sweep;
    sweep.source_id = source_id;

    bool have_option = false;
    NumFormat fmt = NumFormat::MA;
    double freq_scale = 1e9;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();

        // inline comments, common in instrument exports
        if (auto bang = raw.find('!'); bang != std::string::npos) raw.erase(bang);

        std::size_t first = raw.find_first_not_of(" \t");
        if (first == std::string::npos) continue;

        if (raw[first] == '[') {
            throw ParseError("s2p line " + std::to_string(line_no) +
                             ": Touchstone v2 keyword found; only v1 is supported");
        }
        if (raw[first] == '#') {
            if (have_option) {
                throw ParseError("s2p line " + std::to_string(line_no) + ": duplicate option line");
            }
            OptionLine opt = parse_option_line(raw.substr(first), line_no);
            fmt = opt.format;
            freq_scale = opt.freq_to_hz;
            have_option = true;
            continue;
        }
        if (!have_option) {
            throw ParseError("s2p line " + std::to_string(line_no) + ": data before option line");
        }

        auto toks = split_ws(raw.substr(first));
        if (toks.size() != 9) {
            throw ParseError("s2p line " + std::to_string(line_no) + ": expected 9 columns, got " +
                             std::to_string(toks.size()));
        }
        double freq = parse_number(toks[0], line_no) * freq_scale;
        double a = parse_number(toks[1], line_no);
        double b = parse_number(toks[2], line_no);
        for (std::size_t i = 3; i < 9; ++i) parse_number(toks[i], line_no); // S21/S12/S22, discarded

        if (!sweep.frequencies_hz.empty() && !(freq > sweep.frequencies_hz.back())) {
            throw ParseError("s2p line " + std::to_string(line_no) + ": non-monotonic frequency");
        }
        sweep.frequencies_hz.push_back(freq);
        sweep.s11.push_back(to_rectangular(a, b, fmt));
    }

    if (!have_option) {
        throw ParseError("s2p: missing option line");
    }
    if (sweep.frequencies_hz.empty()) {
        throw ParseError("s2p: no data lines");
    }
    return sweep;
}

FrequencySweep parse_s2p_text(const std::string& text, const std::string& source_id) {
    std::istringstream iss(text);
    return parse_s2p(iss, source_id);
}

FrequencySweep read_s2p_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open s2p file: " + path);
    return parse_s2p(in, path);
}

std::string write_s2p(const FrequencySweep& sweep) {
    validate_sweep(sweep);
    if (sweep.size() == 0) {
        throw DataError("write_s2p: empty sweep");
    }
    std::string out;
    out.reserve(sweep.size() * 64 + 64);
    out += "! two-port reflection sweep";
    if (!sweep.source_id.empty()) {
        out += " (";
        out += sweep.source_id;
        out += ")";
    }
    out += "\n# GHZ S RI R 50\n";
    char buf[160];
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.12g %.12g %.12g 0 0 0 0 0 0\n", sweep.frequencies_hz[i] / 1e9,
                      sweep.s11[i].real(), sweep.s11[i].imag());
        out += buf;
    }
    return out;
}

void write_s2p_file(const FrequencySweep& sweep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write s2p file: " + path);
    out << write_s2p(sweep);
}

FrequencySweep resample_to_grid(const FrequencySweep& sweep, const CanonicalGrid& grid) {
    validate_sweep(sweep);
    if (sweep.size() < 2) {
        throw DataError("resample_to_grid: need at least 2 points");
    }
    const double lo = sweep.frequencies_hz.front();
    const double hi = sweep.frequencies_hz.back();
    const double tol = grid.spacing_hz() * 1e-9;
    if (lo > grid.f_start_hz + tol || hi < grid.f_stop_hz - tol) {
        throw DataError("resample_to_grid: sweep [" + std::to_string(lo) + ", " + std::to_string(hi) +
                        "] Hz does not cover the grid span");
    }

    FrequencySweep out;
    out.source_id = sweep.source_id;
    out.frequencies_hz.reserve(static_cast<std::size_t>(grid.n_points));
    out.s11.reserve(static_cast<std::size_t>(grid.n_points));

    std::size_t seg = 0;
    for (int i = 0; i < grid.n_points; ++i) {
        double f = std::min(grid.frequency(i), hi);
        while (seg + 2 < sweep.size() && sweep.frequencies_hz[seg + 1] < f) ++seg;
        double f0 = sweep.frequencies_hz[seg];
        double f1 = sweep.frequencies_hz[seg + 1];
        std::complex<double> v;
        if (f == f0) {
            v = sweep.s11[seg];
        } else if (f == f1) {
            v = sweep.s11[seg + 1];
        } else {
            double t = std::clamp((f - f0) / (f1 - f0), 0.0, 1.0);
            v = sweep.s11[seg] + t * (sweep.s11[seg + 1] - sweep.s11[seg]);
        }
        out.frequencies_hz.push_back(grid.frequency(i));
        out.s11.push_back(v);
    }
    return out;
}

} // namespace crfid
