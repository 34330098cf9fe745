#include "crfid/dataset_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "crfid/errors.hpp"

namespace crfid {

namespace {

void append_g9(std::string& s, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    s += buf;
}

double parse_double(std::string_view tok, const std::string& path, std::size_t line) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(path + ":" + std::to_string(line) + ": bad number '" + std::string(tok) +
                         "'");
    return v;
}

int parse_int(std::string_view tok, const std::string& path, std::size_t line) {
    int v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
        throw ParseError(path + ":" + std::to_string(line) + ": bad integer '" + std::string(tok) +
                         "'");
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

} // namespace

std::string dataset_csv_row(const LabeledSignature& row) {
    std::string s;
    s.reserve(16 * row.signature.rcs_m2.size() + 48);
    s += std::to_string(row.label.tag_id);
    s += ',';
    append_g9(s, row.label.capacitance_pf);
    s += ',';
    s += position_name(row.label.position);
    s += ',';
    s += case_name(row.label.deformation);
    s += ',';
    s += std::to_string(row.label.reading);
    for (double v : row.signature.rcs_m2) {
        s += ',';
        append_g9(s, v);
    }
    return s;
}

void write_dataset_csv(const std::string& path, const std::vector<LabeledSignature>& rows) {
    if (rows.empty()) throw DataError("dataset write: no rows");
    const std::size_t n = rows.front().signature.rcs_m2.size();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");

    std::string header = "tag_id,capacitance_pf,position,case,reading";
    for (std::size_t i = 0; i < n; ++i) {
        header += ",f";
        header += std::to_string(i);
    }
    header += '\n';
    out << header;

    for (const LabeledSignature& row : rows) {
        if (row.signature.rcs_m2.size() != n)
            throw DataError("dataset write: ragged rows");
        out << dataset_csv_row(row) << '\n';
    }
    if (!out) throw DataError("cannot write " + path);
}

std::vector<LabeledSignature> read_dataset_csv(const std::string& path, const CanonicalGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);

    const std::size_t n_cols = 5 + static_cast<std::size_t>(grid.n_points);
    const std::vector<double> freqs = grid.frequencies();

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_csv(line).size() != n_cols)
        throw ParseError(path + ": header has " + std::to_string(split_csv(line).size()) +
                         " columns, expected " + std::to_string(n_cols));

    std::vector<LabeledSignature> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string_view> tok = split_csv(line);
        if (tok.size() != n_cols)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(n_cols) + " columns, got " + std::to_string(tok.size()));
        LabeledSignature row;
        row.label.tag_id = parse_int(tok[0], path, line_no);
        row.label.capacitance_pf = parse_double(tok[1], path, line_no);
        row.label.position = parse_position(std::string(tok[2]));
        row.label.deformation = parse_case(std::string(tok[3]));
        row.label.reading = parse_int(tok[4], path, line_no);
        row.signature.frequencies_hz = freqs;
        row.signature.rcs_m2.resize(static_cast<std::size_t>(grid.n_points));
        for (int i = 0; i < grid.n_points; ++i)
            row.signature.rcs_m2[static_cast<std::size_t>(i)] =
                parse_double(tok[5 + static_cast<std::size_t>(i)], path, line_no);
        if (row.label.tag_id < 0 || row.label.tag_id >= kNumTagIds || row.label.reading < 0)
            throw ParseError(path + ":" + std::to_string(line_no) + ": label out of range");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");
    return rows;
}

} // namespace crfid
