#pragma once

#include <string>

#include "crfid/siggen.hpp"

namespace crfid {

// Generator knobs as a `key = value` file: one assignment per line, `#`
// comments, arrays as comma-separated values with the exact element count.
// Unknown keys and malformed values raise ParseError; the result is
// validate()d before it is returned. Keys are the GeneratorConfig field
// names (e.g. baseline_m2, id_center_hz, case_detune, grid_points).
GeneratorConfig load_generator_config(const std::string& path);

// Inverse of load_generator_config: every key, defaults included, one per
// line, values with %.12g. load(save(cfg)) reproduces cfg exactly.
void save_generator_config(const std::string& path, const GeneratorConfig& cfg);

} // namespace crfid
