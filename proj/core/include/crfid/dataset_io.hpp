#pragma once

#include <string>
#include <vector>

#include "crfid/siggen.hpp"
#include "crfid/touchstone.hpp"

namespace crfid {

// CSV layout: tag_id,capacitance_pf,position,case,reading,f0..f{n-1}.
// Values print with %.9g so a write/read round trip is bit-exact for the
// generator's value range; rows keep their order. The frequency grid is not
// stored in the CSV — the run manifest carries it.
void write_dataset_csv(const std::string& path, const std::vector<LabeledSignature>& rows);
std::vector<LabeledSignature> read_dataset_csv(const std::string& path, const CanonicalGrid& grid);

// Serialize one CSV row (no trailing newline); exposed for the writers' tests.
std::string dataset_csv_row(const LabeledSignature& row);

} // namespace crfid
