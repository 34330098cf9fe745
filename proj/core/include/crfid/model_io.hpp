#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crfid/cnn.hpp"
#include "crfid/dsp.hpp"
#include "crfid/features.hpp"
#include "crfid/metrics.hpp"
#include "crfid/selection.hpp"
#include "crfid/touchstone.hpp"

namespace crfid {

inline constexpr std::uint32_t kModelFormatVersion = 1;

// Everything needed to score a raw sweep: grid, filter, feature recipe,
// scaler, selected columns, and the fitted model itself.
struct ModelFile {
    Task task = Task::Id;
    bool is_cnn = false;
    ModelKind kind = ModelKind::DT; // meaningful when !is_cnn
    CanonicalGrid grid;
    FilterSpec filter;
    std::uint32_t catalog_version = kCatalogVersion;
    bool raw_signature_input = false; // true: model consumes the 700 filtered samples
    std::vector<std::string> feature_names;
    std::vector<int> selected; // column indices into the full feature extraction
    ScalerStats scaler;        // fitted over the selected columns
    ClassicalModel classical;
    CnnModel cnn;
};

// Binary, little-endian, CRC32-trailed. Truncation, a bad checksum, a wrong
// magic, or an unknown version all raise ParseError.
void save_model(const std::string& path, const ModelFile& model);
ModelFile load_model(const std::string& path);

std::uint32_t crc32(const unsigned char* data, std::size_t len);

} // namespace crfid
