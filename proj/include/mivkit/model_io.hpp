#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mivkit/device_model.hpp"

namespace mivkit {

struct ModelCard {
    ModelParams params;
    ModelConstants consts;
};

// Fit-parameter table: canonical upper-case key and member pointer, in the
// canonical serialization order. Shared by the card reader/writer, the
// bounds file and the extraction stages.
const std::vector<std::pair<std::string, double ModelParams::*>>& param_fields();

// Member pointer for an upper-cased key; throws std::invalid_argument for
// unknown names.
double ModelParams::* param_field(const std::string& upper_name);

// Flat `NAME value` card files, one pair per line, names case-insensitive,
// '#' comments. Unknown keys are rejected with file:line diagnostics.
ModelCard read_model_card(const std::string& path);
void write_model_card(const ModelCard& card, const std::string& path);
std::string model_card_text(const ModelCard& card);
ModelCard parse_model_card_text(const std::string& text, const std::string& diag_name);

}  // namespace mivkit
