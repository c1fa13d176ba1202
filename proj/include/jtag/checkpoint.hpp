#pragma once

#include <memory>
#include <string>

#include "jtag/model.hpp"

namespace jtag {

// Binary checkpoint: magic "JTAG", format version u16, variant id u8, a
// length-prefixed config+vocab text block, then per-tensor records
// (name length u16, UTF-8 name, rank u8, dims u32 each, little-endian f32
// data). The loader rejects mismatched magic or version.
inline constexpr uint16_t kCheckpointVersion = 1;

void save_checkpoint(const JointModel& model, const std::string& path);
std::unique_ptr<JointModel> load_checkpoint(const std::string& path);

// Exact text round-trip of the model configuration (checkpoint block body).
std::string serialize_model_config(const ModelConfig& cfg);
ModelConfig parse_model_config(const std::string& text);

}  // namespace jtag
