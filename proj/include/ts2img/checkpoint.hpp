#pragma once

#include <string>

#include "ts2img/pipeline.hpp"

namespace ts2img {

// Versioned binary container: magic + version, JSON header (layer
// specs, pipeline config, fitted encoder metadata, threshold), then all
// numeric payloads as little-endian 64-bit reals.
void save_checkpoint(const PipelineModel& model, const std::string& path);
PipelineModel load_checkpoint(const std::string& path);

}  // namespace ts2img
