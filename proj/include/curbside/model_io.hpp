#pragma once
// Versioned JSON serialization of a trained model together with the fitted
// feature pipeline and the run configuration it depends on. The bundle is
// self-contained: loading it is enough to evaluate new traces. No
// timestamps are stored, so identical runs write identical files.

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "curbside/features.hpp"
#include "curbside/lstm.hpp"

namespace curbside {

struct ModelBundle {
  ml::LstmModel model;
  FeaturePipeline pipeline;
  double window_s = 1.0;
  double stride_s = 0.5;
  std::uint64_t split_seed = 1;
  std::string profile = "desk";
};

// FNV-1a hash over every field that changes what the model computes; the
// eval command refuses bundles whose fingerprint disagrees with the
// requested configuration.
std::uint64_t config_fingerprint(const ModelBundle& bundle);

// Parameter matrices are stored row-major; each layer's gate rows stack as
// [input, forget, cell, output] blocks of hidden_dim rows.
nlohmann::json model_bundle_to_json(const ModelBundle& bundle);
ModelBundle model_bundle_from_json(const nlohmann::json& j);

void save_model_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model_bundle(const std::string& path);

}  // namespace curbside
