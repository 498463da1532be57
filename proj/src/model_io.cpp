#include "curbside/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include "curbside/json_util.hpp"
#include "curbside/rng.hpp"

namespace curbside {

std::uint64_t config_fingerprint(const ModelBundle& bundle) {
  // Serialize the behaviour-determining fields into one string and hash it;
  // the exact format only needs to be stable, not pretty.
  const FeatureConfig& fc = bundle.pipeline.config;
  std::string text;
  text += "input_dim=" + std::to_string(bundle.model.input_dim);
  text += ";hidden_dim=" + std::to_string(bundle.model.hidden_dim);
  text += ";n_layers=" + std::to_string(bundle.model.n_layers);
  text += ";dropout_p=" + std::to_string(bundle.model.dropout_p);
  text += ";n_sub=" + std::to_string(fc.n_sub);
  text += ";m_pdp=" + std::to_string(fc.m_pdp);
  text += ";use_mp=" + std::to_string(fc.use_mp ? 1 : 0);
  text += ";ref_antenna=" + std::to_string(fc.ref_antenna);
  text += ";antenna_pair=" + std::to_string(fc.antenna_pair.first) + "," +
          std::to_string(fc.antenna_pair.second);
  text += ";sequence_len=" + std::to_string(bundle.pipeline.sequence_len);
  text += ";window_s=" + std::to_string(bundle.window_s);
  text += ";stride_s=" + std::to_string(bundle.stride_s);
  text += ";split_seed=" + std::to_string(bundle.split_seed);
  text += ";profile=" + bundle.profile;
  return derive_seed(0, text);
}

namespace {

nlohmann::json layer_to_json(const ml::LstmLayer& layer) {
  return nlohmann::json{{"w_x", matrix_to_json(layer.w_x)},
                        {"w_h", matrix_to_json(layer.w_h)},
                        {"b_x", vector_to_json(layer.b_x)},
                        {"b_h", vector_to_json(layer.b_h)}};
}

ml::LstmLayer layer_from_json(const nlohmann::json& j) {
  ml::LstmLayer layer;
  layer.w_x = matrix_from_json(j.at("w_x"));
  layer.w_h = matrix_from_json(j.at("w_h"));
  layer.b_x = vector_from_json(j.at("b_x"));
  layer.b_h = vector_from_json(j.at("b_h"));
  return layer;
}

}  // namespace

nlohmann::json model_bundle_to_json(const ModelBundle& bundle) {
  nlohmann::json layers = nlohmann::json::array();
  for (const ml::LstmLayer& layer : bundle.model.layers) {
    layers.push_back(layer_to_json(layer));
  }
  nlohmann::json j;
  j["schema_version"] = 1;
  j["fingerprint"] = config_fingerprint(bundle);
  j["model"] = {{"input_dim", bundle.model.input_dim},
                {"hidden_dim", bundle.model.hidden_dim},
                {"n_layers", bundle.model.n_layers},
                {"dropout_p", bundle.model.dropout_p},
                // rows of w_x / w_h stack gate blocks in the order
                // [input, forget, cell, output], hidden_dim rows each
                {"gate_order", "ifgo"},
                {"layers", std::move(layers)},
                {"head_w", matrix_to_json(bundle.model.head_w)},
                {"head_b", vector_to_json(bundle.model.head_b)}};
  j["pipeline"] = bundle.pipeline.to_json();
  j["window_s"] = bundle.window_s;
  j["stride_s"] = bundle.stride_s;
  j["split_seed"] = bundle.split_seed;
  j["profile"] = bundle.profile;
  return j;
}

ModelBundle model_bundle_from_json(const nlohmann::json& j) {
  if (j.value("schema_version", 0) != 1) {
    throw std::invalid_argument("model bundle: unsupported schema version");
  }
  ModelBundle bundle;
  const nlohmann::json& m = j.at("model");
  if (m.value("gate_order", "") != std::string("ifgo")) {
    throw std::invalid_argument("model bundle: unknown gate order");
  }
  bundle.model.input_dim = m.at("input_dim").get<int>();
  bundle.model.hidden_dim = m.at("hidden_dim").get<int>();
  bundle.model.n_layers = m.at("n_layers").get<int>();
  bundle.model.dropout_p = m.at("dropout_p").get<double>();
  for (const nlohmann::json& lj : m.at("layers")) {
    bundle.model.layers.push_back(layer_from_json(lj));
  }
  bundle.model.head_w = matrix_from_json(m.at("head_w"));
  bundle.model.head_b = vector_from_json(m.at("head_b"));
  bundle.pipeline = FeaturePipeline::from_json(j.at("pipeline"));
  bundle.window_s = j.at("window_s").get<double>();
  bundle.stride_s = j.at("stride_s").get<double>();
  bundle.split_seed = j.at("split_seed").get<std::uint64_t>();
  bundle.profile = j.at("profile").get<std::string>();

  if (static_cast<int>(bundle.model.layers.size()) != bundle.model.n_layers) {
    throw std::invalid_argument("model bundle: layer count mismatch");
  }
  if (!bundle.model.all_finite()) {
    throw std::invalid_argument("model bundle: non-finite parameters");
  }
  const std::uint64_t stored = j.at("fingerprint").get<std::uint64_t>();
  if (stored != config_fingerprint(bundle)) {
    throw std::invalid_argument("model bundle: fingerprint mismatch");
  }
  return bundle;
}

void save_model_bundle(const std::string& path, const ModelBundle& bundle) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open model file for writing: " + path);
  }
  out << model_bundle_to_json(bundle).dump(2) << '\n';
}

ModelBundle load_model_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  nlohmann::json j;
  in >> j;
  return model_bundle_from_json(j);
}

}  // namespace curbside
