#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "oceancast/model.hpp"
#include "oceancast/synthetic.hpp"
#include "oceancast/training.hpp"

namespace ocean {

// Unified experiment configuration. Every default is spelled out in
// default_config(); resolve_config() deep-merges user JSON over the defaults
// and rejects unknown keys, and the resolved document is echoed into every
// output manifest.
nlohmann::json default_config();
nlohmann::json resolve_config(const nlohmann::json& user);
nlohmann::json load_config_file(const std::string& path);  // resolved

ModelConfig model_config_from(const nlohmann::json& resolved);
GeneratorConfig generator_config_from(const nlohmann::json& resolved);
TrainConfig train_config_from(const nlohmann::json& resolved, int phase);

struct MeshSettings {
  int finest_level = 3;
  double radius_factor = 0.6;
};
MeshSettings mesh_settings_from(const nlohmann::json& resolved);

}  // namespace ocean
