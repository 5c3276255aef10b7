#include "oceancast/config.hpp"

#include <fstream>

namespace ocean {

nlohmann::json default_config() {
  nlohmann::json j;
  j["mesh"] = {{"finest_level", 3}, {"radius_factor", 0.6}};
  j["model"] = {{"embed_width", 192},
                {"processor_iterations", 16},
                {"hidden_layers", 1},
                {"activation", "silu"},
                {"share_processor_params", false},
                {"decode_coarse_first", true},
                {"use_coarse_mesh", true}};
  j["generator"] = {{"n_lat", 90},
                    {"n_lon", 180},
                    {"levels", 1},
                    {"seed", 2024},
                    {"eddy_count", 40},
                    {"eddy_radius_min_deg", 6.0},
                    {"eddy_radius_max_deg", 14.0},
                    {"eddy_amp", 0.18},
                    {"drift_min_deg_day", 0.25},
                    {"drift_max_deg_day", 0.7},
                    {"wind_amp", 6.0},
                    {"wind_period_days", 9.0},
                    {"coupling", 0.02},
                    {"mask_mode", "continents"},
                    {"fcst_tau_days", 3.0},
                    {"fcst_noise", 0.25},
                    {"year_length", 365}};
  j["training"] = {{"data_dir", ""},
                   {"out_dir", "."},
                   {"phase1", {{"lr", 1e-3}, {"steps", 600}}},
                   {"phase2", {{"lr", 1e-4}, {"steps", 150}}},
                   {"beta1", 0.9},
                   {"beta2", 0.95},
                   {"eps", 1e-8},
                   {"weight_decay", 0.0},
                   {"batch_size", 1},
                   {"seed", 0},
                   {"train_days", {1, 300}},
                   {"val_days", {300, 364}},
                   {"val_interval", 50},
                   {"val_cases", 8},
                   {"checkpoint_interval", 200},
                   {"channel_weights", nlohmann::json::array()}};
  j["rollout"] = {{"horizon", 10}};
  j["evaluation"] = {{"cos_lat_weighting", false}, {"window", "hann"}};
  return j;
}

namespace {

void merge_checked(nlohmann::json& base, const nlohmann::json& user, const std::string& path) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key_path = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key: " + key_path);
    if (base[it.key()].is_object() && it.value().is_object())
      merge_checked(base[it.key()], it.value(), key_path);
    else
      base[it.key()] = it.value();
  }
}

}  // namespace

nlohmann::json resolve_config(const nlohmann::json& user) {
  nlohmann::json resolved = default_config();
  if (!user.is_object()) throw ConfigError("config root must be a JSON object");
  merge_checked(resolved, user, "");
  return resolved;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json user;
  try {
    in >> user;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return resolve_config(user);
}

ModelConfig model_config_from(const nlohmann::json& j) {
  const auto& m = j.at("model");
  ModelConfig cfg;
  cfg.embed_width = m.at("embed_width").get<int>();
  cfg.processor_iterations = m.at("processor_iterations").get<int>();
  cfg.hidden_layers = m.at("hidden_layers").get<int>();
  cfg.activation = activation_from_name(m.at("activation").get<std::string>());
  cfg.share_processor_params = m.at("share_processor_params").get<bool>();
  cfg.decode_coarse_first = m.at("decode_coarse_first").get<bool>();
  cfg.use_coarse_mesh = m.at("use_coarse_mesh").get<bool>();
  if (cfg.embed_width < 1 || cfg.processor_iterations < 1)
    throw ConfigError("model: embed_width and processor_iterations must be >= 1");
  return cfg;
}

GeneratorConfig generator_config_from(const nlohmann::json& j) {
  return generator_config_from_json(j.at("generator").dump());
}

TrainConfig train_config_from(const nlohmann::json& j, int phase) {
  const auto& t = j.at("training");
  TrainConfig tc;
  tc.phase = phase;
  const auto& p = phase == 1 ? t.at("phase1") : t.at("phase2");
  tc.lr = p.at("lr").get<double>();
  tc.steps = p.at("steps").get<int>();
  tc.beta1 = t.at("beta1").get<double>();
  tc.beta2 = t.at("beta2").get<double>();
  tc.eps = t.at("eps").get<double>();
  tc.weight_decay = t.at("weight_decay").get<double>();
  tc.batch_size = t.at("batch_size").get<int>();
  tc.seed = t.at("seed").get<std::uint64_t>();
  tc.train_day_begin = t.at("train_days").at(0).get<std::int64_t>();
  tc.train_day_end = t.at("train_days").at(1).get<std::int64_t>();
  tc.val_day_begin = t.at("val_days").at(0).get<std::int64_t>();
  tc.val_day_end = t.at("val_days").at(1).get<std::int64_t>();
  tc.val_interval = t.at("val_interval").get<int>();
  tc.val_cases = t.at("val_cases").get<int>();
  tc.checkpoint_interval = t.at("checkpoint_interval").get<int>();
  for (const auto& w : t.at("channel_weights")) tc.channel_weights.push_back(w.get<double>());
  tc.data_dir = t.at("data_dir").get<std::string>();
  tc.out_dir = t.at("out_dir").get<std::string>();
  return tc;
}

MeshSettings mesh_settings_from(const nlohmann::json& j) {
  MeshSettings s;
  s.finest_level = j.at("mesh").at("finest_level").get<int>();
  s.radius_factor = j.at("mesh").at("radius_factor").get<double>();
  return s;
}

}  // namespace ocean
