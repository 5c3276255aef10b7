// oceancast: graph-based global ocean forecasting at desk scale.
//
// Subcommands cover the full pipeline: synthetic data generation, mesh and
// graph construction, two-phase training, autoregressive forecasting with
// selectable atmospheric forcing, and RMSE / kinetic-energy-spectrum
// evaluation. Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical
// failure.

#include <CLI11.hpp>
#include <cinttypes>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "oceancast/binio.hpp"
#include "oceancast/config.hpp"
#include "oceancast/dataset.hpp"
#include "oceancast/evaluation.hpp"
#include "oceancast/graph.hpp"
#include "oceancast/mesh.hpp"
#include "oceancast/model.hpp"
#include "oceancast/rollout.hpp"
#include "oceancast/synthetic.hpp"
#include "oceancast/threading.hpp"
#include "oceancast/training.hpp"

namespace {

using nlohmann::json;

json manifest_base(const std::string& command, const json& resolved_config,
                   const std::vector<std::string>& input_paths) {
  json m;
  m["command"] = command;
  m["tool_version"] = ocean::kVersion;
  m["config"] = resolved_config;
  m["inputs"] = json::object();
  for (const auto& p : input_paths) {
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016" PRIx64, ocean::binio::file_digest(p));
    m["inputs"][p] = digest;
  }
  return m;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ocean::DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

struct GraphBundle {
  ocean::TriMesh coarse, fine;
  ocean::OceanGraph graph;
};

GraphBundle build_graph_for(const ocean::OceanGrid& grid, const ocean::MeshSettings& mesh) {
  GraphBundle b;
  auto [coarse, fine] = ocean::build_hierarchy(mesh.finest_level);
  b.coarse = std::move(coarse);
  b.fine = std::move(fine);
  b.graph = ocean::build_ocean_graph(grid, b.coarse, b.fine, mesh.radius_factor);
  return b;
}

int cmd_build_mesh(int levels, const std::string& out) {
  auto [coarse, fine] = ocean::build_hierarchy(levels);
  ocean::save_mesh(coarse, out + "_coarse.omsh");
  ocean::save_mesh(fine, out + "_fine.omsh");
  json cfg = {{"levels", levels}};
  json m = manifest_base("build-mesh", cfg, {});
  m["outputs"] = {out + "_coarse.omsh", out + "_fine.omsh"};
  write_json(m, out + "_manifest.json");
  std::cout << "coarse nodes=" << coarse.nodes.size() << " fine nodes=" << fine.nodes.size()
            << "\n";
  return 0;
}

ocean::OceanGrid grid_from_statics_file(const std::string& path) {
  auto loaded = ocean::load_fieldset(path);
  ocean::OceanGrid grid = ocean::make_uniform_grid(loaded.fields.n_lat, loaded.fields.n_lon);
  grid.mask = loaded.mask;
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) grid.depth[grid.at(i, j)] = loaded.fields.at(2, i, j);
  grid.validate();
  return grid;
}

int cmd_build_graph(const std::string& grid_path, const std::string& mesh_prefix,
                    double radius_factor, const std::string& out) {
  const ocean::OceanGrid grid = grid_from_statics_file(grid_path);
  const ocean::TriMesh coarse = ocean::load_mesh(mesh_prefix + "_coarse.omsh");
  const ocean::TriMesh fine = ocean::load_mesh(mesh_prefix + "_fine.omsh");
  const ocean::OceanGraph graph = ocean::build_ocean_graph(grid, coarse, fine, radius_factor);
  ocean::save_graph(graph, out);

  json cfg = {{"radius_factor", radius_factor},
              {"grid", grid_path},
              {"mesh_prefix", mesh_prefix}};
  json m = manifest_base("build-graph", cfg,
                         {grid_path, mesh_prefix + "_coarse.omsh", mesh_prefix + "_fine.omsh"});
  m["outputs"] = {out};
  write_json(m, out + ".manifest.json");

  std::cout << "grid nodes=" << graph.n_grid_nodes()
            << " mesh nodes coarse=" << graph.mesh_pos_coarse.size()
            << " fine=" << graph.mesh_pos_fine.size() << "\n"
            << "edges g2m=" << graph.g2m_coarse.size() + graph.g2m_fine.size()
            << " m2m=" << graph.m2m_coarse.size() + graph.m2m_fine.size()
            << " m2g=" << graph.m2g_coarse.size() + graph.m2g_fine.size() << "\n";
  return 0;
}

int cmd_gen_data(const std::string& config_path, int days, const std::string& out_dir) {
  const json resolved = config_path.empty() ? ocean::default_config()
                                            : ocean::load_config_file(config_path);
  const ocean::GeneratorConfig gc = ocean::generator_config_from(resolved);
  ocean::generate_dataset(gc, days, out_dir);
  json m = manifest_base("gen-data", resolved,
                         config_path.empty() ? std::vector<std::string>{}
                                             : std::vector<std::string>{config_path});
  m["days"] = days;
  m["out_dir"] = out_dir;
  write_json(m, out_dir + "/gen_manifest.json");
  std::cout << "generated days=" << days << " dir=" << out_dir << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, int phase, const std::string& resume) {
  const json resolved = ocean::load_config_file(config_path);
  const ocean::ModelConfig mc = ocean::model_config_from(resolved);
  const ocean::MeshSettings mesh = ocean::mesh_settings_from(resolved);
  ocean::TrainConfig tc = ocean::train_config_from(resolved, phase);
  if (tc.data_dir.empty()) throw ocean::ConfigError("training.data_dir is required");
  std::filesystem::create_directories(tc.out_dir);

  const ocean::Dataset ds(tc.data_dir);
  const ocean::NormStats stats = ds.load_stats();
  const ocean::ModelDims dims = ocean::model_dims(*ds.schema());
  const GraphBundle gb = build_graph_for(ds.grid(), mesh);

  ocean::ParamStore<float> params(tc.seed);
  ocean::create_model_params(params, mc, dims);
  ocean::AdamWState<float> resume_opt;
  bool has_resume_opt = false;
  if (!resume.empty()) {
    auto ck = ocean::load_checkpoint<float>(resume);
    if (ck.params.count() != params.count())
      throw ocean::ConfigError("resume checkpoint does not match the configured model");
    for (int i = 0; i < params.count(); ++i) params.at(i) = ck.params.at(i);
    const json ck_cfg = json::parse(ck.config_json.empty() ? "{}" : ck.config_json);
    if (phase == 1 && ck.has_opt && ck_cfg.value("phase", 0) == 1) {
      resume_opt = std::move(ck.opt);
      has_resume_opt = true;
    }
  } else if (phase == 2) {
    throw ocean::ConfigError("phase 2 requires --resume with a phase-1 checkpoint");
  }

  json ck_cfg = resolved;
  ck_cfg["phase"] = phase;
  const auto result = ocean::train_phase(ds, ds.grid(), gb.graph, stats, mc, tc, params,
                                         ck_cfg.dump(), has_resume_opt ? &resume_opt : nullptr);

  json m = manifest_base("train", resolved, {config_path});
  m["phase"] = phase;
  m["checkpoint"] = result.checkpoint_path;
  m["final_val_loss"] = result.final_val_loss;
  write_json(m, tc.out_dir + "/train_phase" + std::to_string(phase) + "_manifest.json");
  std::cout << "phase " << phase << " done: steps=" << tc.steps
            << " final_val_loss=" << result.final_val_loss << " ckpt=" << result.checkpoint_path
            << "\n";
  return 0;
}

int cmd_forecast(const std::string& ckpt_path, const std::string& init_dir, std::int64_t init_day,
                 const std::string& forcing_name, int horizon, const std::string& out_dir) {
  auto ck = ocean::load_checkpoint<float>(ckpt_path);
  const json ck_cfg = json::parse(ck.config_json);
  const ocean::ModelConfig mc = ocean::model_config_from(ck_cfg);
  const ocean::MeshSettings mesh = ocean::mesh_settings_from(ck_cfg);

  const ocean::Dataset ds(init_dir);
  const ocean::NormStats stats = ds.load_stats();
  if (init_day < 0) init_day = ds.first_day() + ds.n_days() - 1 - horizon;
  const GraphBundle gb = build_graph_for(ds.grid(), mesh);
  const auto gt = ocean::make_graph_tensors<float>(gb.graph);

  const ocean::ForcingKind kind = ocean::forcing_kind_from_name(forcing_name);
  std::unique_ptr<ocean::ForcingSource> source;
  const std::int64_t clim_begin = ds.first_day();
  const std::int64_t clim_end =
      ds.first_day() + std::min<std::int64_t>(ds.n_days(), ds.year_length());
  switch (kind) {
    case ocean::ForcingKind::Reanalysis: source = ocean::make_reanalysis_source(ds); break;
    case ocean::ForcingKind::Climatology:
      source = ocean::make_climatology_source(ds, clim_begin, clim_end);
      break;
    case ocean::ForcingKind::Forecast:
      source = ocean::make_forecast_source(ds, ocean::generator_config_from_manifest(ds),
                                           clim_begin, clim_end);
      break;
  }

  const ocean::FieldSet x_prev = ds.state(init_day - 1);
  const ocean::FieldSet x_cur = ds.state(init_day);
  const auto run = ocean::run_forecast(x_prev, x_cur, ds.statics(), *source, horizon, mc,
                                       ck.params, gb.graph, gt, stats, ds.grid());

  std::filesystem::create_directories(out_dir);
  json leads = json::array();
  for (int k = 0; k < horizon; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "pred_%03d.ogf1", k + 1);
    const std::string path = out_dir + "/" + name;
    ocean::save_fieldset(run.predictions[static_cast<std::size_t>(k)], ds.grid(), path);
    leads.push_back({{"lead", k + 1},
                     {"day", run.predictions[static_cast<std::size_t>(k)].day},
                     {"path", path}});
  }

  json m = manifest_base("forecast", ck_cfg, {ckpt_path});
  m["init_dir"] = init_dir;
  m["init_day"] = init_day;
  m["forcing"] = forcing_name;
  m["horizon"] = horizon;
  m["leads"] = leads;
  write_json(m, out_dir + "/run_manifest.json");
  std::cout << "forecast init_day=" << init_day << " horizon=" << horizon
            << " forcing=" << forcing_name << " out=" << out_dir << "\n";
  return 0;
}

struct RunInfo {
  std::int64_t init_day;
  std::vector<std::pair<int, std::string>> leads;  // (lead, path)
};

RunInfo read_run_manifest(const std::string& pred_dir) {
  std::ifstream in(pred_dir + "/run_manifest.json");
  if (!in) throw ocean::DataError("missing run_manifest.json in " + pred_dir);
  json j;
  in >> j;
  RunInfo info;
  info.init_day = j.at("init_day").get<std::int64_t>();
  for (const auto& l : j.at("leads"))
    info.leads.emplace_back(l.at("lead").get<int>(), l.at("path").get<std::string>());
  return info;
}

int cmd_eval_rmse(const std::string& pred_dir, const std::string& truth_dir,
                  const std::string& region_name, bool depth_profile, bool cos_lat,
                  const std::string& out_csv) {
  const ocean::Dataset truth(truth_dir);
  const RunInfo run = read_run_manifest(pred_dir);
  const ocean::Region* region = region_name.empty() ? nullptr : &ocean::find_region(region_name);

  std::ofstream out(out_csv);
  if (!out) throw ocean::DataError("cannot write " + out_csv);
  out << "case,lead,variable,depth,region,value\n";
  const auto& defs = truth.schema()->state;
  for (const auto& [lead, path] : run.leads) {
    auto pred = ocean::load_fieldset(path, truth.schema());
    const auto truth_f = truth.state(run.init_day + lead);
    std::vector<int> channels;
    for (int c = 0; c < static_cast<int>(defs.size()); ++c) {
      const bool surface = std::isnan(defs[static_cast<std::size_t>(c)].depth_m) ||
                           defs[static_cast<std::size_t>(c)].depth_m ==
                               ocean::standard_depth_levels().front();
      if (depth_profile || surface) channels.push_back(c);
    }
    const auto values = ocean::rmse(pred.fields, truth_f, truth.grid(), channels, region, cos_lat);
    for (std::size_t k = 0; k < channels.size(); ++k) {
      const auto& d = defs[static_cast<std::size_t>(channels[k])];
      out << run.init_day << "," << lead << "," << d.variable << ","
          << (std::isnan(d.depth_m) ? 0.0 : d.depth_m) << ","
          << (region ? region->name : "global") << "," << values[k] << "\n";
    }
  }
  std::cout << "wrote " << out_csv << "\n";
  return 0;
}

int cmd_eval_spectra(const std::string& pred_dir, const std::string& truth_dir,
                     const std::string& region_name, const std::string& window_name,
                     const std::string& out_csv) {
  const ocean::Dataset truth(truth_dir);
  const RunInfo run = read_run_manifest(pred_dir);
  const ocean::Region& region = ocean::find_region(region_name);
  const ocean::SpectrumWindow window =
      window_name == "none" ? ocean::SpectrumWindow::None : ocean::SpectrumWindow::Hann;

  // first (shallowest) current channels
  int u_ch = -1, v_ch = -1;
  const auto& defs = truth.schema()->state;
  for (int c = 0; c < static_cast<int>(defs.size()); ++c) {
    const auto& d = defs[static_cast<std::size_t>(c)];
    if (d.variable == "uo" && u_ch < 0) u_ch = c;
    if (d.variable == "vo" && v_ch < 0) v_ch = c;
  }
  if (u_ch < 0 || v_ch < 0) throw ocean::DataError("schema has no uo/vo channels");

  std::ofstream out(out_csv);
  if (!out) throw ocean::DataError("cannot write " + out_csv);
  out << "source,region,lead,wavenumber,amplitude\n";
  auto emit = [&](const char* source, int lead, const ocean::SpectrumResult& s) {
    for (std::size_t k = 0; k < s.wavenumber.size(); ++k)
      out << source << "," << s.region << "," << lead << "," << s.wavenumber[k] << ","
          << s.amplitude[k] << "\n";
  };
  for (const auto& [lead, path] : run.leads) {
    auto pred = ocean::load_fieldset(path, truth.schema());
    const auto truth_f = truth.state(run.init_day + lead);
    emit("pred", lead, ocean::ke_spectrum(pred.fields, u_ch, v_ch, truth.grid(), region, window));
    emit("truth", lead, ocean::ke_spectrum(truth_f, u_ch, v_ch, truth.grid(), region, window));
  }
  std::cout << "wrote " << out_csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oceancast: multi-scale graph ocean forecasting"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: hardware parallelism)");

  auto* mesh_cmd = app.add_subcommand("build-mesh", "construct the two-level sphere mesh");
  int levels = 3;
  std::string mesh_out = "mesh";
  mesh_cmd->add_option("--levels", levels, "finest refinement level (>= 1)")->required();
  mesh_cmd->add_option("--out", mesh_out, "output path prefix");

  auto* graph_cmd = app.add_subcommand("build-graph", "build the pruned ocean graph");
  std::string graph_grid, graph_mesh = "mesh", graph_out = "graph.ogrf";
  double radius_factor = 0.6;
  graph_cmd->add_option("--grid", graph_grid, "statics OGF1 file providing the mask")->required();
  graph_cmd->add_option("--mesh", graph_mesh, "mesh path prefix from build-mesh");
  graph_cmd->add_option("--radius-factor", radius_factor, "grid->mesh radius factor");
  graph_cmd->add_option("--out", graph_out, "output OGRF path");

  auto* gen_cmd = app.add_subcommand("gen-data", "generate the synthetic dataset");
  std::string gen_config, gen_out = "data";
  int gen_days = 30;
  gen_cmd->add_option("--config", gen_config, "experiment config JSON");
  gen_cmd->add_option("--days", gen_days, "number of days")->required();
  gen_cmd->add_option("--out", gen_out, "output directory");

  auto* train_cmd = app.add_subcommand("train", "train one curriculum phase");
  std::string train_config, train_resume;
  int train_phase_n = 1;
  train_cmd->add_option("--config", train_config, "experiment config JSON")->required();
  train_cmd->add_option("--phase", train_phase_n, "1 (one-step) or 2 (two-step fine-tuning)")
      ->required();
  train_cmd->add_option("--resume", train_resume, "checkpoint to start from");

  auto* fc_cmd = app.add_subcommand("forecast", "autoregressive rollout");
  std::string fc_ckpt, fc_init, fc_forcing = "reanalysis", fc_out = "run";
  std::int64_t fc_init_day = -1;
  int fc_horizon = 10;
  fc_cmd->add_option("--ckpt", fc_ckpt, "checkpoint path")->required();
  fc_cmd->add_option("--init", fc_init, "dataset directory with initial conditions")->required();
  fc_cmd->add_option("--init-day", fc_init_day, "initialization day (default: last usable)");
  fc_cmd->add_option("--forcing", fc_forcing, "forecast | reanalysis | climatology");
  fc_cmd->add_option("--horizon", fc_horizon, "days to predict");
  fc_cmd->add_option("--out", fc_out, "output directory");

  auto* rmse_cmd = app.add_subcommand("eval-rmse", "per-lead RMSE CSV");
  std::string rmse_pred, rmse_truth, rmse_region, rmse_out = "rmse.csv";
  bool rmse_depth = false, rmse_coslat = false;
  rmse_cmd->add_option("--pred", rmse_pred, "forecast run directory")->required();
  rmse_cmd->add_option("--truth", rmse_truth, "truth dataset directory")->required();
  rmse_cmd->add_option("--region", rmse_region, "named region (default: global)");
  rmse_cmd->add_flag("--depth-profile", rmse_depth, "emit every depth level");
  rmse_cmd->add_flag("--cos-lat", rmse_coslat, "cos(latitude) area weighting");
  rmse_cmd->add_option("--out", rmse_out, "output CSV");

  auto* spec_cmd = app.add_subcommand("eval-spectra", "surface KE spectra CSV");
  std::string spec_pred, spec_truth, spec_region, spec_window = "hann", spec_out = "spectra.csv";
  spec_cmd->add_option("--pred", spec_pred, "forecast run directory")->required();
  spec_cmd->add_option("--truth", spec_truth, "truth dataset directory")->required();
  spec_cmd->add_option("--region", spec_region, "spectral region name")->required();
  spec_cmd->add_option("--window", spec_window, "hann | none");
  spec_cmd->add_option("--out", spec_out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error code=config msg=\"" << e.what() << "\"\n";
    return 2;
  }

  if (threads > 0) ocean::set_worker_count(threads);

  try {
    if (*mesh_cmd) return cmd_build_mesh(levels, mesh_out);
    if (*graph_cmd) return cmd_build_graph(graph_grid, graph_mesh, radius_factor, graph_out);
    if (*gen_cmd) return cmd_gen_data(gen_config, gen_days, gen_out);
    if (*train_cmd) return cmd_train(train_config, train_phase_n, train_resume);
    if (*fc_cmd)
      return cmd_forecast(fc_ckpt, fc_init, fc_init_day, fc_forcing, fc_horizon, fc_out);
    if (*rmse_cmd)
      return cmd_eval_rmse(rmse_pred, rmse_truth, rmse_region, rmse_depth, rmse_coslat, rmse_out);
    if (*spec_cmd)
      return cmd_eval_spectra(spec_pred, spec_truth, spec_region, spec_window, spec_out);
  } catch (const ocean::ConfigError& e) {
    std::cerr << "error code=config msg=\"" << e.what() << "\"\n";
    return 2;
  } catch (const ocean::NumericError& e) {
    std::cerr << "error code=numeric msg=\"" << e.what() << "\"\n";
    return 4;
  } catch (const ocean::DataError& e) {
    std::cerr << "error code=data msg=\"" << e.what() << "\"\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error code=data msg=\"" << e.what() << "\"\n";
    return 3;
  }
  return 0;
}
