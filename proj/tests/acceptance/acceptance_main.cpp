// Acceptance suite: runs every top-level criterion end to end against the
// synthetic benchmark and prints one PASS/FAIL line per criterion. All
// tolerances are pinned here, in code. Returns the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oceancast/evaluation.hpp"
#include "oceancast/graph.hpp"
#include "oceancast/mesh.hpp"
#include "oceancast/model.hpp"
#include "oceancast/rollout.hpp"
#include "oceancast/synthetic.hpp"
#include "oceancast/threading.hpp"
#include "oceancast/training.hpp"

using namespace ocean;

namespace {

double now_seconds() {
  static const auto t0 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct World {
  std::string dir;
  GeneratorConfig gen;
  std::unique_ptr<Dataset> ds;
  OceanGrid grid;
  NormStats stats;
  ModelConfig model_cfg;
  TriMesh coarse, fine;
  OceanGraph graph;
  std::unique_ptr<GraphTensors<float>> gt;

  // benchmark dimensions: 2-degree grid, toy schema, mesh levels (2, 3)
  static constexpr int kTrainSteps = 700;
  static constexpr int kFineTuneSteps = 120;
  static constexpr int kCases = 10;
  static constexpr int kHorizon = 10;
  static constexpr std::int64_t kTrainBegin = 1, kTrainEnd = 300;
  static constexpr std::int64_t kValBegin = 300, kValEnd = 364;
  static constexpr std::int64_t kFirstCaseDay = 366;
  static constexpr int kCaseStride = 4;

  ParamStore<float> params{11};
  bool trained = false;
  double val1_after_phase1 = 0, val2_before = 0, val2_after = 0;

  void build() {
    dir = (std::filesystem::temp_directory_path() / "oceancast_acceptance").string();
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);

    gen.n_lat = 90;
    gen.n_lon = 180;
    gen.levels = 1;
    gen.coupling = 0.02;
    const int n_days = 420;
    generate_dataset(gen, n_days, dir + "/data");
    ds = std::make_unique<Dataset>(dir + "/data");
    grid = ds->grid();
    stats = ds->load_stats();

    model_cfg.embed_width = 32;
    model_cfg.processor_iterations = 4;
    auto [c, f] = build_hierarchy(3);
    coarse = std::move(c);
    fine = std::move(f);
    graph = build_ocean_graph(grid, coarse, fine, 0.6);
    gt = std::make_unique<GraphTensors<float>>(make_graph_tensors<float>(graph));
    create_model_params(params, model_cfg, model_dims(*ds->schema()));
  }

  TrainConfig train_cfg(int phase, int steps) const {
    TrainConfig tc;
    tc.phase = phase;
    tc.lr = phase == 1 ? 1e-3 : 1e-4;
    tc.steps = steps;
    tc.seed = 11;
    tc.train_day_begin = kTrainBegin;
    tc.train_day_end = kTrainEnd;
    tc.val_day_begin = kValBegin;
    tc.val_day_end = kValEnd;
    tc.val_interval = 200;
    tc.val_cases = 8;
    tc.checkpoint_interval = 350;
    tc.out_dir = dir + "/train_p" + std::to_string(phase);
    std::filesystem::create_directories(tc.out_dir);
    return tc;
  }

  ForecastRun forecast(std::int64_t init_day, const ForcingSource& src, int horizon,
                       ParamStore<float>& p) {
    return run_forecast(ds->state(init_day - 1), ds->state(init_day), ds->statics(), src, horizon,
                        model_cfg, p, graph, *gt, stats, grid);
  }
};

World world;

// ---- criterion 1 ----------------------------------------------------------

bool mesh_exactness(std::string& detail) {
  const double t0 = now_seconds();
  TriMesh m = base_icosahedron();
  for (int L = 0; L <= 4; ++L) {
    const std::size_t n = 10u * (1u << (2 * L)) + 2;
    const std::size_t tri = 20u * (1u << (2 * L));
    const std::size_t und = 30u * (1u << (2 * L));
    if (m.nodes.size() != n || m.triangles.size() != tri || m.edges.size() != 2 * und) {
      detail = "count mismatch at level " + std::to_string(L);
      return false;
    }
    double area = 0.0;
    for (const auto& t : m.triangles)
      area += spherical_triangle_area(m.nodes[t[0]], m.nodes[t[1]], m.nodes[t[2]]);
    if (std::abs(area - 4.0 * M_PI) / (4.0 * M_PI) >= 1e-8) {
      detail = "area defect at level " + std::to_string(L);
      return false;
    }
    if (L < 4) m = refine(m);
  }
  const double dt = now_seconds() - t0;
  detail = "levels 0-4 exact, " + std::to_string(dt) + " s";
  return dt < 5.0;
}

// ---- criterion 2 ----------------------------------------------------------

bool graph_oracles(std::string& detail) {
  const double t0 = now_seconds();
  OceanGrid grid = make_uniform_grid(10, 20);
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      const bool land = grid.lon[j] < 180.0;
      grid.mask[grid.at(i, j)] = !land;
      if (land) grid.depth[grid.at(i, j)] = 0.0;
    }
  auto [coarse, fine] = build_hierarchy(2);
  const double radius = 0.6 * max_edge_arc(fine);
  const OceanGraph g = build_ocean_graph(grid, coarse, fine, 0.6);

  const auto ocean = grid.ocean_cells();
  const auto pos = grid.cell_positions();

  auto pairs_of = [](const EdgeSet& e) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::size_t i = 0; i < e.size(); ++i) out.emplace_back(e.senders[i], e.receivers[i]);
    std::sort(out.begin(), out.end());
    return out;
  };

  for (const auto* mesh : {&coarse, &fine}) {
    // grid->mesh oracle
    std::vector<std::pair<std::uint32_t, std::uint32_t>> g2m;
    for (std::uint32_t gi = 0; gi < ocean.size(); ++gi) {
      bool any = false;
      double best = 1e30;
      std::uint32_t nearest = 0;
      for (std::uint32_t mi = 0; mi < mesh->nodes.size(); ++mi) {
        const double d = geodesic_distance(pos[ocean[gi]], mesh->nodes[mi]);
        if (d <= radius) {
          g2m.emplace_back(gi, mi);
          any = true;
        }
        if (d < best) {
          best = d;
          nearest = mi;
        }
      }
      if (!any) g2m.emplace_back(gi, nearest);
    }
    std::sort(g2m.begin(), g2m.end());
    const auto got = pairs_of(mesh == &fine ? g.g2m_fine : g.g2m_coarse);
    if (got != g2m) {
      detail = "grid->mesh oracle mismatch";
      return false;
    }

    // mesh->grid oracle
    std::vector<std::pair<std::uint32_t, std::uint32_t>> m2g;
    for (std::uint32_t gi = 0; gi < ocean.size(); ++gi) {
      bool found = false;
      for (std::uint32_t t = 0; t < mesh->triangles.size() && !found; ++t) {
        const auto& tri = mesh->triangles[t];
        const double eps = 1e-12;
        if (signed_volume(mesh->nodes[tri[0]], mesh->nodes[tri[1]], pos[ocean[gi]]) >= -eps &&
            signed_volume(mesh->nodes[tri[1]], mesh->nodes[tri[2]], pos[ocean[gi]]) >= -eps &&
            signed_volume(mesh->nodes[tri[2]], mesh->nodes[tri[0]], pos[ocean[gi]]) >= -eps) {
          for (int k = 0; k < 3; ++k) m2g.emplace_back(tri[k], gi);
          found = true;
        }
      }
      if (!found) {
        detail = "containment oracle found no triangle";
        return false;
      }
    }
    std::sort(m2g.begin(), m2g.end());
    if (pairs_of(mesh == &fine ? g.m2g_fine : g.m2g_coarse) != m2g) {
      detail = "mesh->grid oracle mismatch";
      return false;
    }

    // mesh-to-mesh pruning oracle
    std::vector<bool> flags(mesh->nodes.size(), false);
    for (const auto& [s, r] : g2m) flags[r] = true;
    for (const auto& [s, r] : m2g) flags[s] = true;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> m2m;
    for (const auto& [s, r] : mesh->edges)
      if (flags[s] && flags[r]) m2m.emplace_back(s, r);
    std::sort(m2m.begin(), m2m.end());
    if (pairs_of(mesh == &fine ? g.m2m_fine : g.m2m_coarse) != m2m) {
      detail = "mesh-to-mesh pruning mismatch";
      return false;
    }
  }

  // no edge touches land; every ocean cell has >= 3 incoming mesh->grid edges
  std::vector<int> incoming(ocean.size(), 0);
  for (const EdgeSet* e : {&g.m2g_coarse, &g.m2g_fine})
    for (std::size_t i = 0; i < e->size(); ++i) {
      if (!grid.mask[g.grid_cells[e->receivers[i]]]) {
        detail = "mesh->grid edge touches land";
        return false;
      }
      incoming[e->receivers[i]]++;
    }
  for (std::size_t i = 0; i < ocean.size(); ++i)
    if (incoming[i] < 3) {
      detail = "ocean cell with < 3 incoming mesh->grid edges";
      return false;
    }
  for (const EdgeSet* e : {&g.g2m_coarse, &g.g2m_fine})
    for (std::size_t i = 0; i < e->size(); ++i)
      if (!grid.mask[g.grid_cells[e->senders[i]]]) {
        detail = "grid->mesh edge touches land";
        return false;
      }

  const double dt = now_seconds() - t0;
  detail = "all three edge rules match brute force, " + std::to_string(dt) + " s";
  return dt < 10.0;
}

// ---- criterion 3 ----------------------------------------------------------

bool gradient_correctness(std::string& detail) {
  const double t0 = now_seconds();
  const OceanGrid grid = make_uniform_grid(6, 9);  // 54 ocean nodes
  auto [coarse, fine] = build_hierarchy(1);
  const OceanGraph graph = build_ocean_graph(grid, coarse, fine, 0.6);
  const GraphTensors<double> gt = make_graph_tensors<double>(graph);

  ModelConfig cfg;
  cfg.embed_width = 16;
  cfg.processor_iterations = 2;
  ModelDims dims;
  dims.c_in = 19;
  dims.c_x = 5;

  ParamStore<double> params(1234);
  create_model_params(params, cfg, dims);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix<double> input(static_cast<int>(graph.n_grid_nodes()), dims.c_in);
  for (auto& v : input.data) v = gauss(rng);
  Matrix<double> target(static_cast<int>(graph.n_grid_nodes()), dims.c_x);
  for (auto& v : target.data) v = gauss(rng);
  const std::vector<double> colw(static_cast<std::size_t>(dims.c_x), 1.0);

  auto loss_value = [&] {
    Tape<double> tape(&params);
    const int delta = model_forward(tape, cfg, dims, gt, tape.constant(input));
    return tape.value(tape.weighted_mse_vs(delta, target, colw))(0, 0);
  };

  Tape<double> tape(&params);
  const int delta = model_forward(tape, cfg, dims, gt, tape.constant(input));
  const auto grads = tape.backward(tape.weighted_mse_vs(delta, target, colw));

  const double h = 1e-5;
  int checked = 0;
  double worst = 0.0;
  while (checked < 200) {
    const int p = static_cast<int>(rng() % static_cast<std::uint64_t>(params.count()));
    auto& pm = params.at(p);
    if (pm.size() == 0) continue;
    const std::size_t i = rng() % pm.size();
    const double keep = pm.data[i];
    pm.data[i] = keep + h;
    const double up = loss_value();
    pm.data[i] = keep - h;
    const double down = loss_value();
    pm.data[i] = keep;
    const double fd = (up - down) / (2 * h);
    const double an = grads[static_cast<std::size_t>(p)].data[i];
    const double err = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8});
    worst = std::max(worst, err);
    if (err >= 1e-4) {
      detail = "relative error " + std::to_string(err) + " at " +
               params.names()[static_cast<std::size_t>(p)];
      return false;
    }
    ++checked;
  }
  const double dt = now_seconds() - t0;
  std::ostringstream os;
  os << checked << " entries, worst rel err " << worst << ", " << dt << " s";
  detail = os.str();
  return dt < 120.0;
}

// ---- criterion 4 ----------------------------------------------------------

bool persistence_identity(std::string& detail) {
  ParamStore<float> zero(0);
  create_model_params(zero, world.model_cfg, model_dims(*world.ds->schema()));
  for (int i = 0; i < zero.count(); ++i)
    for (auto& v : zero.at(i).data) v = 0.0f;

  auto src = make_reanalysis_source(*world.ds);
  const std::int64_t init = World::kFirstCaseDay;
  const FieldSet x0 = world.ds->state(init);
  const auto run = world.forecast(init, *src, World::kHorizon, zero);

  for (const auto& pred : run.predictions)
    for (int c = 0; c < pred.channels(); ++c) {
      const float* p = &pred.values[static_cast<std::size_t>(c) * pred.plane()];
      const float* x = &x0.values[static_cast<std::size_t>(c) * x0.plane()];
      for (auto cell : world.grid.ocean_cells())
        if (std::memcmp(&p[cell], &x[cell], sizeof(float)) != 0) {
          detail = "lead " + std::to_string(pred.day - init) + " differs from the initial state";
          return false;
        }
    }
  detail = "10-day zero-weight rollout bit-identical to the initial state";
  return true;
}

// ---- criterion 5 ----------------------------------------------------------

bool learning_beats_persistence(std::string& detail) {
  const ModelDims dims = model_dims(*world.ds->schema());
  const TrainConfig tc1 = world.train_cfg(1, World::kTrainSteps);

  const auto r1 = train_phase(*world.ds, world.grid, world.graph, world.stats, world.model_cfg,
                              tc1, world.params, "{\"phase\":1}");
  world.val1_after_phase1 = r1.final_val_loss;

  // persistence loss over the same validation protocol
  double persist = 0.0;
  {
    const std::int64_t last = tc1.val_day_end - 1;
    const std::int64_t span = last - tc1.val_day_begin;
    const int cases = tc1.val_cases;
    for (int i = 0; i < cases; ++i) {
      const std::int64_t t = tc1.val_day_begin + (cases == 1 ? 0 : span * i / (cases - 1));
      persist += masked_mse(world.ds->state(t), world.ds->state(t + 1), world.stats, world.grid);
    }
    persist /= cases;
  }

  // two-step validation of the phase-1 checkpoint, then fine-tune
  const TrainConfig tc2 = world.train_cfg(2, World::kFineTuneSteps);
  const GraphTensors<float>& gt = *world.gt;
  world.val2_before = validation_loss(*world.ds, world.stats, world.grid, world.model_cfg,
                                      world.params, gt, tc2, 2);
  const auto r2 = train_phase(*world.ds, world.grid, world.graph, world.stats, world.model_cfg,
                              tc2, world.params, "{\"phase\":2}");
  world.val2_after = r2.final_val_loss;
  world.trained = true;

  std::ostringstream os;
  os << "val 1-step " << world.val1_after_phase1 << " vs persistence " << persist
     << " (ratio " << world.val1_after_phase1 / persist << "); 2-step val "
     << world.val2_before << " -> " << world.val2_after;
  detail = os.str();
  return world.val1_after_phase1 < 0.5 * persist &&
         world.val2_after <= world.val2_before * (1.0 + 1e-9);
}

// ---- criterion 6 ----------------------------------------------------------

bool forcing_sensitivity(std::string& detail) {
  if (!world.trained) {
    detail = "skipped: training criterion did not produce a model";
    return false;
  }
  auto reana = make_reanalysis_source(*world.ds);
  auto clim = make_climatology_source(*world.ds, 0, world.gen.year_length);
  auto fcst = make_forecast_source(*world.ds, world.gen, 0, world.gen.year_length);

  // surface current channels of the toy schema
  const int u_ch = 1, v_ch = 2;
  std::vector<double> r_re(World::kHorizon, 0.0), r_fc(World::kHorizon, 0.0),
      r_cl(World::kHorizon, 0.0);

  for (int case_i = 0; case_i < World::kCases; ++case_i) {
    const std::int64_t init = World::kFirstCaseDay + case_i * World::kCaseStride;
    const auto run_re = world.forecast(init, *reana, World::kHorizon, world.params);
    const auto run_fc = world.forecast(init, *fcst, World::kHorizon, world.params);
    const auto run_cl = world.forecast(init, *clim, World::kHorizon, world.params);
    for (int k = 0; k < World::kHorizon; ++k) {
      const FieldSet truth = world.ds->state(init + k + 1);
      auto cur_rmse = [&](const ForecastRun& run) {
        const auto v = rmse(run.predictions[static_cast<std::size_t>(k)], truth, world.grid,
                            {u_ch, v_ch});
        return 0.5 * (v[0] + v[1]);
      };
      r_re[static_cast<std::size_t>(k)] += cur_rmse(run_re);
      r_fc[static_cast<std::size_t>(k)] += cur_rmse(run_fc);
      r_cl[static_cast<std::size_t>(k)] += cur_rmse(run_cl);
    }
  }
  for (int k = 0; k < World::kHorizon; ++k) {
    r_re[static_cast<std::size_t>(k)] /= World::kCases;
    r_fc[static_cast<std::size_t>(k)] /= World::kCases;
    r_cl[static_cast<std::size_t>(k)] /= World::kCases;
  }

  std::ostringstream os;
  os.precision(4);
  os << "lead1-3 mean rmse: reana";
  bool ordered = true;
  for (int k = 0; k < 3; ++k) {
    ordered = ordered && r_re[static_cast<std::size_t>(k)] <= r_fc[static_cast<std::size_t>(k)] &&
              r_fc[static_cast<std::size_t>(k)] <= r_cl[static_cast<std::size_t>(k)];
    os << " [" << r_re[static_cast<std::size_t>(k)] << " <= " << r_fc[static_cast<std::size_t>(k)]
       << " <= " << r_cl[static_cast<std::size_t>(k)] << "]";
  }

  // the forecast-forced curve approaches the climatology-forced curve
  auto rel_gap = [&](int k) {
    const double denom = r_cl[static_cast<std::size_t>(k)] - r_re[static_cast<std::size_t>(k)];
    return (r_fc[static_cast<std::size_t>(k)] - r_re[static_cast<std::size_t>(k)]) /
           std::max(denom, 1e-12);
  };
  const double gap_early = rel_gap(0);
  const double gap_late = (rel_gap(World::kHorizon - 3) + rel_gap(World::kHorizon - 2) +
                           rel_gap(World::kHorizon - 1)) /
                          3.0;
  os << "; rel gap lead1 " << gap_early << " -> leads 8-10 " << gap_late;
  detail = os.str();
  return ordered && gap_late > gap_early;
}

// ---- criterion 7 ----------------------------------------------------------

bool spectrum_correctness(std::string& detail) {
  OceanGrid grid = make_uniform_grid(16, 48);
  auto schema = toy_schema(1);
  const Region belt{"belt", 0.0, 359.99, -90.0, 90.0, ""};
  const int N = grid.n_lon;

  FieldSet f = make_fieldset(schema, FieldKind::State, grid, 0);
  const double A = 2.0;
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      for (int c = 0; c < f.channels(); ++c) f.at(c, i, j) = 0.0f;
      f.at(1, i, j) = static_cast<float>(A * std::cos(2.0 * M_PI * 5.0 * j / N));
    }
  const auto spec = ke_spectrum(f, 1, 2, grid, belt, SpectrumWindow::None);
  for (std::size_t k = 0; k < spec.amplitude.size(); ++k) {
    const double expect = (k + 1 == 5) ? A * A / 4.0 : 0.0;
    if (std::abs(spec.amplitude[k] - expect) >= 1e-6) {
      detail = "peak amplitude off at bin " + std::to_string(k + 1);
      return false;
    }
  }

  // Parseval on random data
  FieldSet r = make_fieldset(schema, FieldKind::State, grid, 0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (auto& v : r.values) v = u(rng);
  const auto rs = ke_spectrum(r, 1, 2, grid, belt, SpectrumWindow::None);
  double total = 0.0;
  for (double a : rs.amplitude) total += a;
  double mean_ke = 0.0;
  for (int i = 0; i < grid.n_lat; ++i) {
    double um = 0, vm = 0;
    for (int j = 0; j < N; ++j) {
      um += r.at(1, i, j);
      vm += r.at(2, i, j);
    }
    um /= N;
    vm /= N;
    double row = 0.0;
    for (int j = 0; j < N; ++j) {
      const double du = r.at(1, i, j) - um, dv = r.at(2, i, j) - vm;
      row += 0.5 * (du * du + dv * dv);
    }
    mean_ke += row / N;
  }
  mean_ke /= grid.n_lat;
  if (std::abs(total - mean_ke) / mean_ke >= 1e-6) {
    detail = "Parseval defect " + std::to_string(std::abs(total - mean_ke) / mean_ke);
    return false;
  }

  // exact constant-offset invariance (offsets exactly representable)
  FieldSet base = make_fieldset(schema, FieldKind::State, grid, 0);
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      for (int c = 0; c < base.channels(); ++c) base.at(c, i, j) = 0.0f;
      base.at(1, i, j) = static_cast<float>(static_cast<int>(rng() % 1024)) / 1024.0f;
      base.at(2, i, j) = static_cast<float>(static_cast<int>(rng() % 1024)) / 1024.0f;
    }
  FieldSet shifted = base;
  for (int i = 0; i < grid.n_lat; ++i)
    for (int j = 0; j < grid.n_lon; ++j) {
      shifted.at(1, i, j) += 16.0f;
      shifted.at(2, i, j) -= 32.0f;
    }
  const auto s0 = ke_spectrum(base, 1, 2, grid, belt, SpectrumWindow::None);
  const auto s1 = ke_spectrum(shifted, 1, 2, grid, belt, SpectrumWindow::None);
  if (s0.amplitude != s1.amplitude) {
    detail = "constant offset changed the spectrum";
    return false;
  }
  detail = "peak, Parseval and offset invariance within tolerance";
  return true;
}

// ---- criterion 8 ----------------------------------------------------------

bool statistic_oracles(std::string& detail) {
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // segment_sum against a per-node loop
  for (int it = 0; it < 100; ++it) {
    const int edges = 1 + static_cast<int>(rng() % 40);
    const int nodes = 1 + static_cast<int>(rng() % 12);
    const int width = 1 + static_cast<int>(rng() % 6);
    Matrix<double> x(edges, width);
    for (auto& v : x.data) v = gauss(rng);
    std::vector<std::uint32_t> recv(static_cast<std::size_t>(edges));
    for (auto& r : recv) r = static_cast<std::uint32_t>(rng() % static_cast<std::uint64_t>(nodes));
    Tape<double> tape;
    const auto& got = tape.value(
        tape.segment_sum(tape.constant(x), make_index_array(std::vector<std::uint32_t>(recv)), nodes));
    for (int n = 0; n < nodes; ++n)
      for (int c = 0; c < width; ++c) {
        double want = 0.0;
        for (int e = 0; e < edges; ++e)
          if (recv[static_cast<std::size_t>(e)] == static_cast<std::uint32_t>(n)) want += x(e, c);
        if (std::abs(got(n, c) - want) > 1e-10 * std::max(1.0, std::abs(want))) {
          detail = "segment_sum oracle mismatch";
          return false;
        }
      }
  }

  // gnn_block against a naive loop (zero-parameter identity plus random MLPs
  // are covered by unit tests; here: full random block)
  for (int it = 0; it < 100; ++it) {
    ModelConfig cfg;
    cfg.embed_width = 3 + static_cast<int>(rng() % 4);
    ParamStore<double> store(rng());
    detail::create_gnn_block_params(store, "b", cfg);
    const int nodes = 2 + static_cast<int>(rng() % 5);
    const int edges = 1 + static_cast<int>(rng() % 9);
    Matrix<double> v(nodes, cfg.embed_width), e(edges, cfg.embed_width);
    for (auto& x : v.data) x = gauss(rng);
    for (auto& x : e.data) x = gauss(rng);
    std::vector<std::uint32_t> snd(static_cast<std::size_t>(edges)), rcv(static_cast<std::size_t>(edges));
    for (auto& s : snd) s = static_cast<std::uint32_t>(rng() % static_cast<std::uint64_t>(nodes));
    for (auto& r : rcv) r = static_cast<std::uint32_t>(rng() % static_cast<std::uint64_t>(nodes));

    Tape<double> tape(&store);
    auto [e2, v2] = gnn_block(tape, "b", cfg, tape.constant(v), tape.constant(v), tape.constant(e),
                              make_index_array(std::vector<std::uint32_t>(snd)),
                              make_index_array(std::vector<std::uint32_t>(rcv)), nodes);

    // naive: edge MLP rows one at a time through a fresh tape
    auto run_mlp = [&](const std::string& prefix, const std::vector<double>& row, int in_width) {
      Tape<double> t(&store);
      Matrix<double> m(1, in_width);
      for (int c = 0; c < in_width; ++c) m(0, c) = row[static_cast<std::size_t>(c)];
      MlpSpec spec;
      spec.in = in_width;
      spec.hidden = cfg.embed_width;
      spec.out = cfg.embed_width;
      spec.final_layer_norm = true;
      const int out = mlp_forward(t, prefix, spec, t.constant(m));
      std::vector<double> res(static_cast<std::size_t>(cfg.embed_width));
      for (int c = 0; c < cfg.embed_width; ++c) res[static_cast<std::size_t>(c)] = t.value(out)(0, c);
      return res;
    };

    Matrix<double> e_new(edges, cfg.embed_width);
    for (int k = 0; k < edges; ++k) {
      std::vector<double> row;
      for (int c = 0; c < cfg.embed_width; ++c) row.push_back(e(k, c));
      for (int c = 0; c < cfg.embed_width; ++c) row.push_back(v(static_cast<int>(snd[static_cast<std::size_t>(k)]), c));
      for (int c = 0; c < cfg.embed_width; ++c) row.push_back(v(static_cast<int>(rcv[static_cast<std::size_t>(k)]), c));
      const auto out = run_mlp("b/edge", row, 3 * cfg.embed_width);
      for (int c = 0; c < cfg.embed_width; ++c) e_new(k, c) = out[static_cast<std::size_t>(c)] + e(k, c);
    }
    for (int n = 0; n < nodes; ++n) {
      std::vector<double> row;
      for (int c = 0; c < cfg.embed_width; ++c) row.push_back(v(n, c));
      for (int c = 0; c < cfg.embed_width; ++c) {
        double agg = 0.0;
        for (int k = 0; k < edges; ++k)
          if (rcv[static_cast<std::size_t>(k)] == static_cast<std::uint32_t>(n)) agg += e_new(k, c);
        row.push_back(agg);
      }
      const auto out = run_mlp("b/node", row, 2 * cfg.embed_width);
      for (int c = 0; c < cfg.embed_width; ++c) {
        const double want = out[static_cast<std::size_t>(c)] + v(n, c);
        if (std::abs(tape.value(v2)(n, c) - want) > 1e-10 * std::max(1.0, std::abs(want))) {
          detail = "gnn_block oracle mismatch";
          return false;
        }
      }
    }
  }

  // rmse / masked_mse / compute_norm_stats against plain loops
  auto schema = toy_schema(1);
  for (int it = 0; it < 100; ++it) {
    const int n_lat = 4 + static_cast<int>(rng() % 5);
    const int n_lon = 6 + static_cast<int>(rng() % 7);
    OceanGrid grid = make_uniform_grid(n_lat, n_lon);
    for (std::size_t c = 0; c < grid.cells(); ++c) {
      grid.mask[c] = rng() % 4 != 0;
      if (!grid.mask[c]) grid.depth[c] = 0.0;
    }
    if (grid.ocean_cells().empty()) continue;
    FieldSet statics = make_statics(schema, grid);
    FieldSet a0 = make_fieldset(schema, FieldKind::State, grid, 0);
    FieldSet a1 = make_fieldset(schema, FieldKind::State, grid, 1);
    FieldSet f0 = make_fieldset(schema, FieldKind::Forcing, grid, 0);
    FieldSet f1 = make_fieldset(schema, FieldKind::Forcing, grid, 1);
    for (auto cell : grid.ocean_cells())
      for (int c = 0; c < a0.channels(); ++c) {
        a0.values[static_cast<std::size_t>(c) * a0.plane() + cell] = static_cast<float>(gauss(rng));
        a1.values[static_cast<std::size_t>(c) * a1.plane() + cell] = static_cast<float>(gauss(rng));
      }
    for (auto& v : f0.values) v = static_cast<float>(gauss(rng));
    for (auto& v : f1.values) v = static_cast<float>(gauss(rng));

    const NormStats st = compute_norm_stats({{&a0, &f0}, {&a1, &f1}}, statics, grid);
    // oracle for channel 0 level stats
    {
      std::vector<double> vals;
      for (const FieldSet* x : {&a0, &a1})
        for (auto cell : grid.ocean_cells()) vals.push_back(x->values[cell]);
      double mean = 0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      double var = 0;
      for (double v : vals) var += (v - mean) * (v - mean);
      var /= static_cast<double>(vals.size());
      if (std::abs(st.mean_state[0] - mean) > 1e-10 ||
          std::abs(st.std_state[0] - std::max(std::sqrt(var), NormStats::kStdFloor)) > 1e-10) {
        detail = "compute_norm_stats oracle mismatch";
        return false;
      }
    }

    // masked_mse oracle
    const double got = masked_mse(a0, a1, st, grid);
    double acc = 0.0;
    const auto cells = grid.ocean_cells();
    for (int c = 0; c < a0.channels(); ++c) {
      double ch = 0.0;
      for (auto cell : cells) {
        const double e = (static_cast<double>(a0.values[static_cast<std::size_t>(c) * a0.plane() + cell]) -
                          a1.values[static_cast<std::size_t>(c) * a1.plane() + cell]) /
                         st.std_state[static_cast<std::size_t>(c)];
        ch += e * e;
      }
      acc += ch / static_cast<double>(cells.size());
    }
    acc /= a0.channels();
    if (std::abs(got - acc) > 1e-10 * std::max(1.0, acc)) {
      detail = "masked_mse oracle mismatch";
      return false;
    }

    // rmse oracle, channel 3
    const double rg = rmse(a0, a1, grid, {3})[0];
    double se = 0.0;
    for (auto cell : cells) {
      const double e = static_cast<double>(a0.values[3 * a0.plane() + cell]) -
                       a1.values[3 * a1.plane() + cell];
      se += e * e;
    }
    if (std::abs(rg - std::sqrt(se / static_cast<double>(cells.size()))) > 1e-10) {
      detail = "rmse oracle mismatch";
      return false;
    }
  }

  detail = "rmse, masked_mse, norm stats, segment_sum, gnn_block all match loops";
  return true;
}

// ---- criterion 9 ----------------------------------------------------------

bool region_fidelity(std::string& detail) {
  struct Want {
    const char* name;
    double lon_min, lon_max, lat_min, lat_max;
    const char* extent;
  };
  const Want rmse_boxes[] = {
      {"gulf_stream", 284, 320, 35, 45, "76W-40W, 35N-45N"},
      {"kuroshio_extension", 120, 179, 20, 55, "120E-179E, 20N-55N"},
      {"south_china_sea", 100, 122, 0, 27, "100E-122E, 0N-27N"},
      {"yellow_sea", 118, 127, 30, 42, "118E-127E, 30N-42N"},
  };
  const Want spec_boxes[] = {
      {"north_pacific", 145, 175, 10, 40, "10N-40N, 145E-175E"},
      {"north_atlantic", 300, 330, 10, 40, "10N-40N, 60W-30W"},
  };
  const auto& got_rmse = builtin_rmse_regions();
  const auto& got_spec = builtin_spectral_regions();
  if (got_rmse.size() != 4 || got_spec.size() != 2) {
    detail = "region table sizes wrong";
    return false;
  }
  auto check = [&](const Region& r, const Want& w) {
    return r.name == w.name && r.lon_min == w.lon_min && r.lon_max == w.lon_max &&
           r.lat_min == w.lat_min && r.lat_max == w.lat_max && r.extent == w.extent;
  };
  for (int i = 0; i < 4; ++i)
    if (!check(got_rmse[static_cast<std::size_t>(i)], rmse_boxes[i])) {
      detail = std::string("rmse region mismatch: ") + rmse_boxes[i].name;
      return false;
    }
  for (int i = 0; i < 2; ++i)
    if (!check(got_spec[static_cast<std::size_t>(i)], spec_boxes[i])) {
      detail = std::string("spectral region mismatch: ") + spec_boxes[i].name;
      return false;
    }
  detail = "region and spectral-box tables match the reference definitions";
  return true;
}

// ---- criterion 10 ---------------------------------------------------------

bool determinism_and_stability(std::string& detail) {
  if (!world.trained) {
    detail = "skipped: no trained model";
    return false;
  }

  // (a) same seed: retrain a reduced configuration twice, compare checkpoints
  {
    ModelConfig cfg;
    cfg.embed_width = 8;
    cfg.processor_iterations = 1;
    TrainConfig tc = world.train_cfg(1, 10);
    tc.checkpoint_interval = 10;
    for (int run = 0; run < 2; ++run) {
      tc.out_dir = world.dir + "/det" + std::to_string(run);
      std::filesystem::create_directories(tc.out_dir);
      ParamStore<float> p(tc.seed);
      create_model_params(p, cfg, model_dims(*world.ds->schema()));
      train_phase(*world.ds, world.grid, world.graph, world.stats, cfg, tc, p, "{}");
    }
    if (binio::file_digest(world.dir + "/det0/ckpt_phase1.ockp") !=
        binio::file_digest(world.dir + "/det1/ckpt_phase1.ockp")) {
      detail = "checkpoints differ for identical seeds";
      return false;
    }
  }

  // (b) identical forecasts on a fixed worker count (byte-wise: land cells
  // carry NaN, which never compares equal by value)
  auto src = make_reanalysis_source(*world.ds);
  const std::int64_t init = World::kFirstCaseDay + 2;
  const auto a = world.forecast(init, *src, World::kHorizon, world.params);
  const auto b = world.forecast(init, *src, World::kHorizon, world.params);
  for (int k = 0; k < World::kHorizon; ++k) {
    const auto& pa = a.predictions[static_cast<std::size_t>(k)].values;
    const auto& pb = b.predictions[static_cast<std::size_t>(k)].values;
    if (pa.size() != pb.size() ||
        std::memcmp(pa.data(), pb.data(), pa.size() * sizeof(float)) != 0) {
      detail = "repeated forecast not bit-identical";
      return false;
    }
  }

  // (c) thread count 1 vs 3 within 1e-5 relative; (d) all values finite
  set_worker_count(3);
  const auto c = world.forecast(init, *src, World::kHorizon, world.params);
  set_worker_count(1);
  double worst = 0.0;
  for (int k = 0; k < World::kHorizon; ++k) {
    const auto& pa = a.predictions[static_cast<std::size_t>(k)];
    const auto& pc = c.predictions[static_cast<std::size_t>(k)];
    for (int ch = 0; ch < pa.channels(); ++ch)
      for (auto cell : world.grid.ocean_cells()) {
        const double va = pa.values[static_cast<std::size_t>(ch) * pa.plane() + cell];
        const double vc = pc.values[static_cast<std::size_t>(ch) * pc.plane() + cell];
        if (!std::isfinite(va) || !std::isfinite(vc)) {
          detail = "non-finite value in a 10-day rollout";
          return false;
        }
        worst = std::max(worst, std::abs(va - vc) / std::max(1.0, std::abs(va)));
      }
  }
  std::ostringstream os;
  os << "checkpoints and forecasts reproducible; thread-count drift " << worst;
  detail = os.str();
  return worst < 1e-5;
}

}  // namespace

int main() {
  set_worker_count(1);
  struct Criterion {
    int id;
    const char* title;
    std::function<bool(std::string&)> run;
  };

  std::cout << "building synthetic benchmark (2-degree grid, 420 days)...\n";
  const double t0 = now_seconds();
  world.build();
  std::cout << "benchmark ready in " << now_seconds() - t0 << " s\n\n";

  const Criterion criteria[] = {
      {1, "mesh exactness", mesh_exactness},
      {2, "graph oracle equivalence", graph_oracles},
      {3, "gradient correctness", gradient_correctness},
      {4, "persistence identity", persistence_identity},
      {5, "learning beats persistence", learning_beats_persistence},
      {6, "forcing sensitivity ordering", forcing_sensitivity},
      {7, "spectrum correctness", spectrum_correctness},
      {8, "statistics oracles", statistic_oracles},
      {9, "region fidelity", region_fidelity},
      {10, "determinism and stability", determinism_and_stability},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = false;
    const double start = now_seconds();
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failed;
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << " (" << detail
              << ") [" << now_seconds() - start << " s]\n"
              << std::flush;
  }

  std::filesystem::remove_all(world.dir);
  std::cout << "\n" << (failed == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(failed))
            << "\n";
  return failed;
}
