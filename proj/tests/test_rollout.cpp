#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "oceancast/rollout.hpp"
#include "oceancast/synthetic.hpp"
#include "test_util.hpp"

using namespace ocean;

namespace {

struct World {
  test_util::ScratchDir dir{"oceancast_rollout"};
  GeneratorConfig gc;
  OceanGrid grid;
  SchemaPtr schema;
  NormStats stats;
  std::unique_ptr<Dataset> ds;
  ModelConfig cfg;
  TriMesh coarse, fine;
  OceanGraph graph;
  GraphTensors<float> gt;

  explicit World(int n_days) {
    gc.n_lat = 12;
    gc.n_lon = 24;
    generate_dataset(gc, n_days, dir.path);
    ds = std::make_unique<Dataset>(dir.path);
    grid = ds->grid();
    schema = ds->schema();
    stats = ds->load_stats();
    cfg.embed_width = 8;
    cfg.processor_iterations = 1;
    auto [c, f] = build_hierarchy(1);
    coarse = std::move(c);
    fine = std::move(f);
    graph = build_ocean_graph(grid, coarse, fine, 0.6);
    gt = make_graph_tensors<float>(graph);
  }

  ParamStore<float> zero_params() const {
    ParamStore<float> p(0);
    create_model_params(p, cfg, model_dims(*schema));
    for (int i = 0; i < p.count(); ++i)
      for (auto& v : p.at(i).data) v = 0.0f;
    return p;
  }
};

bool ocean_bits_equal(const FieldSet& a, const FieldSet& b, const OceanGrid& grid) {
  for (int c = 0; c < a.channels(); ++c)
    for (int i = 0; i < grid.n_lat; ++i)
      for (int j = 0; j < grid.n_lon; ++j) {
        if (!grid.mask[grid.at(i, j)]) continue;
        const float x = a.at(c, i, j), y = b.at(c, i, j);
        if (std::memcmp(&x, &y, sizeof(float)) != 0) return false;
      }
  return true;
}

}  // namespace

TEST_CASE("zero-weight model rolls out persistence for every lead") {
  World w(8);
  auto params = w.zero_params();
  auto source = make_reanalysis_source(*w.ds);
  const FieldSet x0 = w.ds->state(2);
  const auto run = run_forecast(w.ds->state(1), x0, w.ds->statics(), *source, 5, w.cfg, params,
                                w.graph, w.gt, w.stats, w.grid);
  CHECK(run.predictions.size() == 5);
  for (int k = 0; k < 5; ++k) {
    CHECK(run.predictions[static_cast<std::size_t>(k)].day == 3 + k);
    CHECK(ocean_bits_equal(run.predictions[static_cast<std::size_t>(k)], x0, w.grid));
  }
}

TEST_CASE("horizon 1 equals a single step") {
  World w(6);
  ParamStore<float> params(7);
  create_model_params(params, w.cfg, model_dims(*w.schema));
  auto source = make_reanalysis_source(*w.ds);

  const auto run = run_forecast(w.ds->state(1), w.ds->state(2), w.ds->statics(), *source, 1, w.cfg,
                                params, w.graph, w.gt, w.stats, w.grid);
  const FieldSet direct =
      model_step(w.cfg, params, w.graph, w.gt, w.ds->state(1), w.ds->state(2), w.ds->forcing(1),
                 w.ds->forcing(2), w.ds->forcing(3), w.ds->statics(), w.stats, w.grid);
  CHECK(run.predictions[0].values.size() == direct.values.size());
  CHECK(ocean_bits_equal(run.predictions[0], direct, w.grid));
}

TEST_CASE("forcing gaps fail before any compute") {
  World w(6);
  auto params = w.zero_params();
  auto source = make_reanalysis_source(*w.ds);
  // horizon 10 needs forcing through day 12; dataset ends at day 5
  CHECK_THROWS_AS(run_forecast(w.ds->state(1), w.ds->state(2), w.ds->statics(), *source, 10, w.cfg,
                               params, w.graph, w.gt, w.stats, w.grid),
                  DataError);
}

TEST_CASE("rollout is deterministic") {
  World w(8);
  ParamStore<float> params(11);
  create_model_params(params, w.cfg, model_dims(*w.schema));
  auto source = make_reanalysis_source(*w.ds);
  const auto a = run_forecast(w.ds->state(1), w.ds->state(2), w.ds->statics(), *source, 4, w.cfg,
                              params, w.graph, w.gt, w.stats, w.grid);
  const auto b = run_forecast(w.ds->state(1), w.ds->state(2), w.ds->statics(), *source, 4, w.cfg,
                              params, w.graph, w.gt, w.stats, w.grid);
  for (int k = 0; k < 4; ++k) {
    const auto& pa = a.predictions[static_cast<std::size_t>(k)].values;
    const auto& pb = b.predictions[static_cast<std::size_t>(k)].values;
    REQUIRE(pa.size() == pb.size());
    // byte-wise: land cells carry NaN, which never compares equal by value
    CHECK(std::memcmp(pa.data(), pb.data(), pa.size() * sizeof(float)) == 0);
  }
}

TEST_CASE("climatology of a single year reproduces that year") {
  test_util::ScratchDir dir("oceancast_clim1");
  OceanGrid grid = test_util::hemispheric_grid(6, 8);
  auto schema = toy_schema(1);
  std::vector<FieldSet> xs, as;
  const int Y = 5;  // short synthetic year
  for (int t = 0; t < Y; ++t) {
    FieldSet x = make_fieldset(schema, FieldKind::State, grid, t);
    FieldSet a = make_fieldset(schema, FieldKind::Forcing, grid, t);
    test_util::fill_random(x, grid, 70 + t);
    test_util::fill_random(a, grid, 80 + t);
    xs.push_back(std::move(x));
    as.push_back(std::move(a));
  }
  test_util::write_dataset(dir.path, grid, schema, xs, as, Y);
  Dataset ds(dir.path);

  const auto table = ClimatologyTable::build(ds, FieldKind::Forcing, 0, Y);
  for (int d = 0; d < Y; ++d)
    CHECK(table.day_of_year(d).values == as[static_cast<std::size_t>(d)].values);

  // day index beyond one year wraps by day-of-year
  CHECK(table.day_of_year(Y + 1).values == as[1].values);
}

TEST_CASE("two opposite years cancel to a zero climatology") {
  test_util::ScratchDir dir("oceancast_clim2");
  OceanGrid grid = test_util::hemispheric_grid(6, 8);
  auto schema = toy_schema(1);
  const int Y = 4;
  std::vector<FieldSet> xs, as;
  for (int t = 0; t < 2 * Y; ++t) {
    FieldSet x = make_fieldset(schema, FieldKind::State, grid, t);
    FieldSet a = make_fieldset(schema, FieldKind::Forcing, grid, t);
    test_util::fill_random(x, grid, 90 + t % Y);
    test_util::fill_random(a, grid, 95 + t % Y);
    if (t >= Y)
      for (auto& v : a.values) v = -v;
    xs.push_back(std::move(x));
    as.push_back(std::move(a));
  }
  test_util::write_dataset(dir.path, grid, schema, xs, as, Y);
  Dataset ds(dir.path);
  const auto table = ClimatologyTable::build(ds, FieldKind::Forcing, 0, 2 * Y);
  for (int d = 0; d < Y; ++d)
    for (float v : table.day_of_year(d).values) CHECK(v == 0.0f);
}

TEST_CASE("three-year climatology matches the naive averaging oracle") {
  test_util::ScratchDir dir("oceancast_clim3");
  OceanGrid grid = test_util::hemispheric_grid(6, 8);
  auto schema = toy_schema(1);
  const int Y = 3, years = 3;
  std::vector<FieldSet> xs, as;
  for (int t = 0; t < years * Y; ++t) {
    FieldSet x = make_fieldset(schema, FieldKind::State, grid, t);
    FieldSet a = make_fieldset(schema, FieldKind::Forcing, grid, t);
    test_util::fill_random(x, grid, 100 + t);
    test_util::fill_random(a, grid, 200 + t);
    xs.push_back(std::move(x));
    as.push_back(std::move(a));
  }
  test_util::write_dataset(dir.path, grid, schema, xs, as, Y);
  Dataset ds(dir.path);
  const auto table = ClimatologyTable::build(ds, FieldKind::Forcing, 0, years * Y);

  for (int d = 0; d < Y; ++d)
    for (std::size_t i = 0; i < as[0].values.size(); ++i) {
      double mean = 0.0;
      for (int y = 0; y < years; ++y) mean += as[static_cast<std::size_t>(y * Y + d)].values[i];
      mean /= years;
      // double-precision mean agrees to 1e-10 before the single rounding to
      // the file scalar, so the stored value equals float(mean) exactly
      CHECK(table.day_of_year(d).values[i] == static_cast<float>(mean));
    }

  // less than one full year is rejected
  CHECK_THROWS_AS(ClimatologyTable::build(ds, FieldKind::Forcing, 0, Y - 1), DataError);
}

TEST_CASE("climatology forcing source stamps the requested day") {
  test_util::ScratchDir dir("oceancast_clim_src");
  OceanGrid grid = test_util::hemispheric_grid(6, 8);
  auto schema = toy_schema(1);
  std::vector<FieldSet> xs, as;
  for (int t = 0; t < 4; ++t) {
    FieldSet x = make_fieldset(schema, FieldKind::State, grid, t);
    FieldSet a = make_fieldset(schema, FieldKind::Forcing, grid, t);
    test_util::fill_random(x, grid, 300 + t);
    test_util::fill_random(a, grid, 400 + t);
    xs.push_back(std::move(x));
    as.push_back(std::move(a));
  }
  test_util::write_dataset(dir.path, grid, schema, xs, as, 4);
  Dataset ds(dir.path);
  auto source = make_climatology_source(ds, 0, 4);
  CHECK(source->kind() == ForcingKind::Climatology);
  const FieldSet f = source->forcing(7, 5);
  CHECK(f.day == 7);
  CHECK(f.values == as[3].values);  // 7 mod 4
  CHECK(source->covers(1000));
}
