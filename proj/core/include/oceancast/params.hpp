#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "oceancast/binio.hpp"
#include "oceancast/dense.hpp"

namespace ocean {

enum class ParamInit { Zero, One, TruncNormalFanIn };

// Named learnable arrays. Initialization is seeded per parameter from
// (seed, name), so values do not depend on creation order; shapes are fixed
// after creation.
template <class T>
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : seed_(seed) {}

  int add(const std::string& name, int rows, int cols, ParamInit init) {
    if (index_.count(name)) throw ConfigError("ParamStore: duplicate parameter " + name);
    Matrix<T> m(rows, cols);
    switch (init) {
      case ParamInit::Zero:
        break;
      case ParamInit::One:
        for (auto& v : m.data) v = T(1);
        break;
      case ParamInit::TruncNormalFanIn: {
        std::mt19937_64 rng(binio::fnv1a(name, seed_ ^ 0x9e3779b97f4a7c15ull));
        std::normal_distribution<double> dist(0.0, 1.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
        for (auto& v : m.data) {
          double z;
          do {
            z = dist(rng);
          } while (std::abs(z) > 2.0);
          v = static_cast<T>(z * scale);
        }
        break;
      }
    }
    const int id = static_cast<int>(values_.size());
    index_.emplace(name, id);
    names_.push_back(name);
    values_.push_back(std::move(m));
    return id;
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  int id(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("ParamStore: unknown parameter " + name);
    return it->second;
  }
  Matrix<T>& at(int id) { return values_[static_cast<std::size_t>(id)]; }
  const Matrix<T>& at(int id) const { return values_[static_cast<std::size_t>(id)]; }
  Matrix<T>& at(const std::string& name) { return at(id(name)); }
  const Matrix<T>& at(const std::string& name) const { return at(id(name)); }

  int count() const { return static_cast<int>(values_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += v.size();
    return n;
  }

 private:
  std::uint64_t seed_;
  std::vector<std::string> names_;
  std::vector<Matrix<T>> values_;
  std::unordered_map<std::string, int> index_;
};

// AdamW with decoupled weight decay and bias-corrected moments.
template <class T>
struct AdamWState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::int64_t step = 0;
  std::vector<Matrix<T>> m, v;

  void ensure_shapes(const ParamStore<T>& params) {
    if (!m.empty()) return;
    for (int i = 0; i < params.count(); ++i) {
      m.emplace_back(params.at(i).rows, params.at(i).cols);
      v.emplace_back(params.at(i).rows, params.at(i).cols);
    }
  }
};

template <class T>
void adamw_step(AdamWState<T>& state, ParamStore<T>& params, const std::vector<Matrix<T>>& grads) {
  if (static_cast<int>(grads.size()) != params.count())
    throw NumericError("adamw_step: gradient count mismatch");
  state.ensure_shapes(params);
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (int p = 0; p < params.count(); ++p) {
    auto& w = params.at(p);
    auto& m = state.m[static_cast<std::size_t>(p)];
    auto& v = state.v[static_cast<std::size_t>(p)];
    const auto& g = grads[static_cast<std::size_t>(p)];
    if (g.rows != w.rows || g.cols != w.cols) throw NumericError("adamw_step: gradient shape mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = static_cast<double>(g.data[i]);
      const double mi = state.beta1 * m.data[i] + (1.0 - state.beta1) * gi;
      const double vi = state.beta2 * v.data[i] + (1.0 - state.beta2) * gi * gi;
      m.data[i] = static_cast<T>(mi);
      v.data[i] = static_cast<T>(vi);
      const double mhat = mi / bc1;
      const double vhat = vi / bc2;
      const double update = mhat / (std::sqrt(vhat) + state.eps) + state.weight_decay * w.data[i];
      w.data[i] = static_cast<T>(w.data[i] - state.lr * update);
    }
  }
}

// "OCKP" checkpoints: named parameter table with shapes, f32 values, optional
// optimizer state, and the training config JSON embedded for provenance.
template <class T>
void save_checkpoint(const ParamStore<T>& params, const AdamWState<T>* opt,
                     const std::string& config_json, const std::string& path) {
  binio::Writer w(path);
  w.magic("OCKP");
  w.u16(1);
  w.u32(static_cast<std::uint32_t>(params.count()));
  for (int i = 0; i < params.count(); ++i) {
    const auto& m = params.at(i);
    w.str(params.names()[static_cast<std::size_t>(i)]);
    w.u32(static_cast<std::uint32_t>(m.rows));
    w.u32(static_cast<std::uint32_t>(m.cols));
  }
  for (int i = 0; i < params.count(); ++i)
    for (T v : params.at(i).data) w.f32(static_cast<float>(v));
  w.u16(opt ? 1 : 0);
  if (opt) {
    w.f64(opt->lr);
    w.f64(opt->beta1);
    w.f64(opt->beta2);
    w.f64(opt->eps);
    w.f64(opt->weight_decay);
    w.i64(opt->step);
    for (const auto& m : opt->m)
      for (T v : m.data) w.f32(static_cast<float>(v));
    for (const auto& m : opt->v)
      for (T v : m.data) w.f32(static_cast<float>(v));
  }
  w.str(config_json);
  w.close();
}

template <class T>
struct Checkpoint {
  ParamStore<T> params;
  AdamWState<T> opt;
  bool has_opt = false;
  std::string config_json;
};

template <class T>
Checkpoint<T> load_checkpoint(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic("OCKP");
  if (r.u16() != 1) throw DataError(path + ": unsupported OCKP version");
  Checkpoint<T> ck;
  const auto n = r.u32();
  std::vector<std::pair<std::string, std::pair<int, int>>> table;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto name = r.str();
    const int rows = static_cast<int>(r.u32());
    const int cols = static_cast<int>(r.u32());
    table.emplace_back(std::move(name), std::make_pair(rows, cols));
  }
  for (const auto& [name, shape] : table) ck.params.add(name, shape.first, shape.second, ParamInit::Zero);
  for (int i = 0; i < ck.params.count(); ++i)
    for (auto& v : ck.params.at(i).data) v = static_cast<T>(r.f32());
  ck.has_opt = r.u16() != 0;
  if (ck.has_opt) {
    ck.opt.lr = r.f64();
    ck.opt.beta1 = r.f64();
    ck.opt.beta2 = r.f64();
    ck.opt.eps = r.f64();
    ck.opt.weight_decay = r.f64();
    ck.opt.step = r.i64();
    ck.opt.ensure_shapes(ck.params);
    for (auto& m : ck.opt.m)
      for (auto& v : m.data) v = static_cast<T>(r.f32());
    for (auto& m : ck.opt.v)
      for (auto& v : m.data) v = static_cast<T>(r.f32());
  }
  ck.config_json = r.str();
  return ck;
}

}  // namespace ocean
