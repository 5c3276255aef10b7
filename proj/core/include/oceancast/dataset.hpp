#pragma once

#include <cstdint>
#include <string>

#include "oceancast/fields.hpp"
#include "oceancast/stats.hpp"

namespace ocean {

// A directory of day-indexed OGF1 files plus manifest.json:
//   statics.ogf1, x_<day>.ogf1, a_<day>.ogf1, norm_stats.json
// The manifest records the channel schema, day range, grid shape and the
// generator settings the files were produced with.
class Dataset {
 public:
  explicit Dataset(const std::string& dir);

  const std::string& dir() const { return dir_; }
  SchemaPtr schema() const { return schema_; }
  const OceanGrid& grid() const { return grid_; }
  const FieldSet& statics() const { return statics_; }
  std::int64_t first_day() const { return first_day_; }
  std::int64_t n_days() const { return n_days_; }
  int year_length() const { return year_length_; }
  const std::string& manifest_json() const { return manifest_raw_; }

  bool has_day(std::int64_t day) const { return day >= first_day_ && day < first_day_ + n_days_; }
  FieldSet state(std::int64_t day) const;
  FieldSet forcing(std::int64_t day) const;

  NormStats load_stats() const;

  static std::string state_path(const std::string& dir, std::int64_t day);
  static std::string forcing_path(const std::string& dir, std::int64_t day);

 private:
  std::string dir_;
  SchemaPtr schema_;
  OceanGrid grid_;
  FieldSet statics_;
  std::int64_t first_day_ = 0;
  std::int64_t n_days_ = 0;
  int year_length_ = 365;
  std::string manifest_raw_;
};

}  // namespace ocean
