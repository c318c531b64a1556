#pragma once

// Model files: a JSON document holding dimensions, constants, expression grids
// and a sampling plan.
//
//   {
//     "dims": {"m": 1, "n": 2},
//     "constants": {"mass": 1, "charge": 0.5, "light_speed": 1, "einstein_k": 1},
//     "h": [["1"]],
//     "phi": [["1", "0"], ["0", "sin(x1)^2"]],
//     "A": [["x2"], ["-x1"]],            // A_(i)^(a), n rows of m
//     "P": "0",
//     "sampling": {"seed": 7, "count": 100,
//                  "t_box": [[-1, 1]], "x_box": [[0.3, 2.8], [0, 6.3]], "p_box": [-2, 2]}
//   }
//
// einstein_k is optional (default 1). A box is either one [lo, hi] range shared
// by every coordinate of its kind or a list of per-coordinate ranges (p_box
// lists are row-major over (i, a)). Expression entries may also be numbers.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "polyham/hamilton.hpp"

namespace polyham {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct SamplingPlan {
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::vector<Range> t_box;  // m entries
  std::vector<Range> x_box;  // n entries
  std::vector<Range> p_box;  // n*m entries, row-major (i, a)
};

struct ModelConfig {
  Dims dims;
  PhysicalConstants constants;
  double einstein_k = 1.0;
  std::vector<std::string> h, phi, a;  // row-major
  std::string p;
  SamplingPlan sampling;
};

struct LoadedModel {
  ModelConfig config;
  ElectrodynamicsModel model;
  std::string model_hash;  // 16 hex digits
};

// Offending location inside a config file. line/column are 1-based; offset is
// the byte offset in the file, or in the expression string for expression errors.
class ConfigParseError : public ParseError {
 public:
  ConfigParseError(std::string file, std::size_t line, std::size_t column, std::size_t offset,
                   const std::string& what);
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  std::size_t offset() const { return offset_; }

 private:
  std::string file_;
  std::size_t line_, column_, offset_;
};

// Throws IoError, ParseError, SchemaError, ValidationError.
LoadedModel load_config(const std::string& path);
// Same, from text; `name` only labels errors.
LoadedModel parse_config(std::string_view text, const std::string& name = "<config>");

// FNV-1a 64 of the canonical (sorted-key, compact) serialization.
std::string model_hash(std::string_view canonical_json);

// Uniform samples from the plan's boxes.
std::uint64_t splitmix64(std::uint64_t x);
double uniform01(std::uint64_t bits);
JetPoint sample_point(const SamplingPlan& plan, std::uint64_t stream_seed);

}  // namespace polyham
