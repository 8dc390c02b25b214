#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "central_approx/dense_families.hpp"
#include "central_approx/dense_model.hpp"
#include "central_approx/factor_graph.hpp"
#include "central_approx/replica_rs.hpp"

namespace central_approx {

inline constexpr int kSchemaVersion = 1;

/// Dense model block. `local`: "zero" | "field"; `global`: "zero" | "sk" |
/// "p-spin" | "self-quadratic" | "polynomial".
struct DenseSpec {
  int n = 1;
  std::vector<double> alphabet{0.0, 1.0};
  std::string local = "zero";
  double field = 0.0;
  std::string global = "zero";
  double beta = 0.0;
  int p = 2;
  double lambda = 0.0;
  std::vector<Monomial> terms;
};

struct FactorGraphSpec {
  int l = 2;
  int r = 2;
  std::vector<double> alphabet{0.0, 1.0};
  std::string factor = "uniform";
};

struct RsSpec {
  int n = 4;
  RSParams params;
  double beta = 0.5;
};

struct RunConfig {
  std::string command;
  std::string model = "none";  ///< dense | factor-graph | rs | none
  DenseSpec dense;
  FactorGraphSpec factor_graph;
  RsSpec rs;
  std::vector<std::int64_t> N;
  std::string format = "table";
  std::uint64_t seed = 0;
  double max_types = 1e8;
  std::optional<double> omega;
  std::optional<int> m;
};

/// Parses and validates a JSON config; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

DenseModel build_dense_model(const DenseSpec& spec);
Ensemble build_ensemble(const FactorGraphSpec& spec);

/// "100,200,400" -> {100, 200, 400}.
std::vector<std::int64_t> parse_n_list(const std::string& text);

}  // namespace central_approx
