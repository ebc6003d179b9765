#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frogsim/frog.hpp"
#include "frogsim/graph.hpp"

namespace frogsim {

enum class Recipe {
  susceptibility_scaling,
  cover_multi_walk,
  expander_susceptibility,
  cycle_scaling,
  complete_graph,
  tree_scaling,
  gadget_ring,
  hyper_dense,
  duality_check,
  oracle_suite,
  bounds_suite,
  percolation_suite,
};

std::string recipe_name(Recipe r);
std::optional<Recipe> recipe_from_name(const std::string& name);
std::vector<Recipe> all_recipes();

enum class Formula {
  cycle_t_lambda_n,    // ((1/lambda) log(lambda n))^2
  torus2_f,            // (2/pi) lambda^-1 log n log(lambda^-1 log n)
  torusd_log,          // d log n / (lambda rho(d))
  complete_log,        // lambda^-1 log n
  tree_scal,           // (depth/lambda) log(depth/lambda)
  expander_log_gamma,  // lambda^-1 gamma^-1 log n (unit constant)
  gadget_ring_min,     // min{max{d s, s^2}, n^2}, s = lambda^-1 log(lambda n / d)
};

struct TheoryParams {
  double n = 0.0;       // family size parameter (side, vertex count or depth)
  double d = 0.0;       // dimension or degree where applicable
  double lambda = 1.0;
  double gamma = 0.0;   // spectral gap for the expander formula
  double rho = 0.0;     // escape probability for d >= 3 tori
};

struct TheoryPrediction {
  Formula id;
  double value = 0.0;
  bool degenerate = false;      // boundary of the formula's regime
  bool regime_warning = false;  // soft warning, never fatal
  TheoryParams inputs;
};

TheoryPrediction theory(Formula id, const TheoryParams& params);

struct ExperimentSpec {
  Recipe recipe = Recipe::oracle_suite;
  std::vector<std::int64_t> sizes;  // n grid (meaning depends on recipe)
  std::vector<double> lambdas;
  int replicates = 1;
  std::uint64_t master_seed = 1;
  int workers = 1;
  HorizonConfig horizon;
  std::string csv_path;
  std::string json_path;
  bool strict = false;
  bool record_runtime = false;  // keeps default output byte-reproducible
  std::map<std::string, std::string> extra;

  double extra_num(const std::string& key, double fallback) const;
};

// Flat key = value text; '#' starts a comment. FROGSIM_SEED overrides seed.
ExperimentSpec parse_config_text(const std::string& text);
ExperimentSpec parse_config_file(const std::string& path);

struct Row {
  std::string recipe;
  std::string graph_family;
  std::int64_t n = 0;
  std::int64_t d = 0;
  double lambda = 0.0;
  std::int64_t replicate = 0;
  std::uint64_t seed = 0;
  std::string observable;
  double value = 0.0;
  bool censored = false;
  std::int64_t runtime_ms = 0;
  std::optional<std::string> error;  // per-replicate failures become rows
};

struct CellStats {
  std::string observable;
  std::int64_t n = 0;
  double lambda = 0.0;
  std::int64_t count = 0;     // uncensored rows
  std::int64_t censored = 0;
  std::int64_t errors = 0;
  double mean = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double ci_lo = 0.0;  // percentile bootstrap on the mean
  double ci_hi = 0.0;
};

struct Verdict {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double expected = 0.0;
  std::string detail;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<Row> rows;
  std::vector<CellStats> cells;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Verdict helpers shared by recipes and by downstream comparison of foreign
// result sets. Throws ShapeMismatch when the cells do not line up.
enum class TolerancePolicy { ratio_band, absolute_band, slope_test };
std::vector<Verdict> compare(const std::vector<CellStats>& cells,
                             const std::vector<TheoryPrediction>& predictions,
                             TolerancePolicy policy, double lo, double hi);

void write_csv(const ExperimentResult& result, std::ostream& out);
void write_csv_file(const ExperimentResult& result, const std::string& path);
std::string csv_to_string(const ExperimentResult& result);
void write_json_summary(const ExperimentResult& result, std::ostream& out);
void write_json_summary_file(const ExperimentResult& result, const std::string& path);

// Deterministic replicate scheduler: f(replicate) -> rows, executed on
// `workers` threads, folded in replicate order regardless of completion
// order. f must be a pure function of the replicate index.
std::vector<Row> parallel_replicates(int workers, std::int64_t count,
                                     const std::function<std::vector<Row>(std::int64_t)>& f);

}  // namespace frogsim
