#include "frogsim/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "frogsim/estimators.hpp"
#include "frogsim/multiwalk.hpp"
#include "frogsim/spectral.hpp"
#include "frogsim/stats.hpp"

namespace frogsim {

namespace {

const std::pair<Recipe, const char*> kRecipeNames[] = {
    {Recipe::susceptibility_scaling, "susceptibility_scaling"},
    {Recipe::cover_multi_walk, "cover_multi_walk"},
    {Recipe::expander_susceptibility, "expander_susceptibility"},
    {Recipe::cycle_scaling, "cycle_scaling"},
    {Recipe::complete_graph, "complete_graph"},
    {Recipe::tree_scaling, "tree_scaling"},
    {Recipe::gadget_ring, "gadget_ring"},
    {Recipe::hyper_dense, "hyper_dense"},
    {Recipe::duality_check, "duality_check"},
    {Recipe::oracle_suite, "oracle_suite"},
    {Recipe::bounds_suite, "bounds_suite"},
    {Recipe::percolation_suite, "percolation_suite"},
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string recipe_name(Recipe r) {
  for (const auto& [rec, name] : kRecipeNames) {
    if (rec == r) return name;
  }
  return "unknown";
}

std::optional<Recipe> recipe_from_name(const std::string& name) {
  for (const auto& [rec, n] : kRecipeNames) {
    if (name == n) return rec;
  }
  return std::nullopt;
}

std::vector<Recipe> all_recipes() {
  std::vector<Recipe> out;
  for (const auto& [rec, name] : kRecipeNames) out.push_back(rec);
  return out;
}

TheoryPrediction theory(Formula id, const TheoryParams& p) {
  TheoryPrediction out;
  out.id = id;
  out.inputs = p;
  switch (id) {
    case Formula::cycle_t_lambda_n: {
      const double arg = p.lambda * p.n;
      if (arg <= 1.0) {
        out.degenerate = true;
        out.value = 0.0;
        return out;
      }
      const double base = std::log(arg) / p.lambda;
      out.value = base * base;
      return out;
    }
    case Formula::torus2_f: {
      const double inner = std::log(p.n) / p.lambda;
      if (inner <= 1.0) {
        out.degenerate = true;
        out.value = 0.0;
        return out;
      }
      out.value = (2.0 / std::numbers::pi) * inner * std::log(inner);
      out.regime_warning = p.lambda >= std::log(p.n);
      return out;
    }
    case Formula::torusd_log: {
      if (p.rho <= 0.0 || p.rho >= 1.0) throw InvalidParams("torusd_log needs rho in (0,1)");
      if (p.d < 3.0) throw InvalidParams("torusd_log is the d >= 3 formula");
      out.value = p.d * std::log(p.n) / (p.lambda * p.rho);
      const double vol = std::pow(p.n, p.d);
      out.regime_warning =
          p.lambda * vol < 10.0 * std::log(p.n) || p.lambda > std::log(p.n);
      return out;
    }
    case Formula::complete_log:
      out.value = std::log(p.n) / p.lambda;
      return out;
    case Formula::tree_scal: {
      const double ratio = p.n / p.lambda;  // n plays the role of the depth
      if (ratio <= 1.0) {
        out.degenerate = true;
        out.value = 0.0;
        return out;
      }
      out.value = ratio * std::log(ratio);
      return out;
    }
    case Formula::expander_log_gamma:
      if (p.gamma <= 0.0) throw InvalidParams("expander formula needs gamma > 0");
      out.value = std::log(p.n) / (p.lambda * p.gamma);
      return out;
    case Formula::gadget_ring_min: {
      const double arg = p.lambda * p.n / p.d;
      if (arg <= 1.0) {
        out.degenerate = true;
        out.value = 0.0;
        return out;
      }
      const double s = std::log(arg) / p.lambda;
      out.value = std::min(std::max(p.d * s, s * s), p.n * p.n);
      return out;
    }
  }
  throw InvalidParams("unknown theory formula");
}

double ExperimentSpec::extra_num(const std::string& key, double fallback) const {
  const auto it = extra.find(key);
  if (it == extra.end()) return fallback;
  return std::stod(it->second);
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentSpec parse_config_text(const std::string& text) {
  ExperimentSpec spec;
  std::istringstream in(text);
  std::string line;
  bool have_recipe = false;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError("empty key or value: " + line);
    try {
      if (key == "recipe") {
        const auto r = recipe_from_name(value);
        if (!r) throw ConfigError("unknown recipe: " + value);
        spec.recipe = *r;
        have_recipe = true;
      } else if (key == "n") {
        spec.sizes.clear();
        for (const auto& part : split_list(value)) spec.sizes.push_back(std::stoll(part));
      } else if (key == "lambda") {
        spec.lambdas.clear();
        for (const auto& part : split_list(value)) spec.lambdas.push_back(std::stod(part));
      } else if (key == "replicates") {
        spec.replicates = std::stoi(value);
      } else if (key == "seed") {
        spec.master_seed = std::stoull(value);
      } else if (key == "workers") {
        spec.workers = std::stoi(value);
      } else if (key == "horizon_cap") {
        spec.horizon.cap = std::stoll(value);
      } else if (key == "horizon_initial") {
        spec.horizon.initial = std::stoll(value);
      } else if (key == "csv") {
        spec.csv_path = value;
      } else if (key == "json") {
        spec.json_path = value;
      } else if (key == "strict") {
        spec.strict = value == "1" || value == "true";
      } else if (key == "record_runtime") {
        spec.record_runtime = value == "1" || value == "true";
      } else {
        spec.extra[key] = value;
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("bad value for " + key + ": " + value + " (" + e.what() + ")");
    }
  }
  if (!have_recipe) throw ConfigError("config must name a recipe");
  if (spec.replicates < 1) throw ConfigError("replicates must be >= 1");
  if (spec.workers < 1) throw ConfigError("workers must be >= 1");
  if (const char* env = std::getenv("FROGSIM_SEED")) {
    spec.master_seed = std::stoull(env);
  }
  return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<Row> parallel_replicates(int workers, std::int64_t count,
                                     const std::function<std::vector<Row>(std::int64_t)>& f) {
  std::vector<std::vector<Row>> per(static_cast<std::size_t>(count));
  if (workers <= 1) {
    for (std::int64_t r = 0; r < count; ++r) per[static_cast<std::size_t>(r)] = f(r);
  } else {
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::int64_t r = next.fetch_add(1);
        if (r >= count) return;
        try {
          per[static_cast<std::size_t>(r)] = f(r);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int k = std::min<std::int64_t>(workers, count);
    pool.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  // Fold in replicate-id order regardless of completion order.
  std::vector<Row> rows;
  for (auto& chunk : per) rows.insert(rows.end(), chunk.begin(), chunk.end());
  return rows;
}

bool ExperimentResult::all_pass() const {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

namespace {

CellStats summarize(const std::string& observable, std::int64_t n, double lambda,
                    const std::vector<Row>& rows, StreamKey bootstrap_key) {
  CellStats c;
  c.observable = observable;
  c.n = n;
  c.lambda = lambda;
  std::vector<double> vals;
  for (const auto& r : rows) {
    if (r.observable != observable || r.n != n || r.lambda != lambda) continue;
    if (r.error) {
      ++c.errors;
      continue;
    }
    if (r.censored) {
      ++c.censored;
      continue;
    }
    vals.push_back(r.value);
  }
  c.count = static_cast<std::int64_t>(vals.size());
  if (!vals.empty()) {
    c.mean = mean(vals);
    c.median = median(vals);
    c.q10 = quantile(vals, 0.10);
    c.q90 = quantile(vals, 0.90);
    const auto ci = bootstrap_mean_ci(vals, bootstrap_key);
    c.ci_lo = ci.lo;
    c.ci_hi = ci.hi;
  }
  return c;
}

// Susceptibility sample loop shared by every S-observing recipe. The graph is
// built once per size; each replicate samples a field and searches S.
struct SCellRequest {
  Graph graph;
  std::int64_t n_label;
  double lambda;
  bool random_origin = true;  // uniform per replicate; rooted families pin it
};

// Recipes default to a uniform-random origin per replicate; `origin = fixed`
// or `origin = <vertex id>` in the config pins it instead.
Vertex replicate_origin(const ExperimentSpec& spec, const SCellRequest& cell,
                        std::uint64_t rep_id) {
  const auto it = spec.extra.find("origin");
  if (it != spec.extra.end()) {
    if (it->second == "fixed") return cell.graph.origin;
    if (it->second != "random") return static_cast<Vertex>(std::stol(it->second));
  } else if (!cell.random_origin) {
    return cell.graph.origin;
  }
  const StreamKey key = derive_key(spec.master_seed, RngDomain::generator, 0x0f1a);
  return static_cast<Vertex>(prf_u64(key, rep_id, 1) %
                             static_cast<std::uint64_t>(cell.graph.n));
}

std::vector<Row> run_s_cells(const ExperimentSpec& spec, const std::vector<SCellRequest>& cells) {
  std::vector<Row> rows;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const auto& cell = cells[ci];
    auto f = [&, ci](std::int64_t rep) -> std::vector<Row> {
      Row row;
      row.recipe = recipe_name(spec.recipe);
      row.graph_family = family_name(cell.graph.family);
      row.n = cell.n_label;
      row.d = cell.graph.degree;
      row.lambda = cell.lambda;
      row.replicate = rep;
      row.seed = spec.master_seed;
      row.observable = "s_value";
      const auto t0 = std::chrono::steady_clock::now();
      try {
        // Distinct replicate ids per cell keep fields independent across cells.
        const std::uint64_t rep_id = (static_cast<std::uint64_t>(ci) << 32) |
                                     static_cast<std::uint64_t>(rep);
        const Vertex origin = replicate_origin(spec, cell, rep_id);
        ParticleField field(cell.graph, cell.lambda, origin, spec.master_seed, rep_id);
        FrogRealization real(cell.graph, field, cell.lambda, WalkKernel::srw, spec.horizon);
        const auto s = real.susceptibility();
        row.value = static_cast<double>(s.s_value);
        row.censored = s.censored;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      if (spec.record_runtime) {
        row.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      }
      return {row};
    };
    auto chunk = parallel_replicates(spec.workers, spec.replicates, f);
    rows.insert(rows.end(), chunk.begin(), chunk.end());
  }
  return rows;
}

void summarize_s_cells(ExperimentResult& out, const std::vector<SCellRequest>& cells) {
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    out.cells.push_back(summarize("s_value", cells[ci].n_label, cells[ci].lambda, out.rows,
                                  derive_key(out.spec.master_seed, RngDomain::bootstrap, ci)));
  }
}

double fitted_constant_spread(const std::vector<double>& ratios) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double r : ratios) {
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------
// Recipes
// ---------------------------------------------------------------------------

void run_oracle_suite(const ExperimentSpec& spec, ExperimentResult& out) {
  struct Case {
    Graph graph;
    const char* tag;
  };
  std::vector<Case> cases;
  cases.push_back({make_cycle(8), "cycle8"});
  cases.push_back({make_torus(2, 3), "torus2x3"});
  cases.push_back({make_complete(5), "k5"});
  cases.push_back({make_dary_tree(2, 3), "tree2x3"});
  const double lambdas[3] = {0.5, 1.0, 2.0};
  std::int64_t disagreements = 0;

  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    auto f = [&, ci](std::int64_t rep) -> std::vector<Row> {
      const std::uint64_t rep_id = (static_cast<std::uint64_t>(ci) << 32) |
                                   static_cast<std::uint64_t>(rep);
      const StreamKey pick = derive_key(spec.master_seed, RngDomain::estimator, rep_id);
      const double lambda = lambdas[prf_u64(pick, 1, 0) % 3];
      const auto tau = static_cast<Step>(prf_u64(pick, 2, 0) % 13);
      Row row;
      row.recipe = recipe_name(spec.recipe);
      row.graph_family = family_name(c.graph.family);
      row.n = c.graph.n;
      row.d = c.graph.degree;
      row.lambda = lambda;
      row.replicate = rep;
      row.seed = spec.master_seed;
      row.observable = "oracle_agree";
      try {
        ParticleField field(c.graph, lambda, c.graph.origin, spec.master_seed, rep_id);
        FrogRealization real(c.graph, field, lambda, WalkKernel::srw, spec.horizon);
        const auto engine = real.activation_times(tau);
        RestrictedVariant variant;
        variant.kind = RestrictedKind::standard;
        variant.tau = tau;
        const auto oracle = brute_force_frog(c.graph, field, lambda, variant, WalkKernel::srw,
                                             1'000'000);
        row.value = engine.at == oracle.first_visit ? 1.0 : 0.0;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      return {row};
    };
    auto chunk = parallel_replicates(spec.workers, spec.replicates, f);
    out.rows.insert(out.rows.end(), chunk.begin(), chunk.end());
  }
  for (const auto& r : out.rows) {
    if (r.observable == "oracle_agree" && (r.error || r.value != 1.0)) ++disagreements;
  }
  Verdict v;
  v.name = "oracle-equivalence";
  v.observed = static_cast<double>(disagreements);
  v.expected = 0.0;
  v.pass = disagreements == 0;
  v.detail = "activation_times vs brute_force_frog exact label equality";
  out.verdicts.push_back(v);
}

void run_duality_check(const ExperimentSpec& spec, ExperimentResult& out) {
  struct Case {
    Graph graph;
    std::vector<int> s_grid;
    std::vector<Step> t_grid;
  };
  std::vector<Case> cases;
  cases.push_back({make_torus(2, 10),
                   {1, 2, 3, 4, 6, 8, 12, 16, 24, 32},
                   {1, 2, 4, 8, 16, 32, 64, 128, 256, 512}});
  cases.push_back({make_complete(8),
                   {1, 2, 3, 4, 5, 6, 8, 10, 12, 16},
                   {0, 1, 2, 3, 4, 6, 8, 12, 16, 24}});
  std::int64_t violations = 0;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    const Step t_max = *std::max_element(c.t_grid.begin(), c.t_grid.end());
    auto f = [&, ci](std::int64_t rep) -> std::vector<Row> {
      const std::uint64_t rep_id = (static_cast<std::uint64_t>(ci) << 32) |
                                   static_cast<std::uint64_t>(rep);
      Row row;
      row.recipe = recipe_name(spec.recipe);
      row.graph_family = family_name(c.graph.family);
      row.n = c.graph.n;
      row.d = c.graph.degree;
      row.lambda = 0.0;
      row.replicate = rep;
      row.seed = spec.master_seed;
      row.observable = "duality_violations";
      try {
        // D from the step-synchronous reader, C from the appending reader;
        // both consume the identical counter-based walker list.
        std::vector<Step> d_of_s;
        for (int s : c.s_grid) {
          const auto d = cover_fixed_walkers(c.graph, s, spec.master_seed, rep_id, t_max + 1);
          d_of_s.push_back(d.censored ? kNever : d.value);
        }
        std::int64_t bad = 0;
        for (Step t : c.t_grid) {
          const auto cv = cover_fixed_length(c.graph, t, spec.master_seed, rep_id, 1 << 14);
          const std::int64_t c_t = cv.censored ? std::numeric_limits<std::int64_t>::max()
                                               : cv.walkers;
          for (std::size_t si = 0; si < c.s_grid.size(); ++si) {
            const bool d_gt = d_of_s[si] > t;
            const bool c_gt = c_t > c.s_grid[si];
            if (d_gt != c_gt) ++bad;
          }
        }
        row.value = static_cast<double>(bad);
      } catch (const std::exception& e) {
        row.error = e.what();
        row.value = 1.0;
      }
      return {row};
    };
    auto chunk = parallel_replicates(spec.workers, spec.replicates, f);
    out.rows.insert(out.rows.end(), chunk.begin(), chunk.end());
  }
  for (const auto& r : out.rows) {
    if (r.observable == "duality_violations") violations += static_cast<std::int64_t>(r.value);
  }
  Verdict v;
  v.name = "pathwise-duality";
  v.observed = static_cast<double>(violations);
  v.expected = 0.0;
  v.pass = violations == 0;
  v.detail = "D(G,s) > t iff C(G,t) > s on shared walker realizations";
  out.verdicts.push_back(v);
}

void run_complete_graph(const ExperimentSpec& spec, ExperimentResult& out) {
  std::vector<SCellRequest> cells;
  const auto sizes = spec.sizes.empty() ? std::vector<std::int64_t>{250, 500, 1000} : spec.sizes;
  const auto lambdas = spec.lambdas.empty() ? std::vector<double>{1.0} : spec.lambdas;
  for (std::int64_t n : sizes) {
    for (double l : lambdas) cells.push_back({make_complete(static_cast<Vertex>(n)), n, l});
  }
  out.rows = run_s_cells(spec, cells);
  summarize_s_cells(out, cells);
  const double lo = spec.extra_num("ratio_lo", 0.8);
  const double hi = spec.extra_num("ratio_hi", 1.2);
  std::vector<TheoryPrediction> preds;
  for (const auto& cell : cells) {
    TheoryParams p;
    p.n = static_cast<double>(cell.n_label);
    p.lambda = cell.lambda;
    preds.push_back(theory(Formula::complete_log, p));
  }
  auto verdicts = compare(out.cells, preds, TolerancePolicy::ratio_band, lo, hi);
  out.verdicts.insert(out.verdicts.end(), verdicts.begin(), verdicts.end());
}

void run_cycle_scaling(const ExperimentSpec& spec, ExperimentResult& out) {
  std::vector<SCellRequest> cells;
  const auto sizes = spec.sizes.empty()
                         ? std::vector<std::int64_t>{256, 512, 1024, 2048, 4096, 8192}
                         : spec.sizes;
  const auto lambdas = spec.lambdas.empty() ? std::vector<double>{1.0} : spec.lambdas;
  for (std::int64_t n : sizes) {
    for (double l : lambdas) cells.push_back({make_cycle(static_cast<Vertex>(n)), n, l});
  }
  out.rows = run_s_cells(spec, cells);
  summarize_s_cells(out, cells);
  // Slope of log mean-S against log of the predicted scale (a tilde-claim:
  // only the exponent and constant stability are asserted).
  std::vector<double> log_pred, log_mean, ratios;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    TheoryParams p;
    p.n = static_cast<double>(cells[i].n_label);
    p.lambda = cells[i].lambda;
    const auto pred = theory(Formula::cycle_t_lambda_n, p);
    if (pred.value <= 0.0 || out.cells[i].mean <= 0.0) continue;
    log_pred.push_back(std::log(pred.value));
    log_mean.push_back(std::log(out.cells[i].mean));
    ratios.push_back(out.cells[i].mean / pred.value);
  }
  const auto fit = linear_fit(log_pred, log_mean);
  Verdict slope;
  slope.name = "cycle-scaling-slope";
  slope.observed = fit.slope;
  slope.expected = 1.0;
  slope.pass = fit.slope >= spec.extra_num("slope_lo", 0.7) &&
               fit.slope <= spec.extra_num("slope_hi", 1.3);
  slope.detail = "log mean-S regressed on log lambda^-2 log^2(lambda n)";
  out.verdicts.push_back(slope);
  Verdict stable;
  stable.name = "cycle-scaling-constant";
  stable.observed = fitted_constant_spread(ratios);
  stable.expected = spec.extra_num("constant_spread", 2.0);
  stable.pass = stable.observed <= stable.expected;
  stable.detail = "max/min of fitted constants across the n grid";
  out.verdicts.push_back(stable);
}

void run_susceptibility_scaling(const ExperimentSpec& spec, ExperimentResult& out) {
  const int dim = static_cast<int>(spec.extra_num("dim", 3));
  const auto sizes = spec.sizes.empty() ? std::vector<std::int64_t>{20, 30, 40} : spec.sizes;
  const auto lambdas = spec.lambdas.empty() ? std::vector<double>{1.0} : spec.lambdas;
  std::vector<SCellRequest> cells;
  for (std::int64_t n : sizes) {
    for (double l : lambdas) cells.push_back({make_torus(dim, static_cast<int>(n)), n, l});
  }
  out.rows = run_s_cells(spec, cells);
  summarize_s_cells(out, cells);
  std::vector<TheoryPrediction> preds;
  std::optional<EscapeEstimate> rho;
  if (dim >= 3) rho = rho_estimate(dim, RhoMethod::green_series);
  for (const auto& cell : cells) {
    TheoryParams p;
    p.n = static_cast<double>(cell.n_label);
    p.d = dim;
    p.lambda = cell.lambda;
    if (dim >= 3) {
      p.rho = rho->estimate;
      preds.push_back(theory(Formula::torusd_log, p));
    } else {
      preds.push_back(theory(Formula::torus2_f, p));
    }
  }
  if (dim >= 3) {
    auto verdicts = compare(out.cells, preds, TolerancePolicy::ratio_band,
                            spec.extra_num("ratio_lo", 0.6), spec.extra_num("ratio_hi", 1.4));
    out.verdicts.insert(out.verdicts.end(), verdicts.begin(), verdicts.end());
  } else {
    // The 2-d scale converges slowly and its proven lower constant is 1/16
    // of the upper one, so the bands are reported separately: stay above the
    // 1/16 band and keep the fitted constant stable across the grid.
    std::vector<double> ratios;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double ratio = preds[i].value > 0.0 ? out.cells[i].mean / preds[i].value : 0.0;
      ratios.push_back(ratio);
      Verdict v;
      v.name = "torus2-lower-band-n" + std::to_string(cells[i].n_label);
      v.observed = ratio;
      v.expected = 1.0 / 16.0;
      v.pass = ratio >= 1.0 / 16.0;
      v.detail = "mean S over f(n,lambda) above the 1/16 band";
      out.verdicts.push_back(v);
    }
    Verdict stable;
    stable.name = "torus2-constant-stability";
    stable.observed = fitted_constant_spread(ratios);
    stable.expected = spec.extra_num("constant_spread", 1.5);
    stable.pass = stable.observed <= stable.expected;
    stable.detail = "max/min fitted constant across the n grid";
    out.verdicts.push_back(stable);
  }
  if (spec.extra_num("check_spread", 0) != 0) {
    // Relative dispersion of S must not grow with n (concentration).
    std::vector<double> cv;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::vector<double> vals;
      for (const auto& r : out.rows) {
        if (r.observable == "s_value" && r.n == cells[i].n_label &&
            r.lambda == cells[i].lambda && !r.censored && !r.error) {
          vals.push_back(r.value);
        }
      }
      cv.push_back(vals.size() > 1 ? sample_stddev(vals) / mean(vals) : 0.0);
    }
    const double slack = spec.extra_num("spread_slack", 1.15);
    bool ok = true;
    for (std::size_t i = 1; i < cv.size(); ++i) {
      if (cv[i] > cv[i - 1] * slack) ok = false;
    }
    Verdict v;
    v.name = "susceptibility-spread";
    v.observed = cv.empty() ? 0.0 : cv.back();
    v.expected = cv.empty() ? 0.0 : cv.front();
    v.pass = ok;
    v.detail = "coefficient of variation non-increasing across the n grid (slack " +
               format_double(slack) + ")";
    out.verdicts.push_back(v);
  }
}

void run_cover_multi_walk(const ExperimentSpec& spec, ExperimentResult& out) {
  const int dim = static_cast<int>(spec.extra_num("dim", 2));
  const auto sizes = spec.sizes.empty() ? std::vector<std::int64_t>{10, 14} : spec.sizes;
  const int walkers = static_cast<int>(spec.extra_num("walkers", 0));
  std::optional<EscapeEstimate> rho;
  if (dim >= 3) rho = rho_estimate(dim, RhoMethod::green_series);
  for (std::size_t ci = 0; ci < sizes.size(); ++ci) {
    const auto side = static_cast<int>(sizes[ci]);
    const Graph g = make_torus(dim, side);
    const int m = walkers > 0 ? walkers : std::max(1, g.n / 8);
    auto f = [&, ci, m](std::int64_t rep) -> std::vector<Row> {
      const std::uint64_t rep_id = (static_cast<std::uint64_t>(ci) << 32) |
                                   static_cast<std::uint64_t>(rep);
      Row row;
      row.recipe = recipe_name(spec.recipe);
      row.graph_family = family_name(g.family);
      row.n = sizes[ci];
      row.d = g.degree;
      row.lambda = static_cast<double>(m);  // lambda column carries m here
      row.replicate = rep;
      row.seed = spec.master_seed;
      row.observable = "d_value";
      try {
        const auto d = cover_fixed_walkers(g, m, spec.master_seed, rep_id, spec.horizon.cap);
        row.value = static_cast<double>(d.value);
        row.censored = d.censored;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      return {row};
    };
    auto chunk = parallel_replicates(spec.workers, spec.replicates, f);
    out.rows.insert(out.rows.end(), chunk.begin(), chunk.end());
    out.cells.push_back(summarize("d_value", sizes[ci], static_cast<double>(m), out.rows,
                                  derive_key(spec.master_seed, RngDomain::bootstrap, ci)));
    // Desk-scale trend check against the cover-time prediction.
    const double vol = std::pow(static_cast<double>(side), dim);
    double pred;
    if (dim >= 3) {
      pred = dim * vol * std::log(static_cast<double>(side)) / (m * rho->estimate);
    } else {
      const double logn = std::log(static_cast<double>(side));
      pred = (2.0 * vol * logn / (std::numbers::pi * m)) * std::log(vol * logn / m);
    }
    Verdict v;
    v.name = "cover-multiwalk-ratio-n" + std::to_string(sizes[ci]);
    v.observed = out.cells.back().mean / pred;
    v.expected = 1.0;
    v.pass = v.observed >= spec.extra_num("ratio_lo", 0.4) &&
             v.observed <= spec.extra_num("ratio_hi", 2.5);
    v.detail = "mean D(G,m) over prediction";
    out.verdicts.push_back(v);
  }
}

void run_expander_susceptibility(const ExperimentSpec& spec, ExperimentResult& out) {
  const int degree = static_cast<int>(spec.extra_num("degree", 4));
  const auto sizes = spec.sizes.empty() ? std::vector<std::int64_t>{256, 512, 1024} : spec.sizes;
  const auto lambdas = spec.lambdas.empty() ? std::vector<double>{1.0} : spec.lambdas;
  std::vector<SCellRequest> cells;
  std::vector<double> gaps;
  for (std::int64_t n : sizes) {
    Graph g = make_random_regular(static_cast<Vertex>(n), degree,
                                  spec.master_seed ^ static_cast<std::uint64_t>(n));
    gaps.push_back(spectral_gap(g).gamma);
    for (double l : lambdas) cells.push_back({g, n, l});
  }
  out.rows = run_s_cells(spec, cells);
  summarize_s_cells(out, cells);
  std::vector<double> fitted;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double gamma = gaps[i / lambdas.size()];
    const double c = out.cells[i].mean * cells[i].lambda * gamma /
                     std::log(static_cast<double>(cells[i].n_label));
    fitted.push_back(c);
    Verdict v;
    v.name = "expander-fitted-C-n" + std::to_string(cells[i].n_label);
    v.observed = c;
    v.expected = spec.extra_num("c_max", 8.0);
    v.pass = c > 0.0 && c <= v.expected;
    v.detail = "mean S * lambda * gamma / log n bounded";
    out.verdicts.push_back(v);
  }
  Verdict stable;
  stable.name = "expander-constant-stability";
  stable.observed = fitted_constant_spread(fitted);
  stable.expected = spec.extra_num("constant_spread", 2.5);
  stable.pass = stable.observed <= stable.expected;
  stable.detail = "max/min fitted constant across the n grid";
  out.verdicts.push_back(stable);
}

void run_tree_scaling(const ExperimentSpec& spec, ExperimentResult& out) {
  const int arity = static_cast<int>(spec.extra_num("arity", 2));
  const auto depths = spec.sizes.empty() ? std::vector<std::int64_t>{4, 5, 6} : spec.sizes;
  const auto lambdas = spec.lambdas.empty() ? std::vector<double>{1.0} : spec.lambdas;
  std::vector<SCellRequest> cells;
  for (std::int64_t depth : depths) {
    for (double l : lambdas) {
      // Rooted family: the origin stays at the root.
      cells.push_back({make_dary_tree(arity, static_cast<int>(depth)), depth, l, false});
    }
  }
  out.rows = run_s_cells(spec, cells);
  summarize_s_cells(out, cells);
  std::vector<double> ratios;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    TheoryParams p;
    p.n = static_cast<double>(cells[i].n_label);  // depth
    p.lambda = cells[i].lambda;
    const auto pred = theory(Formula::tree_scal, p);
    if (pred.value > 0.0 && out.cells[i].mean > 0.0) {
      ratios.push_back(out.cells[i].mean / pred.value);
    }
  }
  Verdict stable;
  stable.name = "tree-scaling-constant";
  stable.observed = fitted_constant_spread(ratios);
  stable.expected = spec.extra_num("constant_spread", 2.5);
  stable.pass = stable.observed <= stable.expected;
  stable.detail = "mean S over (depth/lambda) log(depth/lambda), stability across depths";
  out.verdicts.push_back(stable);
}

void run_gadget_ring(const ExperimentSpec& spec, ExperimentResult& out) {
  const int degree = static_cast<int>(spec.extra_num("degree", 4));
  const auto sizes = spec.sizes.empty() ? std::vector<std::int64_t>{30, 60, 120} : spec.sizes;
  const auto lambdas = spec.lambdas.empty() ? std::vector<double>{1.0} : spec.lambdas;
  std::vector<SCellRequest> cells;
  for (std::int64_t n : sizes) {
    for (double l : lambdas) {
      cells.push_back({make_gadget_ring(degree, static_cast<Vertex>(n)), n, l});
    }
  }
  out.rows = run_s_cells(spec, cells);
  summarize_s_cells(out, cells);
  std::vector<double> ratios;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    TheoryParams p;
    p.n = static_cast<double>(cells[i].n_label);
    p.d = degree;
    p.lambda = cells[i].lambda;
    const auto pred = theory(Formula::gadget_ring_min, p);
    if (pred.value > 0.0 && out.cells[i].mean > 0.0) {
      ratios.push_back(out.cells[i].mean / pred.value);
    }
  }
  Verdict stable;
  stable.name = "gadget-ring-constant";
  stable.observed = fitted_constant_spread(ratios);
  stable.expected = spec.extra_num("constant_spread", 3.0);
  stable.pass = stable.observed <= stable.expected;
  stable.detail = "mean S over min{max{ds, s^2}, n^2}, stability across the n grid";
  out.verdicts.push_back(stable);
}

void run_hyper_dense(const ExperimentSpec& spec, ExperimentResult& out) {
  const int degree = static_cast<int>(spec.extra_num("degree", 4));
  const double delta = spec.extra_num("delta", 0.5);
  const auto sizes = spec.sizes.empty() ? std::vector<std::int64_t>{512} : spec.sizes;
  for (std::size_t ci = 0; ci < sizes.size(); ++ci) {
    const auto n = static_cast<Vertex>(sizes[ci]);
    const Graph g = make_random_regular(n, degree, spec.master_seed ^ static_cast<std::uint64_t>(n));
    const double lambda = (1.0 + delta) * degree * std::log(static_cast<double>(n));
    auto f = [&, ci, lambda](std::int64_t rep) -> std::vector<Row> {
      const std::uint64_t rep_id = (static_cast<std::uint64_t>(ci) << 32) |
                                   static_cast<std::uint64_t>(rep);
      Row row;
      row.recipe = recipe_name(spec.recipe);
      row.graph_family = family_name(g.family);
      row.n = sizes[ci];
      row.d = degree;
      row.lambda = lambda;
      row.replicate = rep;
      row.seed = spec.master_seed;
      row.observable = "s_gt_1";
      try {
        // The one-step bound holds uniformly over origins; sweep them.
        const StreamKey okey = derive_key(spec.master_seed, RngDomain::generator, 0x0f1a);
        const auto origin =
            static_cast<Vertex>(prf_u64(okey, rep_id, 1) % static_cast<std::uint64_t>(g.n));
        ParticleField field(g, lambda, origin, spec.master_seed, rep_id);
        FrogRealization real(g, field, lambda, WalkKernel::srw, spec.horizon);
        row.value = real.covers(1) ? 0.0 : 1.0;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      return {row};
    };
    auto chunk = parallel_replicates(spec.workers, spec.replicates, f);
    out.rows.insert(out.rows.end(), chunk.begin(), chunk.end());
    out.cells.push_back(summarize("s_gt_1", sizes[ci], lambda, out.rows,
                                  derive_key(spec.master_seed, RngDomain::bootstrap, ci)));
    Verdict v;
    v.name = "hyper-dense-n" + std::to_string(sizes[ci]);
    v.observed = out.cells.back().mean;
    v.expected = 10.0 * std::pow(static_cast<double>(n), -delta);
    v.pass = v.observed <= v.expected;
    v.detail = "empirical P[S > 1] at lambda = (1+delta) d log n, desk-scale slack 10";
    out.verdicts.push_back(v);
  }
}

void run_bounds_suite(const ExperimentSpec& spec, ExperimentResult& out) {
  const auto triples = static_cast<std::int64_t>(spec.extra_num("triples", 1000));
  std::int64_t violations = 0;
  auto f = [&](std::int64_t rep) -> std::vector<Row> {
    const StreamKey key = derive_key(spec.master_seed, RngDomain::estimator,
                                     static_cast<std::uint64_t>(rep));
    const auto n = static_cast<std::int64_t>(
        std::floor(std::exp(prf_uniform(key, 1, 0) * std::log(10000.0))) + 1);
    const double p = 0.01 + 0.98 * prf_uniform(key, 2, 0);
    const double delta = 3.0 * prf_uniform(key, 3, 0);
    Row row;
    row.recipe = recipe_name(spec.recipe);
    row.graph_family = "binomial";
    row.n = n;
    row.d = 0;
    row.lambda = p;
    row.replicate = rep;
    row.seed = spec.master_seed;
    row.observable = "ld_sound";
    try {
      const auto rep_report = ld_bounds(n, p, delta);
      row.value = (rep_report.upper_sound && rep_report.lower_sound) ? 1.0 : 0.0;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    return {row};
  };
  out.rows = parallel_replicates(spec.workers, triples, f);
  for (const auto& r : out.rows) {
    if (r.error || r.value != 1.0) ++violations;
  }
  Verdict v;
  v.name = "chernoff-soundness";
  v.observed = static_cast<double>(violations);
  v.expected = 0.0;
  v.pass = violations == 0;
  v.detail = "exact binomial tails below both bound forms on randomized triples";
  out.verdicts.push_back(v);
}

void run_percolation_suite(const ExperimentSpec& spec, ExperimentResult& out) {
  const int dim = static_cast<int>(spec.extra_num("dim", 2));
  const double p = spec.extra_num("p", 0.95);
  const double prefactor = spec.extra_num("threshold_prefactor", 1.0);
  const auto sizes = spec.sizes.empty() ? std::vector<std::int64_t>{128} : spec.sizes;
  for (std::size_t ci = 0; ci < sizes.size(); ++ci) {
    const Graph g = make_torus(dim, static_cast<int>(sizes[ci]));
    auto f = [&, ci](std::int64_t rep) -> std::vector<Row> {
      const std::uint64_t rep_id = (static_cast<std::uint64_t>(ci) << 32) |
                                   static_cast<std::uint64_t>(rep);
      Row row;
      row.recipe = recipe_name(spec.recipe);
      row.graph_family = family_name(g.family);
      row.n = sizes[ci];
      row.d = g.degree;
      row.lambda = p;
      row.replicate = rep;
      row.seed = spec.master_seed;
      row.observable = "non_unique";
      try {
        const auto res = site_percolation(g, p, spec.master_seed ^ rep_id, prefactor);
        row.value = res.unique_large ? 0.0 : 1.0;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      return {row};
    };
    auto chunk = parallel_replicates(spec.workers, spec.replicates, f);
    out.rows.insert(out.rows.end(), chunk.begin(), chunk.end());
    out.cells.push_back(summarize("non_unique", sizes[ci], p, out.rows,
                                  derive_key(spec.master_seed, RngDomain::bootstrap, ci)));
    Verdict v;
    v.name = "percolation-uniqueness-n" + std::to_string(sizes[ci]);
    v.observed = out.cells.back().mean;
    v.expected = spec.extra_num("freq_max", 0.05);
    v.pass = v.observed <= v.expected;
    v.detail = "frequency of a second component above the (log n)^{d/(d-1)} threshold";
    out.verdicts.push_back(v);
  }
}

}  // namespace

std::vector<Verdict> compare(const std::vector<CellStats>& cells,
                             const std::vector<TheoryPrediction>& predictions,
                             TolerancePolicy policy, double lo, double hi) {
  if (cells.size() != predictions.size()) {
    throw ShapeMismatch("compare: " + std::to_string(cells.size()) + " cells vs " +
                        std::to_string(predictions.size()) + " predictions");
  }
  std::vector<Verdict> out;
  if (policy == TolerancePolicy::slope_test) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (predictions[i].value > 0.0 && cells[i].mean > 0.0) {
        lx.push_back(std::log(predictions[i].value));
        ly.push_back(std::log(cells[i].mean));
      }
    }
    const auto fit = linear_fit(lx, ly);
    Verdict v;
    v.name = "slope";
    v.observed = fit.slope;
    v.expected = 1.0;
    v.pass = fit.slope >= lo && fit.slope <= hi;
    v.detail = "log-log regression slope";
    out.push_back(v);
    return out;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Verdict v;
    v.name = cells[i].observable + "-n" + std::to_string(cells[i].n) + "-lambda" +
             format_double(cells[i].lambda);
    v.expected = predictions[i].value;
    if (policy == TolerancePolicy::ratio_band) {
      v.observed = predictions[i].value != 0.0 ? cells[i].mean / predictions[i].value : 0.0;
      v.pass = !predictions[i].degenerate && v.observed >= lo && v.observed <= hi;
      v.detail = "mean/prediction ratio in [" + format_double(lo) + ", " + format_double(hi) + "]";
    } else {
      v.observed = cells[i].mean;
      v.pass = std::abs(cells[i].mean - predictions[i].value) <= hi;
      v.detail = "absolute deviation at most " + format_double(hi);
    }
    out.push_back(v);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult out;
  out.spec = spec;
  switch (spec.recipe) {
    case Recipe::oracle_suite: run_oracle_suite(spec, out); break;
    case Recipe::duality_check: run_duality_check(spec, out); break;
    case Recipe::complete_graph: run_complete_graph(spec, out); break;
    case Recipe::cycle_scaling: run_cycle_scaling(spec, out); break;
    case Recipe::susceptibility_scaling: run_susceptibility_scaling(spec, out); break;
    case Recipe::cover_multi_walk: run_cover_multi_walk(spec, out); break;
    case Recipe::expander_susceptibility: run_expander_susceptibility(spec, out); break;
    case Recipe::tree_scaling: run_tree_scaling(spec, out); break;
    case Recipe::gadget_ring: run_gadget_ring(spec, out); break;
    case Recipe::hyper_dense: run_hyper_dense(spec, out); break;
    case Recipe::bounds_suite: run_bounds_suite(spec, out); break;
    case Recipe::percolation_suite: run_percolation_suite(spec, out); break;
  }
  if (!spec.csv_path.empty()) write_csv_file(out, spec.csv_path);
  if (!spec.json_path.empty()) write_json_summary_file(out, spec.json_path);
  return out;
}

namespace {

// Error rows carry a single-token code in the observable column so the
// schema stays machine-readable.
std::string error_token(const std::string& what) {
  std::string t = "error:";
  for (char c : what.substr(0, 48)) {
    t.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  }
  return t;
}

}  // namespace

void write_csv(const ExperimentResult& result, std::ostream& out) {
  out << "# frogsim csv schema v1\n";
  out << "recipe,graph_family,n,d,lambda,replicate,seed,observable,value,censored,runtime_ms\n";
  for (const auto& r : result.rows) {
    out << r.recipe << ',' << r.graph_family << ',' << r.n << ',' << r.d << ','
        << format_double(r.lambda) << ',' << r.replicate << ',' << r.seed << ','
        << (r.error ? error_token(*r.error) : r.observable) << ',' << format_double(r.value)
        << ',' << (r.censored ? 1 : 0) << ',' << r.runtime_ms << '\n';
  }
}

std::string csv_to_string(const ExperimentResult& result) {
  std::ostringstream ss;
  write_csv(result, ss);
  return ss.str();
}

void write_csv_file(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(result, out);
}

void write_json_summary(const ExperimentResult& result, std::ostream& out) {
  nlohmann::json j;
  j["schema"] = "frogsim-summary-v1";
  j["recipe"] = recipe_name(result.spec.recipe);
  j["seed"] = result.spec.master_seed;
  j["replicates"] = result.spec.replicates;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : result.cells) {
    cells.push_back({{"observable", c.observable},
                     {"n", c.n},
                     {"lambda", c.lambda},
                     {"count", c.count},
                     {"censored", c.censored},
                     {"errors", c.errors},
                     {"mean", c.mean},
                     {"median", c.median},
                     {"q10", c.q10},
                     {"q90", c.q90},
                     {"ci_lo", c.ci_lo},
                     {"ci_hi", c.ci_hi}});
  }
  j["cells"] = cells;
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : result.verdicts) {
    verdicts.push_back({{"name", v.name},
                        {"pass", v.pass},
                        {"observed", v.observed},
                        {"expected", v.expected},
                        {"detail", v.detail}});
  }
  j["verdicts"] = verdicts;
  j["all_pass"] = result.all_pass();
  out << j.dump(2) << "\n";
}

void write_json_summary_file(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_json_summary(result, out);
}

}  // namespace frogsim
