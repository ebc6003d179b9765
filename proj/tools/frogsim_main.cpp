// frogsim command-line front end: graph generation, single-quantity runs and
// config-driven experiment recipes.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "frogsim/estimators.hpp"
#include "frogsim/experiments.hpp"
#include "frogsim/frog.hpp"
#include "frogsim/multiwalk.hpp"
#include "frogsim/spectral.hpp"
#include "frogsim/stats.hpp"

namespace {

using namespace frogsim;

struct GraphOptions {
  std::string family = "cycle";
  std::int64_t n = 16;
  int dim = 2;
  int arity = 2;
  int depth = 3;
  int degree = 4;
  std::uint64_t gen_seed = 1;
  std::string input;

  Graph build() const {
    if (family == "cycle") return make_cycle(static_cast<Vertex>(n));
    if (family == "torus") return make_torus(dim, static_cast<int>(n));
    if (family == "complete") return make_complete(static_cast<Vertex>(n));
    if (family == "tree") return make_dary_tree(arity, depth);
    if (family == "gadget") return make_gadget_ring(degree, static_cast<Vertex>(n));
    if (family == "random-regular") {
      return make_random_regular(static_cast<Vertex>(n), degree, gen_seed);
    }
    if (family == "custom") {
      if (input.empty()) throw ConfigError("custom family needs --input <edge list>");
      return load_edge_list_file(input);
    }
    throw ConfigError("unknown family: " + family);
  }
};

void add_graph_options(CLI::App* cmd, GraphOptions& opts) {
  cmd->add_option("--family", opts.family,
                  "cycle|torus|complete|tree|gadget|random-regular|custom");
  cmd->add_option("--n", opts.n, "size parameter (vertices or torus side)");
  cmd->add_option("--dim", opts.dim, "torus dimension");
  cmd->add_option("--arity", opts.arity, "tree arity");
  cmd->add_option("--depth", opts.depth, "tree depth");
  cmd->add_option("--degree", opts.degree, "degree for gadget/random-regular");
  cmd->add_option("--gen-seed", opts.gen_seed, "generator seed");
  cmd->add_option("--input", opts.input, "edge-list file for custom graphs");
}

void print_samples(const std::string& label, const std::vector<double>& values,
                   std::int64_t censored) {
  std::printf("%s: replicates=%zu censored=%lld mean=%.6g median=%.6g q10=%.6g q90=%.6g\n",
              label.c_str(), values.size(), static_cast<long long>(censored), mean(values),
              median(values), quantile(values, 0.1), quantile(values, 0.9));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frog-model simulation laboratory"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int workers = 1;
  app.add_option("--seed", seed, "master seed (FROGSIM_SEED overrides)")->envname("FROGSIM_SEED");
  app.add_option("--workers", workers, "worker threads for replicates");

  // generate ----------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "generate a graph and write its edge list");
  GraphOptions gen_graph;
  add_graph_options(gen, gen_graph);
  std::string gen_out;
  gen->add_option("--out", gen_out, "output path (stdout when omitted)");

  // susceptibility ----------------------------------------------------------
  auto* sus = app.add_subcommand("susceptibility", "sample S(G) over replicates");
  GraphOptions sus_graph;
  add_graph_options(sus, sus_graph);
  double sus_lambda = 1.0;
  int sus_reps = 100;
  std::int64_t sus_cap = Step{1} << 24;
  sus->add_option("--lambda", sus_lambda, "particle density");
  sus->add_option("--replicates", sus_reps, "replicate count");
  sus->add_option("--horizon-cap", sus_cap, "censoring cap");

  // cover -------------------------------------------------------------------
  auto* cov = app.add_subcommand("cover", "sample the frog cover time CT(G)");
  GraphOptions cov_graph;
  add_graph_options(cov, cov_graph);
  double cov_lambda = 1.0;
  int cov_reps = 100;
  cov->add_option("--lambda", cov_lambda, "particle density");
  cov->add_option("--replicates", cov_reps, "replicate count");

  // multiwalk ---------------------------------------------------------------
  auto* mw = app.add_subcommand("multiwalk", "cover times by independent walkers");
  GraphOptions mw_graph;
  add_graph_options(mw, mw_graph);
  int mw_walkers = 0;
  std::int64_t mw_length = -1;
  int mw_reps = 100;
  mw->add_option("--walkers", mw_walkers, "fixed walker count (D mode)");
  mw->add_option("--length", mw_length, "fixed walk length (C mode)");
  mw->add_option("--replicates", mw_reps, "replicate count");

  // estimate-rho ------------------------------------------------------------
  auto* rho = app.add_subcommand("estimate-rho", "escape probability of SRW on Z^d");
  int rho_d = 3;
  std::int64_t rho_reps = 40000;
  std::int64_t rho_horizon = 4000;
  std::int64_t rho_terms = 1500;
  rho->add_option("--d", rho_d, "dimension");
  rho->add_option("--reps", rho_reps, "Monte-Carlo replicates");
  rho->add_option("--horizon", rho_horizon, "Monte-Carlo truncation horizon");
  rho->add_option("--terms", rho_terms, "Green series terms");

  // spectral-gap ------------------------------------------------------------
  auto* gap = app.add_subcommand("spectral-gap", "spectral gap of I - P");
  GraphOptions gap_graph;
  add_graph_options(gap, gap_graph);

  // percolation ---------------------------------------------------------------
  auto* perc = app.add_subcommand("percolation", "Bernoulli site percolation on a torus");
  GraphOptions perc_graph;
  add_graph_options(perc, perc_graph);
  double perc_p = 0.95;
  int perc_reps = 1;
  perc->add_option("--p", perc_p, "open probability");
  perc->add_option("--replicates", perc_reps, "replicate count");

  // bounds --------------------------------------------------------------------
  auto* bounds = app.add_subcommand("bounds", "large-deviation bounds vs exact binomial tails");
  std::int64_t b_n = 100;
  double b_p = 0.5;
  double b_delta = 0.5;
  std::int64_t b_k = 0;
  bounds->add_option("--trials", b_n, "number of Bernoulli trials n");
  bounds->add_option("--p", b_p, "success probability");
  bounds->add_option("--delta", b_delta, "deviation parameter");
  bounds->add_option("--k", b_k, "supremum bound start index (0 = omit)");

  // experiment ----------------------------------------------------------------
  auto* exp = app.add_subcommand("experiment", "config-driven experiment recipes");
  exp->require_subcommand(1);
  auto* exp_run = exp->add_subcommand("run", "run a recipe from a config file");
  std::string config_path;
  bool strict = false;
  exp_run->add_option("config", config_path, "flat key=value config file")->required();
  exp_run->add_flag("--strict", strict, "exit 2 when any verdict fails");
  auto* exp_list = exp->add_subcommand("list-recipes", "list recipe names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const Graph g = gen_graph.build();
      validate_graph(g);
      if (gen_out.empty()) {
        save_edge_list(g, std::cout);
      } else {
        save_edge_list_file(g, gen_out);
        std::printf("wrote %s: n=%d degree=%d family=%s\n", gen_out.c_str(), g.n, g.degree,
                    family_name(g.family).c_str());
      }
      return 0;
    }
    if (*sus) {
      const Graph g = sus_graph.build();
      HorizonConfig horizon;
      horizon.cap = sus_cap;
      std::vector<double> values;
      std::int64_t censored = 0;
      for (int rep = 0; rep < sus_reps; ++rep) {
        ParticleField field(g, sus_lambda, g.origin, seed, static_cast<std::uint64_t>(rep));
        FrogRealization real(g, field, sus_lambda, WalkKernel::srw, horizon);
        const auto s = real.susceptibility();
        if (s.censored) {
          ++censored;
        } else {
          values.push_back(static_cast<double>(s.s_value));
        }
      }
      print_samples("S(" + family_name(g.family) + ")", values, censored);
      return 0;
    }
    if (*cov) {
      const Graph g = cov_graph.build();
      std::vector<double> values;
      std::int64_t censored = 0;
      for (int rep = 0; rep < cov_reps; ++rep) {
        ParticleField field(g, cov_lambda, g.origin, seed, static_cast<std::uint64_t>(rep));
        FrogRealization real(g, field, cov_lambda);
        const auto ct = real.cover_time();
        if (ct.censored) {
          ++censored;
        } else {
          values.push_back(static_cast<double>(ct.ct));
        }
      }
      print_samples("CT(" + family_name(g.family) + ")", values, censored);
      return 0;
    }
    if (*mw) {
      const Graph g = mw_graph.build();
      std::vector<double> values;
      std::int64_t censored = 0;
      if (mw_walkers > 0) {
        for (int rep = 0; rep < mw_reps; ++rep) {
          const auto d = cover_fixed_walkers(g, mw_walkers, seed,
                                             static_cast<std::uint64_t>(rep), Step{1} << 24);
          if (d.censored) {
            ++censored;
          } else {
            values.push_back(static_cast<double>(d.value));
          }
        }
        print_samples("D(G," + std::to_string(mw_walkers) + ")", values, censored);
      } else if (mw_length >= 0) {
        for (int rep = 0; rep < mw_reps; ++rep) {
          const auto c = cover_fixed_length(g, mw_length, seed, static_cast<std::uint64_t>(rep),
                                            1 << 22);
          if (c.censored) {
            ++censored;
          } else {
            values.push_back(static_cast<double>(c.walkers));
          }
        }
        print_samples("C(G," + std::to_string(mw_length) + ")", values, censored);
      } else {
        std::fprintf(stderr, "multiwalk needs --walkers or --length\n");
        return 1;
      }
      return 0;
    }
    if (*rho) {
      RhoBudget budget;
      budget.reps = rho_reps;
      budget.horizon = rho_horizon;
      budget.terms = rho_terms;
      budget.seed = seed;
      const auto gs = rho_estimate(rho_d, RhoMethod::green_series, budget);
      std::printf("green-series: rho(%d) = %.6f  [%.6f, %.6f]\n", rho_d, gs.estimate, gs.lo,
                  gs.hi);
      const auto mc = rho_estimate(rho_d, RhoMethod::truncated_mc, budget);
      std::printf("truncated-mc: rho(%d) = %.6f  [%.6f, %.6f]  (upward truncation bias <= %.2g)\n",
                  rho_d, mc.estimate, mc.lo, mc.hi, mc.truncation_allowance);
      return 0;
    }
    if (*gap) {
      const Graph g = gap_graph.build();
      const auto st = spectral_gap(g);
      const char* method = st.method == SpectralMethod::closed_form   ? "closed-form"
                           : st.method == SpectralMethod::dense_eig   ? "dense-eig"
                                                                      : "power-iteration";
      std::printf("gamma = %.10f  gamma_abs = %.10f  (method %s)\n", st.gamma, st.gamma_abs,
                  method);
      return 0;
    }
    if (*perc) {
      const Graph g = perc_graph.build();
      std::int64_t non_unique = 0;
      std::vector<double> gc;
      for (int rep = 0; rep < perc_reps; ++rep) {
        const auto res = site_percolation(g, perc_p, seed ^ static_cast<std::uint64_t>(rep));
        gc.push_back(static_cast<double>(res.gc_size));
        if (!res.unique_large) ++non_unique;
        if (perc_reps == 1) {
          std::printf("open=%lld components=%zu gc=%lld threshold=%.2f unique_large=%d\n",
                      static_cast<long long>(res.open_count), res.component_sizes.size(),
                      static_cast<long long>(res.gc_size), res.threshold,
                      res.unique_large ? 1 : 0);
        }
      }
      if (perc_reps > 1) {
        std::printf("reps=%d mean_gc=%.1f non_unique_freq=%.4f\n", perc_reps, mean(gc),
                    static_cast<double>(non_unique) / perc_reps);
      }
      return 0;
    }
    if (*bounds) {
      const auto rep = ld_bounds(b_n, b_p, b_delta,
                                 b_k > 0 ? std::optional<std::int64_t>(b_k) : std::nullopt);
      std::printf("upper tail: exact=%.6g sharp=%.6g exp=%.6g sound=%d\n", rep.exact_upper_tail,
                  rep.upper_bound_sharp, rep.upper_bound_exp, rep.upper_sound ? 1 : 0);
      if (b_delta > 0.0 && b_delta < 1.0) {
        std::printf("lower tail: exact=%.6g sharp=%.6g exp=%.6g sound=%d\n", rep.exact_lower_tail,
                    rep.lower_bound_sharp, rep.lower_bound_exp, rep.lower_sound ? 1 : 0);
      }
      if (rep.sup_upper_bound) std::printf("sup upper bound: %.6g\n", *rep.sup_upper_bound);
      if (rep.sup_lower_bound) std::printf("sup lower bound: %.6g\n", *rep.sup_lower_bound);
      return 0;
    }
    if (*exp_list) {
      for (Recipe r : all_recipes()) std::printf("%s\n", recipe_name(r).c_str());
      return 0;
    }
    if (*exp_run) {
      ExperimentSpec spec;
      try {
        spec = parse_config_file(config_path);
      } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
      }
      if (workers > 1) spec.workers = workers;
      const auto result = run_experiment(spec);
      for (const auto& c : result.cells) {
        std::printf("cell %s n=%lld lambda=%g: mean=%.6g median=%.6g ci=[%.6g, %.6g] "
                    "count=%lld censored=%lld\n",
                    c.observable.c_str(), static_cast<long long>(c.n), c.lambda, c.mean,
                    c.median, c.ci_lo, c.ci_hi, static_cast<long long>(c.count),
                    static_cast<long long>(c.censored));
      }
      for (const auto& v : result.verdicts) {
        std::printf("[%s] %s: observed=%.6g expected=%.6g (%s)\n", v.pass ? "PASS" : "FAIL",
                    v.name.c_str(), v.observed, v.expected, v.detail.c_str());
      }
      if (!spec.csv_path.empty()) std::printf("csv: %s\n", spec.csv_path.c_str());
      if (!spec.json_path.empty()) std::printf("json: %s\n", spec.json_path.c_str());
      if ((strict || spec.strict) && !result.all_pass()) return 2;
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
