// dmc-infer: simulation, likelihood estimation, and posterior sampling for
// the duplication-mutation-with-complementarity network growth model.
//
// Subcommands: simulate, variance-study, infer, exact, grid-posterior.
// Exit codes: 0 success, 2 usage/parameter error, 3 input validation error,
// 4 numeric failure (zero likelihood estimate).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmc/csv.hpp"
#include "dmc/experiments.hpp"
#include "dmc/manifest.hpp"
#include "dmc/model.hpp"
#include "dmc/oracle.hpp"
#include "dmc/pmmh.hpp"
#include "dmc/smc.hpp"
#include "dmc/text_io.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(const dmc::Error& e) {
  switch (e.code()) {
    case dmc::ErrorCode::bad_parameter:
    case dmc::ErrorCode::boundary_params:
      return kExitUsage;
    case dmc::ErrorCode::all_zero_weights:
    case dmc::ErrorCode::unlucky_start:
      return kExitNumeric;
    default:
      return kExitInput;
  }
}

unsigned default_threads() {
  if (const char* env = std::getenv("DMC_INFER_THREADS")) {
    const long v = std::atol(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = default_threads();
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonOpts& c, bool needs_out) {
  cmd->add_option("--seed", c.seed, "Master seed");
  auto* out = cmd->add_option("--out", c.out, "Output path prefix");
  if (needs_out) out->required();
  cmd->add_option("--threads", c.threads, "Worker threads (default $DMC_INFER_THREADS or 1)");
  cmd->add_flag("--deterministic", c.deterministic,
                "Pin manifest timestamps for byte-identical reruns");
}

std::pair<dmc::PpiGraph, dmc::DuplicationForest> load_pair(const std::string& graph_path,
                                                           const std::string& forest_path) {
  dmc::PpiGraph g;
  dmc::DuplicationForest f;
  try {
    g = dmc::parse_graph(dmc::read_text_file(graph_path));
  } catch (const dmc::Error& e) {
    throw dmc::Error(e.code(), graph_path + ": " + e.what());
  }
  try {
    f = dmc::parse_forest(dmc::read_text_file(forest_path));
  } catch (const dmc::Error& e) {
    throw dmc::Error(e.code(), forest_path + ": " + e.what());
  }
  dmc::require_valid_pair(g, f);
  return {std::move(g), std::move(f)};
}

void write_pair(const std::string& prefix, const dmc::PpiGraph& g,
                const dmc::DuplicationForest& f) {
  dmc::write_text_file(prefix + "_graph.txt", dmc::serialize_graph(g));
  dmc::write_text_file(prefix + "_forest.txt", dmc::serialize_forest(f));
}

int cmd_simulate(const CommonOpts& c, double p, double pc, std::size_t nodes,
                 bool save_prefixes) {
  if (nodes < 2) {
    throw dmc::Error(dmc::ErrorCode::bad_parameter, "simulate: need at least 2 nodes");
  }
  const dmc::DmcParams m{p, pc};
  if (!m.in_unit_interval()) {
    throw dmc::Error(dmc::ErrorCode::bad_parameter, "simulate: p and pc must lie in [0,1]");
  }
  dmc::RunManifest manifest("simulate", c.seed, c.deterministic);
  manifest.set_param("p", p);
  manifest.set_param("pc", pc);
  manifest.set_param("nodes", nodes);
  manifest.set_param("save_prefixes", save_prefixes);

  dmc::Rng rng(dmc::derive_seed(c.seed, dmc::stream::kSimulate));
  const dmc::GrowthHistory h = dmc::simulate(m, nodes - 2, rng);

  write_pair(c.out, h.final_graph(), h.final_forest());
  manifest.set_output("graph", c.out + "_graph.txt");
  manifest.set_output("forest", c.out + "_forest.txt");

  if (save_prefixes) {
    write_pair(c.out + "_t0", h.seed_graph, h.seed_forest);
    std::string steps;
    for (std::size_t t = 1; t <= h.steps.size(); ++t) {
      const dmc::GrowthStep& s = h.steps[t - 1];
      write_pair(c.out + "_t" + std::to_string(t), s.graph_after, s.forest_after);
      steps += "step " + std::to_string(t) + " anchor " + s.anchor + " duplicate " +
               s.duplicate + "\n";
    }
    dmc::write_text_file(c.out + "_steps.txt", steps);
    manifest.set_output("steps", c.out + "_steps.txt");
  }
  manifest.write(c.out + "_manifest.json");
  std::cout << "simulated " << nodes << " nodes (" << h.steps.size() << " steps) -> "
            << c.out << "_graph.txt\n";
  return 0;
}

int cmd_variance_study(const CommonOpts& c, double p, double pc, std::size_t nodes,
                       const std::vector<std::size_t>& multipliers, std::size_t reps) {
  const dmc::DmcParams m{p, pc};
  dmc::RunManifest manifest("variance-study", c.seed, c.deterministic);
  manifest.set_param("p", p);
  manifest.set_param("pc", pc);
  manifest.set_param("nodes", nodes);
  manifest.set_param("multipliers", multipliers);
  manifest.set_param("reps", reps);
  manifest.set_param("threads", c.threads);

  const dmc::VarianceStudyResult res =
      dmc::run_variance_study(m, nodes, multipliers, reps, c.seed, c.threads);

  dmc::CsvWriter runs("t,nodes,multiplier,N,rep,log_estimate");
  for (const auto& r : res.runs) {
    runs.add_row(std::to_string(r.t) + "," + std::to_string(r.nodes) + "," +
                 std::to_string(r.multiplier) + "," + std::to_string(r.n_particles) + "," +
                 std::to_string(r.rep) + "," + dmc::format_double(r.log_estimate));
  }
  runs.write(c.out + "_runs.csv");

  dmc::CsvWriter summary("t,nodes,multiplier,N,rel_variance");
  for (const auto& s : res.summaries) {
    summary.add_row(std::to_string(s.t) + "," + std::to_string(s.nodes) + "," +
                    std::to_string(s.multiplier) + "," + std::to_string(s.n_particles) + "," +
                    dmc::format_double(s.relative_variance));
  }
  summary.write(c.out + "_summary.csv");

  manifest.set_output("runs", c.out + "_runs.csv");
  manifest.set_output("summary", c.out + "_summary.csv");
  manifest.write(c.out + "_manifest.json");
  std::cout << "variance study: " << res.runs.size() << " SMC runs -> " << c.out
            << "_runs.csv\n";
  return 0;
}

int cmd_infer(const CommonOpts& c, const std::string& graph_path,
              const std::string& forest_path, std::size_t particles, std::size_t iters,
              double rw_sigma, double prior_low, double prior_high,
              const std::string& histories_out, std::optional<std::size_t> burn_in_opt) {
  auto [g, f] = load_pair(graph_path, forest_path);
  const dmc::UniformPrior prior(prior_low, prior_high);

  dmc::PmmhConfig cfg;
  cfg.n_particles = particles;
  cfg.n_iters = iters;
  cfg.rw_sigma = rw_sigma;
  cfg.master_seed = c.seed;
  cfg.threads = c.threads;
  cfg.record_histories = !histories_out.empty();

  dmc::RunManifest manifest("infer", c.seed, c.deterministic);
  manifest.set_param("graph", graph_path);
  manifest.set_param("forest", forest_path);
  manifest.set_param("particles", particles);
  manifest.set_param("iters", iters);
  manifest.set_param("rw_sigma", rw_sigma);
  manifest.set_param("prior_low", prior_low);
  manifest.set_param("prior_high", prior_high);
  manifest.set_param("threads", c.threads);

  dmc::PmmhStats stats;
  const auto chain = dmc::pmmh_run(g, f, prior, cfg, &stats);

  dmc::CsvWriter chain_csv("iter,p,pc,loglik,accepted");
  for (const auto& s : chain) {
    chain_csv.add_row(std::to_string(s.iter) + "," + dmc::format_double(s.p) + "," +
                      dmc::format_double(s.p_c) + "," +
                      dmc::format_double(s.log_lik_estimate) + "," +
                      (s.accepted ? "1" : "0"));
  }
  chain_csv.write(c.out + "_chain.csv");

  const std::size_t burn_in = burn_in_opt ? *burn_in_opt : chain.size() / 10;
  const dmc::ChainSummary sum = dmc::summarize(chain, burn_in);
  dmc::CsvWriter summary_csv("param,mean,sd,acceptance_rate,burn_in");
  summary_csv.add_row("p," + dmc::format_double(sum.mean_p) + "," +
                      dmc::format_double(sum.sd_p) + "," +
                      dmc::format_double(sum.acceptance_rate) + "," +
                      std::to_string(burn_in));
  summary_csv.add_row("pc," + dmc::format_double(sum.mean_pc) + "," +
                      dmc::format_double(sum.sd_pc) + "," +
                      dmc::format_double(sum.acceptance_rate) + "," +
                      std::to_string(burn_in));
  summary_csv.write(c.out + "_summary.csv");

  dmc::CsvWriter acf_csv("lag,acf_p,acf_pc");
  const std::size_t n_lags = std::min<std::size_t>(sum.acf_p.size(), sum.acf_pc.size());
  for (std::size_t lag = 0; lag < n_lags; ++lag) {
    acf_csv.add_row(std::to_string(lag) + "," + dmc::format_double(sum.acf_p[lag]) + "," +
                    dmc::format_double(sum.acf_pc[lag]));
  }
  acf_csv.write(c.out + "_acf.csv");

  if (!histories_out.empty()) {
    std::string lines;
    for (const auto& s : chain) {
      if (s.history) {
        // duplicates in backward (reconstruction) order
        std::string line;
        for (auto it = s.history->rbegin(); it != s.history->rend(); ++it) {
          if (!line.empty()) line += ' ';
          line += it->first;
        }
        lines += line;
      }
      lines += '\n';
    }
    dmc::write_text_file(histories_out, lines);
    manifest.set_output("histories", histories_out);
  }

  manifest.set_output("chain", c.out + "_chain.csv");
  manifest.set_output("summary", c.out + "_summary.csv");
  manifest.set_output("acf", c.out + "_acf.csv");
  manifest.write(c.out + "_manifest.json");

  std::cout << "pmmh: " << chain.size() << " samples, acceptance "
            << dmc::format_double(sum.acceptance_rate) << ", E[p]="
            << dmc::format_double(sum.mean_p) << ", E[pc]="
            << dmc::format_double(sum.mean_pc) << "\n";
  return 0;
}

int cmd_exact(const std::string& graph_path, const std::string& forest_path, double p,
              double pc) {
  auto [g, f] = load_pair(graph_path, forest_path);
  const double ll = dmc::exact_log_likelihood(g, f, dmc::DmcParams{p, pc});
  std::cout << dmc::format_double(ll) << "\n";
  return 0;
}

int cmd_grid_posterior(const CommonOpts& c, const std::string& graph_path,
                       const std::string& forest_path, std::size_t grid_size,
                       double prior_low, double prior_high) {
  auto [g, f] = load_pair(graph_path, forest_path);
  const dmc::UniformPrior prior(prior_low, prior_high);

  dmc::RunManifest manifest("grid-posterior", c.seed, c.deterministic);
  manifest.set_param("graph", graph_path);
  manifest.set_param("forest", forest_path);
  manifest.set_param("grid_size", grid_size);
  manifest.set_param("prior_low", prior_low);
  manifest.set_param("prior_high", prior_high);

  const dmc::GridPosterior grid = dmc::grid_posterior(g, f, prior, grid_size);
  dmc::CsvWriter csv("p,pc,mass");
  for (std::size_t k = 0; k < grid.grid.size(); ++k) {
    csv.add_row(dmc::format_double(grid.grid[k].p) + "," +
                dmc::format_double(grid.grid[k].p_c) + "," +
                dmc::format_double(std::exp(grid.log_posterior[k])));
  }
  csv.write(c.out + "_grid.csv");
  manifest.set_output("grid", c.out + "_grid.csv");
  manifest.write(c.out + "_manifest.json");
  std::cout << "grid posterior: E[p]=" << dmc::format_double(grid.marginal_means.first)
            << ", E[pc]=" << dmc::format_double(grid.marginal_means.second) << " -> "
            << c.out << "_grid.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for DMC network growth"};
  app.require_subcommand(1);

  // simulate
  CommonOpts sim_c;
  double sim_p = 0.7, sim_pc = 0.7;
  std::size_t sim_nodes = 40;
  bool sim_save_prefixes = false;
  auto* sim = app.add_subcommand("simulate", "Grow a (graph, forest) pair from the seed");
  sim->add_option("--p", sim_p, "Mutation retention parameter");
  sim->add_option("--pc", sim_pc, "Homodimerization parameter");
  sim->add_option("--nodes", sim_nodes, "Final vertex count");
  sim->add_flag("--save-prefixes", sim_save_prefixes, "Save every intermediate pair");
  add_common(sim, sim_c, true);

  // variance-study
  CommonOpts var_c;
  double var_p = 0.7, var_pc = 0.7;
  std::size_t var_nodes = 40, var_reps = 50;
  std::vector<std::size_t> var_multipliers{5, 10, 20};
  auto* var = app.add_subcommand("variance-study",
                                 "Replicate likelihood estimates over history prefixes");
  var->add_option("--p", var_p, "Mutation retention parameter");
  var->add_option("--pc", var_pc, "Homodimerization parameter");
  var->add_option("--nodes", var_nodes, "Final vertex count of the simulated history");
  var->add_option("--multipliers", var_multipliers, "Particle multipliers c (N = c*|V|)")
      ->delimiter(',');
  var->add_option("--reps", var_reps, "SMC replicates per (prefix, multiplier)");
  add_common(var, var_c, true);

  // infer
  CommonOpts inf_c;
  std::string inf_graph, inf_forest, inf_histories;
  std::size_t inf_particles = 2000, inf_iters = 10000;
  double inf_sigma = 0.05, inf_low = 0.1, inf_high = 0.9;
  std::optional<std::size_t> inf_burn_in;
  auto* inf = app.add_subcommand("infer", "PMMH posterior sampling for (p, pc)");
  inf->add_option("--graph", inf_graph, "Observed graph file")->required();
  inf->add_option("--forest", inf_forest, "Observed duplication forest file")->required();
  inf->add_option("--particles", inf_particles, "SMC particles per likelihood estimate");
  inf->add_option("--iters", inf_iters, "PMMH iterations");
  inf->add_option("--rw-sigma", inf_sigma, "Random-walk proposal scale");
  inf->add_option("--prior-low", inf_low, "Uniform prior lower bound");
  inf->add_option("--prior-high", inf_high, "Uniform prior upper bound");
  inf->add_option("--histories-out", inf_histories, "Also record sampled duplicate sequences");
  inf->add_option("--burn-in", inf_burn_in, "Summary burn-in (default 10% of chain)");
  add_common(inf, inf_c, true);

  // exact
  CommonOpts ex_c;
  std::string ex_graph, ex_forest;
  double ex_p = 0.7, ex_pc = 0.7;
  auto* ex = app.add_subcommand("exact", "Exact log-likelihood by enumeration (small n)");
  ex->add_option("--graph", ex_graph, "Observed graph file")->required();
  ex->add_option("--forest", ex_forest, "Observed duplication forest file")->required();
  ex->add_option("--p", ex_p, "Mutation retention parameter");
  ex->add_option("--pc", ex_pc, "Homodimerization parameter");
  add_common(ex, ex_c, false);

  // grid-posterior
  CommonOpts gp_c;
  std::string gp_graph, gp_forest;
  std::size_t gp_size = 64;
  double gp_low = 0.1, gp_high = 0.9;
  auto* gp = app.add_subcommand("grid-posterior", "Exact lattice posterior (small n)");
  gp->add_option("--graph", gp_graph, "Observed graph file")->required();
  gp->add_option("--forest", gp_forest, "Observed duplication forest file")->required();
  gp->add_option("--grid-size", gp_size, "Lattice resolution per axis");
  gp->add_option("--prior-low", gp_low, "Uniform prior lower bound");
  gp->add_option("--prior-high", gp_high, "Uniform prior upper bound");
  add_common(gp, gp_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(sim_c, sim_p, sim_pc, sim_nodes, sim_save_prefixes);
    }
    if (var->parsed()) {
      return cmd_variance_study(var_c, var_p, var_pc, var_nodes, var_multipliers, var_reps);
    }
    if (inf->parsed()) {
      return cmd_infer(inf_c, inf_graph, inf_forest, inf_particles, inf_iters, inf_sigma,
                       inf_low, inf_high, inf_histories, inf_burn_in);
    }
    if (ex->parsed()) {
      return cmd_exact(ex_graph, ex_forest, ex_p, ex_pc);
    }
    if (gp->parsed()) {
      return cmd_grid_posterior(gp_c, gp_graph, gp_forest, gp_size, gp_low, gp_high);
    }
  } catch (const dmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
