// mivnet — command-line front end: generate graphs and designs, check
// existence of unbiased estimators, solve for MIV LUE weights, evaluate
// estimators exactly, and run simulation sweeps from a config file.
//
// Every command is deterministic given its arguments; all randomness is
// seeded explicitly. Exit status is nonzero exactly when a command fails.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mivnet/constraints.hpp"
#include "mivnet/design.hpp"
#include "mivnet/estimators.hpp"
#include "mivnet/evaluate.hpp"
#include "mivnet/graph.hpp"
#include "mivnet/outcome.hpp"
#include "mivnet/prior.hpp"
#include "mivnet/solver.hpp"

namespace {

using namespace mivnet;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int cmd_gen_graph(const std::string& family, int n, std::uint64_t seed, double p, double rho,
                  const std::string& out) {
  const GraphFamily fam = parse_graph_family(family);
  const double param = fam == GraphFamily::erdos_renyi ? p : rho;
  const Graph g = generate_graph(fam, n, seed, param);
  save_edge_list(g, out);
  std::cout << "family " << family << "\nn " << g.size() << "\nedges " << g.edge_count() << "\nout " << out
            << "\n";
  return 0;
}

int cmd_gen_design(const std::string& type, int n, double q, bool include_trivial, std::int64_t cap,
                   std::uint64_t seed, int k, const std::string& graph_path, const std::string& base,
                   const std::vector<std::string>& inputs, const std::vector<double>& mix_weights,
                   bool bernoulli_masses, const std::string& out) {
  Design d;
  if (type == "bernoulli") {
    d = bernoulli_design(n, q, !include_trivial, cap, seed,
                         bernoulli_masses ? SubsampleWeighting::bernoulli : SubsampleWeighting::uniform);
  } else if (type == "crd") {
    d = crd_design(n, k);
  } else if (type == "coloring") {
    if (graph_path.empty()) throw CLI::ValidationError("--graph is required for coloring designs");
    const Graph g = load_edge_list(graph_path);
    d = coloring_design(greedy_coloring(g), g.size());
  } else if (type == "orbit-ring") {
    if (base.empty()) throw CLI::ValidationError("--base is required for orbit-ring designs");
    const Allocation b = Allocation::from_string(base);
    d = orbit_design_ring(b.size(), b);
  } else if (type == "mixture") {
    if (inputs.empty() || inputs.size() != mix_weights.size())
      throw CLI::ValidationError("--inputs and --mix-weights must match for mixtures");
    std::vector<Design> parts;
    for (const auto& path : inputs) parts.push_back(load_design(path));
    d = mixture(parts, mix_weights);
  } else {
    throw CLI::ValidationError("unknown design type: " + type);
  }
  save_design(d, out);
  std::cout << "type " << type << "\nn " << d.n() << "\nsupport " << d.size() << "\nout " << out << "\n";
  return 0;
}

int cmd_check(const std::string& graph_path, const std::string& design_path, const std::string& kind_name,
              bool symmetrize) {
  const Graph g = load_edge_list(graph_path, symmetrize);
  const Design d = load_design(design_path);
  if (g.size() != d.n()) throw std::runtime_error("graph and design disagree on n");
  const ModelKind kind = parse_model_kind(kind_name);

  ExistenceReport rep;
  bool by_feasibility = false;
  switch (kind) {
    case ModelKind::SUTVA: rep = exists_sutva_report(d); break;
    case ModelKind::NIA:
    case ModelKind::SNIA: rep = exists_nia_report(g, d); break;
    case ModelKind::SANIA: rep = exists_sania_report(g, d); break;
    default:
      rep.exists = exists_by_feasibility(kind, g, d);
      by_feasibility = true;
      break;
  }
  std::cout << "kind " << kind_name << "\n";
  std::cout << "exists " << (rep.exists ? "true" : "false") << "\n";
  if (!rep.exists && rep.witness_unit >= 0) std::cout << "witness_unit " << rep.witness_unit << "\n";
  if (by_feasibility) std::cout << "decided_by feasibility\n";
  // the three deciders, for reference
  std::cout << "exists_nia " << (exists_nia(g, d) ? "true" : "false") << "\n";
  std::cout << "exists_sania " << (exists_sania(g, d) ? "true" : "false") << "\n";
  if (constraints_supported(kind))
    std::cout << "exists_feasibility " << (exists_by_feasibility(kind, g, d) ? "true" : "false") << "\n";
  return rep.exists ? 0 : 0;
}

int cmd_solve(const std::string& graph_path, const std::string& design_path, const std::string& kind_name,
              const std::string& prior_path, const std::string& method, double tol_unbiased, double tol_kkt,
              bool symmetrize, const std::string& out) {
  const Graph g = load_edge_list(graph_path, symmetrize);
  const Design d = load_design(design_path);
  if (g.size() != d.n()) throw std::runtime_error("graph and design disagree on n");
  const ModelKind kind = parse_model_kind(kind_name);
  SolveOptions opt;
  opt.tol_unbiased = tol_unbiased;
  opt.tol_kkt = tol_kkt;

  PriorCov prior;
  if (method != "vertex-transitive") {
    if (prior_path.empty()) throw CLI::ValidationError("--prior is required for this method");
    prior = load_prior(prior_path, g.size(), g.max_degree());
  }

  SolveReport rep;
  if (method == "general") {
    rep = solve_general(kind, g, d, prior, opt);
  } else if (method == "nonsingular") {
    rep = solve_nonsingular(kind, g, d, prior, opt);
  } else if (method == "sania-uncorrelated") {
    rep = solve_sania_uncorrelated(g, d, prior, opt);
  } else if (method == "nia-uncorrelated") {
    rep = solve_nia_uncorrelated(g, d, prior, opt, kind == ModelKind::SNIA ? ModelKind::SNIA : ModelKind::NIA);
  } else if (method == "sanasia") {
    rep = solve_sanasia(g, d, prior, opt);
  } else if (method == "vertex-transitive") {
    rep = solve_vertex_transitive(g, d, opt);
  } else if (method == "auto") {
    if (prior.kind == PriorKind::sanasia_independent && kind == ModelKind::SANASIA) {
      rep = solve_sanasia(g, d, prior, opt);
    } else if (prior.kind == PriorKind::sania_uncorrelated && kind == ModelKind::SANIA) {
      rep = solve_sania_uncorrelated(g, d, prior, opt);
    } else if ((prior.kind == PriorKind::sania_uncorrelated || prior.kind == PriorKind::sutva_uncorrelated ||
                prior.kind == PriorKind::custom) &&
               (kind == ModelKind::NIA || kind == ModelKind::SNIA)) {
      rep = solve_nia_uncorrelated(g, d, prior, opt, kind);
    } else {
      try {
        rep = solve_nonsingular(kind, g, d, prior, opt);
      } catch (const SingularSigmaError&) {
        rep = solve_general(kind, g, d, prior, opt);
      }
    }
  } else {
    throw CLI::ValidationError("unknown method: " + method);
  }

  UnbiasedVerdict verdict;
  if (constraints_supported(kind))
    verdict = check_unbiased(rep.weights, build_constraints(kind, g, d), tol_unbiased);

  std::map<std::string, std::string> meta;
  meta["kind"] = kind_name;
  meta["path_used"] = solve_path_name(rep.path_used);
  meta["kkt_residual"] = fmt(rep.kkt_residual);
  meta["unbiased"] = verdict.unbiased ? "true" : "false";
  meta["unbiased_max_violation"] = fmt(verdict.max_violation);
  if (!verdict.worst_row.empty()) meta["unbiased_worst_row"] = verdict.worst_row;
  {
    std::string ms;
    for (Eigen::Index i = 0; i < rep.multipliers.size(); ++i) {
      if (i) ms += " ";
      ms += fmt(rep.multipliers[i]);
    }
    meta["multipliers"] = ms;
  }
  save_weights(rep.weights, d, out, meta);
  std::cout << "path_used " << solve_path_name(rep.path_used) << "\n";
  std::cout << "kkt_residual " << fmt(rep.kkt_residual) << "\n";
  std::cout << "unbiased " << (verdict.unbiased ? "true" : "false") << "\n";
  std::cout << "unbiased_max_violation " << fmt(verdict.max_violation) << "\n";
  if (!verdict.worst_row.empty()) std::cout << "unbiased_worst_row " << verdict.worst_row << "\n";
  std::cout << "out " << out << "\n";
  return 0;
}

int cmd_evaluate(const std::string& graph_path, const std::string& design_path,
                 const std::string& params_path, const std::string& weights_path, bool symmetrize,
                 const std::string& out) {
  const Graph g = load_edge_list(graph_path, symmetrize);
  const Design d = load_design(design_path);
  if (g.size() != d.n()) throw std::runtime_error("graph and design disagree on n");
  const ParamSet params = load_params(params_path, g);
  const WeightScheme ws = align_weights(load_weights(weights_path), d);
  const EvalReport rep = exact_moments(ws, d, params, g);
  std::ostringstream os;
  os << "beta_bar " << fmt(estimand_beta_bar(params)) << "\n";
  os << "mean " << fmt(rep.mean) << "\n";
  os << "bias " << fmt(rep.bias) << "\n";
  os << "variance " << fmt(rep.variance) << "\n";
  os << "mse " << fmt(rep.mse) << "\n";
  std::cout << os.str();
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open for writing: " + out);
    f << os.str();
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out, int jobs, std::uint64_t seed_override,
              bool have_seed) {
  SweepConfig cfg = load_sweep_config(config_path);
  if (jobs > 0) cfg.jobs = jobs;
  if (have_seed) cfg.seed = seed_override;
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open for writing: " + out);
  f << sweep_csv_header() << "\n";
  f.flush();
  run_sweep(cfg, [&](const SweepRow& row) {
    f << sweep_csv_line(row) << "\n";
    f.flush();  // partial output survives a failed later grid point
  });
  std::cout << "out " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimum-integrated-variance estimation for randomized experiments on networks"};
  app.require_subcommand(1);

  // gen-graph
  std::string gg_family = "erdos_renyi", gg_out;
  int gg_n = 10;
  std::uint64_t gg_seed = 1;
  double gg_p = 0.5, gg_rho = 1.0;
  auto* gg = app.add_subcommand("gen-graph", "generate a graph and write its edge list");
  gg->add_option("--family", gg_family,
                 "empty|complete|ring|triangle_tail_v3|triangle_tail_v1|erdos_renyi|pref_attach");
  gg->add_option("--n", gg_n, "number of units")->required();
  gg->add_option("--seed", gg_seed, "rng seed");
  gg->add_option("--p", gg_p, "edge probability (erdos_renyi)");
  gg->add_option("--rho", gg_rho, "degree power (pref_attach)");
  gg->add_option("--out", gg_out, "output path")->required();

  // gen-design
  std::string gd_type = "bernoulli", gd_graph, gd_base, gd_out;
  int gd_n = 0, gd_k = 0;
  double gd_q = 0.5;
  bool gd_include_trivial = false, gd_bernoulli_masses = false;
  std::int64_t gd_cap = 8192;
  std::uint64_t gd_seed = 1;
  std::vector<std::string> gd_inputs;
  std::vector<double> gd_mix_weights;
  auto* gd = app.add_subcommand("gen-design", "generate a design and write its support/pmf");
  gd->add_option("--type", gd_type, "bernoulli|crd|coloring|orbit-ring|mixture");
  gd->add_option("--n", gd_n, "number of units (bernoulli, crd)");
  gd->add_option("--q", gd_q, "treatment probability (bernoulli)");
  gd->add_flag("--include-trivial", gd_include_trivial, "keep the all-zeros/all-ones allocations");
  gd->add_flag("--bernoulli-masses", gd_bernoulli_masses,
               "weight subsampled supports by renormalized Bernoulli masses instead of uniformly");
  gd->add_option("--cap", gd_cap, "max support size (bernoulli)");
  gd->add_option("--seed", gd_seed, "rng seed (bernoulli subsampling)");
  gd->add_option("--k", gd_k, "treated count (crd)");
  gd->add_option("--graph", gd_graph, "graph path (coloring)");
  gd->add_option("--base", gd_base, "base allocation bitstring (orbit-ring)");
  gd->add_option("--inputs", gd_inputs, "component design files (mixture)")->delimiter(',');
  gd->add_option("--mix-weights", gd_mix_weights, "mixture weights")->delimiter(',');
  gd->add_option("--out", gd_out, "output path")->required();

  // check
  std::string ck_graph, ck_design, ck_kind = "SANIA";
  bool ck_symmetrize = false;
  auto* ck = app.add_subcommand("check", "decide existence of linear unbiased estimators");
  ck->add_option("--graph", ck_graph)->required();
  ck->add_option("--design", ck_design)->required();
  ck->add_option("--kind", ck_kind, "model kind");
  ck->add_flag("--symmetrize", ck_symmetrize, "mirror edges on graph load");

  // solve
  std::string sv_graph, sv_design, sv_kind = "SANIA", sv_prior, sv_method = "auto", sv_out;
  double sv_tol_unbiased = 1e-8, sv_tol_kkt = 1e-6;
  bool sv_symmetrize = false;
  auto* sv = app.add_subcommand("solve", "compute MIV LUE weights");
  sv->add_option("--graph", sv_graph)->required();
  sv->add_option("--design", sv_design)->required();
  sv->add_option("--kind", sv_kind, "model kind");
  sv->add_option("--prior", sv_prior, "prior spec path");
  sv->add_option("--method", sv_method, "auto|general|nonsingular|sania-uncorrelated|nia-uncorrelated|sanasia|vertex-transitive");
  sv->add_option("--tol-unbiased", sv_tol_unbiased, "unbiasedness tolerance");
  sv->add_option("--tol-kkt", sv_tol_kkt, "KKT residual tolerance");
  sv->add_flag("--symmetrize", sv_symmetrize, "mirror edges on graph load");
  sv->add_option("--out", sv_out, "weights output path")->required();

  // evaluate
  std::string ev_graph, ev_design, ev_params, ev_weights, ev_out;
  bool ev_symmetrize = false;
  auto* ev = app.add_subcommand("evaluate", "exact bias/variance/MSE of a weight scheme");
  ev->add_option("--graph", ev_graph)->required();
  ev->add_option("--design", ev_design)->required();
  ev->add_option("--params", ev_params, "parameter file")->required();
  ev->add_option("--weights", ev_weights, "weight scheme file")->required();
  ev->add_flag("--symmetrize", ev_symmetrize, "mirror edges on graph load");
  ev->add_option("--out", ev_out, "also write the report here");

  // sweep
  std::string sw_config, sw_out;
  int sw_jobs = 0;
  std::uint64_t sw_seed = 0;
  auto* sw = app.add_subcommand("sweep", "run a simulation sweep from a config file");
  sw->add_option("--config", sw_config)->required();
  sw->add_option("--out", sw_out, "CSV output path")->required();
  sw->add_option("--jobs", sw_jobs, "worker threads (overrides config)");
  auto* sw_seed_opt = sw->add_option("--seed", sw_seed, "seed (overrides config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gg->parsed()) return cmd_gen_graph(gg_family, gg_n, gg_seed, gg_p, gg_rho, gg_out);
    if (gd->parsed())
      return cmd_gen_design(gd_type, gd_n, gd_q, gd_include_trivial, gd_cap, gd_seed, gd_k, gd_graph,
                            gd_base, gd_inputs, gd_mix_weights, gd_bernoulli_masses, gd_out);
    if (ck->parsed()) return cmd_check(ck_graph, ck_design, ck_kind, ck_symmetrize);
    if (sv->parsed())
      return cmd_solve(sv_graph, sv_design, sv_kind, sv_prior, sv_method, sv_tol_unbiased, sv_tol_kkt,
                       sv_symmetrize, sv_out);
    if (ev->parsed()) return cmd_evaluate(ev_graph, ev_design, ev_params, ev_weights, ev_symmetrize, ev_out);
    if (sw->parsed()) return cmd_sweep(sw_config, sw_out, sw_jobs, sw_seed, sw_seed_opt->count() > 0);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
