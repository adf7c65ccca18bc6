#include "mivnet/evaluate.hpp"

#include <atomic>
#include <cstring>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mivnet/prior.hpp"

namespace mivnet {

EvalReport exact_moments(const WeightScheme& ws, const Design& d, const Eigen::MatrixXd& outcomes,
                         double beta_bar) {
  if (ws.w.rows() != d.size() || ws.w.cols() != d.n())
    throw std::invalid_argument("weight scheme not aligned with design support");
  EvalReport rep;
  Eigen::VectorXd est(d.size());
  for (int k = 0; k < d.size(); ++k) est[k] = ws.w.row(k).dot(outcomes.row(k));
  double mean = 0.0;
  for (int k = 0; k < d.size(); ++k) mean += d.prob(k) * est[k];
  double var = 0.0;
  for (int k = 0; k < d.size(); ++k) {
    const double dev = est[k] - mean;
    var += d.prob(k) * dev * dev;
  }
  rep.mean = mean;
  rep.bias = mean - beta_bar;
  rep.variance = var;
  rep.mse = rep.bias * rep.bias + var;
  return rep;
}

EvalReport exact_moments(const WeightScheme& ws, const Design& d, const ParamSet& params, const Graph& g) {
  Eigen::MatrixXd outcomes(d.size(), d.n());
  for (int k = 0; k < d.size(); ++k) outcomes.row(k) = evaluate_all(params, g, d.allocation(k));
  return exact_moments(ws, d, outcomes, estimand_beta_bar(params));
}

const std::vector<std::string>& six_estimator_names() {
  static const std::vector<std::string> names = {"naive",       "horvitz_thompson", "stratified_naive",
                                                 "independent", "equal",            "sanasia"};
  return names;
}

std::vector<EstimatorResult> six_estimators(const Graph& g, const Design& d) {
  if (d.contains_trivial())
    throw std::invalid_argument("six_estimators needs a design without the trivial allocations");
  const int n = d.n();
  const int dmax = std::max(1, g.max_degree());
  std::vector<EstimatorResult> out;
  auto attempt = [&](const std::string& name, const std::function<WeightScheme()>& make) {
    EstimatorResult r;
    r.name = name;
    try {
      r.weights = make();
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  };
  attempt("naive", [&] { return naive_weights(d); });
  attempt("horvitz_thompson", [&] { return ht_weights(d); });
  attempt("stratified_naive", [&] { return stratified_naive_weights(g, d); });
  attempt("independent", [&] {
    const PriorCov prior = make_sania_uncorrelated(n, dmax, 1.0, 1.0, 1.0);
    return solve_sania_uncorrelated(g, d, prior).weights;
  });
  attempt("equal", [&] {
    const PriorCov prior = make_sania_constant(dmax, 1.0, 1.0, 1.0, 1e-4);
    return solve_nonsingular(ModelKind::SANIA, g, d, prior).weights;
  });
  attempt("sanasia", [&] {
    const PriorCov prior = make_sanasia_independent(n, 1.0, 1.0, 1.0 / n);
    return solve_sanasia(g, d, prior).weights;
  });
  return out;
}

SweepScenario parse_scenario(const std::string& name) {
  if (name == "vary_n_density") return SweepScenario::vary_n_density;
  if (name == "vary_effects") return SweepScenario::vary_effects;
  if (name == "vary_degree_power") return SweepScenario::vary_degree_power;
  throw std::invalid_argument("unknown sweep scenario: " + name);
}

std::string scenario_name(SweepScenario s) {
  switch (s) {
    case SweepScenario::vary_n_density: return "vary_n_density";
    case SweepScenario::vary_effects: return "vary_effects";
    case SweepScenario::vary_degree_power: return "vary_degree_power";
  }
  return "?";
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep config: " + path);
  SweepConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string key;
    is >> key;
    auto bad = [&]() {
      return std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed '" + key + "' entry");
    };
    if (key == "scenario") {
      std::string v;
      is >> v;
      if (!is) throw bad();
      cfg.scenario = parse_scenario(v);
    } else if (key == "n_values") {
      cfg.n_values.clear();
      int v;
      while (is >> v) cfg.n_values.push_back(v);
      if (cfg.n_values.empty()) throw bad();
    } else if (key == "density") {
      is >> cfg.density;
      if (!is || (cfg.density != "dense" && cfg.density != "sparse" && cfg.density != "both")) throw bad();
    } else if (key == "mu_beta_values" || key == "mu_gamma_values" || key == "rho_values") {
      auto& dst = key == "mu_beta_values" ? cfg.mu_beta_values
                  : key == "mu_gamma_values" ? cfg.mu_gamma_values
                                             : cfg.rho_values;
      dst.clear();
      double v;
      while (is >> v) dst.push_back(v);
      if (dst.empty()) throw bad();
    } else if (key == "replicates") {
      is >> cfg.replicates;
      if (!is || cfg.replicates < 1) throw bad();
    } else if (key == "support_cap") {
      is >> cfg.support_cap;
      if (!is || cfg.support_cap < 2) throw bad();
    } else if (key == "seed") {
      is >> cfg.seed;
      if (!is) throw bad();
    } else if (key == "max_resample") {
      is >> cfg.max_resample;
      if (!is || cfg.max_resample < 0) throw bad();
    } else if (key == "jobs") {
      is >> cfg.jobs;
      if (!is || cfg.jobs < 1) throw bad();
    } else if (key == "estimators") {
      cfg.estimators.clear();
      std::string v;
      while (is >> v) cfg.estimators.push_back(v);
    } else {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown entry '" + key + "'");
    }
  }
  return cfg;
}

namespace {

struct GridPoint {
  int n = 0;
  std::string density;
  double edge_prob = 0.5;
  double mu_beta = 2.0, mu_gamma = 1.0;
  double rho = 0.0;
  bool has_effects = false, has_rho = false;
};

struct ReplicateOutcome {
  // per estimator index: success flag + moments
  std::vector<char> ok;
  std::vector<EvalReport> reports;
  int resamples = 0;
  std::vector<std::string> errors;
};

ReplicateOutcome run_replicate(const SweepConfig& cfg, const GridPoint& gp,
                               const std::vector<std::string>& wanted, std::uint64_t param_seed,
                               std::uint64_t rep_seed) {
  ReplicateOutcome out;
  const std::size_t E = wanted.size();
  out.ok.assign(E, 0);
  out.reports.assign(E, {});
  out.errors.assign(E, "");

  SamplingSpec spec;
  spec.alpha_mean = 0.0;
  spec.alpha_sd = 1.0;
  spec.beta_mean = gp.mu_beta;
  spec.beta_sd = 1.0;
  spec.gamma_mean_coef = gp.mu_gamma;
  spec.gamma_sd = 1.0;

  for (int attempt = 0; attempt <= cfg.max_resample; ++attempt) {
    const std::uint64_t aseed = derive_seed(rep_seed, static_cast<std::uint64_t>(attempt));
    Graph g = gp.has_rho
                  ? generate_graph(GraphFamily::pref_attach, gp.n, derive_seed(aseed, 'g'), gp.rho)
                  : generate_graph(GraphFamily::erdos_renyi, gp.n, derive_seed(aseed, 'g'), gp.edge_prob);
    Design d = bernoulli_design(gp.n, 0.5, /*exclude_trivial=*/true, cfg.support_cap, derive_seed(aseed, 'd'));
    // parameters shared across replicates of the grid point (same seed)
    const ParamSet params = sample_params(ModelKind::SANIA, g, spec, param_seed);
    const double beta_bar = estimand_beta_bar(params);
    Eigen::MatrixXd outcomes(d.size(), d.n());
    for (int k = 0; k < d.size(); ++k) outcomes.row(k) = evaluate_all(params, g, d.allocation(k));

    std::vector<EstimatorResult> ests = six_estimators(g, d);
    bool all_ok = true;
    for (std::size_t e = 0; e < E; ++e) {
      const auto it = std::find_if(ests.begin(), ests.end(),
                                   [&](const EstimatorResult& r) { return r.name == wanted[e]; });
      if (it == ests.end()) throw std::logic_error("unknown estimator requested: " + wanted[e]);
      if (it->weights) {
        out.ok[e] = 1;
        out.reports[e] = exact_moments(*it->weights, d, outcomes, beta_bar);
        out.errors[e].clear();
      } else {
        out.ok[e] = 0;
        out.errors[e] = it->error;
        all_ok = false;
      }
    }
    out.resamples = attempt;
    if (all_ok) break;
  }
  return out;
}

}  // namespace

void run_sweep(const SweepConfig& cfg, const std::function<void(const SweepRow&)>& sink) {
  std::vector<std::string> wanted = cfg.estimators.empty() ? six_estimator_names() : cfg.estimators;
  for (const auto& name : wanted) {
    const auto& known = six_estimator_names();
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw std::invalid_argument("unknown estimator in sweep config: " + name);
  }

  std::vector<GridPoint> grid;
  switch (cfg.scenario) {
    case SweepScenario::vary_n_density: {
      std::vector<std::string> dens;
      if (cfg.density == "both") dens = {"dense", "sparse"};
      else dens = {cfg.density};
      for (int n : cfg.n_values)
        for (const auto& de : dens) {
          GridPoint gp;
          gp.n = n;
          gp.density = de;
          gp.edge_prob = de == "dense" ? 0.5 : 1.0 / n;
          grid.push_back(gp);
        }
      break;
    }
    case SweepScenario::vary_effects: {
      for (int n : cfg.n_values)
        for (double mb : cfg.mu_beta_values)
          for (double mg : cfg.mu_gamma_values) {
            GridPoint gp;
            gp.n = n;
            gp.density = "dense";
            gp.edge_prob = 0.5;
            gp.mu_beta = mb;
            gp.mu_gamma = mg;
            gp.has_effects = true;
            grid.push_back(gp);
          }
      break;
    }
    case SweepScenario::vary_degree_power: {
      for (int n : cfg.n_values)
        for (double rho : cfg.rho_values) {
          GridPoint gp;
          gp.n = n;
          gp.rho = rho;
          gp.has_rho = true;
          grid.push_back(gp);
        }
      break;
    }
  }

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const GridPoint& gp = grid[gi];
    // seeds depend only on the effect-independent coordinates, so grid
    // points that differ in mu_beta/mu_gamma share graphs, designs and
    // parameter noise; effect sizes enter as pure mean shifts
    std::uint64_t coord = static_cast<std::uint64_t>(gp.n);
    coord = derive_seed(coord, gp.density == "sparse" ? 2u : 1u);
    std::uint64_t rho_bits;
    static_assert(sizeof(rho_bits) == sizeof(gp.rho));
    std::memcpy(&rho_bits, &gp.rho, sizeof(rho_bits));
    coord = derive_seed(coord, gp.has_rho ? rho_bits : 0u);
    const std::uint64_t gp_seed = derive_seed(cfg.seed, 0x6770ULL, coord);
    const std::uint64_t param_seed = derive_seed(gp_seed, 0x706172ULL);

    std::vector<ReplicateOutcome> results(static_cast<std::size_t>(cfg.replicates));
    std::atomic<int> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex err_mutex;
    auto worker = [&]() {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= cfg.replicates) break;
        try {
          results[static_cast<std::size_t>(r)] =
              run_replicate(cfg, gp, wanted, param_seed, derive_seed(gp_seed, static_cast<std::uint64_t>(r)));
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          break;
        }
      }
    };
    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (std::size_t e = 0; e < wanted.size(); ++e) {
      SweepRow row;
      row.scenario = scenario_name(cfg.scenario);
      row.n = gp.n;
      row.density = cfg.scenario == SweepScenario::vary_degree_power ? "" : gp.density;
      row.mu_beta = gp.mu_beta;
      row.mu_gamma = gp.mu_gamma;
      row.has_effects = gp.has_effects;
      row.rho = gp.rho;
      row.has_rho = gp.has_rho;
      row.estimator = wanted[e];
      row.seed = cfg.seed;
      double mse = 0.0, b2 = 0.0, var = 0.0;
      int used = 0, resampled = 0;
      std::string why;
      for (const auto& res : results) {
        resampled += res.resamples;
        if (res.ok[e]) {
          ++used;
          mse += res.reports[e].mse;
          b2 += res.reports[e].bias * res.reports[e].bias;
          var += res.reports[e].variance;
        } else if (why.empty()) {
          why = res.errors[e];
        }
      }
      row.replicates_used = used;
      if (used > 0) {
        row.avg_mse = mse / used;
        row.avg_bias2 = b2 / used;
        row.avg_variance = var / used;
      }
      std::ostringstream note;
      if (resampled > 0) note << "resampled=" << resampled;
      if (used < cfg.replicates) {
        if (resampled > 0) note << "; ";
        note << "missing=" << (cfg.replicates - used) << " (" << why << ")";
      }
      row.note = note.str();
      sink(row);
    }
  }
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  std::vector<SweepRow> rows;
  run_sweep(cfg, [&](const SweepRow& r) { rows.push_back(r); });
  return rows;
}

std::string sweep_csv_header() {
  return "scenario,n,density,mu_beta,mu_gamma,rho,estimator,replicates_used,avg_mse,avg_bias2,avg_variance,seed,note";
}

std::string sweep_csv_line(const SweepRow& r) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << r.scenario << "," << r.n << "," << r.density << ",";
  if (r.has_effects) os << num(r.mu_beta) << "," << num(r.mu_gamma) << ",";
  else os << ",,";
  if (r.has_rho) os << num(r.rho) << ",";
  else os << ",";
  os << r.estimator << "," << r.replicates_used << ",";
  if (r.replicates_used > 0)
    os << num(r.avg_mse) << "," << num(r.avg_bias2) << "," << num(r.avg_variance) << ",";
  else
    os << ",,,";
  os << r.seed << "," << r.note;
  return os.str();
}

}  // namespace mivnet
