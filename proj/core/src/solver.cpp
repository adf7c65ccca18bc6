#include "mivnet/solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mivnet/linalg.hpp"

namespace mivnet {

std::string solve_path_name(SolvePath p) {
  switch (p) {
    case SolvePath::general_pinv: return "general_pinv";
    case SolvePath::nonsingular: return "nonsingular";
    case SolvePath::sania_uncorrelated: return "sania_uncorrelated";
    case SolvePath::nia_uncorrelated: return "nia_uncorrelated";
    case SolvePath::sanasia_closed: return "sanasia_closed";
    case SolvePath::vertex_transitive: return "vertex_transitive";
  }
  return "?";
}

namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kSingularRel = 1e-10;

// Relative least-squares residual of the constraint system via its Gram
// matrix; small iff the constraints are consistent.
double feasibility_residual(const ConstraintSystem& cs) {
  const int m = static_cast<int>(cs.rows.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b(m);
  Eigen::VectorXd scratch = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cs.support_size) * cs.n);
  for (int r = 0; r < m; ++r) {
    b[r] = cs.rows[static_cast<std::size_t>(r)].rhs;
    for (const auto& e : cs.rows[static_cast<std::size_t>(r)].entries)
      scratch[static_cast<Eigen::Index>(e.alloc) * cs.n + e.unit] = e.coeff;
    for (int r2 = r; r2 < m; ++r2) {
      double dot = 0.0;
      for (const auto& e : cs.rows[static_cast<std::size_t>(r2)].entries)
        dot += e.coeff * scratch[static_cast<Eigen::Index>(e.alloc) * cs.n + e.unit];
      gram(r, r2) = gram(r2, r) = dot;
    }
    for (const auto& e : cs.rows[static_cast<std::size_t>(r)].entries)
      scratch[static_cast<Eigen::Index>(e.alloc) * cs.n + e.unit] = 0.0;
  }
  Eigen::VectorXd y = gram.completeOrthogonalDecomposition().solve(b);
  return (gram * y - b).norm() / b.norm();
}

// Constraint coefficients regrouped by allocation; phi = coeff / p(z).
struct AllocColumns {
  struct Ent {
    int row;
    int unit;
    double phi;
  };
  std::vector<std::vector<Ent>> by_alloc;
};

AllocColumns alloc_columns(const ConstraintSystem& cs, const Design& d) {
  AllocColumns cols;
  cols.by_alloc.assign(static_cast<std::size_t>(cs.support_size), {});
  for (int r = 0; r < static_cast<int>(cs.rows.size()); ++r)
    for (const auto& e : cs.rows[static_cast<std::size_t>(r)].entries)
      cols.by_alloc[static_cast<std::size_t>(e.alloc)].push_back({r, e.unit, e.coeff / d.prob(e.alloc)});
  return cols;
}

Eigen::VectorXd rhs_vector(const ConstraintSystem& cs) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(cs.rows.size()));
  for (std::size_t r = 0; r < cs.rows.size(); ++r) c[static_cast<Eigen::Index>(r)] = cs.rows[r].rhs;
  return c;
}

// M(z_k) lambda as an n-vector, from the allocation's constraint columns.
Eigen::VectorXd apply_M(const AllocColumns& cols, int k, int n, const Eigen::VectorXd& lam) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (const auto& e : cols.by_alloc[static_cast<std::size_t>(k)]) v[e.unit] += e.phi * lam[e.row];
  return v;
}

// n * max(|Sigma~ w + M lambda~|_inf over (z, i), |A w - c|_inf over rows),
// with sigma_apply(k, w_k) returning Sigma~(z_k) w_k.
double residual_norm(const ConstraintSystem& cs, const AllocColumns& cols,
                     const std::function<Eigen::VectorXd(int, const Eigen::VectorXd&)>& sigma_apply,
                     const Eigen::MatrixXd& w, const Eigen::VectorXd& lam_tilde) {
  const int n = cs.n, S = cs.support_size;
  double worst = 0.0;
  for (int k = 0; k < S; ++k) {
    Eigen::VectorXd wk = w.row(k);
    Eigen::VectorXd r = sigma_apply(k, wk) + apply_M(cols, k, n, lam_tilde);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  for (const auto& row : cs.rows) {
    double acc = -row.rhs;
    for (const auto& e : row.entries) acc += e.coeff * w(e.alloc, e.unit);
    worst = std::max(worst, std::abs(acc));
  }
  return worst * n;
}

// Minimum-norm least-squares multipliers for fixed weights: minimizes
// ||Sigma~ w + M lambda~|| over lambda~ via the Gram system.
Eigen::VectorXd fit_multipliers(const ConstraintSystem& cs, const AllocColumns& cols,
                                const std::function<Eigen::VectorXd(int, const Eigen::VectorXd&)>& sigma_apply,
                                const Eigen::MatrixXd& w) {
  const int m = static_cast<int>(cs.rows.size());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < cs.support_size; ++k) {
    const auto& ents = cols.by_alloc[static_cast<std::size_t>(k)];
    Eigen::VectorXd wk = w.row(k);
    Eigen::VectorXd sw = sigma_apply(k, wk);
    for (const auto& a : ents) {
      rhs[a.row] -= a.phi * sw[a.unit];
      for (const auto& b : ents)
        if (a.unit == b.unit) gram(a.row, b.row) += a.phi * b.phi;
    }
  }
  return gram.completeOrthogonalDecomposition().solve(rhs);
}

void verify_solution(const WeightScheme& ws, const ConstraintSystem& cs, double resid,
                     const SolveOptions& opt, const char* path) {
  const UnbiasedVerdict v = check_unbiased(ws, cs, opt.tol_unbiased);
  if (!v.unbiased) {
    std::ostringstream os;
    os << path << ": weights violate unbiasedness (" << v.worst_row << ", violation " << v.max_violation
       << " > " << opt.tol_unbiased << ")";
    throw SolverError(os.str());
  }
  if (!(resid <= opt.tol_kkt)) {
    std::ostringstream os;
    os << path << ": KKT residual " << resid << " exceeds " << opt.tol_kkt << "; result is not optimal";
    throw SolverError(os.str());
  }
}

double scale_of(const SigmaAssembler& as, const Design& d) {
  double s = 0.0;
  for (int k = 0; k < d.size(); ++k) s += as.sigma(d.allocation(k)).trace() / d.n();
  s /= d.size();
  return s > 1e-300 ? s : 1.0;
}

}  // namespace

KKTSystem build_kkt(ModelKind kind, const Graph& g, const Design& d, const PriorCov& prior) {
  validate_prior(prior);
  SigmaAssembler as(prior, g);
  KKTSystem sys;
  sys.kind = kind;
  sys.design = &d;
  sys.constraints = build_constraints(kind, g, d);
  sys.sigma_scaled.reserve(static_cast<std::size_t>(d.size()));
  double s = 0.0;
  for (int k = 0; k < d.size(); ++k) {
    sys.sigma_scaled.push_back(as.sigma(d.allocation(k)));
    s += sys.sigma_scaled.back().trace() / d.n();
  }
  s /= d.size();
  sys.prior_scale = s > 1e-300 ? s : 1.0;
  for (auto& m : sys.sigma_scaled) m /= sys.prior_scale;
  return sys;
}

double kkt_residual(const SolveReport& report, const KKTSystem& sys) {
  const ConstraintSystem& cs = sys.constraints;
  if (report.weights.w.rows() != cs.support_size || report.weights.w.cols() != cs.n)
    throw std::invalid_argument("report weights not dimensioned for system");
  AllocColumns cols = alloc_columns(cs, *sys.design);
  auto sigma_apply = [&](int k, const Eigen::VectorXd& wk) -> Eigen::VectorXd {
    return sys.sigma_scaled[static_cast<std::size_t>(k)] * wk;
  };
  Eigen::VectorXd lam_tilde;
  if (report.multipliers.size() == static_cast<Eigen::Index>(cs.rows.size()))
    lam_tilde = report.multipliers / sys.prior_scale;
  else
    lam_tilde = fit_multipliers(cs, cols, sigma_apply, report.weights.w);
  return residual_norm(cs, cols, sigma_apply, report.weights.w, lam_tilde);
}

SolveReport solve_general(ModelKind kind, const Graph& g, const Design& d, const PriorCov& prior,
                          const SolveOptions& opt) {
  KKTSystem sys = build_kkt(kind, g, d, prior);
  const ConstraintSystem& cs = sys.constraints;
  if (feasibility_residual(cs) > kFeasTol)
    throw InfeasibleError("solve_general: unbiasedness constraints are infeasible for kind " +
                          model_kind_name(kind));

  const int n = cs.n, S = cs.support_size;
  const int N = sys.weight_unknowns(), m = sys.multiplier_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(S) * n * 4);
  for (int k = 0; k < S; ++k) {
    const Eigen::MatrixXd& sig = sys.sigma_scaled[static_cast<std::size_t>(k)];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (sig(i, j) != 0.0) trips.emplace_back(k * n + i, k * n + j, sig(i, j));
  }
  for (int r = 0; r < m; ++r) {
    for (const auto& e : cs.rows[static_cast<std::size_t>(r)].entries) {
      trips.emplace_back(N + r, e.alloc * n + e.unit, e.coeff);
      trips.emplace_back(e.alloc * n + e.unit, N + r, e.coeff / d.prob(e.alloc));
    }
  }
  Eigen::SparseMatrix<double> A(N + m, N + m);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + m);
  rhs.tail(m) = rhs_vector(cs);

  Eigen::VectorXd x = minimum_norm_solve(A, rhs);

  SolveReport rep;
  rep.path_used = SolvePath::general_pinv;
  rep.weights.w.resize(S, n);
  for (int k = 0; k < S; ++k)
    for (int i = 0; i < n; ++i) rep.weights.w(k, i) = x[k * n + i];
  Eigen::VectorXd lam_tilde = x.tail(m);
  rep.multipliers = lam_tilde * sys.prior_scale;
  rep.kkt_residual = (A * x - rhs).cwiseAbs().maxCoeff() * n;
  verify_solution(rep.weights, cs, rep.kkt_residual, opt, "solve_general");
  return rep;
}

namespace {

// Shared reduction: w(z) = -Sigma~(z)^{-1} M(z) lambda~, with the reduced
// multiplier system G lambda~ = -c, G = sum_z p(z) M(z)' Sigma~(z)^{-1} M(z).
SolveReport reduced_solve(ModelKind kind, const Graph& g, const Design& d, const PriorCov& prior,
                          const SolveOptions& opt, SolvePath path) {
  const char* name = path == SolvePath::sanasia_closed ? "solve_sanasia" : "solve_nonsingular";
  validate_prior(prior);
  SigmaAssembler as(prior, g);
  const ConstraintSystem cs = build_constraints(kind, g, d);
  if (feasibility_residual(cs) > kFeasTol)
    throw InfeasibleError(std::string(name) + ": unbiasedness constraints are infeasible");
  const AllocColumns cols = alloc_columns(cs, d);
  const int n = cs.n, S = cs.support_size, m = static_cast<int>(cs.rows.size());

  const double scale = scale_of(as, d);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < S; ++k) {
    Eigen::MatrixXd sig = as.sigma(d.allocation(k)) / scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sig, Eigen::EigenvaluesOnly);
    const double mineig = es.eigenvalues().minCoeff();
    if (!(mineig > kSingularRel * sig.trace() / n))
      throw SingularSigmaError(std::string(name) + ": Sigma(z) is singular at allocation " +
                               d.allocation(k).to_string() + "; use solve_general");
    Eigen::LDLT<Eigen::MatrixXd> ldlt(sig);
    const auto& ents = cols.by_alloc[static_cast<std::size_t>(k)];
    // distinct constraint columns touching this allocation
    std::vector<int> rows;
    rows.reserve(ents.size());
    for (const auto& e : ents) rows.push_back(e.row);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(rows.size()));
    for (const auto& e : ents) {
      const auto pos = std::lower_bound(rows.begin(), rows.end(), e.row) - rows.begin();
      M(e.unit, static_cast<Eigen::Index>(pos)) += e.phi;
    }
    Eigen::MatrixXd X = ldlt.solve(M);
    Eigen::MatrixXd contrib = d.prob(k) * (M.transpose() * X);
    for (std::size_t a = 0; a < rows.size(); ++a)
      for (std::size_t b = 0; b < rows.size(); ++b)
        gram(rows[a], rows[b]) += contrib(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  const Eigen::VectorXd lam_tilde = gram.completeOrthogonalDecomposition().solve(-rhs_vector(cs));

  SolveReport rep;
  rep.path_used = path;
  rep.weights.w.resize(S, n);
  for (int k = 0; k < S; ++k) {
    Eigen::MatrixXd sig = as.sigma(d.allocation(k)) / scale;
    Eigen::VectorXd v = apply_M(cols, k, n, lam_tilde);
    rep.weights.w.row(k) = -Eigen::LDLT<Eigen::MatrixXd>(sig).solve(v);
  }
  rep.multipliers = lam_tilde * scale;
  auto sigma_apply = [&](int k, const Eigen::VectorXd& wk) -> Eigen::VectorXd {
    return (as.sigma(d.allocation(k)) / scale) * wk;
  };
  rep.kkt_residual = residual_norm(cs, cols, sigma_apply, rep.weights.w, lam_tilde);
  verify_solution(rep.weights, cs, rep.kkt_residual, opt, name);
  return rep;
}

}  // namespace

SolveReport solve_nonsingular(ModelKind kind, const Graph& g, const Design& d, const PriorCov& prior,
                              const SolveOptions& opt) {
  return reduced_solve(kind, g, d, prior, opt, SolvePath::nonsingular);
}

SolveReport solve_sanasia(const Graph& g, const Design& d, const PriorCov& prior,
                          const SolveOptions& opt) {
  if (prior.kind != PriorKind::sanasia_independent)
    throw std::invalid_argument("solve_sanasia needs a sanasia_independent prior");
  for (int i = 0; i < d.n(); ++i) {
    const double pi = d.marginal(i);
    if (!(pi > 0.0) || !(pi < 1.0))
      throw SolverError("solve_sanasia: unit " + std::to_string(i) +
                        " has an unsupported arm (a_i = b_i degeneracy)");
  }
  return reduced_solve(ModelKind::SANASIA, g, d, prior, opt, SolvePath::sanasia_closed);
}

namespace {

struct PropTable {
  // per unit: attained degrees and exact Pr[z_i = arm, d_i = deg]
  std::vector<std::map<int, double>> prob[2];
};

PropTable propensity_table(const Graph& g, const Design& d) {
  PropTable t;
  t.prob[0].assign(static_cast<std::size_t>(d.n()), {});
  t.prob[1].assign(static_cast<std::size_t>(d.n()), {});
  for (int k = 0; k < d.size(); ++k) {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    for (int i = 0; i < d.n(); ++i)
      t.prob[z[i]][static_cast<std::size_t>(i)][deg[static_cast<std::size_t>(i)]] += d.prob(k);
  }
  return t;
}

bool uncorrelated_prior(const PriorCov& p) {
  return p.kind == PriorKind::sania_uncorrelated || p.kind == PriorKind::sutva_uncorrelated ||
         p.kind == PriorKind::custom;
}

}  // namespace

SolveReport solve_sania_uncorrelated(const Graph& g, const Design& d, const PriorCov& prior, const SolveOptions& opt) {
  if (!uncorrelated_prior(prior))
    throw std::invalid_argument("solve_sania_uncorrelated needs a prior uncorrelated across units");
  {
    const ExistenceReport ex = exists_sania_report(g, d);
    if (!ex.exists)
      throw InfeasibleError("solve_sania_uncorrelated: no unbiased estimator exists (witness unit " +
                            std::to_string(ex.witness_unit) + ")");
  }
  SigmaAssembler as(prior, g);
  const int n = d.n(), S = d.size();
  const PropTable pt = propensity_table(g, d);

  // stratum scale C_{i,d}: inverse of the two propensity-weighted
  // variances; zero when either arm misses the stratum.
  std::vector<std::map<int, double>> C(static_cast<std::size_t>(n));
  std::vector<double> T(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    std::set<int> degs;
    for (int arm : {0, 1})
      for (auto& [dd, p] : pt.prob[arm][static_cast<std::size_t>(i)])
        if (p > 0) degs.insert(dd);
    for (int dd : degs) {
      auto p0 = pt.prob[0][static_cast<std::size_t>(i)].find(dd);
      auto p1 = pt.prob[1][static_cast<std::size_t>(i)].find(dd);
      double c = 0.0;
      if (p0 != pt.prob[0][static_cast<std::size_t>(i)].end() &&
          p1 != pt.prob[1][static_cast<std::size_t>(i)].end()) {
        const double denom = as.sigma_ii(i, 0, dd) / p0->second + as.sigma_ii(i, 1, dd) / p1->second;
        if (!(denom > 0.0))
          throw SolverError("solve_sania_uncorrelated: zero-variance stratum (unit " + std::to_string(i) + ", degree " +
                            std::to_string(dd) + ")");
        c = 1.0 / denom;
      }
      C[static_cast<std::size_t>(i)][dd] = c;
      T[static_cast<std::size_t>(i)] += c;
    }
    if (!(T[static_cast<std::size_t>(i)] > 0.0))
      throw SolverError("solve_sania_uncorrelated: all strata unbalanced for unit " + std::to_string(i));
  }

  SolveReport rep;
  rep.path_used = SolvePath::sania_uncorrelated;
  rep.weights.w.resize(S, n);
  for (int k = 0; k < S; ++k) {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    for (int i = 0; i < n; ++i) {
      const int dd = deg[static_cast<std::size_t>(i)];
      const double c = C[static_cast<std::size_t>(i)].at(dd);
      if (c == 0.0) {
        rep.weights.w(k, i) = 0.0;
      } else {
        const double pr = pt.prob[z[i]][static_cast<std::size_t>(i)].at(dd);
        rep.weights.w(k, i) = (c / T[static_cast<std::size_t>(i)]) * (z[i] ? 1.0 : -1.0) / (n * pr);
      }
    }
  }

  const ConstraintSystem cs = build_constraints(ModelKind::SANIA, g, d);
  const AllocColumns cols = alloc_columns(cs, d);
  const double scale = scale_of(as, d);
  auto sigma_apply = [&](int k, const Eigen::VectorXd& wk) -> Eigen::VectorXd {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i)
      out[i] = as.sigma_ii(i, z[i], deg[static_cast<std::size_t>(i)]) / scale * wk[i];
    return out;
  };
  const Eigen::VectorXd lam_tilde = fit_multipliers(cs, cols, sigma_apply, rep.weights.w);
  rep.multipliers = lam_tilde * scale;
  rep.kkt_residual = residual_norm(cs, cols, sigma_apply, rep.weights.w, lam_tilde);
  verify_solution(rep.weights, cs, rep.kkt_residual, opt, "solve_sania_uncorrelated");
  return rep;
}

SolveReport solve_nia_uncorrelated(const Graph& g, const Design& d, const PriorCov& prior,
                           const SolveOptions& opt, ModelKind kind) {
  if (kind != ModelKind::NIA && kind != ModelKind::SNIA)
    throw std::invalid_argument("solve_nia_uncorrelated covers NIA and SNIA");
  if (!uncorrelated_prior(prior))
    throw std::invalid_argument("solve_nia_uncorrelated needs a prior uncorrelated across units");
  {
    const ExistenceReport ex = exists_nia_report(g, d);
    if (!ex.exists)
      throw InfeasibleError("solve_nia_uncorrelated: no unbiased estimator exists (witness unit " +
                            std::to_string(ex.witness_unit) + ")");
  }
  SigmaAssembler as(prior, g);
  const int n = d.n(), S = d.size();
  const PropTable pt = propensity_table(g, d);

  SolveReport rep;
  rep.path_used = SolvePath::nia_uncorrelated;
  rep.weights.w.resize(S, n);
  for (int k = 0; k < S; ++k) {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    for (int i = 0; i < n; ++i) {
      if (deg[static_cast<std::size_t>(i)] != 0) {
        rep.weights.w(k, i) = 0.0;
      } else {
        const double pr = pt.prob[z[i]][static_cast<std::size_t>(i)].at(0);
        rep.weights.w(k, i) = (z[i] ? 1.0 : -1.0) / (n * pr);
      }
    }
  }

  const ConstraintSystem cs = build_constraints(kind, g, d);
  const AllocColumns cols = alloc_columns(cs, d);
  const double scale = scale_of(as, d);
  auto sigma_apply = [&](int k, const Eigen::VectorXd& wk) -> Eigen::VectorXd {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i)
      out[i] = as.sigma_ii(i, z[i], deg[static_cast<std::size_t>(i)]) / scale * wk[i];
    return out;
  };
  const Eigen::VectorXd lam_tilde = fit_multipliers(cs, cols, sigma_apply, rep.weights.w);
  rep.multipliers = lam_tilde * scale;
  rep.kkt_residual = residual_norm(cs, cols, sigma_apply, rep.weights.w, lam_tilde);
  verify_solution(rep.weights, cs, rep.kkt_residual, opt, "solve_nia_uncorrelated");
  return rep;
}

namespace {

enum class VtFamily { empty, complete, ring };

VtFamily classify_vertex_transitive(const Graph& g) {
  const int n = g.size();
  if (g.edge_count() == 0) return VtFamily::empty;
  bool complete = true;
  for (int i = 0; i < n && complete; ++i)
    for (int j = 0; j < n && complete; ++j)
      if (i != j && !g.edge(i, j)) complete = false;
  if (complete) return VtFamily::complete;
  if (n >= 3) {
    bool ring = true;
    for (int i = 0; i < n && ring; ++i) {
      const int a = (i + 1) % n, b = (i + n - 1) % n;
      for (int j = 0; j < n && ring; ++j) {
        const bool want = (j == a || j == b);
        if (g.edge(i, j) != want || g.edge(j, i) != want) ring = false;
      }
    }
    if (ring) return VtFamily::ring;
  }
  throw std::invalid_argument(
      "solve_vertex_transitive certifies only rings (consecutive labels), complete and empty graphs");
}

void check_vt_design(VtFamily fam, const Graph& g, const Design& d) {
  const int n = d.n();
  if (fam == VtFamily::ring) {
    // rotation symmetry: every rotation of a supported allocation is
    // supported with the same probability
    for (int k = 0; k < d.size(); ++k) {
      const Allocation& z = d.allocation(k);
      for (int r = 1; r < n; ++r) {
        Allocation zr(n);
        for (int i = 0; i < n; ++i) zr[i] = z[(i + r) % n];
        auto idx = d.index_of(zr);
        if (!idx || std::abs(d.prob(*idx) - d.prob(k)) > 1e-12)
          throw std::invalid_argument("design is not symmetric under ring rotations");
      }
    }
  } else {
    // permutation symmetry: pmf depends only on the treated count and each
    // represented count class is fully supported
    std::map<int, std::pair<double, std::int64_t>> by_count;  // count -> (prob, seen)
    for (int k = 0; k < d.size(); ++k) {
      const int t = d.allocation(k).treated_count();
      auto [it, fresh] = by_count.try_emplace(t, std::make_pair(d.prob(k), std::int64_t{0}));
      if (!fresh && std::abs(it->second.first - d.prob(k)) > 1e-12)
        throw std::invalid_argument("design is not symmetric under unit permutations");
      ++it->second.second;
    }
    for (auto& [t, v] : by_count) {
      // C(n, t)
      double binom = 1.0;
      for (int a = 0; a < t; ++a) binom = binom * (n - a) / (a + 1);
      if (static_cast<double>(v.second) != std::round(binom))
        throw std::invalid_argument("design support is not closed under unit permutations");
    }
  }
  // treated-degree balance per allocation
  for (int k = 0; k < d.size(); ++k) {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    std::set<int> arm_deg[2];
    for (int i = 0; i < n; ++i) arm_deg[z[i]].insert(deg[static_cast<std::size_t>(i)]);
    bool balanced = false;
    for (int dd : arm_deg[1])
      if (arm_deg[0].count(dd)) {
        balanced = true;
        break;
      }
    if (!balanced)
      throw std::invalid_argument("allocation " + z.to_string() +
                                  " has disjoint treated-degree sets across arms");
  }
}

}  // namespace

SolveReport solve_vertex_transitive(const Graph& g, const Design& d, const SolveOptions& opt) {
  if (g.size() != d.n()) throw std::invalid_argument("graph/design dimension mismatch");
  const VtFamily fam = classify_vertex_transitive(g);
  check_vt_design(fam, g, d);

  SolveReport rep;
  rep.path_used = SolvePath::vertex_transitive;
  rep.weights = stratified_naive_weights(g, d, UnbalancedPolicy::error);

  // certify against the constant-prior KKT system: with all parameters equal
  // across units and independent families, the stationarity multipliers are
  // lambda~_C1 = -Var(beta)/scale per unit and zero elsewhere
  const PriorCov prior = make_sania_constant(std::max(1, g.max_degree()), 1.0, 1.0, 1.0, 0.0);
  SigmaAssembler as(prior, g);
  const ConstraintSystem cs = build_constraints(ModelKind::SANIA, g, d);
  const AllocColumns cols = alloc_columns(cs, d);
  const double scale = scale_of(as, d);
  Eigen::VectorXd lam_tilde = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cs.rows.size()));
  for (std::size_t r = 0; r < cs.rows.size(); ++r)
    if (cs.rows[r].family == ConstraintFamily::C1) lam_tilde[static_cast<Eigen::Index>(r)] = -1.0 / scale;
  auto sigma_apply = [&](int k, const Eigen::VectorXd& wk) -> Eigen::VectorXd {
    return (as.sigma(d.allocation(k)) / scale) * wk;
  };
  rep.multipliers = lam_tilde * scale;
  rep.kkt_residual = residual_norm(cs, cols, sigma_apply, rep.weights.w, lam_tilde);
  verify_solution(rep.weights, cs, rep.kkt_residual, opt, "solve_vertex_transitive");
  return rep;
}

}  // namespace mivnet
