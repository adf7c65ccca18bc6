#include "mivnet/constraints.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mivnet {

bool constraints_supported(ModelKind kind) {
  switch (kind) {
    case ModelKind::SUTVA:
    case ModelKind::NIA:
    case ModelKind::SNIA:
    case ModelKind::SANIA:
    case ModelKind::SANASIA: return true;
    default: return false;
  }
}

namespace {

std::string row_label(ConstraintFamily fam, int unit, std::int64_t key, bool with_key) {
  std::ostringstream os;
  os << "C" << static_cast<char>(fam);
  if (unit >= 0) os << "[i=" << unit << (with_key ? ",k=" + std::to_string(key) : "") << "]";
  else os << "[comp=" << key << "]";
  return os.str();
}

}  // namespace

ConstraintSystem build_constraints(ModelKind kind, const Graph& g, const Design& d) {
  if (!constraints_supported(kind))
    throw std::invalid_argument("no constraint builder for kind " + model_kind_name(kind) +
                                "; supported: SUTVA, NIA, SNIA, SANIA, SANASIA");
  if (g.size() != d.n()) throw std::invalid_argument("graph/design dimension mismatch");
  const int n = d.n(), S = d.size();

  // per-allocation treated degrees (and patterns for NIA) computed once
  std::vector<std::vector<int>> deg(static_cast<std::size_t>(S));
  for (int k = 0; k < S; ++k) deg[static_cast<std::size_t>(k)] = g.treated_degrees(d.allocation(k));

  ConstraintSystem cs;
  cs.n = n;
  cs.support_size = S;

  for (int i = 0; i < n; ++i) {
    ConstraintRow c1, c2;
    c1.family = ConstraintFamily::C1;
    c1.unit = i;
    c1.rhs = 1.0 / n;
    c1.label = row_label(c1.family, i, 0, false);
    c2.family = ConstraintFamily::C2;
    c2.unit = i;
    c2.label = row_label(c2.family, i, 0, false);
    for (int k = 0; k < S; ++k) {
      const double p = d.prob(k);
      c2.entries.push_back({k, i, p});
      if (d.allocation(k)[i]) c1.entries.push_back({k, i, p});
    }
    cs.rows.push_back(std::move(c1));
    cs.rows.push_back(std::move(c2));
  }

  auto add_keyed_rows = [&](int i, auto key_of, bool with_interaction) {
    // one C3 row per attained nonzero key; C4 rows carry the extra z_i factor
    std::map<std::int64_t, ConstraintRow> c3, c4;
    for (int k = 0; k < S; ++k) {
      const std::int64_t key = key_of(k, i);
      if (key == 0) continue;
      const double p = d.prob(k);
      auto& r3 = c3[key];
      r3.entries.push_back({k, i, p});
      if (with_interaction && d.allocation(k)[i]) c4[key].entries.push_back({k, i, p});
    }
    for (auto& [key, row] : c3) {
      row.family = ConstraintFamily::C3;
      row.unit = i;
      row.key = key;
      row.label = row_label(row.family, i, key, true);
      cs.rows.push_back(std::move(row));
    }
    for (auto& [key, row] : c4) {
      if (row.entries.empty()) continue;  // key never attained with z_i = 1
      row.family = ConstraintFamily::C4;
      row.unit = i;
      row.key = key;
      row.label = row_label(row.family, i, key, true);
      cs.rows.push_back(std::move(row));
    }
  };

  switch (kind) {
    case ModelKind::SUTVA: break;
    case ModelKind::SANIA:
      for (int i = 0; i < n; ++i)
        add_keyed_rows(i, [&](int k, int u) { return static_cast<std::int64_t>(deg[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)]); }, false);
      break;
    case ModelKind::SNIA:
      for (int i = 0; i < n; ++i)
        add_keyed_rows(i, [&](int k, int u) { return static_cast<std::int64_t>(deg[static_cast<std::size_t>(k)][static_cast<std::size_t>(u)]); }, true);
      break;
    case ModelKind::NIA:
      for (int i = 0; i < n; ++i)
        add_keyed_rows(i, [&](int k, int u) { return static_cast<std::int64_t>(neighbor_pattern(g, d.allocation(k), u)); }, true);
      break;
    case ModelKind::SANASIA: {
      const std::vector<int> label = component_labels(shared_neighbor_graph(g));
      int ncomp = 0;
      for (int c : label) ncomp = std::max(ncomp, c + 1);
      for (int c = 0; c < ncomp; ++c) {
        ConstraintRow row;
        row.family = ConstraintFamily::C3;
        row.unit = -1;
        row.key = c;
        row.label = "C3''[comp=" + std::to_string(c) + "]";
        for (int k = 0; k < S; ++k) {
          const double p = d.prob(k);
          for (int i = 0; i < n; ++i) {
            if (label[static_cast<std::size_t>(i)] != c) continue;
            const int di = deg[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            if (di > 0) row.entries.push_back({k, i, p * di});
          }
        }
        if (!row.entries.empty()) cs.rows.push_back(std::move(row));
      }
      break;
    }
    default: break;
  }
  return cs;
}

UnbiasedVerdict check_unbiased(const WeightScheme& ws, const ConstraintSystem& cs, double tol) {
  if (ws.w.rows() != cs.support_size || ws.w.cols() != cs.n)
    throw std::invalid_argument("weight scheme not aligned with constraint system");
  UnbiasedVerdict v;
  v.unbiased = true;
  for (const auto& row : cs.rows) {
    double acc = -row.rhs;
    for (const auto& e : row.entries) acc += e.coeff * ws.w(e.alloc, e.unit);
    const double viol = std::abs(acc);
    if (viol > v.max_violation) {
      v.max_violation = viol;
      v.worst_row = row.label;
    }
  }
  v.unbiased = v.max_violation <= tol;
  return v;
}

namespace {

ExistenceReport exists_condition(const Graph& g, const Design& d, bool same_degree_enough) {
  ExistenceReport rep;
  const int n = d.n();
  std::vector<std::set<int>> arm_degrees[2];
  arm_degrees[0].assign(static_cast<std::size_t>(n), {});
  arm_degrees[1].assign(static_cast<std::size_t>(n), {});
  for (int k = 0; k < d.size(); ++k) {
    const Allocation& z = d.allocation(k);
    const std::vector<int> deg = g.treated_degrees(z);
    for (int i = 0; i < n; ++i)
      arm_degrees[z[i]][static_cast<std::size_t>(i)].insert(deg[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < n; ++i) {
    bool ok;
    if (same_degree_enough) {
      ok = false;
      for (int dd : arm_degrees[1][static_cast<std::size_t>(i)])
        if (arm_degrees[0][static_cast<std::size_t>(i)].count(dd)) {
          ok = true;
          break;
        }
    } else {
      ok = arm_degrees[1][static_cast<std::size_t>(i)].count(0) != 0 &&
           arm_degrees[0][static_cast<std::size_t>(i)].count(0) != 0;
    }
    if (!ok) {
      rep.exists = false;
      rep.witness_unit = i;
      return rep;
    }
  }
  return rep;
}

}  // namespace

ExistenceReport exists_nia_report(const Graph& g, const Design& d) {
  return exists_condition(g, d, false);
}
bool exists_nia(const Graph& g, const Design& d) { return exists_nia_report(g, d).exists; }

ExistenceReport exists_sania_report(const Graph& g, const Design& d) {
  return exists_condition(g, d, true);
}
bool exists_sania(const Graph& g, const Design& d) { return exists_sania_report(g, d).exists; }

ExistenceReport exists_sutva_report(const Design& d) {
  ExistenceReport rep;
  for (int i = 0; i < d.n(); ++i) {
    const double pi = d.marginal(i);
    if (!(pi > 0.0) || !(pi < 1.0)) {
      rep.exists = false;
      rep.witness_unit = i;
      return rep;
    }
  }
  return rep;
}

bool exists_by_feasibility(ModelKind kind, const Graph& g, const Design& d) {
  const ConstraintSystem cs = build_constraints(kind, g, d);
  const int m = static_cast<int>(cs.rows.size());
  // Gram least squares: min ||A x - b|| with A fat; feasible iff the
  // residual of A A' y = b is small relative to ||b||
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b(m);
  // rows indexed over a shared flat (alloc, unit) space; accumulate dot
  // products via a dense scratch to stay O(nnz * m)
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
  const double resid = (gram * y - b).norm();
  return resid <= 1e-8 * b.norm();
}

}  // namespace mivnet
