// constraints.hpp — linear unbiasedness constraint systems and existence
// deciders for linear unbiased estimators of the average direct effect.
//
// A linear estimator sum_i w_i(z) Y_i(z) is unbiased iff its weights satisfy
// a family of linear equations over the design support. Per unit:
//   C1  sum_z p(z) w_i(z) z_i = 1/n                (direct-effect row)
//   C2  sum_z p(z) w_i(z) = 0                      (baseline row)
// plus interference rows by kind:
//   NIA    C3/C4 per attained nonzero neighbor pattern, without/with z_i
//   SNIA   the same keyed by treated degree
//   SANIA  C3' per attained degree d >= 1: sum_z p(z) w_i(z) 1{d_i^z=d} = 0
//   SANASIA C3'' per component C of the shared-neighbor graph h:
//          sum_z p(z) sum_{i in C} w_i(z) d_i^z = 0
//   SUTVA  no interference rows.
// Rows are enumerated only over patterns/degrees attained with positive
// probability; unattained ones are vacuously satisfied.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mivnet/design.hpp"
#include "mivnet/estimators.hpp"
#include "mivnet/graph.hpp"
#include "mivnet/outcome.hpp"

namespace mivnet {

enum class ConstraintFamily : char { C1 = '1', C2 = '2', C3 = '3', C4 = '4' };

struct ConstraintRow {
  // coefficient entries over weight unknowns, already multiplied by p(z)
  struct Entry {
    int alloc;  // support index
    int unit;
    double coeff;
  };
  std::vector<Entry> entries;
  double rhs = 0.0;
  ConstraintFamily family = ConstraintFamily::C1;
  int unit = -1;       // -1 for component rows
  std::int64_t key = 0;  // degree, neighbor pattern, or h component
  std::string label;
};

struct ConstraintSystem {
  int n = 0;
  int support_size = 0;
  std::vector<ConstraintRow> rows;
};

// Supported kinds: SUTVA, NIA, SNIA, SANIA, SANASIA. The remaining lattice
// kinds are evaluation-only.
ConstraintSystem build_constraints(ModelKind kind, const Graph& g, const Design& d);
bool constraints_supported(ModelKind kind);

struct UnbiasedVerdict {
  bool unbiased = false;
  double max_violation = 0.0;
  std::string worst_row;
};

UnbiasedVerdict check_unbiased(const WeightScheme& ws, const ConstraintSystem& cs, double tol);

struct ExistenceReport {
  bool exists = true;
  int witness_unit = -1;  // first unit violating the condition, when !exists
};

// Proposition-2 condition: per unit, both arms attainable with zero treated
// degree. Necessary and sufficient under NIA and SNIA.
ExistenceReport exists_nia_report(const Graph& g, const Design& d);
bool exists_nia(const Graph& g, const Design& d);

// Proposition-3 condition: per unit, both arms attainable at a common
// treated degree. Necessary and sufficient under SANIA.
ExistenceReport exists_sania_report(const Graph& g, const Design& d);
bool exists_sania(const Graph& g, const Design& d);

// SUTVA overlap: per unit, both arms supported.
ExistenceReport exists_sutva_report(const Design& d);

// Computational decider: the constraint system admits a solution, decided by
// a least-squares solve with relative residual below 1e-8. Covers SANASIA,
// where no concise condition is known.
bool exists_by_feasibility(ModelKind kind, const Graph& g, const Design& d);

}  // namespace mivnet
