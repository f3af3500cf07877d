#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "otgrid/field.hpp"
#include "otgrid/geodesy.hpp"

namespace otgrid {

struct PlanArc {
  int32_t from;  // source cell id
  int32_t to;    // target cell id
  double mass;
};

/// Optimal transport plan between two normalized fields. Arc masses are
/// strictly positive; objective is in km² (lonlat) or m² (depth) and w2 is
/// its square root.
struct TransportPlan {
  std::vector<PlanArc> arcs;  // sorted by (from, to)
  double objective = 0.0;
  double w2 = 0.0;
};

/// Exact solution of the transportation problem by network simplex.
/// Both fields must be normalized. Masses below 1e-15 are pruned as zero
/// supply/demand nodes. Deterministic for fixed input order.
TransportPlan solve_exact(const MassField& P, const MassField& Q, const CostMatrix& C);

struct SinkhornOptions {
  double epsilon = 1e-2;  // entropic regularization, in cost units
  int max_iter = 10000;
  double tol = 1e-8;  // L1 marginal residual
};

/// Entropically regularized approximation (log-domain matrix scaling).
/// Dense cost matrices only.
TransportPlan solve_sinkhorn(const MassField& P, const MassField& Q, const CostMatrix& C,
                             const SinkhornOptions& opts);

/// Dense two-phase simplex on the transportation LP. Test oracle,
/// independent of the network simplex path. Guard: m*n <= 400.
TransportPlan brute_force(const MassField& P, const MassField& Q, const CostMatrix& C);

struct TopSplit {
  std::vector<PlanArc> major;  // smallest prefix (by descending mass) covering q of the mass
  std::vector<PlanArc> minor;
  double major_mass = 0.0;
};

/// Split arcs into the smallest descending-mass prefix whose cumulative mass
/// reaches q * total, and the rest. Ties order by (from, to).
TopSplit top_fraction(const TransportPlan& plan, double q);

/// Largest |row sum - P_i| or |column sum - Q_j| over all cells.
double max_marginal_error(const TransportPlan& plan, const MassField& P, const MassField& Q);

/// Plan CSV: from/to coordinates, mass, squared cost, is_major flag under
/// the given top fraction (q = 1 marks every arc major).
void write_plan_csv(std::ostream& os, const MassField& P, const MassField& Q,
                    const TransportPlan& plan, double top_q = 1.0);

}  // namespace otgrid
