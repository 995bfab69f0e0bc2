#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "contactmoc/gas.hpp"
#include "contactmoc/geometry_config.hpp"
#include "contactmoc/lagrangian.hpp"

namespace contactmoc {

// Riemann invariants of one layer, row-major [i * (neta + 1) + k] like PrimitiveGrid.
struct LayerInvariants {
  std::vector<double> zm, zp;
};

// Invariants on the whole lattice. The background grid is identically zero:
// with the global reference pressure p_ref = background pressure, the
// background state has w = 0 and Theta(p_ref) = 0 on every streamline, so
// deviations from the background are the stored values themselves.
struct InvariantGrid {
  LagrangianDomain domain;
  LayerInvariants a, b;
};

// One slab of both layers.
struct SlabPair {
  LayerInvariants a, b;  // neta + 1 values per family
};

struct LayerLambdas {
  std::vector<double> minus, plus;
};

struct FrozenField {
  LagrangianDomain domain;
  LayerLambdas a, b;
};

// Contact coupling per xi node.
struct CouplingCoefficients {
  std::vector<double> alpha, beta, gamma1, gamma2, gamma3, gamma4, c;
};

// Everything the marching solver needs besides the iterate itself.
struct MocProblem {
  LagrangianDomain domain;
  NozzleGeometry geometry;
  LayerStreams streams;
  SlabPair inlet;  // slab at xi = 0
  PrimitiveState background_a, background_b;
  GasConstants gas;
  InversionOptions inversion;
  double min_supersonic_margin = 0.05;
  Interpolation interpolation = Interpolation::Cubic;
  double fp_tol = 1e-10;
  int max_fp_iters = 30;
};

// Builds the problem from a validated configuration: mass fluxes, lattice,
// Lagrangian inlet trace, stream data and inlet invariants.
struct PreparedProblem {
  MocProblem problem;
  MassFluxes flux;
  LagrangianInlet inlet;
};
PreparedProblem prepare_problem(const Config& cfg);

InvariantGrid background_grid(const LagrangianDomain& dom);

// z -> primitive states at every node. `guess` supplies starting pressures for
// the Newton inversions. Errors carry the node location.
PrimitiveGrid invert_grid(const InvariantGrid& grid, const MocProblem& prob, const PrimitiveGrid* guess = nullptr);

// Throws LeftSupersonicRegime if u - c < margin anywhere.
void check_supersonic_margin(const PrimitiveGrid& states, const GasConstants& g, double margin);

FrozenField frozen_lambdas(const PrimitiveGrid& states, const GasConstants& g);
FrozenField frozen_lambdas(const InvariantGrid& prev, const MocProblem& prob);

CouplingCoefficients coupling_coefficients(const PrimitiveGrid& prev, const MocProblem& prob);
CouplingCoefficients coupling_coefficients(const InvariantGrid& prev, const MocProblem& prob);

enum class Layer { A, B };
enum class Family { Plus, Minus };  // speed lambda_plus carries z_minus, lambda_minus carries z_plus

enum class PathEvent { None, Wall, Contact };

struct CharacteristicPath {
  Layer layer = Layer::A;
  Family family = Family::Plus;
  std::vector<double> xi, eta;
  PathEvent event = PathEvent::None;
  double event_xi = 0, event_eta = 0;
  // Foot point: the launch point for forward traces, the end point for backward ones.
  double foot_xi = 0, foot_eta = 0;
};

// Integrates d eta/d xi = lambda with the midpoint rule and bilinear lambda,
// one lattice step at a time, from (xi0, eta0) towards xi_stop (either
// direction). Stops at xi_stop or the first boundary crossing.
CharacteristicPath trace_characteristic(const FrozenField& frozen, Layer layer, Family family, double xi0, double eta0,
                                        double xi_stop);

SlabPair slab(const InvariantGrid& grid, int i);

// Advances slab j to slab j + 1 by backward characteristic tracing and the
// wall and contact closures.
SlabPair step_linearized(const SlabPair& current, int j, const FrozenField& frozen, const MocProblem& prob,
                         const CouplingCoefficients& cc);

// One application of the iteration map with frozen data from prev.
InvariantGrid solve_linearized(const FrozenField& frozen, const CouplingCoefficients& cc, const MocProblem& prob);
InvariantGrid solve_linearized(const InvariantGrid& prev, const MocProblem& prob);

struct ResidualReport {
  double sup_transport = 0, mean_transport = 0;
  std::string argmax_layer;
  int argmax_i = 0, argmax_k = 0;
  double wall_slip = 0;       // sup |v/u - g'| on wall rows
  double wall_closure = 0;    // sup |z_minus + z_plus - 2 atan g'| on wall rows
  double contact_w_jump = 0;  // sup |w_a - w_b| on eta = 0
  double contact_p_jump = 0;  // sup |p_a - p_b| on eta = 0
  double closure_gap = 0;     // sup defect of the linear contact relations with coefficients from the grid itself
};

ResidualReport residual_check(const InvariantGrid& grid, const MocProblem& prob);

struct IterationRow {
  int iter = 0;
  double c0_gap = 0, c1_gap = 0, ratio = 0;  // ratio is NaN on the first row
};

struct IterationReport {
  std::vector<IterationRow> rows;
  bool converged = false;
  double wall_hit_a_plus = 0;   // first upper-wall hit of the + family launched at (0, 0) in layer a
  double wall_hit_b_minus = 0;  // first lower-wall hit of the - family launched at (0, 0) in layer b
  double contact_closure = 0;   // sup defect of the contact relations with the coefficients of the last march
  ResidualReport residuals;
};

struct FixedPointResult {
  InvariantGrid grid;
  PrimitiveGrid states;
  IterationReport report;
};

// Iterates the map from the background grid until the discrete C1 gap is at
// most fp_tol. After max_fp_iters the result is returned with
// report.converged = false so the caller can keep the report.
FixedPointResult fixed_point(const MocProblem& prob);

struct GridGaps {
  double c0 = 0, c1 = 0;
};
GridGaps grid_gaps(const InvariantGrid& x, const InvariantGrid& y);

void write_iteration_csv(const IterationReport& report, const std::filesystem::path& path);
void write_invariants_csv(const InvariantGrid& grid, const std::filesystem::path& path);

}  // namespace contactmoc
