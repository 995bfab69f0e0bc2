#pragma once

#include <optional>
#include <span>

#include "contactmoc/moc.hpp"

namespace contactmoc {

struct OracleGrid {
  InvariantGrid grid;
  int max_substeps = 0;  // largest number of CFL sub-steps used in one xi step
};

struct OracleOptions {
  double cfl = 0.9;
  int max_substeps = 100000;
  // Replace the state-dependent speeds by constants (linear advection checks).
  std::optional<LambdaPair> constant_lambda_a, constant_lambda_b;
};

// One explicit upwind sub-step of d z/d xi + lambda d z/d eta = 0 on a uniform
// row. Inflow end nodes (lambda pointing into the row) are copied unchanged;
// the caller imposes their boundary values.
void upwind_update(std::span<const double> z, std::span<const double> lambda, double h_xi, double h_eta,
                   std::span<double> out);

// Common contact pressure and flow angle from the two incoming invariants:
// Theta_a(P) + Theta_b(P) = zb_minus - za_plus, theta = za_plus + Theta_a(P).
struct ContactSolution {
  double pressure = 0, angle = 0;
};
ContactSolution solve_contact(double za_plus, double zb_minus, const StreamPoint& sp_a, const StreamPoint& sp_b,
                              const GasConstants& g, const InversionOptions& opt, double guess);

// First-order upwind march of the nonlinear diagonal system with speeds from
// the current slab, sub-stepped to the CFL limit, with the wall closures and
// a direct nonlinear contact solve.
OracleGrid upwind_march(const MocProblem& prob, const OracleOptions& opt = {});

struct FieldDifference {
  double sup = 0, l1 = 0;
};

struct DifferenceReport {
  FieldDifference a_minus, a_plus, b_minus, b_plus;
  double sup() const;
};

// Lattice sup and L1 (node sum times dxi * deta) differences per family and layer.
DifferenceReport compare_fields(const InvariantGrid& a, const OracleGrid& b);

}  // namespace contactmoc
