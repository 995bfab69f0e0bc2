#pragma once

#include <optional>
#include <vector>

#include "contactmoc/numerics.hpp"

namespace contactmoc {

struct GasConstants {
  double gamma = 1.4;
};

// Throws InvalidArgument unless gamma > 1.
void validate(const GasConstants& g);

struct PrimitiveState {
  double u = 0, v = 0, p = 0, rho = 0;
};

// Stream data frozen at one streamline: entropy function A0 = p/rho^gamma,
// Bernoulli constant B0, and the global lower limit of the pressure functional.
struct StreamPoint {
  double A0 = 0, B0 = 0, p_ref = 0;
};

// Per-layer stream data tabulated over eta, monotone cubic in between.
class StreamData {
 public:
  StreamData() = default;
  StreamData(std::vector<double> eta, std::vector<double> A0, std::vector<double> B0, double p_ref);

  StreamPoint at(double eta) const;
  StreamPoint node(std::size_t k) const { return {A0_nodes_[k], B0_nodes_[k], p_ref_}; }
  std::size_t size() const { return eta_.size(); }
  const std::vector<double>& eta() const { return eta_; }
  double p_ref() const { return p_ref_; }

 private:
  std::vector<double> eta_, A0_nodes_, B0_nodes_;
  MonotoneCubic A0_, B0_;
  double p_ref_ = 0;
};

struct InvariantPair {
  double z_minus = 0, z_plus = 0;
};

struct LambdaPair {
  double minus = 0, plus = 0;
};

struct InversionOptions {
  double newton_tol = 1e-12;
  int max_newton_iters = 50;
  // Relative distance to the sonic pressure below which inputs are refused.
  double sonic_margin = 1e-6;
  double quad_tol = 1e-12;
};

double sound_speed(const PrimitiveState& s, const GasConstants& g);
bool is_supersonic(const PrimitiveState& s, const GasConstants& g);
double bernoulli(const PrimitiveState& s, const GasConstants& g);
double entropy_function(const PrimitiveState& s, const GasConstants& g);

// Density on a streamline from p = A rho^gamma.
double density_from_entropy(double p, double A0, const GasConstants& g);
// Pressure at which the streamline's speed equals its sound speed; the
// admissible interval for the pressure functional is (0, sonic_pressure).
double sonic_pressure(const StreamPoint& sp, const GasConstants& g);

// Pressure functional: integral of dtheta_dp from sp.p_ref to p.
double theta(double p, const StreamPoint& sp, const GasConstants& g, const InversionOptions& opt = {});
double dtheta_dp(double p, const StreamPoint& sp, const GasConstants& g);

InvariantPair invariants_from_state(const PrimitiveState& s, const StreamPoint& sp, const GasConstants& g,
                                    const InversionOptions& opt = {});
// Solves theta(p) = (z_minus - z_plus)/2. `guess` replaces p_ref as the
// starting point when given.
double pressure_from_invariants(const InvariantPair& z, const StreamPoint& sp, const GasConstants& g,
                                const InversionOptions& opt = {}, std::optional<double> guess = std::nullopt);
// w = v/u = tan((z_minus + z_plus)/2).
double flow_angle_tangent(const InvariantPair& z);

struct Velocity {
  double u = 0, v = 0;
};
Velocity velocity_from_bernoulli(double w, double p, const StreamPoint& sp, const GasConstants& g);

// Full inversion z -> (u, v, p, rho) on one streamline.
PrimitiveState state_from_invariants(const InvariantPair& z, const StreamPoint& sp, const GasConstants& g,
                                     const InversionOptions& opt = {}, std::optional<double> guess = std::nullopt);

// Eigenvalues of the Lagrangian system; requires u > c.
LambdaPair lambda_pm(const PrimitiveState& s, const GasConstants& g);

}  // namespace contactmoc
