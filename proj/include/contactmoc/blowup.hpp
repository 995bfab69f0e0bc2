#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "contactmoc/gas.hpp"
#include "contactmoc/geometry_config.hpp"

namespace contactmoc {

// Irrotational gamma-law model with c = rho^((gamma-1)/2) and the Bernoulli
// law q^2/2 + c^2/(gamma-1) = q_hat^2/2. The pressure-like functional is
// Theta(q) = int_{q_ref}^{q} sqrt(t^2 - c(t)^2) / (t c(t)) dt.
class IrrotationalModel {
 public:
  IrrotationalModel(double gamma, double q_hat, double q_ref);
  static IrrotationalModel from_settings(const BlowupSettings& s, const GasConstants& g);

  double gamma() const { return gamma_; }
  double q_hat() const { return q_hat_; }
  double q_ref() const { return q_ref_; }
  double critical_speed() const;  // c_hat, where q = c
  double sound_speed(double q) const;

  // Adaptive quadrature; sonic-limit error unless c_hat < q < q_hat.
  double theta(double q) const;
  double dtheta(double q) const;
  // Fast Theta and its inverse from a cubic Hermite table around q_ref, with
  // quadrature fallback outside the table.
  double theta_fast(double q) const;
  double speed_from_theta(double value) const;

 private:
  double gamma_, q_hat_, q_ref_;
  double table_lo_ = 0, table_h_ = 0;
  std::vector<double> table_theta_, table_slope_;
};

struct IrrotationalState {
  double q = 0, angle = 0, z_plus = 0, z_minus = 0;
};

// Z+ = angle + Theta(q), Z- = angle - Theta(q). Only the velocity enters; the
// density follows from the Bernoulli law.
IrrotationalState irrot_invariants(const PrimitiveState& s, const IrrotationalModel& m);
LambdaPair irrot_lambdas(double u, double v, const IrrotationalModel& m);
// Velocity from the invariants.
Velocity irrot_velocity(double z_plus, double z_minus, const IrrotationalModel& m);

// Wall compatibility of the base profile: v = 0, du/dy = drho/dy = 0 and
// d2v/dy2 = 0 at y = 0 and y = 1. Entries read e.g. "v at y=1: 0.0707".
std::vector<std::string> check_compatibility(const BlowupSettings& s, double tol);

// Base profile on [0, 1] extended evenly in (u, rho) and oddly in v about
// y = 0, then with period 2.
class PeriodicProfile {
 public:
  explicit PeriodicProfile(const BlowupSettings& s) : u_(s.u0), v_(s.v0), rho_(s.rho0) {}
  PrimitiveState at(double y) const;
  static double reduce(double y);  // representative in [-1, 1)

 private:
  Expression u_, v_, rho_;
};

struct MarchOptions {
  int markers = 200;
  double x_max = 1000.0;
  double dx_max = 0.05;
  double grad_factor = 1000.0;
  long max_steps = 20000000;
};
MarchOptions march_options(const BlowupSettings& s);

struct BlowupTrigger {
  std::string detector;  // "gradient" or "crossing"
  std::string family;    // "Z+" or "Z-"
  double x = 0, y = 0;
};

struct BlowupReport {
  std::optional<double> blowup_x;  // first detection of either detector
  std::optional<double> gradient_x, crossing_x;
  std::optional<BlowupTrigger> trigger;  // the first detection
  std::vector<double> x, max_grad_zp, max_grad_zm;
  double x_end = 0;
  long steps = 0;
  bool markers_crossed = false;
};

// Marches the periodic Cauchy problem with Lagrangian markers: each family
// carries its invariant exactly on markers that move with its characteristic
// speed (Heun's method), the opposite invariant is read from a periodic
// monotone cubic through that family's markers. Stops at x_max, when both
// detectors have fired, or when markers of one family change order.
BlowupReport cauchy_march(const PeriodicProfile& profile, const IrrotationalModel& model, const MarchOptions& opt);

// First index where history exceeds factor times history[0]; none for a zero start.
std::optional<std::size_t> detect_blowup(std::span<const double> history, double factor);

void write_gradient_csv(const BlowupReport& r, const std::filesystem::path& path);

}  // namespace contactmoc
