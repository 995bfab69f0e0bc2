#pragma once

#include <filesystem>
#include <vector>

#include "contactmoc/gas.hpp"
#include "contactmoc/geometry_config.hpp"

namespace contactmoc {

struct MassFluxes {
  double m_a = 0, m_b = 0;
};

// Lattice in (xi, eta). Layer a: eta_k = k * deta_a on [0, m_a]. Layer b:
// eta_k = -m_b + k * deta_b on [-m_b, 0]. Both layers own a row on eta = 0.
struct LagrangianDomain {
  double length = 0, m_a = 0, m_b = 0;
  int nxi = 0, neta_a = 0, neta_b = 0;

  double dxi() const { return length / nxi; }
  double xi(int i) const { return i == nxi ? length : i * dxi(); }
  double deta_a() const { return m_a / neta_a; }
  double deta_b() const { return m_b / neta_b; }
  double eta_a(int k) const { return k == neta_a ? m_a : k * deta_a(); }
  double eta_b(int k) const { return k == neta_b ? 0.0 : -m_b + k * deta_b(); }
  bool operator==(const LagrangianDomain&) const = default;
};

LagrangianDomain make_domain(const NozzleGeometry& geom, const MassFluxes& flux, int nxi, int neta_a, int neta_b);

MassFluxes mass_fluxes(const InletProfile& profile);

// Inlet states at the eta lattice nodes, with their physical ordinates.
struct LagrangianInlet {
  std::vector<double> eta_a, y_a, eta_b, y_b;
  std::vector<PrimitiveState> a, b;
};

LagrangianInlet inlet_to_lagrangian(const InletProfile& profile, const MassFluxes& flux, const LagrangianDomain& dom);

// Physical ordinate for one Lagrangian coordinate eta of the inlet.
double inlet_ordinate(const InletProfile& profile, const MassFluxes& flux, double eta);

struct LayerStreams {
  StreamData a, b;
};

LayerStreams stream_data_from_inlet(const LagrangianInlet& inlet, const GasConstants& g, double p_ref,
                                    const InversionOptions& opt = {});

// Primitive fields on the Lagrangian lattice, row-major [i * (neta + 1) + k].
struct PrimitiveGrid {
  LagrangianDomain domain;
  std::vector<PrimitiveState> a, b;
};

struct EulerPoint {
  double x, y, u, v, p, rho;
};

struct ContactCurve {
  std::vector<double> x, g_cd, slope;  // slope = v/u on the contact row
};

struct EulerianField {
  LagrangianDomain domain;
  std::vector<EulerPoint> a, b;
  ContactCurve contact;
  double upper_mismatch = 0;  // sup |y(xi, m_a) - g_plus(xi)|
};

EulerianField reconstruct(const PrimitiveGrid& fields, const NozzleGeometry& geom);

struct WeakResidualReport {
  double max_residual = 0, mean_residual = 0;
  std::array<double, 4> max_per_flux{};
  double contact_mass_flux = 0;      // sup |rho (v - u g_cd') / sqrt(1 + g_cd'^2)| over both sides
  double contact_pressure_jump = 0;  // sup |p_a - p_b|
  double contact_slope_gap = 0;      // sup |g_cd' (finite differences) - v/u|
  bool contact_ok = true;
};

WeakResidualReport weak_residual(const EulerianField& field, const GasConstants& g, double contact_tol = 1e-7);

// Fourth-order finite-difference derivative of uniformly spaced samples.
std::vector<double> fd_derivative(const std::vector<double>& f, double h);

struct StreamlineDeviation {
  double bernoulli = 0, entropy = 0;
};
// sup over eta rows of |B - B(row start)| and |A - A(row start)|.
StreamlineDeviation streamline_deviation(const EulerianField& field, const GasConstants& g);

void write_fields_csv(const EulerianField& field, const std::filesystem::path& path);
void write_contact_csv(const EulerianField& field, const std::filesystem::path& path);

}  // namespace contactmoc
