#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "contactmoc/expression.hpp"
#include "contactmoc/gas.hpp"
#include "contactmoc/numerics.hpp"

namespace contactmoc {

// A wall y = g(x) on [0, L]: closed-form expression or uniformly sampled table
// (quintic B-spline; third derivative by central differences of the spline's
// second derivative).
class WallCurve {
 public:
  WallCurve() = default;
  static WallCurve from_expression(Expression e);
  static WallCurve from_samples(std::vector<double> x, std::vector<double> g);

  double operator()(double x) const { return derivatives(x)[0]; }
  double slope(double x) const { return derivatives(x)[1]; }
  // (g, g', g'', g''')
  std::array<double, 4> derivatives(double x) const;

  bool is_expression() const { return expr_.valid(); }
  const Expression& expression() const { return expr_; }
  const std::vector<double>& sample_x() const { return xs_; }
  const std::vector<double>& sample_g() const { return gs_; }

  // base + t (g - base)
  WallCurve scaled_about(double base, double t) const;

 private:
  struct Spline;
  Expression expr_;
  std::vector<double> xs_, gs_;
  std::shared_ptr<const Spline> spline_;
};

struct NozzleGeometry {
  WallCurve lower, upper;
  double length = 0;
};

// Raw inlet samples for one layer, y increasing.
struct LayerTable {
  std::vector<double> y, u, v, p, rho;
  bool operator==(const LayerTable&) const = default;
};

// Closed-form inlet layer: pressure, flow-angle tangent, and optionally the
// streamline constants A = p/rho^gamma and B; absent ones take the background
// layer's values. Tabulated at `samples` uniform points.
struct LayerGenerator {
  Expression p, w;
  std::optional<Expression> A, B;
  int samples = 1025;
};

struct LayerProfile {
  LayerTable table;
  std::optional<LayerGenerator> generator;
  MonotoneCubic u, v, p, rho;

  void build();  // (re)builds the interpolants from table
  PrimitiveState at(double y) const { return {u(y), v(y), p(y), rho(y)}; }
  double y_lo() const { return table.y.front(); }
  double y_hi() const { return table.y.back(); }
};

struct InletProfile {
  LayerProfile a, b;  // a on [0, g_plus(0)], b on [g_minus(0), 0]
};

// Constant background layers: v = 0 and one common pressure.
struct Background {
  PrimitiveState a, b;
};

enum class Interpolation { Cubic, Monotone };

struct RunConfig {
  double gamma = 1.4;
  int grid_nxi = 400, grid_neta_a = 100, grid_neta_b = 100;
  double fp_tol = 1e-10;
  int max_fp_iters = 30;
  double newton_tol = 1e-12;
  int max_newton_iters = 50;
  double min_supersonic_margin = 0.05;
  double sonic_margin = 1e-6;
  double compat_tol = 1e-8;
  double recon_tol = 1e-4;
  int norm_samples = 4096;
  Interpolation interpolation = Interpolation::Cubic;
  std::string output_dir = "out";

  GasConstants gas() const { return {gamma}; }
  InversionOptions inversion() const;
};

struct BlowupSettings {
  Expression u0, v0, rho0;  // base profile on [0, 1]
  double u_background = 2.2, rho_background = 1.0;
  std::optional<double> q_hat;
  int markers = 200;
  double x_max = 1000.0;
  double dx_max = 0.05;
  double grad_factor = 1000.0;
  double compat_tol = 1e-8;
};

struct Config {
  RunConfig run;
  std::optional<NozzleGeometry> geometry;
  std::optional<InletProfile> inlet;
  std::optional<Background> background;
  std::optional<BlowupSettings> blowup;

  // Throw Error(Parse) naming the missing section when absent.
  const NozzleGeometry& nozzle() const;
  const InletProfile& inlet_profile() const;
  const Background& background_state() const;
  const BlowupSettings& blowup_settings() const;
};

// Sectioned key = value text. Values are bare tokens, "quoted strings" or
// """multi-line blocks""". '#' starts a comment outside quotes.
struct ConfigEntry {
  enum class Kind { Bare, Quoted, Block };
  std::string key;
  Kind kind = Kind::Bare;
  std::string text;
  int line = 0;
  bool operator==(const ConfigEntry& o) const { return key == o.key && kind == o.kind && text == o.text; }
};

struct ConfigSection {
  std::string name;
  std::vector<ConfigEntry> entries;
  int line = 0;
  bool operator==(const ConfigSection& o) const { return name == o.name && entries == o.entries; }
};

struct ConfigDocument {
  std::vector<ConfigSection> sections;
  bool operator==(const ConfigDocument&) const = default;
};

ConfigDocument parse_document(const std::string& text);
std::string write_document(const ConfigDocument& doc);

// Structural parse only; invariants are checked by check_invariants.
Config parse_config(const std::filesystem::path& path);
Config config_from_document(const ConfigDocument& doc, const std::filesystem::path& base_dir);
ConfigDocument config_to_document(const Config& cfg);

// Every invariant violation of the typed config, each naming its check.
std::vector<std::string> check_invariants(const Config& cfg);

// parse_config followed by check_invariants; throws InvariantViolation.
Config load_config(const std::filesystem::path& path);
void write_config(const Config& cfg, const std::filesystem::path& path);

std::vector<std::string> validate_compatibility(const InletProfile& profile, const NozzleGeometry& geom, double tol);

double perturbation_size(const InletProfile& profile, const NozzleGeometry& geom, const Background& background,
                         int samples = 4096);

// Scales every deviation from the background (inlet layers and walls) by t.
Config scale_deviation(const Config& cfg, double t);

// Background-plus-perturbation fixtures. Inlet perturbations vanish to second
// order at the corners and the contact point, wall perturbations to fourth
// order at the inlet, so all compatibility conditions hold.
struct FixtureOptions {
  double amplitude = 0.0;  // 0 gives the exact background
  double length = 4.0;
  double gamma = 1.4;
  PrimitiveState background_a{2.2, 0.0, 1.0, 1.0};
  PrimitiveState background_b{2.5, 0.0, 1.0, 1.2};
  int samples = 1025;
  int nxi = 400, neta = 100;
};
Config make_fixture(const FixtureOptions& opt);

// Irrotational blow-up fixture: u0 = u_background, rho0 = rho_background,
// v0 = delta sin(pi y).
Config make_blowup_fixture(double delta, int markers = 200, double dx_max = 0.05, double x_max = 1000.0);

}  // namespace contactmoc

namespace contactmoc {

LayerTable tabulate_generator(const LayerGenerator& gen, double y_lo, double y_hi, const PrimitiveState& background,
                              const GasConstants& g);

}  // namespace contactmoc
