#include "contactmoc/app.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "contactmoc/blowup.hpp"
#include "contactmoc/error.hpp"
#include "contactmoc/lagrangian.hpp"
#include "contactmoc/moc.hpp"

namespace contactmoc {

namespace fs = std::filesystem;

void RunSummary::set(const std::string& key, const std::string& value) {
  for (auto& f : fields)
    if (f.first == key) {
      f.second = value;
      return;
    }
  fields.emplace_back(key, value);
}

void RunSummary::set(const std::string& key, double value) { set(key, fmt17(value)); }

std::string RunSummary::line() const {
  std::string s;
  for (const auto& [k, v] : fields) {
    if (!s.empty()) s += ' ';
    const bool quote = v.find_first_of(" \t\"") != std::string::npos || v.empty();
    if (!quote) {
      s += k + "=" + v;
      continue;
    }
    std::string q;
    for (char c : v) {
      if (c == '"' || c == '\\') q += '\\';
      q += c == '\n' ? ' ' : c;
    }
    s += k + "=\"" + q + "\"";
  }
  return s;
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument("");
    std::size_t a = 0, b = 0;
    const int nxi = std::stoi(text.substr(0, x), &a);
    const int neta = std::stoi(text.substr(x + 1), &b);
    if (a != x || b != text.size() - x - 1 || nxi < 4 || neta < 4) throw std::invalid_argument("");
    return {nxi, neta};
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "grid must look like NXIxNETA with both sizes >= 4, got '" + text + "'");
  }
}

namespace {

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse:
    case ErrorKind::InvariantViolation:
    case ErrorKind::InvalidArgument:
    case ErrorKind::Io:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

RunSummary failure(const std::string& command, ErrorKind kind, const std::string& message, std::ostream& log) {
  log << "error: " << message << '\n';
  RunSummary s;
  s.exit_code = exit_code_for(kind);
  s.set("command", command);
  s.set("status", "error");
  s.set("error", std::string(error_category(kind)));
  s.set("exit", std::to_string(s.exit_code));
  return s;
}

template <class F>
RunSummary guarded(const std::string& command, std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return failure(command, e.kind(), e.what(), log);
  } catch (const std::exception& e) {
    return failure(command, ErrorKind::Internal, e.what(), log);
  }
}

// Loads the configuration and applies the command-line overrides.
Config configured(const CliOptions& opt) {
  if (opt.config.empty()) throw Error(ErrorKind::InvalidArgument, "--config is required");
  Config cfg = parse_config(opt.config);
  if (opt.grid) {
    cfg.run.grid_nxi = opt.grid->first;
    cfg.run.grid_neta_a = cfg.run.grid_neta_b = opt.grid->second;
    if (cfg.blowup) cfg.blowup->markers = opt.grid->second;
  }
  if (opt.max_iters) cfg.run.max_fp_iters = *opt.max_iters;
  if (opt.out) cfg.run.output_dir = *opt.out;
  if (opt.eps_scale) cfg = scale_deviation(cfg, *opt.eps_scale);
  const auto v = check_invariants(cfg);
  if (!v.empty()) {
    std::string msg;
    for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
    throw Error(ErrorKind::InvariantViolation, msg);
  }
  return cfg;
}

fs::path output_dir(const Config& cfg) {
  const fs::path dir = cfg.run.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

struct SolveOutcome {
  double epsilon = 0, sup_dev = 0, sup_dev_z = 0, max_ratio = NAN;
  int iterations = 0;
  FixedPointResult fp;
};

double primitive_deviation(const PrimitiveGrid& s, const PrimitiveState& a, const PrimitiveState& b) {
  double d = 0;
  auto scan = [&](const std::vector<PrimitiveState>& v, const PrimitiveState& bg) {
    for (const auto& x : v)
      d = std::max({d, std::abs(x.u - bg.u), std::abs(x.v - bg.v), std::abs(x.p - bg.p), std::abs(x.rho - bg.rho)});
  };
  scan(s.a, a);
  scan(s.b, b);
  return d;
}

// Shared by solve and sweep: compatibility, fixed point, deviations.
SolveOutcome run_solver(const Config& cfg, std::ostream& log, bool quiet) {
  const auto compat = validate_compatibility(cfg.inlet_profile(), cfg.nozzle(), cfg.run.compat_tol);
  if (!compat.empty()) {
    std::string msg;
    for (const auto& s : compat) msg += (msg.empty() ? "" : "; ") + s;
    throw Error(ErrorKind::InvariantViolation, "inlet incompatible: " + msg);
  }
  SolveOutcome out;
  out.epsilon = cfg.background ? perturbation_size(cfg.inlet_profile(), cfg.nozzle(), *cfg.background,
                                                   cfg.run.norm_samples)
                               : NAN;
  const PreparedProblem pp = prepare_problem(cfg);
  out.fp = fixed_point(pp.problem);
  const auto& rows = out.fp.report.rows;
  out.iterations = int(rows.size());
  for (const auto& r : rows) {
    if (!quiet)
      log << "iter=" << r.iter << " c0_gap=" << fmt17(r.c0_gap) << " c1_gap=" << fmt17(r.c1_gap)
          << " ratio=" << fmt17(r.ratio) << '\n';
    if (!std::isnan(r.ratio)) out.max_ratio = std::isnan(out.max_ratio) ? r.ratio : std::max(out.max_ratio, r.ratio);
  }
  out.sup_dev = primitive_deviation(out.fp.states, pp.problem.background_a, pp.problem.background_b);
  for (const auto* v : {&out.fp.grid.a.zm, &out.fp.grid.a.zp, &out.fp.grid.b.zm, &out.fp.grid.b.zp})
    for (double z : *v) out.sup_dev_z = std::max(out.sup_dev_z, std::abs(z));
  return out;
}

}  // namespace

RunSummary cmd_solve(const CliOptions& opt, std::ostream& log) {
  return guarded("solve", log, [&] {
    const Config cfg = configured(opt);
    const fs::path dir = output_dir(cfg);
    SolveOutcome o = run_solver(cfg, log, opt.quiet);
    const IterationReport& rep = o.fp.report;

    RunSummary s;
    s.set("command", "solve");
    const fs::path iter_csv = dir / "iterations.csv";
    write_iteration_csv(rep, iter_csv);
    s.artifacts.push_back(iter_csv.string());
    if (!rep.converged) {
      RunSummary f = failure("solve", ErrorKind::NoConvergence,
                             "fixed point did not reach fp_tol in " + std::to_string(o.iterations) + " iterations", log);
      f.set("iterations", std::to_string(o.iterations));
      f.set("c1_gap", rep.rows.empty() ? NAN : rep.rows.back().c1_gap);
      return f;
    }

    const EulerianField field = reconstruct(o.fp.states, cfg.nozzle());
    if (!(field.upper_mismatch <= cfg.run.recon_tol))
      throw Error(ErrorKind::LatticeMismatch, "reconstructed upper streamline misses the upper wall by " +
                                                  fmt17(field.upper_mismatch));
    const WeakResidualReport weak = weak_residual(field, cfg.run.gas());
    const StreamlineDeviation dev = streamline_deviation(field, cfg.run.gas());
    double gcd = 0;
    for (double g : field.contact.g_cd) gcd = std::max(gcd, std::abs(g));

    const std::pair<const char*, std::function<void(const fs::path&)>> outputs[] = {
        {"invariants.csv", [&](const fs::path& p) { write_invariants_csv(o.fp.grid, p); }},
        {"fields.csv", [&](const fs::path& p) { write_fields_csv(field, p); }},
        {"contact.csv", [&](const fs::path& p) { write_contact_csv(field, p); }},
    };
    for (const auto& [name, write] : outputs) {
      write(dir / name);
      s.artifacts.push_back((dir / name).string());
    }

    const ResidualReport& res = rep.residuals;
    s.set("status", "ok");
    s.set("epsilon", o.epsilon);
    s.set("iterations", std::to_string(o.iterations));
    s.set("c0_gap", rep.rows.back().c0_gap);
    s.set("c1_gap", rep.rows.back().c1_gap);
    s.set("max_ratio", o.max_ratio);
    s.set("sup_dev", o.sup_dev);
    s.set("transport_residual", res.sup_transport);
    s.set("wall_slip", res.wall_slip);
    s.set("contact_w_jump", res.contact_w_jump);
    s.set("contact_p_jump", res.contact_p_jump);
    s.set("weak_residual", weak.max_residual);
    s.set("contact_mass_flux", weak.contact_mass_flux);
    s.set("bernoulli_dev", dev.bernoulli);
    s.set("entropy_dev", dev.entropy);
    s.set("g_cd_max", gcd);
    s.set("upper_mismatch", field.upper_mismatch);
    s.set("wall_hit_a_plus", rep.wall_hit_a_plus);
    s.set("wall_hit_b_minus", rep.wall_hit_b_minus);
    s.set("out", dir.string());
    return s;
  });
}

RunSummary cmd_blowup(const CliOptions& opt, std::ostream& log) {
  return guarded("blowup", log, [&] {
    const Config cfg = configured(opt);
    const BlowupSettings& b = cfg.blowup_settings();
    const auto compat = check_compatibility(b, b.compat_tol);
    if (!compat.empty()) {
      std::string msg;
      for (const auto& v : compat) msg += (msg.empty() ? "" : "; ") + v;
      throw Error(ErrorKind::InvariantViolation, "blow-up profile incompatible: " + msg);
    }
    const fs::path dir = output_dir(cfg);
    const IrrotationalModel model = IrrotationalModel::from_settings(b, cfg.run.gas());
    const BlowupReport r = cauchy_march(PeriodicProfile(b), model, march_options(b));
    const fs::path csv = dir / "blowup_gradients.csv";
    write_gradient_csv(r, csv);
    if (!opt.quiet) {
      if (r.gradient_x) log << "gradient detector fired at x=" << fmt17(*r.gradient_x) << '\n';
      if (r.crossing_x) log << "crossing detector fired at x=" << fmt17(*r.crossing_x) << '\n';
    }
    RunSummary s;
    s.artifacts.push_back(csv.string());
    s.set("command", "blowup");
    s.set("status", "ok");
    auto opt_value = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string("none"); };
    s.set("blowup_x", opt_value(r.blowup_x));
    s.set("gradient_x", opt_value(r.gradient_x));
    s.set("crossing_x", opt_value(r.crossing_x));
    if (r.trigger) {
      s.set("trigger", r.trigger->detector);
      s.set("family", r.trigger->family);
      s.set("trigger_y", r.trigger->y);
    }
    s.set("x_end", r.x_end);
    s.set("steps", std::to_string(r.steps));
    s.set("out", dir.string());
    return s;
  });
}

RunSummary cmd_sweep(const CliOptions& opt, std::ostream& log) {
  return guarded("sweep", log, [&] {
    if (opt.eps.empty()) throw Error(ErrorKind::InvalidArgument, "sweep needs a nonempty --eps list");
    for (double e : opt.eps)
      if (!(e > 0.0)) throw Error(ErrorKind::InvalidArgument, "sweep epsilons must be positive");
    const Config base = configured(opt);
    const double eps0 =
        perturbation_size(base.inlet_profile(), base.nozzle(), base.background_state(), base.run.norm_samples);
    if (!(eps0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "sweep needs a perturbed configuration (epsilon is 0)");
    const fs::path dir = output_dir(base);
    const fs::path csv = dir / "sweep.csv";
    std::ofstream out(csv);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + csv.string());
    out << "epsilon,sup_dev,iters,ratio\n";
    out.flush();

    std::vector<double> xs, ys;
    for (double e : opt.eps) {
      const Config cfg = scale_deviation(base, e / eps0);
      if (!opt.quiet) log << "sweep epsilon=" << fmt17(e) << '\n';
      const SolveOutcome o = run_solver(cfg, log, true);
      if (!o.fp.report.converged)
        throw Error(ErrorKind::NoConvergence, "run at epsilon=" + fmt17(e) + " did not converge");
      out << fmt17(e) << ',' << fmt17(o.sup_dev) << ',' << o.iterations << ',' << fmt17(o.max_ratio) << '\n';
      out.flush();
      xs.push_back(e);
      ys.push_back(o.sup_dev);
    }
    RunSummary s;
    s.artifacts.push_back(csv.string());
    s.set("command", "sweep");
    s.set("status", "ok");
    s.set("runs", std::to_string(xs.size()));
    s.set("slope", xs.size() >= 2 ? fmt17(loglog_slope(xs, ys)) : std::string("undefined"));
    s.set("out", dir.string());
    return s;
  });
}

RunSummary cmd_validate(const CliOptions& opt, std::ostream& log) {
  return guarded("validate", log, [&] {
    if (opt.config.empty()) throw Error(ErrorKind::InvalidArgument, "--config is required");
    Config cfg = parse_config(opt.config);
    if (opt.eps_scale) cfg = scale_deviation(cfg, *opt.eps_scale);
    std::vector<std::string> v = check_invariants(cfg);
    if (cfg.inlet && cfg.geometry) {
      for (auto& s : validate_compatibility(*cfg.inlet, *cfg.geometry, cfg.run.compat_tol)) v.push_back(s);
    }
    if (cfg.blowup) {
      for (auto& s : check_compatibility(*cfg.blowup, cfg.blowup->compat_tol)) v.push_back(s);
    }
    for (const auto& s : v) log << "violation: " << s << '\n';
    RunSummary s;
    s.set("command", "validate");
    s.set("status", v.empty() ? "ok" : "invalid");
    s.set("violations", std::to_string(v.size()));
    if (!v.empty()) s.set("first_violation", v.front());
    if (cfg.inlet && cfg.geometry && cfg.background)
      s.set("epsilon", perturbation_size(*cfg.inlet, *cfg.geometry, *cfg.background, cfg.run.norm_samples));
    s.exit_code = v.empty() ? kExitOk : kExitFailure;
    return s;
  });
}

}  // namespace contactmoc
