#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "contactmoc/error.hpp"
#include "contactmoc/geometry_config.hpp"

namespace contactmoc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg);
}

// Drops a trailing '#' comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '"') quoted = !quoted;
    if (s[k] == '#' && !quoted) return s.substr(0, k);
  }
  return s;
}

bool valid_name(const std::string& s, bool allow_dot) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || (allow_dot && c == '.'))) return false;
  return true;
}

}  // namespace

ConfigDocument parse_document(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) lines.push_back(l);
  }
  ConfigDocument doc;
  std::set<std::string> section_names;
  std::set<std::string> keys;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = int(i) + 1;
    const std::string raw = lines[i];
    const std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '[') {
      const std::string body = trim(strip_comment(t));
      if (body.back() != ']') parse_fail(lineno, "section header must end with ']'");
      const std::string name = trim(body.substr(1, body.size() - 2));
      if (!valid_name(name, true)) parse_fail(lineno, "bad section name '" + name + "'");
      if (!section_names.insert(name).second) parse_fail(lineno, "duplicate section [" + name + "]");
      doc.sections.push_back({name, {}, lineno});
      keys.clear();
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) parse_fail(lineno, "expected 'key = value'");
    if (doc.sections.empty()) parse_fail(lineno, "key outside any section");
    ConfigEntry e;
    e.key = trim(t.substr(0, eq));
    e.line = lineno;
    if (!valid_name(e.key, false)) parse_fail(lineno, "bad key '" + e.key + "'");
    if (!keys.insert(e.key).second) parse_fail(lineno, "duplicate key '" + e.key + "'");
    const std::string rest = trim(t.substr(eq + 1));
    if (rest.rfind("\"\"\"", 0) == 0) {
      e.kind = ConfigEntry::Kind::Block;
      const std::string after = rest.substr(3);
      const auto close = after.find("\"\"\"");
      if (close != std::string::npos) {
        if (!trim(strip_comment(after.substr(close + 3))).empty()) parse_fail(lineno, "text after closing \"\"\"");
        e.text = after.substr(0, close);
      } else {
        if (!trim(after).empty()) parse_fail(lineno, "block content must start on the next line");
        std::string body;
        bool closed = false;
        for (++i; i < lines.size(); ++i) {
          if (trim(lines[i]) == "\"\"\"") {
            closed = true;
            break;
          }
          body += lines[i] + "\n";
        }
        if (!closed) parse_fail(lineno, "unterminated \"\"\" block");
        if (!body.empty()) body.pop_back();
        e.text = body;
      }
    } else if (!rest.empty() && rest[0] == '"') {
      e.kind = ConfigEntry::Kind::Quoted;
      const auto close = rest.find('"', 1);
      if (close == std::string::npos) parse_fail(lineno, "unterminated string");
      if (!trim(strip_comment(rest.substr(close + 1))).empty()) parse_fail(lineno, "text after closing quote");
      e.text = rest.substr(1, close - 1);
    } else {
      e.kind = ConfigEntry::Kind::Bare;
      e.text = trim(strip_comment(rest));
      if (e.text.empty()) parse_fail(lineno, "missing value for '" + e.key + "'");
    }
    doc.sections.back().entries.push_back(std::move(e));
  }
  return doc;
}

std::string write_document(const ConfigDocument& doc) {
  std::ostringstream out;
  bool first = true;
  for (const auto& s : doc.sections) {
    if (!first) out << "\n";
    first = false;
    out << "[" << s.name << "]\n";
    for (const auto& e : s.entries) {
      switch (e.kind) {
        case ConfigEntry::Kind::Bare: out << e.key << " = " << e.text << "\n"; break;
        case ConfigEntry::Kind::Quoted: out << e.key << " = \"" << e.text << "\"\n"; break;
        case ConfigEntry::Kind::Block: out << e.key << " = \"\"\"\n" << e.text << "\n\"\"\"\n"; break;
      }
    }
  }
  return out.str();
}

namespace {

class SectionReader {
 public:
  SectionReader(const ConfigSection& s, std::set<std::string> allowed) : s_(s) {
    for (const auto& e : s.entries)
      if (!allowed.count(e.key)) parse_fail(e.line, "unknown key '" + e.key + "' in [" + s.name + "]");
  }

  const ConfigEntry* find(const std::string& key) const {
    for (const auto& e : s_.entries)
      if (e.key == key) return &e;
    return nullptr;
  }
  bool has(const std::string& key) const { return find(key) != nullptr; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const ConfigEntry* e = find(key);
    if (!e) {
      if (fallback) return *fallback;
      parse_fail(s_.line, "[" + s_.name + "] is missing '" + key + "'");
    }
    const std::string t = trim(e->text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) parse_fail(e->line, "[" + s_.name + "] " + key + ": expected a number, got '" + t + "'");
    return v;
  }

  int integer(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) parse_fail(find(key)->line, "[" + s_.name + "] " + key + ": expected an integer");
    return int(v);
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    const ConfigEntry* e = find(key);
    if (!e) {
      if (fallback) return *fallback;
      parse_fail(s_.line, "[" + s_.name + "] is missing '" + key + "'");
    }
    return e->text;
  }

  Expression expression(const std::string& key, const std::string& var) const {
    const ConfigEntry* e = find(key);
    if (!e) parse_fail(s_.line, "[" + s_.name + "] is missing '" + key + "'");
    try {
      return Expression::parse(e->text, var);
    } catch (const Error& err) {
      parse_fail(e->line, "[" + s_.name + "] " + key + ": " + err.what());
    }
  }

  int line() const { return s_.line; }
  const std::string& name() const { return s_.name; }

 private:
  const ConfigSection& s_;
};

// CSV text with a fixed header; first_line is the file line of the header.
std::vector<std::vector<double>> read_csv(const std::string& text, const std::vector<std::string>& header,
                                          int first_line, const std::string& what) {
  std::istringstream in(text);
  std::string l;
  int lineno = first_line - 1;
  bool seen_header = false;
  std::vector<std::vector<double>> cols(header.size());
  while (std::getline(in, l)) {
    ++lineno;
    const std::string t = trim(l);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(t);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!seen_header) {
      if (cells != header) {
        std::string h;
        for (const auto& c : header) h += (h.empty() ? "" : ",") + c;
        parse_fail(lineno, what + ": expected header '" + h + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) parse_fail(lineno, what + ": expected " + std::to_string(header.size()) + " columns");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(cells[c].c_str(), &end);
      if (cells[c].empty() || end != cells[c].c_str() + cells[c].size())
        parse_fail(lineno, what + ": bad number '" + cells[c] + "'");
      cols[c].push_back(v);
    }
  }
  if (!seen_header) parse_fail(first_line, what + ": empty table");
  return cols;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

WallCurve read_wall(const SectionReader& r, const std::string& key, const std::filesystem::path& base) {
  const int n = int(r.has(key)) + int(r.has(key + "_table")) + int(r.has(key + "_file"));
  if (n != 1) parse_fail(r.line(), "[geometry] needs exactly one of " + key + ", " + key + "_table, " + key + "_file");
  if (r.has(key)) return WallCurve::from_expression(r.expression(key, "x"));
  std::vector<std::vector<double>> cols;
  if (r.has(key + "_table")) {
    const ConfigEntry* e = r.find(key + "_table");
    cols = read_csv(e->text, {"x", "g"}, e->line + 1, key + "_table");
  } else {
    const auto path = base / r.string(key + "_file");
    cols = read_csv(read_file(path), {"x", "g"}, 1, path.string());
  }
  try {
    return WallCurve::from_samples(cols[0], cols[1]);
  } catch (const Error& err) {
    parse_fail(r.line(), key + ": " + err.what());
  }
}

LayerProfile read_layer(const SectionReader& r, const std::filesystem::path& base, double y_lo, double y_hi,
                        const std::optional<Background>& bg, bool upper, const GasConstants& g) {
  LayerProfile layer;
  const bool gen = r.has("p") || r.has("w") || r.has("A") || r.has("B") || r.has("samples");
  const int n = int(r.has("data")) + int(r.has("file")) + int(gen);
  if (n != 1) parse_fail(r.line(), "[" + r.name() + "] needs exactly one of data, file, or generator keys p and w");
  if (gen) {
    LayerGenerator lg;
    lg.p = r.expression("p", "y");
    lg.w = r.expression("w", "y");
    if (r.has("A")) lg.A = r.expression("A", "y");
    if (r.has("B")) lg.B = r.expression("B", "y");
    lg.samples = r.integer("samples", lg.samples);
    if (!bg) parse_fail(r.line(), "[" + r.name() + "] generator needs a [background] section");
    try {
      layer.table = tabulate_generator(lg, y_lo, y_hi, upper ? bg->a : bg->b, g);
    } catch (const Error& err) {
      parse_fail(r.line(), "[" + r.name() + "] " + err.what());
    }
    layer.generator = lg;
  } else {
    std::vector<std::vector<double>> cols;
    const std::vector<std::string> header = {"y", "u", "v", "p", "rho"};
    if (r.has("data")) {
      const ConfigEntry* e = r.find("data");
      cols = read_csv(e->text, header, e->line + 1, "[" + r.name() + "] data");
    } else {
      const auto path = base / r.string("file");
      cols = read_csv(read_file(path), header, 1, path.string());
    }
    layer.table = {cols[0], cols[1], cols[2], cols[3], cols[4]};
  }
  try {
    layer.build();
  } catch (const Error& err) {
    parse_fail(r.line(), "[" + r.name() + "] " + err.what());
  }
  return layer;
}

const ConfigSection* find_section(const ConfigDocument& doc, const std::string& name) {
  for (const auto& s : doc.sections)
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace

Config config_from_document(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
  static const std::set<std::string> known = {"gas",  "geometry",   "background", "inlet.a", "inlet.b",
                                              "grid", "tolerances", "solver",     "output",  "blowup"};
  for (const auto& s : doc.sections)
    if (!known.count(s.name)) parse_fail(s.line, "unknown section [" + s.name + "]");

  Config cfg;
  RunConfig& run = cfg.run;
  if (auto s = find_section(doc, "gas")) {
    SectionReader r(*s, {"gamma"});
    run.gamma = r.number("gamma", run.gamma);
  }
  if (auto s = find_section(doc, "grid")) {
    SectionReader r(*s, {"nxi", "neta_a", "neta_b"});
    run.grid_nxi = r.integer("nxi", run.grid_nxi);
    run.grid_neta_a = r.integer("neta_a", run.grid_neta_a);
    run.grid_neta_b = r.integer("neta_b", run.grid_neta_b);
  }
  if (auto s = find_section(doc, "tolerances")) {
    SectionReader r(*s, {"fp_tol", "max_fp_iters", "newton_tol", "max_newton_iters", "min_supersonic_margin",
                         "sonic_margin", "compat_tol", "recon_tol", "norm_samples"});
    run.fp_tol = r.number("fp_tol", run.fp_tol);
    run.max_fp_iters = r.integer("max_fp_iters", run.max_fp_iters);
    run.newton_tol = r.number("newton_tol", run.newton_tol);
    run.max_newton_iters = r.integer("max_newton_iters", run.max_newton_iters);
    run.min_supersonic_margin = r.number("min_supersonic_margin", run.min_supersonic_margin);
    run.sonic_margin = r.number("sonic_margin", run.sonic_margin);
    run.compat_tol = r.number("compat_tol", run.compat_tol);
    run.recon_tol = r.number("recon_tol", run.recon_tol);
    run.norm_samples = r.integer("norm_samples", run.norm_samples);
  }
  if (auto s = find_section(doc, "solver")) {
    SectionReader r(*s, {"interpolation"});
    const std::string k = r.string("interpolation", "cubic");
    if (k == "cubic") run.interpolation = Interpolation::Cubic;
    else if (k == "monotone") run.interpolation = Interpolation::Monotone;
    else parse_fail(r.find("interpolation")->line, "interpolation must be 'cubic' or 'monotone'");
  }
  if (auto s = find_section(doc, "output")) {
    SectionReader r(*s, {"dir"});
    run.output_dir = r.string("dir", run.output_dir);
  }
  if (auto s = find_section(doc, "background")) {
    SectionReader r(*s, {"p", "u_a", "rho_a", "u_b", "rho_b"});
    const double p = r.number("p");
    cfg.background = Background{{r.number("u_a"), 0.0, p, r.number("rho_a")}, {r.number("u_b"), 0.0, p, r.number("rho_b")}};
  }
  if (auto s = find_section(doc, "geometry")) {
    SectionReader r(*s, {"length", "g_plus", "g_plus_table", "g_plus_file", "g_minus", "g_minus_table", "g_minus_file"});
    NozzleGeometry geom;
    geom.length = r.number("length");
    geom.upper = read_wall(r, "g_plus", base_dir);
    geom.lower = read_wall(r, "g_minus", base_dir);
    cfg.geometry = geom;
  }
  const ConfigSection* sa = find_section(doc, "inlet.a");
  const ConfigSection* sb = find_section(doc, "inlet.b");
  if (sa || sb) {
    if (!sa || !sb) parse_fail((sa ? sa : sb)->line, "both [inlet.a] and [inlet.b] are required");
    if (!cfg.geometry) parse_fail(sa->line, "inlet sections need a [geometry] section");
    const std::set<std::string> keys = {"data", "file", "p", "w", "A", "B", "samples"};
    const GasConstants g = run.gas();
    InletProfile inlet;
    inlet.a = read_layer(SectionReader(*sa, keys), base_dir, 0.0, cfg.geometry->upper(0.0), cfg.background, true, g);
    inlet.b = read_layer(SectionReader(*sb, keys), base_dir, cfg.geometry->lower(0.0), 0.0, cfg.background, false, g);
    cfg.inlet = std::move(inlet);
  }
  if (auto s = find_section(doc, "blowup")) {
    SectionReader r(*s, {"u0", "v0", "rho0", "u_background", "rho_background", "q_hat", "markers", "x_max", "dx_max",
                         "grad_factor", "compat_tol"});
    BlowupSettings b;
    b.u0 = r.expression("u0", "y");
    b.v0 = r.expression("v0", "y");
    b.rho0 = r.expression("rho0", "y");
    b.u_background = r.number("u_background", b.u_background);
    b.rho_background = r.number("rho_background", b.rho_background);
    if (r.has("q_hat")) b.q_hat = r.number("q_hat");
    b.markers = r.integer("markers", b.markers);
    b.x_max = r.number("x_max", b.x_max);
    b.dx_max = r.number("dx_max", b.dx_max);
    b.grad_factor = r.number("grad_factor", b.grad_factor);
    b.compat_tol = r.number("compat_tol", b.compat_tol);
    cfg.blowup = b;
  }
  return cfg;
}

Config parse_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return config_from_document(parse_document(text), path.parent_path());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    throw;
  }
}

namespace {

ConfigEntry bare(const std::string& k, double v) { return {k, ConfigEntry::Kind::Bare, fmt17(v), 0}; }
ConfigEntry bare_int(const std::string& k, int v) { return {k, ConfigEntry::Kind::Bare, std::to_string(v), 0}; }
ConfigEntry quoted(const std::string& k, const std::string& v) { return {k, ConfigEntry::Kind::Quoted, v, 0}; }
ConfigEntry block(const std::string& k, const std::string& v) { return {k, ConfigEntry::Kind::Block, v, 0}; }

void write_wall(ConfigSection& s, const std::string& key, const WallCurve& w) {
  if (w.is_expression()) {
    s.entries.push_back(quoted(key, w.expression().source()));
    return;
  }
  std::string t = "x,g";
  for (std::size_t k = 0; k < w.sample_x().size(); ++k) t += "\n" + fmt17(w.sample_x()[k]) + "," + fmt17(w.sample_g()[k]);
  s.entries.push_back(block(key + "_table", t));
}

void write_layer(ConfigSection& s, const LayerProfile& layer) {
  if (layer.generator) {
    const auto& g = *layer.generator;
    s.entries.push_back(quoted("p", g.p.source()));
    s.entries.push_back(quoted("w", g.w.source()));
    if (g.A) s.entries.push_back(quoted("A", g.A->source()));
    if (g.B) s.entries.push_back(quoted("B", g.B->source()));
    s.entries.push_back(bare_int("samples", g.samples));
    return;
  }
  const auto& t = layer.table;
  std::string text = "y,u,v,p,rho";
  for (std::size_t k = 0; k < t.y.size(); ++k)
    text += "\n" + fmt17(t.y[k]) + "," + fmt17(t.u[k]) + "," + fmt17(t.v[k]) + "," + fmt17(t.p[k]) + "," + fmt17(t.rho[k]);
  s.entries.push_back(block("data", text));
}

}  // namespace

ConfigDocument config_to_document(const Config& cfg) {
  ConfigDocument doc;
  const RunConfig& run = cfg.run;
  doc.sections.push_back({"gas", {bare("gamma", run.gamma)}, 0});
  if (cfg.geometry) {
    ConfigSection s{"geometry", {bare("length", cfg.geometry->length)}, 0};
    write_wall(s, "g_plus", cfg.geometry->upper);
    write_wall(s, "g_minus", cfg.geometry->lower);
    doc.sections.push_back(s);
  }
  if (cfg.background) {
    const auto& b = *cfg.background;
    doc.sections.push_back({"background",
                            {bare("p", b.a.p), bare("u_a", b.a.u), bare("rho_a", b.a.rho), bare("u_b", b.b.u),
                             bare("rho_b", b.b.rho)},
                            0});
  }
  if (cfg.inlet) {
    ConfigSection a{"inlet.a", {}, 0}, b{"inlet.b", {}, 0};
    write_layer(a, cfg.inlet->a);
    write_layer(b, cfg.inlet->b);
    doc.sections.push_back(a);
    doc.sections.push_back(b);
  }
  doc.sections.push_back(
      {"grid", {bare_int("nxi", run.grid_nxi), bare_int("neta_a", run.grid_neta_a), bare_int("neta_b", run.grid_neta_b)}, 0});
  doc.sections.push_back({"tolerances",
                          {bare("fp_tol", run.fp_tol), bare_int("max_fp_iters", run.max_fp_iters),
                           bare("newton_tol", run.newton_tol), bare_int("max_newton_iters", run.max_newton_iters),
                           bare("min_supersonic_margin", run.min_supersonic_margin),
                           bare("sonic_margin", run.sonic_margin), bare("compat_tol", run.compat_tol),
                           bare("recon_tol", run.recon_tol), bare_int("norm_samples", run.norm_samples)},
                          0});
  doc.sections.push_back(
      {"solver", {quoted("interpolation", run.interpolation == Interpolation::Cubic ? "cubic" : "monotone")}, 0});
  doc.sections.push_back({"output", {quoted("dir", run.output_dir)}, 0});
  if (cfg.blowup) {
    const auto& b = *cfg.blowup;
    ConfigSection s{"blowup",
                    {quoted("u0", b.u0.source()), quoted("v0", b.v0.source()), quoted("rho0", b.rho0.source()),
                     bare("u_background", b.u_background), bare("rho_background", b.rho_background)},
                    0};
    if (b.q_hat) s.entries.push_back(bare("q_hat", *b.q_hat));
    s.entries.push_back(bare_int("markers", b.markers));
    s.entries.push_back(bare("x_max", b.x_max));
    s.entries.push_back(bare("dx_max", b.dx_max));
    s.entries.push_back(bare("grad_factor", b.grad_factor));
    s.entries.push_back(bare("compat_tol", b.compat_tol));
    doc.sections.push_back(s);
  }
  return doc;
}

void write_config(const Config& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << write_document(config_to_document(cfg));
}

namespace {

void check_layer(const LayerProfile& layer, const char* name, const GasConstants& g, std::vector<std::string>& out) {
  const auto& t = layer.table;
  for (std::size_t k = 0; k < t.y.size(); ++k) {
    const PrimitiveState s{t.u[k], t.v[k], t.p[k], t.rho[k]};
    if (!(s.p > 0.0) || !(s.rho > 0.0)) {
      out.push_back(std::string("nonpositive pressure or density (layer ") + name + ", y=" + fmt17(t.y[k]) + ")");
      return;
    }
    const double c = sound_speed(s, g);
    if (!is_supersonic(s, g) || !(s.u > c) || !(s.rho * s.u > 0.0)) {
      out.push_back(std::string("not supersonic (layer ") + name + ", y=" + fmt17(t.y[k]) + ")");
      return;
    }
  }
}

}  // namespace

std::vector<std::string> check_invariants(const Config& cfg) {
  std::vector<std::string> out;
  const RunConfig& r = cfg.run;
  if (!(r.gamma > 1.0)) out.push_back("gamma must exceed 1");
  if (r.grid_nxi < 4 || r.grid_neta_a < 4 || r.grid_neta_b < 4) out.push_back("grid sizes must be at least 4");
  if (!(r.fp_tol > 0) || !(r.newton_tol > 0) || !(r.sonic_margin > 0) || !(r.compat_tol > 0) || !(r.recon_tol > 0))
    out.push_back("tolerances must be positive");
  if (r.max_fp_iters < 1 || r.max_newton_iters < 1) out.push_back("iteration limits must be positive");
  if (!(r.min_supersonic_margin > 0)) out.push_back("min_supersonic_margin must be positive");
  if (r.norm_samples < 4) out.push_back("norm_samples must be at least 4");
  if (!out.empty() && !(r.gamma > 1.0)) return out;
  const GasConstants g = r.gas();

  if (cfg.geometry) {
    const auto& geom = *cfg.geometry;
    if (!(geom.length > 0)) out.push_back("nozzle length must be positive");
    else
      for (int k = 0; k <= r.norm_samples; ++k) {
        const double x = geom.length * double(k) / double(r.norm_samples);
        if (!(geom.lower(x) < geom.upper(x))) {
          out.push_back("walls crossed at x=" + fmt17(x));
          break;
        }
      }
  }
  if (cfg.background) {
    const auto& b = *cfg.background;
    for (const auto& [s, name] : {std::pair{b.a, "a"}, std::pair{b.b, "b"}}) {
      if (!(s.p > 0) || !(s.rho > 0) || !(s.u > 0)) {
        out.push_back(std::string("background layer ") + name + " needs positive u, p, rho");
        continue;
      }
      if (!(s.u - sound_speed(s, g) >= r.min_supersonic_margin))
        out.push_back(std::string("background layer ") + name + " violates u - c >= min_supersonic_margin");
    }
  }
  if (cfg.inlet && cfg.geometry) {
    const auto& in = *cfg.inlet;
    const double tol = 1e-9;
    if (std::abs(in.a.y_lo()) > tol || std::abs(in.a.y_hi() - cfg.geometry->upper(0.0)) > tol)
      out.push_back("inlet range mismatch (layer a must span [0, g_plus(0)])");
    if (std::abs(in.b.y_hi()) > tol || std::abs(in.b.y_lo() - cfg.geometry->lower(0.0)) > tol)
      out.push_back("inlet range mismatch (layer b must span [g_minus(0), 0])");
    check_layer(in.a, "a", g, out);
    check_layer(in.b, "b", g, out);
  }
  return out;
}

Config load_config(const std::filesystem::path& path) {
  Config cfg = parse_config(path);
  const auto v = check_invariants(cfg);
  if (!v.empty()) {
    std::string msg;
    for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
    throw Error(ErrorKind::InvariantViolation, msg);
  }
  return cfg;
}

}  // namespace contactmoc
