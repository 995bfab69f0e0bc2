#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "contactmoc/error.hpp"
#include "contactmoc/geometry_config.hpp"
#include "generators.hpp"

using namespace contactmoc;
using contactmoc::testing::Gen;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "contactmoc_geometry_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

const std::string kBackgroundText = R"([gas]
gamma = 1.4

[geometry]
length = 4
g_plus = "1"
g_minus = "-1"

[background]
p = 1
u_a = 2.2
rho_a = 1
u_b = 2.5
rho_b = 1.2

[inlet.a]
p = "1"
w = "0"

[inlet.b]
p = "1"
w = "0"
)";

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

bool contains(const std::vector<std::string>& list, const std::string& needle) {
  for (const auto& s : list)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::string violation_of(const fs::path& p) {
  try {
    load_config(p);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvariantViolation) return e.what();
    return std::string("wrong kind: ") + std::string(e.category());
  }
  return "no error";
}

// Drops the generators so the inlet is a plain table, scaled linearly.
Config as_tables(Config cfg) {
  cfg.inlet->a.generator.reset();
  cfg.inlet->b.generator.reset();
  return cfg;
}

}  // namespace

TEST_CASE("expression values and derivatives") {
  const Expression e = Expression::parse("1 + 0.5*sin(pi*x/8)^4", "x");
  for (double x : {0.0, 0.7, 3.9}) {
    const double a = M_PI / 8, s = std::sin(a * x), c = std::cos(a * x);
    const auto d = e.derivatives(x);
    CHECK(d[0] == doctest::Approx(1 + 0.5 * std::pow(s, 4)).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(2 * a * s * s * s * c).epsilon(1e-13));
    CHECK(d[2] == doctest::Approx(2 * a * a * (3 * s * s * c * c - s * s * s * s)).epsilon(1e-12));
    CHECK(d[3] == doctest::Approx(2 * a * a * a * (6 * s * c * c * c - 10 * s * s * s * c)).epsilon(1e-12));
  }
  CHECK(Expression::parse("2*pi", "x").is_constant());
  CHECK_THROWS_AS(Expression::parse("1 + * x", "x"), Error);
  CHECK_THROWS_AS(Expression::parse("sin(y)", "x"), Error);
}

TEST_CASE("document format round trip on generated documents") {
  Gen gen(31);
  const std::string letters = "abcdefgh_";
  for (int trial = 0; trial < 100; ++trial) {
    ConfigDocument doc;
    const int ns = gen.integer(1, 5);
    for (int s = 0; s < ns; ++s) {
      ConfigSection sec;
      sec.name = std::string(1, letters[gen.integer(0, 7)]) + std::to_string(s) + (gen.coin() ? ".a" : "");
      const int ne = gen.integer(0, 6);
      for (int e = 0; e < ne; ++e) {
        ConfigEntry en;
        en.key = std::string(1, letters[gen.integer(0, 8)]) + std::to_string(e);
        switch (gen.integer(0, 2)) {
          case 0:
            en.kind = ConfigEntry::Kind::Bare;
            en.text = fmt17(gen.uniform(-1e3, 1e3));
            break;
          case 1:
            en.kind = ConfigEntry::Kind::Quoted;
            en.text = "1 + " + fmt17(gen.uniform(0, 1)) + "*sin(pi*x) # not a comment";
            break;
          default:
            en.kind = ConfigEntry::Kind::Block;
            en.text = "y,u\n" + fmt17(gen.uniform(0, 1)) + "," + fmt17(gen.uniform(0, 1));
        }
        sec.entries.push_back(en);
      }
      doc.sections.push_back(sec);
    }
    CHECK(parse_document(write_document(doc)) == doc);
  }
}

TEST_CASE("document parse errors carry the line") {
  try {
    parse_document("[gas]\ngamma = 1.4\nthis line is broken\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("background file loads and measures zero") {
  const Config cfg = load_config(write_text("background.cfg", kBackgroundText));
  // u is recomputed from the Bernoulli constant, so the background measures zero up to rounding.
  CHECK(perturbation_size(cfg.inlet_profile(), cfg.nozzle(), cfg.background_state()) <= 1e-15);
  CHECK(validate_compatibility(cfg.inlet_profile(), cfg.nozzle(), 1e-12).empty());
  CHECK(cfg.nozzle().upper(2.0) == 1.0);
  CHECK(cfg.inlet_profile().a.at(0.5).u == doctest::Approx(2.2).epsilon(1e-15));
}

TEST_CASE("walls crossed is an invariant violation") {
  const auto p = write_text("crossed.cfg", replaced(kBackgroundText, "g_plus = \"1\"", "g_plus = \"1 - x\""));
  CHECK(violation_of(p).find("walls crossed") != std::string::npos);
}

TEST_CASE("subsonic inlet sample is an invariant violation") {
  const std::string table = "data = \"\"\"\ny,u,v,p,rho\n0,2.2,0,1,1\n0.5,0.5,0,1,1\n1,2.2,0,1,1\n\"\"\"";
  const auto p = write_text("subsonic.cfg", replaced(kBackgroundText, "[inlet.a]\np = \"1\"\nw = \"0\"", "[inlet.a]\n" + table));
  CHECK(violation_of(p).find("not supersonic") != std::string::npos);
}

TEST_CASE("config round trip through the file format") {
  FixtureOptions opt;
  opt.amplitude = 0.3;
  opt.samples = 65;
  for (const Config& cfg : {make_fixture(opt), as_tables(make_fixture(opt))}) {
    const fs::path p = scratch("roundtrip.cfg");
    write_config(cfg, p);
    const Config back = load_config(p);
    CHECK(write_document(config_to_document(back)) == write_document(config_to_document(cfg)));
    CHECK(back.inlet_profile().a.table == cfg.inlet_profile().a.table);
    CHECK(back.inlet_profile().b.table == cfg.inlet_profile().b.table);
  }
}

TEST_CASE("sampled walls round trip and differentiate through the spline") {
  std::vector<double> x, g;
  for (int k = 0; k <= 400; ++k) {
    x.push_back(0.01 * k);
    g.push_back(1.0 + 0.01 * std::sin(M_PI * x.back() / 4.0));
  }
  FixtureOptions opt;
  Config cfg = make_fixture(opt);
  cfg.geometry->upper = WallCurve::from_samples(x, g);
  const fs::path p = scratch("sampled.cfg");
  write_config(cfg, p);
  const Config back = load_config(p);
  CHECK(back.nozzle().upper.sample_g() == g);
  const double a = M_PI / 4;
  for (double xv : {0.5, 1.7, 3.2}) {
    const auto d = back.nozzle().upper.derivatives(xv);
    CHECK(d[0] == doctest::Approx(1.0 + 0.01 * std::sin(a * xv)).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.01 * a * std::cos(a * xv)).epsilon(1e-7));
    CHECK(d[2] == doctest::Approx(-0.01 * a * a * std::sin(a * xv)).epsilon(1e-5));
    CHECK(d[3] == doctest::Approx(-0.01 * a * a * a * std::cos(a * xv)).epsilon(1e-3));
  }
}

TEST_CASE("compatibility of generated fixtures") {
  Gen gen(32);
  for (int trial = 0; trial < 10; ++trial) {
    FixtureOptions opt;
    opt.amplitude = gen.uniform(0.0, 1.0);
    opt.samples = 129;
    const Config cfg = make_fixture(opt);
    CHECK(validate_compatibility(cfg.inlet_profile(), cfg.nozzle(), 1e-8).empty());
    CHECK(check_invariants(cfg).empty());
  }
}

TEST_CASE("constructed compatibility violations") {
  FixtureOptions opt;
  opt.samples = 129;
  Config cfg = as_tables(make_fixture(opt));
  SUBCASE("pressure jump at the contact") {
    for (auto& p : cfg.inlet->b.table.p) p += 1e-3;
    cfg.inlet->b.build();
    CHECK(contains(validate_compatibility(cfg.inlet_profile(), cfg.nozzle(), 1e-6), "pressure mismatch"));
  }
  SUBCASE("flow direction at the upper corner") {
    auto& t = cfg.inlet->a.table;
    for (std::size_t k = 0; k < t.y.size(); ++k) t.v[k] = 0.01 * t.u[k] * std::pow(t.y[k], 6);
    cfg.inlet->a.build();
    const auto v = validate_compatibility(cfg.inlet_profile(), cfg.nozzle(), 1e-6);
    CHECK(contains(v, "corner slip"));
    CHECK_FALSE(contains(v, "direction mismatch"));
  }
}

TEST_CASE("perturbation size is homogeneous") {
  Gen gen(33);
  FixtureOptions opt;
  opt.amplitude = 0.2;
  opt.samples = 257;
  const Config cfg = as_tables(make_fixture(opt));
  const double eps = perturbation_size(cfg.inlet_profile(), cfg.nozzle(), cfg.background_state());
  CHECK(eps > 0.0);
  const Config twice = scale_deviation(cfg, 2.0);
  CHECK(perturbation_size(twice.inlet_profile(), twice.nozzle(), twice.background_state()) ==
        doctest::Approx(2.0 * eps).epsilon(1e-12));
  for (int k = 0; k < 5; ++k) {
    const double t = gen.uniform(0.0, 3.0);
    const Config s = scale_deviation(cfg, t);
    CHECK(perturbation_size(s.inlet_profile(), s.nozzle(), s.background_state()) ==
          doctest::Approx(t * eps).epsilon(1e-12));
  }
  CHECK_THROWS_AS(scale_deviation(cfg, -1.0), Error);
}

TEST_CASE("perturbation size of a single wall bump against dense sampling") {
  Config cfg = make_fixture(FixtureOptions{});
  cfg.geometry->upper = WallCurve::from_expression(Expression::parse("1 + 1e-3*sin(pi*x/4)", "x"));
  const double a = M_PI / 4;
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  for (int k = 0; k <= 10000; ++k) {
    const double x = 4.0 * k / 10000;
    s0 = std::max(s0, std::abs(1e-3 * std::sin(a * x)));
    s1 = std::max(s1, std::abs(1e-3 * a * std::cos(a * x)));
    s2 = std::max(s2, std::abs(1e-3 * a * a * std::sin(a * x)));
    s3 = std::max(s3, std::abs(1e-3 * a * a * a * std::cos(a * x)));
  }
  CHECK(perturbation_size(cfg.inlet_profile(), cfg.nozzle(), cfg.background_state()) ==
        doctest::Approx(s0 + s1 + s2 + s3).epsilon(1e-8));
}

TEST_CASE("missing sections are parse errors") {
  const Config cfg;
  try {
    cfg.nozzle();
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("geometry") != std::string::npos);
  }
}
