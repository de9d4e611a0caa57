#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "dgcontact/io.hpp"

using namespace dgc;

namespace {

/// Minimal legacy-VTK reader used as a round-trip oracle.
struct VtkData {
  int n_points = 0, n_cells = 0;
  std::vector<double> xyz;
  std::vector<int> connectivity;  // flattened, with leading size per cell
  std::vector<int> cell_types;
  std::map<std::string, std::vector<double>> point_scalars, cell_scalars;
};

VtkData read_vtk(std::istream& in) {
  VtkData d;
  std::string tok;
  auto expect = [&](const std::string& want) {
    in >> tok;
    REQUIRE(tok == want);
  };
  std::string line;
  std::getline(in, line);  // header comment
  REQUIRE(line.rfind("# vtk", 0) == 0);
  std::getline(in, line);  // title
  std::getline(in, line);
  REQUIRE(line == "ASCII");
  expect("DATASET");
  expect("UNSTRUCTURED_GRID");
  expect("POINTS");
  in >> d.n_points >> tok;
  d.xyz.resize(3 * d.n_points);
  for (double& v : d.xyz) in >> v;
  expect("CELLS");
  int total = 0;
  in >> d.n_cells >> total;
  d.connectivity.resize(total);
  for (int& v : d.connectivity) in >> v;
  expect("CELL_TYPES");
  int nc = 0;
  in >> nc;
  REQUIRE(nc == d.n_cells);
  d.cell_types.resize(nc);
  for (int& v : d.cell_types) in >> v;
  bool point_data = false;
  int n = 0;
  while (in >> tok) {
    if (tok == "POINT_DATA") {
      point_data = true;
      in >> n;
    } else if (tok == "CELL_DATA") {
      point_data = false;
      in >> n;
    } else if (tok == "SCALARS") {
      std::string name, type;
      int comps = 0;
      in >> name >> type >> comps;
      expect("LOOKUP_TABLE");
      in >> tok;
      std::vector<double> vals(n);
      for (double& v : vals) in >> v;
      (point_data ? d.point_scalars : d.cell_scalars)[name] = std::move(vals);
    } else {
      FAIL("unexpected VTK token: " + tok);
    }
  }
  return d;
}

}  // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, M_PI, 0.1, -2.5e-17, 1e300, 0.0}) {
    double back = std::strtod(fmt17(v).c_str(), nullptr);
    CHECK(back == v);
  }
  CHECK(fmt17(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("vtk export duplicates DG points: 2-triangle mesh") {
  Mesh mesh = unit_square_mesh(1);
  REQUIRE(mesh.n_triangles() == 2);
  BrokenField u = BrokenField::interpolate(mesh, [](Point p) { return p.x + 2.0 * p.y; });
  std::ostringstream os;
  write_vtk(os, mesh, u);
  std::istringstream is(os.str());
  VtkData d = read_vtk(is);
  CHECK(d.n_points == 6);
  CHECK(d.n_cells == 2);
  for (int t : d.cell_types) CHECK(t == 5);  // VTK_TRIANGLE
  REQUIRE(d.point_scalars.count("u"));
  const auto& uv = d.point_scalars["u"];
  REQUIRE(uv.size() == 6);
  // continuous field: duplicated values agree at shared vertices
  for (int t = 0; t < 2; ++t)
    for (int j = 0; j < 3; ++j) {
      Point p{d.xyz[3 * (3 * t + j)], d.xyz[3 * (3 * t + j) + 1]};
      CHECK(uv[3 * t + j] == Catch::Approx(p.x + 2.0 * p.y).margin(1e-12));
    }
}

TEST_CASE("vtk round-trip recovers cell data exactly") {
  Mesh mesh = unit_square_mesh(2);
  BrokenField u(mesh);
  for (int i = 0; i < u.size(); ++i) u.data()[i] = std::sin(0.7 * i);
  Multiplier lambda(mesh, 1.0);
  for (int i = 0; i < lambda.size(); ++i) lambda.values()[i] = std::cos(0.3 * i);
  auto est = local_estimates(mesh, u, lambda, [](Point) { return 1.0; }, 1.0);

  std::ostringstream os;
  write_vtk(os, mesh, u, &est);
  std::istringstream is(os.str());
  VtkData d = read_vtk(is);
  CHECK(d.n_points == 3 * mesh.n_triangles());
  CHECK(d.n_cells == mesh.n_triangles());
  for (const char* name : {"eta_K", "eta_dK", "osc_f"}) REQUIRE(d.cell_scalars.count(name));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    CHECK(d.cell_scalars["eta_K"][t] == est.eta_K[t]);  // fmt17 is exact
    CHECK(d.cell_scalars["eta_dK"][t] == est.eta_dK[t]);
    CHECK(d.cell_scalars["osc_f"][t] == est.osc_f[t]);
  }
  for (int i = 0; i < u.size(); ++i) CHECK(d.point_scalars["u"][i] == u.data()[i]);

  std::ostringstream ol;
  write_lambda_vtk(ol, mesh, lambda, &est);
  std::istringstream il(ol.str());
  VtkData dl = read_vtk(il);
  int ne = static_cast<int>(mesh.gamma2_edges().size());
  CHECK(dl.n_points == 2 * ne);
  CHECK(dl.n_cells == ne);
  for (int t : dl.cell_types) CHECK(t == 3);  // VTK_LINE
  for (int k = 0; k < ne; ++k)
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      CHECK(dl.cell_scalars["lambda_g" + std::to_string(q)][k] == lambda.at(k, q));
}

TEST_CASE("companion path insertion") {
  CHECK(companion_path("run.vtk") == "run_lambda.vtk");
  CHECK(companion_path("a/b.c/run.vtk") == "a/b.c/run_lambda.vtk");
  CHECK(companion_path("a.dir/run") == "a.dir/run_lambda");
  CHECK(companion_path("run") == "run_lambda");
}

TEST_CASE("config parsing with defaults, comments, and overrides") {
  RunConfig cfg;
  std::istringstream in(
      "# study setup\n"
      "benchmark = STICK\n"
      "theta = 0.7   # marking\n"
      "eta_e = 12.5\n"
      "max_levels = 3\n"
      "with_bridge = true\n"
      "\n");
  parse_config(in, cfg);
  CHECK(cfg.benchmark == "STICK");
  CHECK(cfg.afem.theta == 0.7);
  CHECK(cfg.ldg.eta_e == 12.5);
  CHECK(cfg.afem.max_levels == 3);
  CHECK(cfg.with_bridge);
  CHECK(cfg.uzawa.tol == 1e-8);  // untouched default
  cfg.validate();
}

TEST_CASE("config rejects unknown keys and malformed values") {
  RunConfig cfg;
  std::istringstream bad1("spam = 1\n");
  CHECK_THROWS_AS(parse_config(bad1, cfg), ConfigError);
  std::istringstream bad2("theta = often\n");
  CHECK_THROWS_AS(parse_config(bad2, cfg), ConfigError);
  std::istringstream bad3("theta 0.4\n");
  CHECK_THROWS_AS(parse_config(bad3, cfg), ConfigError);
  std::istringstream bad4("with_bridge = maybe\n");
  CHECK_THROWS_AS(parse_config(bad4, cfg), ConfigError);
}

TEST_CASE("config validation enforces documented ranges") {
  RunConfig cfg;
  cfg.afem.theta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.g = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.source = "random";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = RunConfig{};
  cfg.ldg.eta_e = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("environment variables override config file values") {
  RunConfig cfg;
  std::istringstream in("theta = 0.3\n");
  parse_config(in, cfg);
  setenv("DGC_THETA", "0.8", 1);
  setenv("DGC_MAX_DOF", "1234", 1);
  apply_env_overrides(cfg);
  unsetenv("DGC_THETA");
  unsetenv("DGC_MAX_DOF");
  CHECK(cfg.afem.theta == 0.8);
  CHECK(cfg.afem.max_dof == 1234);
}

TEST_CASE("csv output is byte-deterministic across repeated runs") {
  Benchmark b = benchmark_by_name("STICK");
  StudyOptions opt;
  opt.levels = 2;
  auto render = [&] {
    std::ostringstream os;
    csv_study(os, uniform_study(b, opt));
    return os.str();
  };
  std::string first = render();
  CHECK(first == render());
  CHECK(first.rfind("level,dofs,h,eta_tot,error,dual_gap,effectivity,bridge_ratio\n", 0) == 0);
  CHECK(first.find("nan") != std::string::npos);  // bridge disabled -> nan column
}

TEST_CASE("afem csv carries the per-level report") {
  ProblemSpec p;
  p.f = [](Point) { return 1.0; };
  p.g = 1.0;
  AfemConfig cfg;
  cfg.max_levels = 2;
  auto res = afem_run(lshape_mesh(), p, cfg);
  std::ostringstream os;
  csv_afem(os, res.rows);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line ==
        "level,dofs,triangles,eta_tot,eta_K_tot,eta_dK_tot,error,effectivity,uzawa_iterations");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == static_cast<int>(res.rows.size()));
}
