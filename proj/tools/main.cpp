#include <CLI11.hpp>
#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "dgcontact/io.hpp"

using namespace dgc;

namespace {

constexpr int kExitError = 1;          // config/IO/validation failures
constexpr int kExitNonconvergence = 3; // Uzawa hit max_iter

std::function<double(Point)> source_fn(const std::string& name) {
  if (name == "one") return [](Point) { return 1.0; };
  if (name == "x") return [](Point p) { return p.x; };
  return [](Point p) {
    return (2.0 * M_PI * M_PI + 1.0) * std::sin(M_PI * p.x) * std::sin(M_PI * p.y);
  };
}

Benchmark make_benchmark(const RunConfig& cfg) {
  if (!cfg.benchmark.empty()) return benchmark_by_name(cfg.benchmark);
  if (cfg.mesh.empty())
    throw ConfigError("either a benchmark name or a mesh path is required");
  Benchmark b;
  b.name = "FILE:" + cfg.mesh;
  b.description = "user mesh, source '" + cfg.source + "'";
  b.g = cfg.g;
  b.f = source_fn(cfg.source);
  std::string path = cfg.mesh;
  double min_angle = cfg.min_angle;
  b.make_mesh = [path, min_angle] { return read_mesh_file(path, min_angle); };
  return b;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out);
  return (std::filesystem::path(cfg.out) / name).string();
}

int run_mesh_info(const RunConfig& cfg) {
  Mesh mesh = make_benchmark(cfg).make_mesh();
  double min_angle = 180.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    for (int j = 0; j < 3; ++j) {
      Point a = mesh.vertices()[tri.v[j]];
      Point b = mesh.vertices()[tri.v[(j + 1) % 3]];
      Point c = mesh.vertices()[tri.v[(j + 2) % 3]];
      Vec2 u = b - a, v = c - a;
      double ang = std::acos(dot(u, v) / (norm(u) * norm(v))) * 180.0 / M_PI;
      min_angle = std::min(min_angle, ang);
    }
  }
  std::cout << "vertices: " << mesh.n_vertices() << "\n";
  std::cout << "triangles: " << mesh.n_triangles() << "\n";
  std::cout << "edges: " << mesh.n_edges() << " (interior " << mesh.interior_edges().size()
            << ", Gamma_1 " << mesh.gamma1_edges().size() << ", Gamma_2 "
            << mesh.gamma2_edges().size() << ")\n";
  std::cout << "hanging nodes: " << mesh.hanging_nodes().size() << "\n";
  std::cout << "one-irregular: " << (mesh.is_one_irregular() ? "yes" : "no") << "\n";
  std::cout << "total area: " << fmt17(mesh.total_area()) << "\n";
  std::cout << "min angle: " << fmt17(min_angle) << " deg\n";
  return 0;
}

int run_solve(const RunConfig& cfg) {
  Benchmark bench = make_benchmark(cfg);
  Mesh mesh = bench.make_mesh();
  BrokenField u(mesh);
  Multiplier lambda(mesh, bench.g);
  int iterations = 0;
  if (bench.constructed) {
    constructed_pair(mesh, bench, u, lambda);
  } else {
    auto sys = assemble(mesh, cfg.ldg, bench.f, bench.g);
    auto sol = uzawa_solve(sys, cfg.uzawa);
    u = sol.u;
    lambda.values() = sol.lambda.values();
    iterations = sol.report.iterations;
  }
  auto est = local_estimates(mesh, u, lambda, bench.f, bench.g);
  std::string path = out_path(cfg, "solution.vtk");
  export_vtk(mesh, u, lambda, &est, path);
  print_config(std::cout, cfg);
  std::cout << "benchmark: " << bench.name << "\n";
  std::cout << "triangles: " << mesh.n_triangles() << ", dofs: " << 3 * mesh.n_triangles()
            << "\n";
  std::cout << "uzawa iterations: " << iterations << "\n";
  std::cout << "eta_tot = " << fmt17(est.eta_tot) << "\n";
  std::cout << "max |lambda_h| = " << fmt17(lambda.max_abs()) << "\n";
  std::cout << "wrote " << path << " and " << companion_path(path) << "\n";
  return 0;
}

int run_afem(const RunConfig& cfg) {
  Benchmark bench = make_benchmark(cfg);
  if (bench.constructed)
    throw ConfigError("benchmark '" + bench.name + "' is a constructed fixture; use solve");
  ProblemSpec prob;
  prob.f = bench.f;
  prob.g = bench.g;
  prob.ldg = cfg.ldg;
  prob.uzawa = cfg.uzawa;
  ErrorFn error_fn;
  if (bench.exact_u) {
    error_fn = [bench](const Mesh& m, const BrokenField& uh, const Multiplier& lh) {
      return error_h1(m, uh, bench.exact_u, bench.exact_grad) +
             multiplier_gap(lh, bench.exact_lambda);
    };
  }
  std::string dir = cfg.out;
  auto on_level = [&cfg](int level, const Mesh& m, const VISolution& sol,
                         const LocalEstimate& est) {
    char name[32];
    std::snprintf(name, sizeof(name), "level_%02d.vtk", level);
    export_vtk(m, sol.u, sol.lambda, &est, out_path(cfg, name));
  };
  auto res = afem_run(bench.make_mesh(), prob, cfg.afem, error_fn, on_level);
  std::string csv = out_path(cfg, "afem.csv");
  std::ofstream f(csv);
  if (!f) throw IoError("cannot write " + csv);
  csv_afem(f, res.rows);
  print_config(std::cout, cfg);
  std::cout << "benchmark: " << bench.name << "\n";
  std::cout << "levels: " << res.rows.size() << ", wrote " << csv << "\n";
  for (const auto& r : res.rows)
    std::cout << "level " << r.level << ": dofs " << r.dofs << ", eta_tot "
              << fmt17(r.eta_tot) << "\n";
  if (res.aborted) {
    std::cout << "aborted: Uzawa nonconvergence, partial report above\n";
    return kExitNonconvergence;
  }
  return 0;
}

int run_study(const RunConfig& cfg) {
  Benchmark bench = make_benchmark(cfg);
  StudyOptions opt;
  opt.levels = cfg.levels;
  opt.with_bridge = cfg.with_bridge;
  opt.bridge_fine_levels = cfg.bridge_fine_levels;
  opt.reference_extra_levels = cfg.reference_extra_levels;
  opt.ldg = cfg.ldg;
  opt.uzawa = cfg.uzawa;
  auto rows = uniform_study(bench, opt);
  std::string csv = out_path(cfg, "study.csv");
  std::ofstream f(csv);
  if (!f) throw IoError("cannot write " + csv);
  csv_study(f, rows);
  print_config(std::cout, cfg);
  std::cout << "benchmark: " << bench.name << "\n";
  csv_study(std::cout, rows);
  std::cout << "wrote " << csv << "\n";
  return 0;
}

bool report(const char* what, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " " << what << ": " << detail << "\n";
  return ok;
}

int run_verify(const RunConfig& cfg) {
  bool all = true;

  {  // Lemma 2.1: bounded quotients, mild drift under refinement
    std::vector<Mesh> meshes;
    meshes.push_back(unit_square_mesh(2));
    meshes.push_back(meshes.back().uniform_refine());
    meshes.push_back(meshes.back().uniform_refine());
    std::mt19937 rng(29);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> w0, w1;
    for (const Mesh& m : meshes) {
      double m0 = 0.0, m1 = 0.0;
      for (int rep = 0; rep < 100; ++rep) {
        BrokenField v(m);
        for (double& c : v.data()) c = dist(rng);
        auto [r0, r1] = lemma21_ratio(v);
        m0 = std::max(m0, r0);
        m1 = std::max(m1, r1);
      }
      w0.push_back(m0);
      w1.push_back(m1);
    }
    // the lemma constant must not grow with refinement: upward drift <= 1.2x
    auto growth = [](const std::vector<double>& w) {
      double worst = 0.0;
      for (std::size_t l = 1; l < w.size(); ++l) worst = std::max(worst, w[l] / w[l - 1]);
      return worst;
    };
    all &= report("lemma21_i0", w0[0] < 10.0 && growth(w0) <= 1.2,
                  "max ratios " + fmt17(w0[0]) + " " + fmt17(w0[1]) + " " + fmt17(w0[2]) +
                      ", growth " + fmt17(growth(w0)));
    all &= report("lemma21_i1", w1[0] < 10.0 && growth(w1) <= 1.2,
                  "max ratios " + fmt17(w1[0]) + " " + fmt17(w1[1]) + " " + fmt17(w1[2]) +
                      ", growth " + fmt17(growth(w1)));
  }

  {  // Lemma 4.1: bubble constants on the reference triangle
    Mesh m = unit_square_mesh(1);
    BubbleConstants c = bubble_constants(m, 0);
    all &= report("bubble_constants", c.positive_finite(),
                  "c1 [" + fmt17(c.c1_min) + ", " + fmt17(c.c1_max) + "] c2 [" +
                      fmt17(c.c2_min) + ", " + fmt17(c.c2_max) + "] c3 [" + fmt17(c.c3_min) +
                      ", " + fmt17(c.c3_max) + "] c4 [" + fmt17(c.c4_min) + ", " +
                      fmt17(c.c4_max) + "]");
    double tau_mid = 4.0 * 0.5 * 0.5;
    double phi_edge = interior_bubble(0.0, 0.3, 0.7);
    all &= report("bubble_identities", tau_mid == 1.0 && phi_edge == 0.0,
                  "tau(midpoint) = " + fmt17(tau_mid) + ", phi_K on edge = " + fmt17(phi_edge));
  }

  {  // dual norm vs dense Rayleigh quotient on an 8-element mesh
    Mesh m = unit_square_mesh(2);
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Multiplier mu(m, 1.5);
    for (int i = 0; i < mu.size(); ++i) mu.values()[i] = dist(rng);
    int n = 3 * m.n_triangles();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < m.n_triangles(); ++t) {
      const auto& tri = m.triangles()[t];
      auto gr = m.basis_gradients(t);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          A(3 * t + i, 3 * t + j) =
              dot(gr[i], gr[j]) * tri.area + tri.area / 12.0 * (i == j ? 2.0 : 1.0);
    }
    for (std::size_t pos = 0; pos < m.gamma2_edges().size(); ++pos) {
      int e = m.gamma2_edges()[pos];
      const Edge& ed = m.edges()[e];
      for (int q = 0; q < kEdgeQuadPoints; ++q) {
        Point x = m.edge_point(e, edge_rule()[q].s);
        auto l = m.barycentric(ed.tri_plus, x);
        double w = edge_rule()[q].w * ed.length * mu.friction_bound() *
                   mu.at(static_cast<int>(pos), q);
        for (int j = 0; j < 3; ++j) b[3 * ed.tri_plus + j] += w * l[j];
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(b * b.transpose(), A);
    double oracle = std::sqrt(ges.eigenvalues().maxCoeff());
    double lib = dual_norm(m, mu);
    all &= report("dual_norm_oracle", std::abs(lib - oracle) <= 1e-8,
                  "dual_norm " + fmt17(lib) + ", dense Rayleigh " + fmt17(oracle));
    Multiplier mu2 = mu;
    mu2.values() *= 2.0;
    double hom = dual_norm(m, mu2);
    all &= report("dual_norm_homogeneity", std::abs(hom - 2.0 * lib) <= 1e-12 * (1.0 + hom),
                  "|2 mu| = " + fmt17(hom) + " vs 2 |mu| = " + fmt17(2.0 * lib));
  }

  {  // bridge inequality on STICK
    Benchmark bench = benchmark_by_name("STICK");
    StudyOptions opt;
    opt.levels = 3;
    opt.with_bridge = true;
    opt.bridge_fine_levels = cfg.bridge_fine_levels;
    opt.ldg = cfg.ldg;
    opt.uzawa = cfg.uzawa;
    auto rows = uniform_study(bench, opt);
    double lo = 1e300, hi = 0.0;
    std::string vals;
    for (const auto& r : rows) {
      lo = std::min(lo, r.bridge_ratio);
      hi = std::max(hi, r.bridge_ratio);
      vals += fmt17(r.bridge_ratio) + " ";
    }
    all &= report("bridge_stick", lo > 0.0 && hi / lo <= 3.0,
                  "ratios " + vals + "(max/min " + fmt17(hi / lo) + ")");
  }

  std::cout << (all ? "verify: all checks passed" : "verify: FAILURES above") << "\n";
  return all ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dgcontact: adaptive LDG solver for 2-D Tresca friction contact"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, mesh_path, benchmark, out_dir;
  double theta = -1.0;
  int threads = 0;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--mesh", mesh_path, "dgmesh input file");
  app.add_option("--benchmark", benchmark, "builtin benchmark: STICK, SLIP, LSHAPE, AFFINE");
  app.add_option("--theta", theta, "Doerfler marking parameter in (0,1)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "thread budget for parallel sections");

  auto* solve = app.add_subcommand("solve", "single solve + estimate, VTK output");
  auto* afem = app.add_subcommand("afem", "adaptive loop, per-level VTK + CSV");
  auto* study = app.add_subcommand("study", "uniform-refinement convergence study, CSV");
  auto* verify = app.add_subcommand("verify", "lemma/bridge/oracle suites, pass/fail");
  auto* info = app.add_subcommand("mesh-info", "mesh statistics");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) parse_config_file(config_path, cfg);
    apply_env_overrides(cfg);
    if (!mesh_path.empty()) {
      cfg.mesh = mesh_path;
      cfg.benchmark.clear();
    }
    if (!benchmark.empty()) {
      cfg.benchmark = benchmark;
      cfg.mesh.clear();
    }
    if (theta >= 0.0) cfg.afem.theta = theta;
    if (!out_dir.empty()) cfg.out = out_dir;
    if (threads > 0) cfg.threads = threads;
    cfg.validate();
    Eigen::setNbThreads(cfg.threads);

    if (solve->parsed()) return run_solve(cfg);
    if (afem->parsed()) return run_afem(cfg);
    if (study->parsed()) return run_study(cfg);
    if (verify->parsed()) return run_verify(cfg);
    if (info->parsed()) return run_mesh_info(cfg);
    return kExitError;
  } catch (const NonconvergenceError& e) {
    std::cerr << "nonconvergence: " << e.what() << "\n";
    return kExitNonconvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
