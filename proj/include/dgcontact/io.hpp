#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dgcontact/adaptivity.hpp"
#include "dgcontact/estimator.hpp"
#include "dgcontact/mesh.hpp"
#include "dgcontact/multiplier.hpp"
#include "dgcontact/verification.hpp"

namespace dgc {

/// Shortest representation carrying 17 significant digits: round-trips
/// doubles exactly and keeps CSV output byte-deterministic.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Legacy ASCII VTK export of a broken field: one point per (element,
/// vertex) incidence (DG duplication), u as point data, the local
/// estimates as cell data.
inline void write_vtk(std::ostream& out, const Mesh& mesh, const BrokenField& u,
                      const LocalEstimate* est = nullptr) {
  int nt = mesh.n_triangles();
  out << "# vtk DataFile Version 3.0\n";
  out << "dgcontact solution\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 3 * nt << " double\n";
  for (int t = 0; t < nt; ++t)
    for (int j = 0; j < 3; ++j) {
      Point p = mesh.vertices()[mesh.triangles()[t].v[j]];
      out << fmt17(p.x) << " " << fmt17(p.y) << " 0\n";
    }
  out << "CELLS " << nt << " " << 4 * nt << "\n";
  for (int t = 0; t < nt; ++t)
    out << "3 " << 3 * t << " " << 3 * t + 1 << " " << 3 * t + 2 << "\n";
  out << "CELL_TYPES " << nt << "\n";
  for (int t = 0; t < nt; ++t) out << "5\n";
  out << "POINT_DATA " << 3 * nt << "\n";
  out << "SCALARS u double 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < nt; ++t)
    for (int j = 0; j < 3; ++j) out << fmt17(u.coeff(t, j)) << "\n";
  if (est) {
    out << "CELL_DATA " << nt << "\n";
    out << "SCALARS eta_K double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) out << fmt17(est->eta_K[t]) << "\n";
    out << "SCALARS eta_dK double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) out << fmt17(est->eta_dK[t]) << "\n";
    out << "SCALARS osc_f double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) out << fmt17(est->osc_f[t]) << "\n";
  }
}

/// Companion file: Gamma_2 edges as VTK line cells carrying the multiplier
/// Gauss values, their edge mean, and the multiplier oscillation.
inline void write_lambda_vtk(std::ostream& out, const Mesh& mesh, const Multiplier& lambda,
                             const LocalEstimate* est = nullptr) {
  const auto& g2 = mesh.gamma2_edges();
  int ne = static_cast<int>(g2.size());
  out << "# vtk DataFile Version 3.0\n";
  out << "dgcontact friction multiplier on Gamma_2\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << 2 * ne << " double\n";
  for (int e : g2) {
    Point a = mesh.vertices()[mesh.edges()[e].a], b = mesh.vertices()[mesh.edges()[e].b];
    out << fmt17(a.x) << " " << fmt17(a.y) << " 0\n";
    out << fmt17(b.x) << " " << fmt17(b.y) << " 0\n";
  }
  out << "CELLS " << ne << " " << 3 * ne << "\n";
  for (int k = 0; k < ne; ++k) out << "2 " << 2 * k << " " << 2 * k + 1 << "\n";
  out << "CELL_TYPES " << ne << "\n";
  for (int k = 0; k < ne; ++k) out << "3\n";
  out << "CELL_DATA " << ne << "\n";
  out << "SCALARS lambda double 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k < ne; ++k) {
    double mean = 0.0;
    for (int q = 0; q < kEdgeQuadPoints; ++q) mean += edge_rule()[q].w * lambda.at(k, q);
    out << fmt17(mean) << "\n";
  }
  for (int q = 0; q < kEdgeQuadPoints; ++q) {
    out << "SCALARS lambda_g" << q << " double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < ne; ++k) out << fmt17(lambda.at(k, q)) << "\n";
  }
  if (est) {
    out << "SCALARS osc_lambda double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < ne; ++k) out << fmt17(est->osc_lambda[k]) << "\n";
  }
}

/// "path/to/run.vtk" -> "path/to/run_lambda.vtk"
inline std::string companion_path(const std::string& path) {
  auto dot = path.rfind('.');
  auto slash = path.find_last_of("/\\");
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "_lambda";
  return path.substr(0, dot) + "_lambda" + path.substr(dot);
}

inline void export_vtk(const Mesh& mesh, const BrokenField& u, const Multiplier& lambda,
                       const LocalEstimate* est, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path);
  write_vtk(f, mesh, u, est);
  if (!f) throw IoError("write failed: " + path);
  std::ofstream g(companion_path(path));
  if (!g) throw IoError("cannot write " + companion_path(path));
  write_lambda_vtk(g, mesh, lambda, est);
  if (!g) throw IoError("write failed: " + companion_path(path));
}

inline void csv_afem(std::ostream& out, const std::vector<StudyRow>& rows) {
  out << "level,dofs,triangles,eta_tot,eta_K_tot,eta_dK_tot,error,effectivity,"
         "uzawa_iterations\n";
  for (const auto& r : rows)
    out << r.level << "," << r.dofs << "," << r.triangles << "," << fmt17(r.eta_tot) << ","
        << fmt17(r.eta_K_tot) << "," << fmt17(r.eta_dK_tot) << "," << fmt17(r.error) << ","
        << fmt17(r.effectivity) << "," << r.uzawa_iterations << "\n";
}

inline void csv_study(std::ostream& out, const std::vector<VerificationRow>& rows) {
  out << "level,dofs,h,eta_tot,error,dual_gap,effectivity,bridge_ratio\n";
  for (const auto& r : rows)
    out << r.level << "," << r.dofs << "," << fmt17(r.h) << "," << fmt17(r.eta_tot) << ","
        << fmt17(r.error_u) << "," << fmt17(r.lambda_gap) << "," << fmt17(r.effectivity) << ","
        << fmt17(r.bridge_ratio) << "\n";
}

/// Run configuration: the key = value config file surface, with CLI flags
/// and DGC_* environment variables layered on top by the driver.
struct RunConfig {
  std::string benchmark;  // builtin benchmark name; empty when mesh is given
  std::string mesh;       // dgmesh path; used when benchmark is empty
  std::string source = "one";  // f for mesh runs: one | x | sinsin
  double g = 1.0;
  double min_angle = 20.0;
  LdgConfig ldg;
  UzawaParams uzawa;
  AfemConfig afem;
  int levels = 4;  // uniform study levels
  bool with_bridge = false;
  int bridge_fine_levels = 4;
  int reference_extra_levels = 4;
  std::string out = ".";
  int threads = 1;

  void validate() const {
    if (source != "one" && source != "x" && source != "sinsin")
      throw ConfigError("source must be one of: one, x, sinsin");
    if (!(g > 0.0)) throw ConfigError("friction bound g must be positive");
    if (!(min_angle > 0.0 && min_angle < 60.0))
      throw ConfigError("min_angle must lie in (0, 60) degrees");
    if (levels < 1) throw ConfigError("levels must be positive");
    if (bridge_fine_levels < 1 || reference_extra_levels < 1)
      throw ConfigError("refinement depths must be positive");
    if (threads < 1) throw ConfigError("threads must be positive");
    ldg.validate();
    uzawa.validate();
    afem.validate();
  }
};

namespace detail {

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "benchmark", "mesh",       "source",     "g",          "min_angle",
      "eta_e",     "beta_x",     "beta_y",     "rho",        "tol",
      "tol_c",     "max_iter",   "theta",      "max_dof",    "max_levels",
      "eta_stop",  "levels",     "with_bridge", "bridge_fine_levels",
      "reference_extra_levels",  "out",        "threads"};
  return keys;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected number, got '" + v + "'");
  }
}

inline int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected integer, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected boolean, got '" + v + "'");
}

}  // namespace detail

/// Applies one key = value pair; unknown keys are rejected.
inline void config_set(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::to_bool;
  using detail::to_double;
  using detail::to_int;
  if (key == "benchmark") cfg.benchmark = value;
  else if (key == "mesh") cfg.mesh = value;
  else if (key == "source") cfg.source = value;
  else if (key == "g") cfg.g = to_double(key, value);
  else if (key == "min_angle") cfg.min_angle = to_double(key, value);
  else if (key == "eta_e") cfg.ldg.eta_e = to_double(key, value);
  else if (key == "beta_x") cfg.ldg.beta.x = to_double(key, value);
  else if (key == "beta_y") cfg.ldg.beta.y = to_double(key, value);
  else if (key == "rho") cfg.uzawa.rho = to_double(key, value);
  else if (key == "tol") cfg.uzawa.tol = to_double(key, value);
  else if (key == "tol_c") cfg.uzawa.tol_c = to_double(key, value);
  else if (key == "max_iter") cfg.uzawa.max_iter = to_int(key, value);
  else if (key == "theta") cfg.afem.theta = to_double(key, value);
  else if (key == "max_dof") cfg.afem.max_dof = to_int(key, value);
  else if (key == "max_levels") cfg.afem.max_levels = to_int(key, value);
  else if (key == "eta_stop") cfg.afem.eta_stop = to_double(key, value);
  else if (key == "levels") cfg.levels = to_int(key, value);
  else if (key == "with_bridge") cfg.with_bridge = to_bool(key, value);
  else if (key == "bridge_fine_levels") cfg.bridge_fine_levels = to_int(key, value);
  else if (key == "reference_extra_levels") cfg.reference_extra_levels = to_int(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "threads") cfg.threads = to_int(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

/// Parses a key = value config stream; '#' starts a comment, blank lines
/// are skipped.
inline void parse_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    config_set(cfg, key, value);
  }
}

inline void parse_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  parse_config(in, cfg);
}

/// Environment overrides: DGC_<KEY> (uppercased) wins over the config file
/// but loses to explicit CLI flags.
inline void apply_env_overrides(RunConfig& cfg) {
  for (const std::string& key : detail::config_keys()) {
    std::string env = "DGC_";
    for (char c : key) env += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(env.c_str())) config_set(cfg, key, v);
  }
}

/// Self-describing report header: every effective setting, one per line.
inline void print_config(std::ostream& out, const RunConfig& cfg) {
  out << "# benchmark = " << (cfg.benchmark.empty() ? "-" : cfg.benchmark) << "\n";
  out << "# mesh = " << (cfg.mesh.empty() ? "-" : cfg.mesh) << "\n";
  out << "# source = " << cfg.source << "\n";
  out << "# g = " << fmt17(cfg.g) << "\n";
  out << "# min_angle = " << fmt17(cfg.min_angle) << "\n";
  out << "# eta_e = " << fmt17(cfg.ldg.eta_e) << "\n";
  out << "# beta = (" << fmt17(cfg.ldg.beta.x) << ", " << fmt17(cfg.ldg.beta.y) << ")\n";
  out << "# rho = " << fmt17(cfg.uzawa.rho) << " (0 = auto 1/g^2)\n";
  out << "# tol = " << fmt17(cfg.uzawa.tol) << ", tol_c = " << fmt17(cfg.uzawa.tol_c)
      << ", max_iter = " << cfg.uzawa.max_iter << "\n";
  out << "# theta = " << fmt17(cfg.afem.theta) << ", max_dof = " << cfg.afem.max_dof
      << ", max_levels = " << cfg.afem.max_levels << ", eta_stop = " << fmt17(cfg.afem.eta_stop)
      << "\n";
  out << "# levels = " << cfg.levels << ", with_bridge = " << (cfg.with_bridge ? 1 : 0)
      << ", bridge_fine_levels = " << cfg.bridge_fine_levels
      << ", reference_extra_levels = " << cfg.reference_extra_levels << "\n";
  out << "# threads = " << cfg.threads << "\n";
}

}  // namespace dgc
