#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "dgcontact/estimator.hpp"
#include "dgcontact/solver.hpp"

namespace dgc {

struct AfemConfig {
  double theta = 0.5;
  int max_dof = 200000;
  int max_levels = 10;
  double eta_stop = 0.0;

  void validate() const {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("Doerfler theta must lie in (0,1)");
    if (max_dof < 1) throw ConfigError("max_dof must be positive");
    if (max_levels < 0) throw ConfigError("max_levels must be nonnegative");
  }
};

/// Doerfler (bulk) marking on squared indicators: the minimal set, chosen
/// greedily by descending value with ties broken by element id, whose sum
/// reaches theta^2 times the total.
inline std::vector<int> mark(const std::vector<double>& squared_indicators, double theta) {
  if (squared_indicators.empty()) throw ValidationError("marking requires nonempty estimates");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("Doerfler theta must lie in (0,1)");
  double total = std::accumulate(squared_indicators.begin(), squared_indicators.end(), 0.0);
  std::vector<int> order(squared_indicators.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return squared_indicators[a] > squared_indicators[b];
  });
  std::vector<int> marked;
  double target = theta * theta * total;
  double acc = 0.0;
  for (int t : order) {
    // relative slack absorbs roundoff in theta^2 * total
    if (acc >= target - 1e-12 * total) break;
    marked.push_back(t);
    acc += squared_indicators[t];
  }
  if (marked.empty() && total > 0.0) marked.push_back(order[0]);
  std::sort(marked.begin(), marked.end());
  return marked;
}

inline std::vector<int> mark(const LocalEstimate& est, double theta) {
  std::vector<double> ind(est.eta_K.size());
  for (std::size_t t = 0; t < ind.size(); ++t) ind[t] = est.indicator(static_cast<int>(t));
  return mark(ind, theta);
}

/// One row of a convergence/adaptivity study. `error` and dependent fields
/// are NaN when the problem has no exact or reference solution.
struct StudyRow {
  int level = 0;
  int dofs = 0;
  int triangles = 0;
  double eta_tot = 0.0;
  double eta_K_tot = 0.0;
  double eta_dK_tot = 0.0;
  double error = std::numeric_limits<double>::quiet_NaN();
  double effectivity = std::numeric_limits<double>::quiet_NaN();
  int uzawa_iterations = 0;
};

/// Problem data for a run: load, friction bound, discretization parameters.
struct ProblemSpec {
  std::function<double(Point)> f;
  double g = 1.0;
  LdgConfig ldg;
  UzawaParams uzawa;
};

/// Error functional evaluated per level; receives the converged pair.
using ErrorFn = std::function<double(const Mesh&, const BrokenField&, const Multiplier&)>;
/// Observer invoked once per level after estimation (VTK/CSV emission).
using LevelFn =
    std::function<void(int, const Mesh&, const VISolution&, const LocalEstimate&)>;

struct AfemResult {
  std::vector<StudyRow> rows;
  std::shared_ptr<Mesh> mesh;  // final mesh; fields below point into it
  std::unique_ptr<VISolution> solution;
  LocalEstimate estimates;
  bool aborted = false;  // solver nonconvergence; rows hold the partial report
};

/// Solve -> Estimate -> Mark -> Refine. Runs max_levels + 1 solves unless a
/// configured bound terminates the loop earlier.
inline AfemResult afem_run(const Mesh& initial, const ProblemSpec& prob, const AfemConfig& cfg,
                           const ErrorFn& error_fn = {}, const LevelFn& on_level = {}) {
  cfg.validate();
  prob.ldg.validate();
  AfemResult res;
  res.mesh = std::make_shared<Mesh>(initial);
  for (int level = 0;; ++level) {
    const Mesh& mesh = *res.mesh;
    auto sys = assemble(mesh, prob.ldg, prob.f, prob.g);
    try {
      res.solution = std::make_unique<VISolution>(uzawa_solve(sys, prob.uzawa));
    } catch (const NonconvergenceError&) {
      res.aborted = true;
      return res;
    }
    res.estimates = local_estimates(mesh, res.solution->u, res.solution->lambda, prob.f, prob.g);

    StudyRow row;
    row.level = level;
    row.dofs = sys.n_dofs();
    row.triangles = mesh.n_triangles();
    row.eta_tot = res.estimates.eta_tot;
    double k2 = 0.0, d2 = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      k2 += res.estimates.eta_K[t] * res.estimates.eta_K[t];
      d2 += res.estimates.eta_dK[t] * res.estimates.eta_dK[t];
    }
    row.eta_K_tot = std::sqrt(k2);
    row.eta_dK_tot = std::sqrt(d2);
    row.uzawa_iterations = res.solution->report.iterations;
    if (error_fn) {
      row.error = error_fn(mesh, res.solution->u, res.solution->lambda);
      if (row.error > 0.0)
        row.effectivity = row.eta_tot / row.error;
      else
        row.effectivity = row.eta_tot > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    res.rows.push_back(row);
    if (on_level) on_level(level, mesh, *res.solution, res.estimates);

    if (level >= cfg.max_levels) break;
    if (row.dofs >= cfg.max_dof) break;
    if (row.eta_tot <= cfg.eta_stop) break;

    auto marked = mark(res.estimates, cfg.theta);
    auto next = std::make_shared<Mesh>(
        res.mesh->refine(std::set<int>(marked.begin(), marked.end())));
    res.solution.reset();  // points into the old mesh
    res.mesh = std::move(next);
  }
  return res;
}

}  // namespace dgc
