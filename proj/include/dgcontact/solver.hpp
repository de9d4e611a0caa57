#pragma once

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "dgcontact/assembly.hpp"
#include "dgcontact/errors.hpp"

namespace dgc {

struct UzawaParams {
  double rho = 0.0;  // step size; 0 selects 1 / g^2
  double tol = 1e-8;
  double tol_c = 1e-7;
  int max_iter = 10000;

  void validate() const {
    if (rho < 0.0) throw ConfigError("Uzawa step rho must be nonnegative");
    if (!(tol > 0.0) || !(tol_c > 0.0)) throw ConfigError("Uzawa tolerances must be positive");
    if (max_iter < 1) throw ConfigError("Uzawa max_iter must be at least 1");
  }
};

struct UzawaReport {
  int iterations = 0;
  bool converged = false;
  double increment_u = 0.0;
  double increment_lambda = 0.0;
  double complementarity = 0.0;
};

struct VISolution {
  BrokenField u;
  Multiplier lambda;
  UzawaReport report;
};

/// KKT residual of the friction conditions at the Gamma_2 Gauss points:
/// zero iff lambda is the projection of lambda + g u_h onto [-1, 1], which
/// encodes |lambda| <= 1 together with lambda = sign(u_h) wherever u_h != 0.
inline double complementarity_residual(const AssembledSystem& sys, const BrokenField& u,
                                       const Multiplier& lambda) {
  Eigen::Map<const Eigen::VectorXd> uv(u.data().data(), u.size());
  Eigen::VectorXd trace = sys.gamma2_trace * uv;
  double worst = 0.0;
  for (int k = 0; k < trace.size(); ++k) {
    double target = std::clamp(lambda.values()[k] + sys.g * trace[k], -1.0, 1.0);
    worst = std::max(worst, std::abs(lambda.values()[k] - target));
  }
  return worst;
}

/// Discrete energy J(v) = 1/2 B_h(v,v) - (f,v) + g int_{Gamma_2} |v| ds,
/// with the boundary term evaluated by the edge Gauss rule. The solver's
/// output minimizes this over the broken P1 space.
inline double energy(const AssembledSystem& sys, const BrokenField& v) {
  Eigen::Map<const Eigen::VectorXd> vv(v.data().data(), v.size());
  double j = 0.5 * vv.dot(sys.A * vv) - sys.load.dot(vv);
  const Mesh& mesh = *sys.mesh;
  const auto& g2 = mesh.gamma2_edges();
  Eigen::VectorXd trace = sys.gamma2_trace * vv;
  for (std::size_t pos = 0; pos < g2.size(); ++pos)
    for (int q = 0; q < kEdgeQuadPoints; ++q)
      j += sys.g * edge_rule()[q].w * mesh.edges()[g2[pos]].length *
           std::abs(trace[3 * pos + q]);
  return j;
}

/// Uzawa iteration for the discrete variational inequality. Each step solves
/// A u = F - G lambda with a Cholesky factorization computed once, then
/// projects the multiplier update onto [-1, 1]. Convergence requires both
/// small iterate increments and a small complementarity residual.
inline VISolution uzawa_solve(const AssembledSystem& sys, const UzawaParams& params = {}) {
  params.validate();
  const Mesh& mesh = *sys.mesh;
  double rho = params.rho > 0.0 ? params.rho : 1.0 / (sys.g * sys.g);

  Eigen::SimplicialLLT<SparseMatrix> llt(sys.A);
  if (llt.info() != Eigen::Success) throw LinearSolverError("Cholesky factorization of A failed");

  VISolution sol{BrokenField(mesh), Multiplier(mesh, sys.g), {}};
  Eigen::VectorXd lambda = sol.lambda.values();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.n_dofs());

  for (int it = 1; it <= params.max_iter; ++it) {
    Eigen::VectorXd u_new = llt.solve(sys.load - sys.boundary_coupling * lambda);
    if (llt.info() != Eigen::Success) throw LinearSolverError("linear solve failed");
    Eigen::VectorXd trace = sys.gamma2_trace * u_new;
    Eigen::VectorXd lambda_new(lambda.size());
    for (int k = 0; k < lambda.size(); ++k)
      lambda_new[k] = std::clamp(lambda[k] + rho * sys.g * trace[k], -1.0, 1.0);

    double du = it == 1 ? 1.0 : (u_new - u).lpNorm<Eigen::Infinity>();
    double dl = lambda.size() ? (lambda_new - lambda).lpNorm<Eigen::Infinity>() : 0.0;
    u = u_new;
    lambda = lambda_new;

    sol.report.iterations = it;
    sol.report.increment_u = du;
    sol.report.increment_lambda = dl;
    if (du <= params.tol && dl <= params.tol) {
      sol.lambda.values() = lambda;
      std::copy(u.data(), u.data() + u.size(), sol.u.data().begin());
      sol.report.complementarity = complementarity_residual(sys, sol.u, sol.lambda);
      if (sol.report.complementarity <= params.tol_c) {
        sol.report.converged = true;
        return sol;
      }
    }
  }
  sol.lambda.values() = lambda;
  std::copy(u.data(), u.data() + u.size(), sol.u.data().begin());
  sol.report.complementarity = complementarity_residual(sys, sol.u, sol.lambda);
  throw NonconvergenceError("Uzawa iteration did not converge in " +
                            std::to_string(params.max_iter) + " iterations");
}

}  // namespace dgc
