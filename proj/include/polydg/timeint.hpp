#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "polydg/forms.hpp"
#include "polydg/linalg.hpp"

namespace polydg {

struct NewmarkParams {
  double beta = 0.25;
  double gamma = 0.5;
  double dt = 1e-3;

  void validate() const;
  static NewmarkParams leapfrog(double dt) { return {0.0, 0.5, dt}; }
};

struct State {
  double t = 0.0;
  int step = 0;
  VectorXd X, Z, L;  // displacement, velocity, acceleration
};

/// Operators of M X'' + D X' + A X = S(t), borrowed from their owner.
struct SecondOrderSystem {
  const SparseOperator* M = nullptr;
  const SparseOperator* D = nullptr;
  const SparseOperator* A = nullptr;
  const LoadFunction* load = nullptr;  // null means S = 0
  DofBlocks blocks;                    // element groups; enables block solves

  static SecondOrderSystem from(const BlockSystem& sys);
  int size() const { return M->rows(); }
  VectorXd source(double t) const;
};

/// Solves M L0 = S(t0) - D Z0 - A X0.
VectorXd initial_acceleration(const SecondOrderSystem& sys, const VectorXd& X0, const VectorXd& Z0, double t0 = 0.0,
                              const SolveConfig& cfg = {});

/// One-step Newmark scheme in acceleration form. The effective matrix
/// M + gamma dt D + beta dt^2 A is factorized once. With beta = 0 the step is
/// explicit and needs a block-diagonal effective matrix (M and D restricted
/// to element blocks); otherwise construction throws.
class NewmarkIntegrator {
 public:
  NewmarkIntegrator(const SecondOrderSystem& sys, const NewmarkParams& params, const SolveConfig& cfg = {});

  State initial_state(const VectorXd& X0, const VectorXd& Z0, double t0 = 0.0) const;
  State step(const State& s) const;
  const NewmarkParams& params() const { return params_; }
  bool explicit_scheme() const { return params_.beta == 0.0; }
  const std::string& solver_method() const { return method_; }

 private:
  SecondOrderSystem sys_;
  NewmarkParams params_;
  SolveConfig cfg_;
  std::shared_ptr<LinearSolver> solver_;
  std::shared_ptr<BlockDiagonalSolver> block_solver_;
  std::string method_;
};

using Observer = std::function<void(const State&)>;

/// Advances from `start` to time T in steps of the integrator's dt, calling
/// every observer on the initial state and after each step. Throws
/// std::runtime_error naming the step when the state becomes non-finite.
State integrate(const NewmarkIntegrator& integrator, State start, double T,
                const std::vector<Observer>& observers = {});

}  // namespace polydg
