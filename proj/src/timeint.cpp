#include "polydg/timeint.hpp"

#include <cmath>
#include <stdexcept>

namespace polydg {

void NewmarkParams::validate() const {
  if (!(beta >= 0.0 && beta <= 0.5)) throw std::invalid_argument("Newmark beta must lie in [0, 1/2]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("Newmark gamma must lie in [0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be > 0");
}

SecondOrderSystem SecondOrderSystem::from(const BlockSystem& sys) {
  return {&sys.M, &sys.D, &sys.A, &sys.load, sys.dof_blocks()};
}

VectorXd SecondOrderSystem::source(double t) const {
  if (!load || load->empty()) return VectorXd::Zero(size());
  return (*load)(t);
}

VectorXd initial_acceleration(const SecondOrderSystem& sys, const VectorXd& X0, const VectorXd& Z0, double t0,
                              const SolveConfig& cfg) {
  const VectorXd rhs = sys.source(t0) - (*sys.D) * Z0 - (*sys.A) * X0;
  if (!sys.blocks.empty() && BlockDiagonalSolver::is_block_diagonal(*sys.M, sys.blocks))
    return BlockDiagonalSolver(*sys.M, sys.blocks).solve(rhs);
  return LinearSolver(*sys.M, cfg, sys.blocks.empty() ? nullptr : &sys.blocks, "mass matrix").solve(rhs);
}

NewmarkIntegrator::NewmarkIntegrator(const SecondOrderSystem& sys, const NewmarkParams& params,
                                     const SolveConfig& cfg)
    : sys_(sys), params_(params), cfg_(cfg) {
  params_.validate();
  const double dt = params_.dt;
  SparseOperator K = combine(1.0, *sys_.M, params_.gamma * dt, *sys_.D);
  if (params_.beta > 0.0) K = combine(1.0, K, params_.beta * dt * dt, *sys_.A);
  if (explicit_scheme()) {
    if (sys_.blocks.empty() || !BlockDiagonalSolver::is_block_diagonal(K, sys_.blocks))
      throw std::invalid_argument(
          "leap-frog needs a damping matrix confined to element blocks (mass-proportional); use Newmark instead");
    block_solver_ = std::make_shared<BlockDiagonalSolver>(K, sys_.blocks);
    method_ = "block-diagonal";
    return;
  }
  solver_ = std::make_shared<LinearSolver>(K, cfg_, sys_.blocks.empty() ? nullptr : &sys_.blocks,
                                           "Newmark effective matrix");
  method_ = solver_->method();
}

State NewmarkIntegrator::initial_state(const VectorXd& X0, const VectorXd& Z0, double t0) const {
  State s;
  s.t = t0;
  s.X = X0;
  s.Z = Z0;
  s.L = initial_acceleration(sys_, X0, Z0, t0, cfg_);
  return s;
}

State NewmarkIntegrator::step(const State& s) const {
  const double dt = params_.dt;
  const double b = params_.beta, g = params_.gamma;
  State n;
  n.t = s.t + dt;
  n.step = s.step + 1;
  const VectorXd Xp = s.X + dt * s.Z + (0.5 - b) * dt * dt * s.L;
  const VectorXd Zp = s.Z + (1.0 - g) * dt * s.L;
  const VectorXd rhs = sys_.source(n.t) - (*sys_.D) * Zp - (*sys_.A) * Xp;
  n.L = block_solver_ ? block_solver_->solve(rhs) : solver_->solve(rhs);
  n.X = Xp + b * dt * dt * n.L;
  n.Z = Zp + g * dt * n.L;
  return n;
}

State integrate(const NewmarkIntegrator& integrator, State s, double T, const std::vector<Observer>& observers) {
  const double dt = integrator.params().dt;
  if (T < s.t) throw std::invalid_argument("integrate: final time precedes the initial time");
  const double steps_real = (T - s.t) / dt;
  const int steps = static_cast<int>(std::llround(steps_real));
  if (std::abs(steps_real - steps) > 1e-6)
    throw std::invalid_argument("integrate: final time is not a whole number of steps");
  for (const auto& obs : observers) obs(s);
  const double t0 = s.t;
  for (int k = 0; k < steps; ++k) {
    s = integrator.step(s);
    s.t = t0 + (k + 1) * dt;  // avoid drift from repeated addition
    if (!s.X.allFinite() || !s.Z.allFinite() || !s.L.allFinite())
      throw std::runtime_error("non-finite state at step " + std::to_string(s.step) + " (t = " + std::to_string(s.t) +
                               ")");
    for (const auto& obs : observers) obs(s);
  }
  return s;
}

}  // namespace polydg
