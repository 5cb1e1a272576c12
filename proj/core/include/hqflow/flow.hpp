#pragma once

// Time integration of u_t = log(sigma_k/sigma_l)(D^2 u) - log f(x,u) with
// u_nu = phi(x,u), admissibility guarding and runtime monitors.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hqflow/discretize.hpp"
#include "hqflow/problem.hpp"

namespace hqflow {

enum class FlowMode { steady, translating };
enum class Integrator {
  explicit_euler,  ///< u += dt * rhs, dt from select_dt
  implicit_euler,  ///< linearly implicit Euler (one Newton step per time step)
};
enum class RunStatus { converged, diverged, t_max };

[[nodiscard]] const char* to_string(RunStatus s);
[[nodiscard]] const char* to_string(FlowMode m);

struct FlowOptions {
  FlowMode mode = FlowMode::steady;
  Integrator integrator = Integrator::implicit_euler;
  double cfl = 0.4;
  double dt_init = 1e-3;   ///< implicit: first step
  double dt_max = 0.05;    ///< implicit: cap after growth
  double dt_growth = 1.2;  ///< implicit: factor per accepted step
  double tol_steady = 1e-8;
  double tol_trans = 1e-8;
  int window = 50;  ///< records compared for the mean u_t drift
  double t_max = 200.0;
  long max_steps = 1'000'000;
  int checkpoint_every = 100;
  double cone_slack = 1e-12;  ///< relative: sigma_i > cone_slack * (1 + |sigma_1|)
  int max_halvings = 20;
};

/// Per-node operator data at one state.
struct OperatorEval {
  std::vector<double> ut;                  ///< u_t at interior nodes, 0 on the boundary
  std::vector<std::array<double, 3>> F;    ///< (F11, F12, F22) at interior nodes
  std::vector<double> quotient;            ///< sigma_k/sigma_l at interior nodes
  double g_max = 0.0;                      ///< largest eigenvalue of F
  double sup_hess = 0.0;                   ///< max spectral norm of D^2 u (interior)
  double min_quotient = 0.0;
};

/// Evaluates the operator at every interior node. Throws AdmissibilityError
/// naming the node when the Hessian leaves Gamma_k.
[[nodiscard]] OperatorEval evaluate_operator(const Discretization& disc, const ProblemSpec& spec,
                                             const GridFn& u, double cone_slack = 0.0);

/// u_t at interior nodes (boundary entries 0).
[[nodiscard]] GridFn rhs(const Discretization& disc, const ProblemSpec& spec, const GridFn& u,
                         double t = 0.0);

struct FlowState {
  double t = 0.0;
  /// Stored values; the solution is u + offset. Translating runs whose data
  /// do not depend on u move whole integers into offset so the stored values
  /// stay O(1) and rounding near the pole does not grow with t.
  GridFn u;
  double offset = 0.0;
  double dt = 0.0;
  long step_count = 0;
  bool diverged = false;
};

/// Explicit stable step cfl * h_min^2 / (2 n g_max).
[[nodiscard]] double select_dt(const Discretization& disc, const ProblemSpec& spec,
                               const FlowState& state, double cfl = 0.4);

/// Stateful stepper; keeps the sparse factorization pattern between steps.
class FlowStepper {
 public:
  FlowStepper(const Discretization& disc, const ProblemSpec& spec, FlowOptions opt);
  ~FlowStepper();
  FlowStepper(const FlowStepper&) = delete;
  FlowStepper& operator=(const FlowStepper&) = delete;

  /// Advances one step, halving dt (up to max_halvings) when the new state
  /// leaves Gamma_k. Marks the result diverged when every retry fails.
  [[nodiscard]] FlowState step(const FlowState& state);

  /// Operator data of the last state passed to or returned by step().
  [[nodiscard]] const OperatorEval& current_eval(const FlowState& state);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// u + offset as a plain field.
[[nodiscard]] GridFn solution(const FlowState& state);

/// One step with a fresh stepper.
[[nodiscard]] FlowState step(const Discretization& disc, const ProblemSpec& spec,
                             const FlowState& state, const FlowOptions& opt = {});

struct MonitorRecord {
  double t = 0.0;
  double max_ut = 0.0;
  double min_ut = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double sup_grad = 0.0;
  double sup_hess = 0.0;
  double min_quotient = 0.0;
  double osc = 0.0;  ///< oscillation of u_t over interior nodes
  double mean_ut = 0.0;
  bool admissible = true;
};

[[nodiscard]] MonitorRecord monitors(const Discretization& disc, const FlowState& state,
                                     const OperatorEval& ev);

/// Constants fixed at t = 0.
struct InitialBounds {
  double max_ut0 = 0.0;
  double min_ut0 = 0.0;
  double max_abs_ut0 = 0.0;
  std::optional<double> M0;  ///< C^0 bound; needs phi_u <= c_phi < 0 and f_u/f >= c_f > 0
  std::optional<double> c2;  ///< quotient floor min f(x, -M0) exp(-max|u_t(0)|)
};

[[nodiscard]] InitialBounds initial_bounds(const Discretization& disc, const ProblemSpec& spec,
                                           const StructuralReport& rep, const GridFn& u0,
                                           const OperatorEval& ev0);

struct Checkpoint {
  double t = 0.0;
  long step = 0;
  double osc_ut = 0.0;
  /// osc(u - u_ref - s_ref t) when a reference translating solution is given.
  std::optional<double> osc_w;
};

/// Known translating solution (u_ref + s_ref t) to compare against.
struct TranslatingReference {
  GridFn u_ref;
  double s_ref = 0.0;
};

struct RunResult {
  FlowState state;
  std::vector<MonitorRecord> records;
  std::vector<Checkpoint> checkpoints;
  RunStatus status = RunStatus::t_max;
  std::string message;
  StructuralReport structure;
  InitialBounds bounds;
  double decay_rate = 0.0;   ///< fitted on the tail half of max|u_t|
  double speed = 0.0;        ///< mean u_t at the final record
  double c37 = 0.0;          ///< max over records of |u - speed t| (sup norm)
  std::optional<double> a_offset;  ///< mean(u - u_ref - s_ref t) at the end
};

/// Validates the problem, projects u0, and steps until the stop rule fires.
[[nodiscard]] RunResult run(const Discretization& disc, const ProblemSpec& spec,
                            const FlowOptions& opt,
                            const TranslatingReference* reference = nullptr);

/// Same, starting from a given closed state instead of u0.
[[nodiscard]] RunResult run_from(const Discretization& disc, const ProblemSpec& spec,
                                 const GridFn& u_start, const FlowOptions& opt,
                                 const TranslatingReference* reference = nullptr);

/// -slope of a log-linear least-squares fit of max|u_t| over the tail half.
[[nodiscard]] double fit_decay_rate(const std::vector<MonitorRecord>& records);

/// Runtime checks of the monitored bounds.
struct MonitorChecks {
  double tol_mp = 0.0;
  bool ut_max_principle = true;  ///< min{min u_t(0),0} - tol <= u_t <= max{max u_t(0),0} + tol
  bool ut_decay = true;          ///< max|u_t| e^{0.8 c_f t} <= max|u_t(0)| + tol (growth case)
  bool c0_bound = true;          ///< |u| <= M0 + tol (when M0 exists)
  bool quotient_floor = true;    ///< min quotient >= c2 - tol (when c2 exists)
  bool derivatives_bounded = true;
  bool checkpoints_nonincreasing = true;
  double worst_ut_excess = 0.0;
  double worst_c0_excess = 0.0;
  double worst_floor_excess = 0.0;
  double worst_checkpoint_increase = 0.0;
  [[nodiscard]] bool all() const {
    return ut_max_principle && ut_decay && c0_bound && quotient_floor && derivatives_bounded &&
           checkpoints_nonincreasing;
  }
};

/// checkpoint_tol defaults to tol_mp.
[[nodiscard]] MonitorChecks check_monitors(const RunResult& res, const FlowOptions& opt,
                                           std::optional<double> checkpoint_tol = std::nullopt);

}  // namespace hqflow
