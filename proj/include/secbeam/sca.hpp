#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/conic.hpp"
#include "secbeam/rates.hpp"
#include "secbeam/rng.hpp"
#include "secbeam/subproblem.hpp"

namespace secbeam {

struct ScaConfig {
  int max_iter = 50;
  /// Stop once |obj[n] - obj[n-1]| < obj_tol (bits).
  double obj_tol = 1e-4;
  int init_attempts = 20;
  int randomization_samples = 200;
  /// Additionally require x, y, p, q > 0 at the first solve.
  bool strict_sign_check = false;
  SolverOptions solver = default_solver();

  /// Throws kInvalidConfig unless every count and tolerance is positive.
  void validate() const;

  static SolverOptions default_solver() {
    SolverOptions o;
    o.tol = 1e-9;
    return o;
  }
};

/// Everything one subproblem solve produced.
struct ScaIterate {
  std::vector<double> y_tilde, p_tilde;  // linearization points used
  std::vector<double> yhat, phat;
  double objective_bits = 0.0;
  double max_cone_residual = 0.0;
  double max_slack = 0.0;  // linearized families, relative
  double norm_gap = 0.0;
  int newton_steps = 0;
};

struct ScaState {
  int iter = 0;
  std::vector<double> y_tilde, p_tilde;  // points for the next solve
  CovarianceSet W_hat;
  std::vector<double> xhat, yhat, phat, qhat;
  std::vector<double> objective_trace;
  std::vector<ScaIterate> history;
};

/// Raised when a subproblem solve fails mid-run; carries the state before it.
class ScaFailure : public Error {
 public:
  ScaFailure(ErrorCode code, const std::string& what, ScaState last_good)
      : Error(code, what), last_good_(std::move(last_good)) {}
  const ScaState& last_good() const { return last_good_; }

 private:
  ScaState last_good_;
};

/// ln of the interference-plus-noise upper bounds at W_hat:
/// y_i = ln(sum_{k!=i} ub(h_i, W_k) + sigma_i^2),
/// p_i = ln(sum_k ub(g_i, W_k) + varsigma_i^2).
std::pair<std::vector<double>, std::vector<double>> update_tilde(const CovarianceSet& W_hat,
                                                                 const ChannelSet& cs);

/// Random feasible start, then the first subproblem solve. Redraws on solver
/// failure (or sign-check rejection) up to cfg.init_attempts times before
/// throwing kInitializationFailure.
ScaState init_state(const ChannelSet& cs, double power_budget, const ScaConfig& cfg,
                    RngStream& rng);

/// Solves the subproblem at the state's linearization points and advances.
ScaState sca_step(const ScaState& state, const ChannelSet& cs, double power_budget,
                  const ScaConfig& cfg);

bool is_rank_one(const CovarianceSet& W, double tol = 1e-6);

/// Rank-one recovery. Exact decomposition when every W_i is rank one;
/// otherwise the best of L Gaussian candidates W_i^{1/2} z_i plus the
/// dominant-eigenvector candidate, each scaled to the full budget, ranked by
/// ssr_lower_bound.
BeamformerSet randomize_rank_one(const CovarianceSet& W, const ChannelSet& cs,
                                 double power_budget, int samples, RngStream& rng);

struct ScaResult {
  CovarianceSet relaxed;
  /// ssr_lower_bound of the relaxed covariances (bits).
  double relaxed_value = 0.0;
  BeamformerSet beamformers;
  /// ssr_lower_bound of the recovered beamformers (bits).
  double value = 0.0;
  bool degenerate = false;
  bool rank_one = false;
  bool converged = false;
  int iterations = 0;
  std::vector<double> trace;
  ScaState state;
};

ScaResult run_sca(const ChannelSet& cs, double power_budget, const ScaConfig& cfg,
                  RngStream& rng);

/// Per-iteration CSV rows: iter,objective_bits,max_constraint_residual.
void write_sca_trace(std::ostream& out, const ScaState& state);

}  // namespace secbeam
