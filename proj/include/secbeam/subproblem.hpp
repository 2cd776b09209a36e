#pragma once

#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/conic.hpp"
#include "secbeam/rates.hpp"

namespace secbeam {

/// Convex SCA subproblem around the linearization points y_tilde, p_tilde.
///
/// Per covariance W_k: N_t^2 real parameters (diagonal, then real and
/// imaginary parts of the strict upper triangle) and one PSD block holding
/// the real embedding of W_k. Per pair i: x, y, p, q, the exp-cone marks
/// s, r, and norm marks t_{i,k} >= |W_k conj(h_i)|, u_{i,k} >= |W_k conj(g_i)|.
/// Objective (nats): maximize sum_i x_i - y_i - p_i + q_i.
///
/// When `interior` is given it receives a strictly feasible point built from
/// W_k = alpha I with alpha small enough that every robust margin stays
/// positive; passing it to the solver skips phase I.
ConicProgram build_sca_subproblem(const ChannelSet& cs, double power_budget,
                                  const std::vector<double>& y_tilde,
                                  const std::vector<double>& p_tilde,
                                  RVector* interior = nullptr);

/// Number of real decision variables of the subproblem: K N_t^2 + 6K + 2K^2.
int sca_variable_count(int n_tx, int k_pairs);

struct SubproblemSolution {
  CovarianceSet W;
  std::vector<double> x, y, p, q;
  /// Norm marks, row-major [i * K + k].
  std::vector<double> t, u;
  /// Largest eigenvalue shift applied when flooring the extracted W_k.
  double floor_shift = 0.0;
};

/// Reads the covariances and scalar marks back from an optimal solve.
/// Throws kExtractionFailure if the result is not optimal or a cone residual
/// exceeds 1e-6.
SubproblemSolution extract_covariances(const ConicProgram& prog, const SolverResult& result,
                                       const ChannelSet& cs);

/// Slack of each linearized family at a solution, scaled by max(1, |lhs|).
/// Index order: [family][i] with family 0..3 for the signal, eavesdropper
/// interference, user interference and eavesdropper signal constraints.
struct Tightness {
  std::vector<std::vector<double>> slack;
  /// max_{i,k} (t_{i,k} - |W_k conj(h_i)|) and likewise for u.
  double norm_gap = 0.0;
  double max_slack() const;
};

Tightness subproblem_tightness(const ChannelSet& cs, const SubproblemSolution& sol,
                               const std::vector<double>& y_tilde,
                               const std::vector<double>& p_tilde);

}  // namespace secbeam
