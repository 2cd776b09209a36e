#pragma once

#include <string>
#include <vector>

#include "secbeam/channel.hpp"
#include "secbeam/rates.hpp"

namespace secbeam {

/// Zero-forcing directions for the pairs in `selected`. Entry m belongs to
/// pair selected[m]: v[m] is row m of pinv([conj(h) ... conj(g) ...]), so
/// v[m]^T conj(h_j) = delta and v[m]^T conj(g_j) = 0 over the selection.
struct ZfDirections {
  std::vector<CVector> v;
  std::vector<double> v_norm;
  std::vector<int> selected;
};

struct PowerAllocation {
  std::vector<double> power;  // per selected pair
  double lambda = 0.0;        // 1 / water level; 0 when nobody is eligible
  std::vector<bool> active;
  bool no_eligible = false;
};

/// Throws kInvalidDimension if N_t < 2 |subset| and kRankDeficient if the
/// smallest singular value of the stacked matrix is below 1e-10 of the largest.
ZfDirections zf_directions(const ChannelSet& cs, const std::vector<int>& subset);

/// Water-filling level cost c_m = |v|^2 sigma^2 / (1 - 2 eps |v|); infinite
/// when the pair is ineligible (1 - 2 eps |v| <= 0).
double waterfill_cost(const ZfDirections& dirs, const ChannelSet& cs, int m);

/// Closed-form KKT allocation P_m = (1/lambda - c_m)^+ with sum P_m = P.
PowerAllocation waterfill(const ZfDirections& dirs, const ChannelSet& cs, double power_budget);

/// Empty when `alloc` satisfies the water-filling KKT conditions within tol:
/// active pairs sit at P_m = 1/lambda - c_m, inactive ones have c_m >= 1/lambda,
/// ineligible ones get zero, and the budget is spent whenever anyone is active.
/// Otherwise names the first violated condition.
std::string waterfill_kkt_violation(const ZfDirections& dirs, const ChannelSet& cs,
                                    double power_budget, const PowerAllocation& alloc,
                                    double tol = 1e-8);

/// Same problem through the conic solver; reference for tests.
PowerAllocation waterfill_convex_oracle(const ZfDirections& dirs, const ChannelSet& cs,
                                        double power_budget);

/// sum_m log2(1 + (1 - 2 eps |v_m|) P_m / (|v_m|^2 sigma^2)) over eligible pairs.
double zf_ssr(const ZfDirections& dirs, const PowerAllocation& alloc, const ChannelSet& cs);

/// w_i = conj(v_m) / |v_m| * sqrt(P_m) for pair i = selected[m]; unselected
/// pairs get the zero vector.
BeamformerSet zf_beamformers(const ZfDirections& dirs, const PowerAllocation& alloc,
                             const ChannelSet& cs, double power_budget);

enum class SelectionMode { kExhaustive, kHeuristic };

struct Selection {
  std::vector<int> subset;  // ascending
  double value = 0.0;
};

/// Chooses floor(N_t / 2) pairs (capped at K). Exhaustive search takes the
/// best zf_ssr, lowest subset on ties, skipping rank-deficient subsets. The
/// heuristic ranks pairs by |h|^2 / |g|^2 on the estimates and greedily
/// skips any pair that would make the stack rank deficient.
Selection select_users(const ChannelSet& cs, double power_budget, SelectionMode mode);

struct ZfDesign {
  ZfDirections dirs;
  PowerAllocation alloc;
  BeamformerSet beamformers;
  double value = 0.0;  // zf_ssr
};

/// All pairs when N_t >= 2K, otherwise the selected subset.
ZfDesign zf_design(const ChannelSet& cs, double power_budget,
                   SelectionMode mode = SelectionMode::kExhaustive);

}  // namespace secbeam
