#include "secbeam/zf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "secbeam/conic.hpp"

namespace secbeam {
namespace {

CMatrix stacked(const ChannelSet& cs, const std::vector<int>& subset) {
  const int m = static_cast<int>(subset.size());
  CMatrix H(cs.n_tx, 2 * m);
  for (int j = 0; j < m; ++j) {
    H.col(j) = cs.h_est.at(subset[j]).conjugate();
    H.col(m + j) = cs.g_est.at(subset[j]).conjugate();
  }
  return H;
}

bool full_column_rank(const CMatrix& H) {
  Eigen::JacobiSVD<CMatrix> svd(H);
  const RVector s = svd.singularValues();
  return s.size() > 0 && s(s.size() - 1) >= 1e-10 * s(0);
}

double eligible_weight(double v_norm, double eps) { return 1.0 - 2.0 * eps * v_norm; }

}  // namespace

ZfDirections zf_directions(const ChannelSet& cs, const std::vector<int>& subset) {
  const int m = static_cast<int>(subset.size());
  if (m < 1 || cs.n_tx < 2 * m) {
    throw Error(ErrorCode::kInvalidDimension, "zero forcing needs N_t >= 2 |subset| >= 2");
  }
  for (int i : subset) {
    if (i < 0 || i >= cs.k_pairs) throw Error(ErrorCode::kInvalidArgument, "pair index out of range");
  }
  const CMatrix H = stacked(cs, subset);
  Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector s = svd.singularValues();
  if (s(s.size() - 1) < 1e-10 * s(0)) {
    throw Error(ErrorCode::kRankDeficient, "stacked channel matrix is rank deficient");
  }
  const CMatrix pinv =
      svd.matrixV() * s.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  ZfDirections d;
  d.selected = subset;
  for (int j = 0; j < m; ++j) {
    d.v.push_back(pinv.row(j).transpose());
    d.v_norm.push_back(d.v.back().norm());
  }
  return d;
}

double waterfill_cost(const ZfDirections& dirs, const ChannelSet& cs, int m) {
  const double wgt = eligible_weight(dirs.v_norm[m], cs.eps);
  if (wgt <= 0.0) return std::numeric_limits<double>::infinity();
  const double vn = dirs.v_norm[m];
  return vn * vn * cs.sigma2[dirs.selected[m]] / wgt;
}

PowerAllocation waterfill(const ZfDirections& dirs, const ChannelSet& cs, double power_budget) {
  if (!(power_budget > 0.0)) throw Error(ErrorCode::kInvalidArgument, "P must be positive");
  const int m = static_cast<int>(dirs.v.size());
  std::vector<double> c(m);
  double cmin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    c[j] = waterfill_cost(dirs, cs, j);
    cmin = std::min(cmin, c[j]);
  }
  PowerAllocation a;
  a.power.assign(m, 0.0);
  a.active.assign(m, false);
  if (!std::isfinite(cmin)) {
    a.no_eligible = true;
    return a;
  }
  auto filled = [&](double level) {
    double total = 0.0;
    for (double cj : c) total += std::max(0.0, level - cj);
    return total;
  };
  // Water level L = 1/lambda: filled(L) - P is increasing in L.
  double lo = cmin;
  double hi = cmin + power_budget;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (filled(mid) < power_budget) lo = mid; else hi = mid;
  }
  // The bisection fixes the active set; the level then follows exactly.
  double level = 0.5 * (lo + hi);
  double csum = 0.0;
  int n_active = 0;
  for (int j = 0; j < m; ++j) {
    if (c[j] < level) {
      csum += c[j];
      ++n_active;
    }
  }
  const double exact = (power_budget + csum) / n_active;
  bool consistent = true;
  for (int j = 0; j < m; ++j) consistent = consistent && ((c[j] < exact) == (c[j] < level));
  if (consistent) level = exact;
  for (int j = 0; j < m; ++j) {
    a.power[j] = std::max(0.0, level - c[j]);
    a.active[j] = a.power[j] > 0.0;
  }
  a.lambda = 1.0 / level;
  return a;
}

std::string waterfill_kkt_violation(const ZfDirections& dirs, const ChannelSet& cs,
                                    double power_budget, const PowerAllocation& alloc,
                                    double tol) {
  const int m = static_cast<int>(dirs.v.size());
  if (static_cast<int>(alloc.power.size()) != m) return "allocation size mismatch";
  double total = 0.0;
  bool any_active = false;
  const double level = alloc.lambda > 0.0 ? 1.0 / alloc.lambda : 0.0;
  for (int j = 0; j < m; ++j) {
    const double pj = alloc.power[j];
    const double c = waterfill_cost(dirs, cs, j);
    const std::string who = " (pair " + std::to_string(dirs.selected[j]) + ")";
    if (pj < 0.0) return "negative power" + who;
    total += pj;
    if (!std::isfinite(c)) {
      if (pj != 0.0) return "ineligible pair received power" + who;
      continue;
    }
    if (pj > 0.0) {
      any_active = true;
      if (std::abs(level - c - pj) > tol * std::max(1.0, level)) {
        return "active pair off the water level" + who;
      }
    } else if (level > c + tol * std::max(1.0, level)) {
      return "inactive pair below the water level" + who;
    }
  }
  if (total > power_budget * (1.0 + tol)) return "budget exceeded";
  if (any_active && std::abs(total - power_budget) > tol * std::max(1.0, power_budget)) {
    return "budget not spent";
  }
  return {};
}

PowerAllocation waterfill_convex_oracle(const ZfDirections& dirs, const ChannelSet& cs,
                                        double power_budget) {
  const int m = static_cast<int>(dirs.v.size());
  ConicProgram prog;
  std::vector<int> pv(m, -1);
  AffineExpr budget(power_budget);
  for (int j = 0; j < m; ++j) {
    const double c = waterfill_cost(dirs, cs, j);
    if (!std::isfinite(c)) continue;
    pv[j] = prog.add_variable("P" + std::to_string(j));
    const int z = prog.add_variable("z" + std::to_string(j));
    prog.set_objective(z, 1.0);
    AffineExpr arg(1.0);
    arg.add(pv[j], 1.0 / c);
    prog.add(ExponentialCone{AffineExpr::variable(z), AffineExpr(1.0), arg},
             "log" + std::to_string(j));
    prog.add(NonnegativeCone{AffineExpr::variable(pv[j])}, "P>=0");
    budget.add(pv[j], -1.0);
  }
  PowerAllocation a;
  a.power.assign(m, 0.0);
  a.active.assign(m, false);
  if (prog.n_vars() == 0) {
    a.no_eligible = true;
    return a;
  }
  prog.add(NonnegativeCone{budget}, "budget");
  SolverOptions opts;
  opts.tol = 1e-10;
  const SolverResult r = solve(prog, opts);
  if (r.status != SolveStatus::kOptimal) {
    throw Error(ErrorCode::kNumericalFailure,
                std::string("water-filling oracle: ") + to_string(r.status));
  }
  double level = 0.0;
  for (int j = 0; j < m; ++j) {
    if (pv[j] < 0) continue;
    a.power[j] = std::max(0.0, r.primal(pv[j]));
    a.active[j] = a.power[j] > 1e-6 * power_budget;
    if (a.active[j]) level = std::max(level, a.power[j] + waterfill_cost(dirs, cs, j));
  }
  a.lambda = level > 0.0 ? 1.0 / level : 0.0;
  return a;
}

double zf_ssr(const ZfDirections& dirs, const PowerAllocation& alloc, const ChannelSet& cs) {
  double total = 0.0;
  for (std::size_t j = 0; j < dirs.v.size(); ++j) {
    const double wgt = eligible_weight(dirs.v_norm[j], cs.eps);
    if (wgt <= 0.0 || alloc.power[j] <= 0.0) continue;
    const double vn = dirs.v_norm[j];
    total += std::log2(1.0 + wgt * alloc.power[j] / (vn * vn * cs.sigma2[dirs.selected[j]]));
  }
  return total;
}

BeamformerSet zf_beamformers(const ZfDirections& dirs, const PowerAllocation& alloc,
                             const ChannelSet& cs, double power_budget) {
  BeamformerSet bf;
  bf.power_budget = power_budget;
  bf.w.assign(cs.k_pairs, CVector::Zero(cs.n_tx));
  for (std::size_t j = 0; j < dirs.v.size(); ++j) {
    bf.w[dirs.selected[j]] =
        dirs.v[j].conjugate() / dirs.v_norm[j] * std::sqrt(alloc.power[j]);
  }
  return bf;
}

Selection select_users(const ChannelSet& cs, double power_budget, SelectionMode mode) {
  const int K = cs.k_pairs;
  const int khat = std::min(K, cs.n_tx / 2);
  if (khat < 1) throw Error(ErrorCode::kInvalidDimension, "need N_t >= 2 for zero forcing");

  auto evaluate = [&](const std::vector<int>& subset) {
    const ZfDirections d = zf_directions(cs, subset);
    return zf_ssr(d, waterfill(d, cs, power_budget), cs);
  };

  Selection best;
  if (mode == SelectionMode::kExhaustive) {
    best.value = -std::numeric_limits<double>::infinity();
    // Lexicographic enumeration of khat-subsets; strict improvement keeps the
    // lowest subset on ties.
    std::vector<int> comb(khat);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      try {
        const double v = evaluate(comb);
        if (v > best.value) {
          best.value = v;
          best.subset = comb;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kRankDeficient) throw;
      }
      int pos = khat - 1;
      while (pos >= 0 && comb[pos] == K - khat + pos) --pos;
      if (pos < 0) break;
      ++comb[pos];
      for (int j = pos + 1; j < khat; ++j) comb[j] = comb[j - 1] + 1;
    }
    if (best.subset.empty()) {
      throw Error(ErrorCode::kRankDeficient, "every candidate subset is rank deficient");
    }
    return best;
  }

  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> ratio(K);
  for (int i = 0; i < K; ++i) ratio[i] = cs.h_est[i].squaredNorm() / cs.g_est[i].squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return ratio[a] > ratio[b]; });
  for (int i : order) {
    if (static_cast<int>(best.subset.size()) == khat) break;
    std::vector<int> trial = best.subset;
    trial.push_back(i);
    if (full_column_rank(stacked(cs, trial))) best.subset = std::move(trial);
  }
  if (static_cast<int>(best.subset.size()) < khat) {
    throw Error(ErrorCode::kRankDeficient, "not enough pairs with independent channels");
  }
  std::sort(best.subset.begin(), best.subset.end());
  best.value = evaluate(best.subset);
  return best;
}

ZfDesign zf_design(const ChannelSet& cs, double power_budget, SelectionMode mode) {
  std::vector<int> subset;
  if (cs.n_tx >= 2 * cs.k_pairs) {
    subset.resize(cs.k_pairs);
    std::iota(subset.begin(), subset.end(), 0);
  } else {
    subset = select_users(cs, power_budget, mode).subset;
  }
  ZfDesign d;
  d.dirs = zf_directions(cs, subset);
  d.alloc = waterfill(d.dirs, cs, power_budget);
  d.beamformers = zf_beamformers(d.dirs, d.alloc, cs, power_budget);
  d.value = zf_ssr(d.dirs, d.alloc, cs);
  return d;
}

}  // namespace secbeam
