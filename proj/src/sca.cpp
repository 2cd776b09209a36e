#include "secbeam/sca.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace secbeam {

void ScaConfig::validate() const {
  if (max_iter < 1 || init_attempts < 1 || randomization_samples < 1 || !(obj_tol > 0.0) ||
      !(solver.tol > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "SCA counts and tolerances must be positive");
  }
}

std::pair<std::vector<double>, std::vector<double>> update_tilde(const CovarianceSet& W_hat,
                                                                 const ChannelSet& cs) {
  const int K = cs.k_pairs;
  if (static_cast<int>(W_hat.W.size()) != K) {
    throw Error(ErrorCode::kInvalidDimension, "covariance count must equal k_pairs");
  }
  std::vector<double> yt(K), pt(K);
  for (int i = 0; i < K; ++i) {
    double interf = cs.sigma2[i];
    double leak = cs.varsigma2[i];
    for (int k = 0; k < K; ++k) {
      if (k != i) interf += quad_bounds(cs.h_est[i], W_hat.W[k], cs.eps).ub;
      leak += quad_bounds(cs.g_est[i], W_hat.W[k], cs.eps).ub;
    }
    yt[i] = std::log(interf);
    pt[i] = std::log(leak);
  }
  return {yt, pt};
}

ScaState sca_step(const ScaState& state, const ChannelSet& cs, double power_budget,
                  const ScaConfig& cfg) {
  RVector start;
  const ConicProgram prog =
      build_sca_subproblem(cs, power_budget, state.y_tilde, state.p_tilde, &start);
  SolverOptions opts = cfg.solver;
  if (!opts.initial_point) opts.initial_point = std::move(start);
  const SolverResult res = solve(prog, opts);
  if (res.status != SolveStatus::kOptimal) {
    throw ScaFailure(ErrorCode::kNumericalFailure,
                     std::string("subproblem ") + to_string(res.status) + " at iteration " +
                         std::to_string(state.iter + 1) +
                         (res.message.empty() ? "" : ": " + res.message),
                     state);
  }
  SubproblemSolution sol;
  try {
    sol = extract_covariances(prog, res, cs);
  } catch (const Error& e) {
    throw ScaFailure(ErrorCode::kNumericalFailure, e.what(), state);
  }

  ScaState next = state;
  next.iter = state.iter + 1;
  next.W_hat = sol.W;
  next.xhat = sol.x;
  next.yhat = sol.y;
  next.phat = sol.p;
  next.qhat = sol.q;

  double obj = 0.0;
  for (int i = 0; i < cs.k_pairs; ++i) obj += sol.x[i] - sol.y[i] - sol.p[i] + sol.q[i];
  const Tightness tight = subproblem_tightness(cs, sol, state.y_tilde, state.p_tilde);

  ScaIterate it;
  it.y_tilde = state.y_tilde;
  it.p_tilde = state.p_tilde;
  it.yhat = sol.y;
  it.phat = sol.p;
  it.objective_bits = obj * kLog2E;
  it.max_cone_residual = res.max_cone_residual;
  it.max_slack = tight.max_slack();
  it.norm_gap = tight.norm_gap;
  it.newton_steps = res.iterations;
  next.objective_trace.push_back(it.objective_bits);
  next.history.push_back(std::move(it));

  auto [yt, pt] = update_tilde(sol.W, cs);
  next.y_tilde = std::move(yt);
  next.p_tilde = std::move(pt);
  return next;
}

ScaState init_state(const ChannelSet& cs, double power_budget, const ScaConfig& cfg,
                    RngStream& rng) {
  cs.validate();
  cfg.validate();
  std::string last_reason = "no attempt made";
  for (int attempt = 0; attempt < cfg.init_attempts; ++attempt) {
    BeamformerSet w0;
    w0.power_budget = power_budget;
    for (int k = 0; k < cs.k_pairs; ++k) w0.w.push_back(rng.complex_normal_vector(cs.n_tx));
    const double scale = std::sqrt(power_budget / w0.total_power());
    for (auto& v : w0.w) v *= scale;

    ScaState s0;
    s0.W_hat = CovarianceSet::from_beamformers(w0);
    auto [yt, pt] = update_tilde(s0.W_hat, cs);
    s0.y_tilde = std::move(yt);
    s0.p_tilde = std::move(pt);
    try {
      ScaState s1 = sca_step(s0, cs, power_budget, cfg);
      if (cfg.strict_sign_check) {
        bool positive = true;
        for (int i = 0; i < cs.k_pairs; ++i) {
          positive = positive && s1.xhat[i] > 0.0 && s1.yhat[i] > 0.0 && s1.phat[i] > 0.0 &&
                     s1.qhat[i] > 0.0;
        }
        if (!positive) {
          last_reason = "sign check rejected the first solve";
          continue;
        }
      }
      return s1;
    } catch (const ScaFailure& e) {
      last_reason = e.what();
    }
  }
  throw Error(ErrorCode::kInitializationFailure,
              std::to_string(cfg.init_attempts) + " attempts rejected; last: " + last_reason);
}

bool is_rank_one(const CovarianceSet& W, double tol) {
  for (const auto& m : W.W) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
    const RVector ev = es.eigenvalues();
    const double l1 = ev(ev.size() - 1);
    if (l1 <= 0.0) continue;
    if (ev.size() > 1 && ev(ev.size() - 2) / l1 > tol) return false;
  }
  return true;
}

BeamformerSet randomize_rank_one(const CovarianceSet& W, const ChannelSet& cs,
                                 double power_budget, int samples, RngStream& rng) {
  const int K = static_cast<int>(W.W.size());
  const int n = cs.n_tx;
  std::vector<CMatrix> roots(K);
  BeamformerSet dominant;
  dominant.power_budget = power_budget;
  for (int k = 0; k < K; ++k) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(W.W[k]);
    const RVector ev = es.eigenvalues().cwiseMax(0.0);
    dominant.w.push_back(std::sqrt(ev(n - 1)) * es.eigenvectors().col(n - 1));
    roots[k] = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  }
  if (is_rank_one(W)) return dominant;

  auto fill_budget = [&](BeamformerSet& bf) {
    const double tp = bf.total_power();
    if (tp > 0.0) {
      const double s = std::sqrt(power_budget / tp);
      for (auto& v : bf.w) v *= s;
    }
  };

  // Draw every candidate first so the pool does not depend on evaluation.
  std::vector<BeamformerSet> pool;
  pool.reserve(static_cast<std::size_t>(samples) + 1);
  pool.push_back(dominant);
  for (int l = 0; l < samples; ++l) {
    BeamformerSet bf;
    bf.power_budget = power_budget;
    for (int k = 0; k < K; ++k) bf.w.push_back(roots[k] * rng.complex_normal_vector(n));
    pool.push_back(std::move(bf));
  }
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t c = 0; c < pool.size(); ++c) {
    fill_budget(pool[c]);
    const double v = ssr_lower_bound(cs, pool[c]).bits;
    if (v > best) {
      best = v;
      best_idx = c;
    }
  }
  return pool[best_idx];
}

ScaResult run_sca(const ChannelSet& cs, double power_budget, const ScaConfig& cfg,
                  RngStream& rng) {
  RngStream init_rng = rng.derive(1);
  RngStream rand_rng = rng.derive(2);
  ScaResult out;
  ScaState state = init_state(cs, power_budget, cfg, init_rng);
  while (true) {
    const auto& tr = state.objective_trace;
    if (tr.size() >= 2 && std::abs(tr.back() - tr[tr.size() - 2]) < cfg.obj_tol) {
      out.converged = true;
      break;
    }
    if (state.iter >= cfg.max_iter) break;
    state = sca_step(state, cs, power_budget, cfg);
  }
  out.relaxed = state.W_hat;
  out.relaxed_value = ssr_lower_bound(cs, out.relaxed).bits;
  out.rank_one = is_rank_one(out.relaxed);
  out.beamformers =
      randomize_rank_one(out.relaxed, cs, power_budget, cfg.randomization_samples, rand_rng);
  const LowerBoundSsr lb = ssr_lower_bound(cs, out.beamformers);
  out.value = lb.bits;
  out.degenerate = lb.degenerate;
  out.iterations = state.iter;
  out.trace = state.objective_trace;
  out.state = std::move(state);
  return out;
}

void write_sca_trace(std::ostream& out, const ScaState& state) {
  const auto flags = out.flags();
  const auto prec = out.precision(9);
  out << "iter,objective_bits,max_constraint_residual\n";
  for (std::size_t n = 0; n < state.history.size(); ++n) {
    const auto& it = state.history[n];
    out << (n + 1) << "," << it.objective_bits << ","
        << std::max(it.max_cone_residual, it.max_slack) << "\n";
  }
  out.precision(prec);
  out.flags(flags);
}

}  // namespace secbeam
