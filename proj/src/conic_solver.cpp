// Primal log-barrier path-following solver for the conic IR.
//
// Every cone carries its standard self-concordant barrier:
//   nonnegative  -log s                                   (nu = 1)
//   second-order -log(u^2 - |x|^2)                         (nu = 2)
//   exponential  -log(b log(c/b) - a) - log b - log c      (nu = 3)
//   psd          -log det X                                (nu = n)
// plus a box barrier |z_j| < M that keeps every centering problem bounded.
// Phase I shifts each slack along an interior direction of its cone by a
// scalar tau and drives tau below zero; phase II follows the central path of
// t * (-c^T z) + barrier with damped Newton steps until nu / t meets the
// requested gap.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Sparse>

#include "conic_rows.hpp"
#include "secbeam/conic.hpp"

namespace secbeam {
namespace {

enum class Kind { kNonneg, kSoc, kExp, kPsd };

struct Block {
  Kind kind = Kind::kNonneg;
  int dim = 0;
  int psd_n = 0;
  std::vector<int> support;
  Eigen::SparseMatrix<double> A;  // dim x support.size()
  RVector b;
  double nu = 0.0;
};

struct Compiled {
  int n = 0;
  std::vector<Block> blocks;
  double nu = 0.0;  // cones only
};

// Interior direction of each cone used by phase I.
RVector interior_direction(Kind kind, int dim, int psd_n) {
  RVector e = RVector::Zero(dim);
  switch (kind) {
    case Kind::kNonneg: e(0) = 1.0; break;
    case Kind::kSoc: e(0) = 1.0; break;
    case Kind::kExp: e << -1.0, 1.0, 1.0; break;
    case Kind::kPsd:
      for (int r = 0; r < psd_n; ++r) e(r * (r + 1) / 2 + r) = 1.0;
      break;
  }
  return e;
}

// tau_index >= 0 adds the phase I shift column.
Compiled compile(const ConicProgram& prog, const std::vector<bool>& skip, int tau_index) {
  Compiled cp;
  cp.n = prog.n_vars() + (tau_index >= 0 ? 1 : 0);
  const auto& cons = prog.constraints();
  for (std::size_t ci = 0; ci < cons.size(); ++ci) {
    if (skip[ci]) continue;
    Block blk;
    const Cone& cone = cons[ci].cone;
    switch (cone.index()) {
      case 0: blk.kind = Kind::kNonneg; blk.nu = 1.0; break;
      case 1: blk.kind = Kind::kSoc; blk.nu = 2.0; break;
      case 2: blk.kind = Kind::kExp; blk.nu = 3.0; break;
      default:
        blk.kind = Kind::kPsd;
        blk.psd_n = std::get<PsdCone>(cone).dim;
        blk.nu = blk.psd_n;
        break;
    }
    const auto rows = detail::cone_rows(cone);
    blk.dim = static_cast<int>(rows.size());
    blk.b.resize(blk.dim);
    std::vector<int> support;
    for (const AffineExpr* e : rows) {
      for (const auto& t : e->terms()) {
        if (t.coef != 0.0) support.push_back(t.var);
      }
    }
    if (tau_index >= 0) support.push_back(tau_index);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    auto local = [&](int var) {
      return static_cast<int>(std::lower_bound(support.begin(), support.end(), var) -
                              support.begin());
    };
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < blk.dim; ++r) {
      blk.b(r) = rows[r]->constant();
      for (const auto& t : rows[r]->terms()) {
        if (t.coef != 0.0) trip.emplace_back(r, local(t.var), t.coef);
      }
    }
    if (tau_index >= 0) {
      const RVector e = interior_direction(blk.kind, blk.dim, blk.psd_n);
      const int col = local(tau_index);
      for (int r = 0; r < blk.dim; ++r) {
        if (e(r) != 0.0) trip.emplace_back(r, col, e(r));
      }
    }
    blk.A.resize(blk.dim, static_cast<Eigen::Index>(support.size()));
    blk.A.setFromTriplets(trip.begin(), trip.end());
    blk.support = std::move(support);
    cp.nu += blk.nu;
    cp.blocks.push_back(std::move(blk));
  }
  return cp;
}

RVector slack(const Block& blk, const RVector& z) {
  RVector zs(static_cast<Eigen::Index>(blk.support.size()));
  for (std::size_t j = 0; j < blk.support.size(); ++j) {
    zs(static_cast<Eigen::Index>(j)) = z(blk.support[j]);
  }
  return blk.A * zs + blk.b;
}

RMatrix psd_matrix(const RVector& s, int n) {
  RMatrix X(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) X(r, c) = X(c, r) = s(r * (r + 1) / 2 + c);
  }
  return X;
}

bool interior(const Block& blk, const RVector& s) {
  switch (blk.kind) {
    case Kind::kNonneg: return s(0) > 0.0;
    case Kind::kSoc: {
      const double u = s(0);
      return u > 0.0 && u * u - s.tail(blk.dim - 1).squaredNorm() > 0.0 &&
             u > s.tail(blk.dim - 1).norm();
    }
    case Kind::kExp: {
      const double a = s(0), b = s(1), c = s(2);
      return b > 0.0 && c > 0.0 && b * std::log(c / b) - a > 0.0;
    }
    case Kind::kPsd: {
      Eigen::LLT<RMatrix> llt(psd_matrix(s, blk.psd_n));
      return llt.info() == Eigen::Success;
    }
  }
  return false;
}

// Barrier gradient and Hessian with respect to the slack vector.
bool barrier_derivatives(const Block& blk, const RVector& s, RVector& g, RMatrix& H) {
  const int d = blk.dim;
  g.resize(d);
  H.resize(d, d);
  switch (blk.kind) {
    case Kind::kNonneg:
      g(0) = -1.0 / s(0);
      H(0, 0) = 1.0 / (s(0) * s(0));
      return s(0) > 0.0;
    case Kind::kSoc: {
      // F = -log(s^T J s), J = diag(1, -I).
      RVector js = -s;
      js(0) = s(0);
      const double det = s(0) * s(0) - s.tail(d - 1).squaredNorm();
      if (!(det > 0.0)) return false;
      g = -2.0 * js / det;
      H = (4.0 / (det * det)) * (js * js.transpose());
      H(0, 0) -= 2.0 / det;
      for (int i = 1; i < d; ++i) H(i, i) += 2.0 / det;
      return true;
    }
    case Kind::kExp: {
      const double a = s(0), b = s(1), c = s(2);
      const double lcb = std::log(c / b);
      const double psi = b * lcb - a;
      if (!(b > 0.0 && c > 0.0 && psi > 0.0)) return false;
      const Eigen::Vector3d dpsi(-1.0, lcb - 1.0, b / c);
      Eigen::Matrix3d d2psi = Eigen::Matrix3d::Zero();
      d2psi(1, 1) = -1.0 / b;
      d2psi(1, 2) = d2psi(2, 1) = 1.0 / c;
      d2psi(2, 2) = -b / (c * c);
      g = -dpsi / psi;
      g(1) -= 1.0 / b;
      g(2) -= 1.0 / c;
      H = dpsi * dpsi.transpose() / (psi * psi) - d2psi / psi;
      H(1, 1) += 1.0 / (b * b);
      H(2, 2) += 1.0 / (c * c);
      return true;
    }
    case Kind::kPsd: {
      const int n = blk.psd_n;
      Eigen::LLT<RMatrix> llt(psd_matrix(s, n));
      if (llt.info() != Eigen::Success) return false;
      const RMatrix Y = llt.solve(RMatrix::Identity(n, n));
      // Slack entry e = (r, c) enters X at (r, c) and (c, r); a diagonal
      // entry counts as half of the symmetric pair.
      std::vector<int> er(d), ec(d);
      std::vector<double> w(d);
      for (int r = 0, e = 0; r < n; ++r) {
        for (int c = 0; c <= r; ++c, ++e) {
          er[e] = r;
          ec[e] = c;
          w[e] = r == c ? 0.5 : 1.0;
        }
      }
      for (int e = 0; e < d; ++e) {
        const int a = er[e], bb = ec[e];
        g(e) = -2.0 * w[e] * Y(a, bb);
        for (int f = 0; f <= e; ++f) {
          const int c = er[f], dd = ec[f];
          const double v = 2.0 * w[e] * w[f] * (Y(a, dd) * Y(bb, c) + Y(a, c) * Y(bb, dd));
          H(e, f) = H(f, e) = v;
        }
      }
      return true;
    }
  }
  return false;
}

struct Problem {
  const Compiled* cp = nullptr;
  RVector cost;  // minimize cost^T z
  double bound = 1e6;
};

bool all_interior(const Problem& pb, const RVector& z) {
  for (int j = 0; j < z.size(); ++j) {
    if (!(std::abs(z(j)) < pb.bound)) return false;
  }
  for (const auto& blk : pb.cp->blocks) {
    if (!interior(blk, slack(blk, z))) return false;
  }
  return true;
}

bool assemble(const Problem& pb, double t, const RVector& z, RVector& grad, RMatrix& hess) {
  const int n = pb.cp->n;
  grad = t * pb.cost;
  hess = RMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double up = pb.bound - z(j);
    const double lo = pb.bound + z(j);
    grad(j) += 1.0 / up - 1.0 / lo;
    hess(j, j) += 1.0 / (up * up) + 1.0 / (lo * lo);
  }
  RVector gs;
  RMatrix hs;
  for (const auto& blk : pb.cp->blocks) {
    if (!barrier_derivatives(blk, slack(blk, z), gs, hs)) return false;
    const RVector gl = blk.A.transpose() * gs;
    const RMatrix ha = hs * blk.A;
    const RMatrix hl = blk.A.transpose() * ha;
    const auto m = blk.support.size();
    for (std::size_t p = 0; p < m; ++p) {
      const int gp = blk.support[p];
      grad(gp) += gl(static_cast<Eigen::Index>(p));
      for (std::size_t q = 0; q < m; ++q) {
        hess(gp, blk.support[q]) +=
            hl(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
      }
    }
  }
  return grad.allFinite() && hess.allFinite();
}

enum class CenterOutcome { kCentered, kStopped, kStepCap, kFailed };

// Damped Newton on t * cost^T z + barrier. `stop` lets phase I bail out as
// soon as it has found what it needs.
template <typename StopFn>
CenterOutcome center(const Problem& pb, double t, RVector& z, int& budget, StopFn&& stop) {
  RVector grad;
  RMatrix hess;
  constexpr int kMaxSteps = 80;
  double last_dec = std::numeric_limits<double>::infinity();
  for (int step = 0; step < kMaxSteps; ++step) {
    if (budget-- <= 0) return CenterOutcome::kFailed;
    if (!assemble(pb, t, z, grad, hess)) return CenterOutcome::kFailed;
    Eigen::LDLT<RMatrix> ldlt(hess);
    RVector dz = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !dz.allFinite()) {
      const double ridge = 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      hess.diagonal().array() += ridge;
      dz = hess.ldlt().solve(-grad);
      if (!dz.allFinite()) return CenterOutcome::kFailed;
    }
    const double dec2 = -grad.dot(dz);
    if (!(dec2 >= -1e-9)) return CenterOutcome::kFailed;
    if (dec2 <= 1e-11) return CenterOutcome::kCentered;
    const double lambda = std::sqrt(std::max(dec2, 0.0));
    double alpha = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
    RVector trial = z + alpha * dz;
    int backtracks = 0;
    while (!all_interior(pb, trial)) {
      alpha *= 0.5;
      if (++backtracks > 60) return CenterOutcome::kFailed;
      trial = z + alpha * dz;
    }
    z = std::move(trial);
    if (stop(z)) return CenterOutcome::kStopped;
    // Newton has stalled on rounding noise; the point is as centered as
    // double precision allows.
    if (dec2 < 1e-7 && dec2 >= 0.5 * last_dec) return CenterOutcome::kCentered;
    last_dec = dec2;
  }
  return last_dec < 1e-5 ? CenterOutcome::kCentered : CenterOutcome::kStepCap;
}

// Initial barrier weight balancing cost against the barrier gradient.
double initial_weight(const Problem& pb, const RVector& z) {
  RVector grad;
  RMatrix hess;
  if (!assemble(pb, 0.0, z, grad, hess)) return 1.0;
  Eigen::LDLT<RMatrix> ldlt(hess);
  const RVector hc = ldlt.solve(pb.cost);
  const double denom = pb.cost.dot(hc);
  if (!(denom > 0.0)) return 1.0;
  const double t = -grad.dot(hc) / denom;
  if (!std::isfinite(t)) return 1.0;
  return std::clamp(t, 1e-2, 1e4);
}

// SOC cones whose head is a lone variable appearing nowhere else never bind:
// the head can always be raised. They are dropped from the solve and the
// head is set to the tail norm afterwards.
std::vector<bool> prunable_cones(const ConicProgram& prog) {
  const auto& cons = prog.constraints();
  std::vector<int> uses(static_cast<std::size_t>(prog.n_vars()), 0);
  for (const auto& con : cons) {
    for (const AffineExpr* e : detail::cone_rows(con.cone)) {
      for (const auto& t : e->terms()) {
        if (t.coef != 0.0) ++uses[static_cast<std::size_t>(t.var)];
      }
    }
  }
  std::vector<bool> skip(cons.size(), false);
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const auto* soc = std::get_if<SecondOrderCone>(&cons[i].cone);
    if (soc == nullptr || soc->head.terms().size() != 1) continue;
    const auto& t = soc->head.terms().front();
    if (t.coef <= 0.0 || uses[static_cast<std::size_t>(t.var)] != 1) continue;
    if (prog.objective_coefficient(t.var) != 0.0) continue;
    bool in_tail = false;
    for (const auto& e : soc->tail) in_tail = in_tail || e.coefficient(t.var) != 0.0;
    if (!in_tail) skip[i] = true;
  }
  return skip;
}

void restore_pruned(const ConicProgram& prog, const std::vector<bool>& skip, RVector& z) {
  const auto& cons = prog.constraints();
  for (std::size_t i = 0; i < cons.size(); ++i) {
    if (!skip[i]) continue;
    const auto& soc = std::get<SecondOrderCone>(cons[i].cone);
    const auto& t = soc.head.terms().front();
    double sq = 0.0;
    for (const auto& e : soc.tail) sq += std::pow(e.evaluate(z), 2);
    z(t.var) = (std::sqrt(sq) - soc.head.constant()) / t.coef;
  }
}

SolverResult finish(const ConicProgram& prog, const std::vector<bool>& skip, RVector z,
                    SolveStatus status, int iterations, std::string message) {
  restore_pruned(prog, skip, z);
  SolverResult res;
  res.status = status;
  res.objective_value = prog.objective().dot(z);
  res.max_cone_residual = max_cone_residual(prog, z);
  res.primal = std::move(z);
  res.iterations = iterations;
  res.message = std::move(message);
  return res;
}

}  // namespace

SolverResult solve(const ConicProgram& prog, const SolverOptions& opts) {
  prog.validate();
  const int n = prog.n_vars();
  const std::vector<bool> skip = prunable_cones(prog);
  int budget = opts.max_newton_steps;
  auto used = [&] { return opts.max_newton_steps - budget; };

  RVector z = RVector::Zero(n);
  const Compiled main_cp = compile(prog, skip, -1);
  Problem main_pb{&main_cp, -prog.objective(), opts.variable_bound};

  bool have_start = false;
  if (opts.initial_point && opts.initial_point->size() == n) {
    z = *opts.initial_point;
    have_start = all_interior(main_pb, z);
  }

  if (!have_start) {
    // Phase I: minimize tau over (z, tau) with every slack shifted by tau * e.
    const Compiled p1_cp = compile(prog, skip, n);
    RVector zt = RVector::Zero(n + 1);
    zt.head(n) = z.cwiseMax(-0.5 * opts.variable_bound).cwiseMin(0.5 * opts.variable_bound);
    double tau = 1.0;
    Problem probe{&p1_cp, RVector::Zero(n + 1), std::numeric_limits<double>::infinity()};
    zt(n) = tau;
    while (!all_interior(probe, zt)) {
      tau *= 2.0;
      zt(n) = tau;
      if (tau > 1e15) {
        return finish(prog, skip, z, SolveStatus::kNumericalFailure, used(),
                      "phase I could not find an interior start");
      }
    }
    zt(n) = 2.0 * tau;
    RVector cost = RVector::Zero(n + 1);
    cost(n) = 1.0;
    const double bound = std::max(opts.variable_bound, 10.0 * zt(n));
    Problem p1{&p1_cp, cost, bound};
    const double nu1 = p1_cp.nu + 2.0 * (n + 1);
    auto feasible = [n](const RVector& v) { return v(n) < 0.0; };
    double t = 1.0;
    bool found = false;
    while (true) {
      const CenterOutcome oc = center(p1, t, zt, budget, feasible);
      if (oc == CenterOutcome::kStopped || feasible(zt)) {
        found = true;
        break;
      }
      if (oc == CenterOutcome::kFailed) {
        return finish(prog, skip, zt.head(n), SolveStatus::kNumericalFailure, used(),
                      "phase I centering failed");
      }
      // Phase I only needs tau < 0; an uncentered point is still a valid
      // start for the next weight.
      if (oc == CenterOutcome::kStepCap) {
        t *= opts.mu;
        continue;
      }
      if (zt(n) - nu1 / t > 0.0 || nu1 / t < 1e-10) break;
      t *= opts.mu;
    }
    if (!found) {
      return finish(prog, skip, zt.head(n), SolveStatus::kInfeasible, used(),
                    "no strictly feasible point");
    }
    z = zt.head(n);
  }

  const double nu = main_cp.nu + 2.0 * n;
  double t = initial_weight(main_pb, z);
  auto never = [](const RVector&) { return false; };
  RVector last_centered;
  double last_gap = std::numeric_limits<double>::infinity();
  while (true) {
    const CenterOutcome oc = center(main_pb, t, z, budget, never);
    if (oc == CenterOutcome::kFailed || oc == CenterOutcome::kStepCap) {
      if (last_centered.size() == n &&
          last_gap <= opts.accept_tol * (1.0 + std::abs(prog.objective().dot(last_centered)))) {
        SolverResult r = finish(prog, skip, last_centered, SolveStatus::kOptimal, used(),
                                "reduced accuracy: centering failed at t=" + std::to_string(t));
        r.gap_bound = last_gap;
        return r;
      }
      return finish(prog, skip, z, SolveStatus::kNumericalFailure, used(),
                    "centering failed at t=" + std::to_string(t));
    }
    last_centered = z;
    last_gap = nu / t;
    const double obj = prog.objective().dot(z);
    if (nu / t <= opts.tol * (1.0 + std::abs(obj))) break;
    t *= opts.mu;
  }
  const double obj = prog.objective().dot(z);
  const double cmax = prog.objective().cwiseAbs().maxCoeff();
  if (n > 0 && cmax > 0.0 && std::abs(obj) > 1e-2 * opts.variable_bound * cmax) {
    return finish(prog, skip, z, SolveStatus::kUnbounded, used(),
                  "objective runs into the variable bound");
  }
  SolverResult r = finish(prog, skip, z, SolveStatus::kOptimal, used(), "");
  r.gap_bound = last_gap;
  return r;
}

}  // namespace secbeam
