#include "secbeam/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace secbeam {
namespace {

// Real basis of n x n Hermitian matrices in parameter order: diagonal, then
// for each j < l the symmetric real part and the skew imaginary part.
std::vector<CMatrix> hermitian_basis(int n) {
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j) {
    CMatrix E = CMatrix::Zero(n, n);
    E(j, j) = 1.0;
    basis.push_back(E);
  }
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      CMatrix re = CMatrix::Zero(n, n);
      re(j, l) = re(l, j) = 1.0;
      basis.push_back(re);
      CMatrix im = CMatrix::Zero(n, n);
      im(j, l) = Complex(0.0, 1.0);
      im(l, j) = Complex(0.0, -1.0);
      basis.push_back(im);
    }
  }
  return basis;
}

std::vector<std::string> hermitian_names(int k, int n) {
  std::vector<std::string> names;
  const std::string w = "W" + std::to_string(k) + ".";
  for (int j = 0; j < n; ++j) names.push_back(w + "d" + std::to_string(j));
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      const std::string jl = std::to_string(j) + "." + std::to_string(l);
      names.push_back(w + "re" + jl);
      names.push_back(w + "im" + jl);
    }
  }
  return names;
}

// Real-linear forms of a Hermitian W given its parameters z[first + p].
struct HermLinear {
  int first = 0;
  int n = 0;
  const std::vector<CMatrix>* basis = nullptr;

  // hbar^T W conj(hbar)
  AffineExpr quad(const CVector& hbar) const {
    const CVector a = hbar.conjugate();
    AffineExpr e;
    for (int p = 0; p < n * n; ++p) {
      const double c = a.dot((*basis)[p] * a).real();
      if (c != 0.0) e.add(first + p, c);
    }
    return e;
  }

  // Stacked real and imaginary parts of W conj(hbar).
  std::vector<AffineExpr> product(const CVector& hbar) const {
    const CVector a = hbar.conjugate();
    std::vector<AffineExpr> re(n), im(n);
    for (int p = 0; p < n * n; ++p) {
      const CVector v = (*basis)[p] * a;
      for (int r = 0; r < n; ++r) {
        if (v(r).real() != 0.0) re[r].add(first + p, v(r).real());
        if (v(r).imag() != 0.0) im[r].add(first + p, v(r).imag());
      }
    }
    re.insert(re.end(), im.begin(), im.end());
    return re;
  }

  AffineExpr trace() const {
    AffineExpr e;
    for (int j = 0; j < n; ++j) e.add(first + j, 1.0);
    return e;
  }

  // Real embedding [[Re W, -Im W], [Im W, Re W]].
  PsdCone embedding() const {
    PsdCone blk(2 * n);
    for (int p = 0; p < n * n; ++p) {
      const RMatrix M = herm_to_real((*basis)[p]);
      for (int r = 0; r < 2 * n; ++r) {
        for (int c = 0; c <= r; ++c) {
          if (M(r, c) != 0.0) blk.at(r, c).add(first + p, M(r, c));
        }
      }
    }
    return blk;
  }
};

std::string idx(const char* base, int i) { return base + std::to_string(i); }
std::string idx(const char* base, int i, int k) {
  return base + std::to_string(i) + "." + std::to_string(k);
}

}  // namespace

int sca_variable_count(int n_tx, int k_pairs) {
  return k_pairs * n_tx * n_tx + 6 * k_pairs + 2 * k_pairs * k_pairs;
}

ConicProgram build_sca_subproblem(const ChannelSet& cs, double power_budget,
                                  const std::vector<double>& y_tilde,
                                  const std::vector<double>& p_tilde,
                                  RVector* interior) {
  cs.validate();
  const int K = cs.k_pairs;
  const int n = cs.n_tx;
  if (static_cast<int>(y_tilde.size()) != K || static_cast<int>(p_tilde.size()) != K) {
    throw Error(ErrorCode::kInvalidDimension, "linearization points must have K entries");
  }
  for (int i = 0; i < K; ++i) {
    if (!std::isfinite(y_tilde[i]) || !std::isfinite(p_tilde[i])) {
      throw Error(ErrorCode::kInvalidArgument, "linearization points must be finite");
    }
  }
  if (!(power_budget > 0.0)) throw Error(ErrorCode::kInvalidArgument, "P must be positive");

  ConicProgram prog;
  const std::vector<CMatrix> basis = hermitian_basis(n);
  std::vector<HermLinear> W(K);
  for (int k = 0; k < K; ++k) {
    const auto names = hermitian_names(k, n);
    W[k] = {prog.n_vars(), n, &basis};
    for (const auto& nm : names) prog.add_variable(nm);
  }
  std::vector<int> x(K), y(K), p(K), q(K), s(K), r(K);
  for (int i = 0; i < K; ++i) {
    x[i] = prog.add_variable(idx("x", i));
    y[i] = prog.add_variable(idx("y", i));
    p[i] = prog.add_variable(idx("p", i));
    q[i] = prog.add_variable(idx("q", i));
    s[i] = prog.add_variable(idx("s", i));
    r[i] = prog.add_variable(idx("r", i));
  }
  std::vector<int> t(K * K), u(K * K);
  for (int i = 0; i < K; ++i)
    for (int k = 0; k < K; ++k) t[i * K + k] = prog.add_variable(idx("t", i, k));
  for (int i = 0; i < K; ++i)
    for (int k = 0; k < K; ++k) u[i * K + k] = prog.add_variable(idx("u", i, k));

  for (int i = 0; i < K; ++i) {
    prog.set_objective(x[i], 1.0);
    prog.set_objective(y[i], -1.0);
    prog.set_objective(p[i], -1.0);
    prog.set_objective(q[i], 1.0);
  }

  for (int k = 0; k < K; ++k) prog.add(W[k].embedding(), idx("psd.W", k));

  const double two_eps = 2.0 * cs.eps;
  for (int i = 0; i < K; ++i) {
    for (int k = 0; k < K; ++k) {
      prog.add(SecondOrderCone{AffineExpr::variable(t[i * K + k]), W[k].product(cs.h_est[i])},
               idx("soc.t", i, k));
      prog.add(SecondOrderCone{AffineExpr::variable(u[i * K + k]), W[k].product(cs.g_est[i])},
               idx("soc.u", i, k));
    }
    prog.add(ExponentialCone{AffineExpr::variable(x[i]), AffineExpr(1.0),
                             AffineExpr::variable(s[i])},
             idx("exp.s", i));
    prog.add(ExponentialCone{AffineExpr::variable(q[i]), AffineExpr(1.0),
                             AffineExpr::variable(r[i])},
             idx("exp.r", i));

    AffineExpr signal(cs.sigma2[i]);
    AffineExpr eav_interf(cs.varsigma2[i]);
    AffineExpr user_interf(cs.sigma2[i]);
    AffineExpr eav_signal(cs.varsigma2[i]);
    for (int k = 0; k < K; ++k) {
      const AffineExpr qh = W[k].quad(cs.h_est[i]);
      const AffineExpr qg = W[k].quad(cs.g_est[i]);
      signal += qh;
      eav_signal += qg;
      if (two_eps > 0.0) {
        signal.add(t[i * K + k], -two_eps);
        eav_signal.add(u[i * K + k], two_eps);
      }
      if (k != i) {
        eav_interf += qg;
        user_interf += qh;
        if (two_eps > 0.0) {
          eav_interf.add(u[i * K + k], -two_eps);
          user_interf.add(t[i * K + k], two_eps);
        }
      }
    }
    signal.add(s[i], -1.0);
    prog.add(NonnegativeCone{signal}, idx("lin.signal", i));
    eav_interf.add(r[i], -1.0);
    prog.add(NonnegativeCone{eav_interf}, idx("lin.eav_interf", i));

    const double ey = std::exp(y_tilde[i]);
    AffineExpr taylor_y = AffineExpr::variable(y[i], ey);
    taylor_y.add_constant(ey * (1.0 - y_tilde[i]));
    prog.add(NonnegativeCone{taylor_y - user_interf}, idx("lin.user_interf", i));

    const double ep = std::exp(p_tilde[i]);
    AffineExpr taylor_p = AffineExpr::variable(p[i], ep);
    taylor_p.add_constant(ep * (1.0 - p_tilde[i]));
    prog.add(NonnegativeCone{taylor_p - eav_signal}, idx("lin.eav_signal", i));
  }

  AffineExpr power(power_budget);
  for (int k = 0; k < K; ++k) power -= W[k].trace();
  prog.add(NonnegativeCone{power}, "power");

  if (interior != nullptr) {
    // alpha and the norm-mark margin nu keep every eps penalty below a
    // quarter of the smallest noise variance.
    double noise_min = std::numeric_limits<double>::infinity();
    double chan_max = 0.0;
    for (int i = 0; i < K; ++i) {
      noise_min = std::min({noise_min, cs.sigma2[i], cs.varsigma2[i]});
      chan_max = std::max({chan_max, cs.h_est[i].norm(), cs.g_est[i].norm()});
    }
    double alpha = power_budget / (4.0 * K * n);
    double nu = 1.0;
    if (cs.eps > 0.0) {
      alpha = std::min(alpha, noise_min / (8.0 * cs.eps * K * chan_max));
      nu = noise_min / (8.0 * cs.eps * K);
    }
    RVector z = RVector::Zero(prog.n_vars());
    for (int k = 0; k < K; ++k)
      for (int j = 0; j < n; ++j) z(W[k].first + j) = alpha;
    for (int i = 0; i < K; ++i) {
      for (int k = 0; k < K; ++k) {
        z(t[i * K + k]) = alpha * cs.h_est[i].norm() + nu;
        z(u[i * K + k]) = alpha * cs.g_est[i].norm() + nu;
      }
    }
    // Evaluate each linear family with s, r, y, p still zero, then place the
    // marks strictly inside.
    const auto& cons = prog.constraints();
    for (int i = 0; i < K; ++i) {
      auto lhs = [&](const std::string& label) {
        for (const auto& c : cons) {
          if (c.label == label) return std::get<NonnegativeCone>(c.cone).expr.evaluate(z);
        }
        throw Error(ErrorCode::kNumericalFailure, "missing constraint " + label);
      };
      const double sig = lhs(idx("lin.signal", i));
      z(s[i]) = 0.5 * sig;
      z(x[i]) = std::log(z(s[i])) - 1.0;
      const double eav = lhs(idx("lin.eav_interf", i));
      z(r[i]) = 0.5 * eav;
      z(q[i]) = std::log(z(r[i])) - 1.0;
      // taylor(y) - interference > 0 at y = 0 shifted by one unit of slack.
      const double ey = std::exp(y_tilde[i]);
      const double gap_y = lhs(idx("lin.user_interf", i));
      z(y[i]) = (1.0 - gap_y) / ey;
      const double ep = std::exp(p_tilde[i]);
      const double gap_p = lhs(idx("lin.eav_signal", i));
      z(p[i]) = (1.0 - gap_p) / ep;
    }
    *interior = std::move(z);
  }
  return prog;
}

SubproblemSolution extract_covariances(const ConicProgram& prog, const SolverResult& result,
                                       const ChannelSet& cs) {
  if (result.status != SolveStatus::kOptimal) {
    throw Error(ErrorCode::kExtractionFailure,
                std::string("solve status is ") + to_string(result.status));
  }
  if (result.primal.size() != prog.n_vars()) {
    throw Error(ErrorCode::kExtractionFailure, "primal size does not match the program");
  }
  const double resid = max_cone_residual(prog, result.primal);
  if (!(resid <= 1e-6)) {
    throw Error(ErrorCode::kExtractionFailure,
                "cone residual " + std::to_string(resid) + " exceeds 1e-6");
  }
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < prog.n_vars(); ++j) index.emplace(prog.variable_name(j), j);
  auto value = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw Error(ErrorCode::kExtractionFailure, "missing variable " + name);
    }
    return result.primal(it->second);
  };

  const int K = cs.k_pairs;
  const int n = cs.n_tx;
  const std::vector<CMatrix> basis = hermitian_basis(n);
  SubproblemSolution sol;
  for (int k = 0; k < K; ++k) {
    const auto names = hermitian_names(k, n);
    CMatrix Wk = CMatrix::Zero(n, n);
    for (int pi = 0; pi < n * n; ++pi) Wk += value(names[pi]) * basis[pi];
    Wk = 0.5 * (Wk + Wk.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(Wk);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < 0.0) {
      sol.floor_shift = std::max(sol.floor_shift, -lmin);
      const RVector ev = es.eigenvalues().cwiseMax(0.0);
      Wk = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
      Wk = 0.5 * (Wk + Wk.adjoint()).eval();
    }
    sol.W.W.push_back(std::move(Wk));
  }
  for (int i = 0; i < K; ++i) {
    sol.x.push_back(value(idx("x", i)));
    sol.y.push_back(value(idx("y", i)));
    sol.p.push_back(value(idx("p", i)));
    sol.q.push_back(value(idx("q", i)));
  }
  for (int i = 0; i < K; ++i)
    for (int k = 0; k < K; ++k) sol.t.push_back(value(idx("t", i, k)));
  for (int i = 0; i < K; ++i)
    for (int k = 0; k < K; ++k) sol.u.push_back(value(idx("u", i, k)));
  return sol;
}

double Tightness::max_slack() const {
  double m = 0.0;
  for (const auto& fam : slack)
    for (double v : fam) m = std::max(m, std::abs(v));
  return m;
}

Tightness subproblem_tightness(const ChannelSet& cs, const SubproblemSolution& sol,
                               const std::vector<double>& y_tilde,
                               const std::vector<double>& p_tilde) {
  const int K = cs.k_pairs;
  Tightness out;
  out.slack.assign(4, std::vector<double>(static_cast<std::size_t>(K), 0.0));
  auto rel = [](double lhs, double rhs) { return (lhs - rhs) / std::max(1.0, std::abs(lhs)); };
  for (int i = 0; i < K; ++i) {
    double signal = cs.sigma2[i], eav_interf = cs.varsigma2[i];
    double user_interf = cs.sigma2[i], eav_signal = cs.varsigma2[i];
    for (int k = 0; k < K; ++k) {
      const QuadBounds hb = quad_bounds(cs.h_est[i], sol.W.W[k], cs.eps);
      const QuadBounds gb = quad_bounds(cs.g_est[i], sol.W.W[k], cs.eps);
      out.norm_gap = std::max({out.norm_gap, sol.t[i * K + k] - hb.norm,
                               sol.u[i * K + k] - gb.norm});
      signal += hb.lb;
      eav_signal += gb.ub;
      if (k != i) {
        eav_interf += gb.lb;
        user_interf += hb.ub;
      }
    }
    out.slack[0][i] = rel(signal, std::exp(sol.x[i]));
    out.slack[1][i] = rel(eav_interf, std::exp(sol.q[i]));
    const double ty = std::exp(y_tilde[i]) * (sol.y[i] - y_tilde[i] + 1.0);
    out.slack[2][i] = rel(ty, user_interf);
    const double tp = std::exp(p_tilde[i]) * (sol.p[i] - p_tilde[i] + 1.0);
    out.slack[3][i] = rel(tp, eav_signal);
  }
  return out;
}

}  // namespace secbeam
