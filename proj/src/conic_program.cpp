#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "secbeam/conic.hpp"
#include "conic_rows.hpp"

namespace secbeam {

AffineExpr AffineExpr::variable(int var, double coef) {
  AffineExpr e;
  e.add(var, coef);
  return e;
}

AffineExpr& AffineExpr::add(int var, double coef) {
  for (auto& t : terms_) {
    if (t.var == var) {
      t.coef += coef;
      return *this;
    }
  }
  terms_.push_back({var, coef});
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  for (const auto& t : other.terms_) add(t.var, t.coef);
  constant_ += other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  for (const auto& t : other.terms_) add(t.var, -t.coef);
  constant_ -= other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  for (auto& t : terms_) t.coef *= s;
  constant_ *= s;
  return *this;
}

double AffineExpr::coefficient(int var) const {
  for (const auto& t : terms_) {
    if (t.var == var) return t.coef;
  }
  return 0.0;
}

double AffineExpr::evaluate(const RVector& z) const {
  double v = constant_;
  for (const auto& t : terms_) v += t.coef * z(t.var);
  return v;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

PsdCone::PsdCone(int n) : dim(n), lower(static_cast<std::size_t>(n * (n + 1) / 2)) {}

AffineExpr& PsdCone::at(int r, int c) {
  if (c > r) std::swap(r, c);
  return lower.at(static_cast<std::size_t>(r * (r + 1) / 2 + c));
}

const AffineExpr& PsdCone::at(int r, int c) const {
  if (c > r) std::swap(r, c);
  return lower.at(static_cast<std::size_t>(r * (r + 1) / 2 + c));
}

int ConicProgram::add_variable(std::string name) {
  names_.push_back(std::move(name));
  objective_.push_back(0.0);
  return n_vars() - 1;
}

std::optional<int> ConicProgram::find_variable(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

void ConicProgram::set_objective(int var, double coef) { objective_.at(var) = coef; }

double ConicProgram::objective_coefficient(int var) const { return objective_.at(var); }

RVector ConicProgram::objective() const {
  return Eigen::Map<const RVector>(objective_.data(), n_vars());
}

void ConicProgram::add(Cone cone, std::string label) {
  constraints_.push_back({std::move(cone), std::move(label)});
}

ConeCounts ConicProgram::count() const {
  ConeCounts c;
  for (const auto& con : constraints_) {
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, NonnegativeCone>) ++c.nonnegative;
          if constexpr (std::is_same_v<T, SecondOrderCone>) ++c.second_order;
          if constexpr (std::is_same_v<T, ExponentialCone>) ++c.exponential;
          if constexpr (std::is_same_v<T, PsdCone>) ++c.psd;
        },
        con.cone);
  }
  return c;
}

namespace {

const char* cone_name(const Cone& cone) {
  switch (cone.index()) {
    case 0: return "NONNEG";
    case 1: return "SOC";
    case 2: return "EXP";
    default: return "PSD";
  }
}

}  // namespace

void ConicProgram::validate() const {
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& con = constraints_[i];
    if (const auto* psd = std::get_if<PsdCone>(&con.cone)) {
      if (psd->dim < 1 ||
          psd->lower.size() != static_cast<std::size_t>(psd->dim * (psd->dim + 1) / 2)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "PSD block " + std::to_string(i) + " has inconsistent size");
      }
    }
    for (const AffineExpr* row : detail::cone_rows(con.cone)) {
      for (const auto& t : row->terms()) {
        if (t.var < 0 || t.var >= n_vars()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "constraint " + std::to_string(i) + " references undeclared variable " +
                          std::to_string(t.var));
        }
      }
    }
  }
}

std::string ConicProgram::dump() const {
  std::ostringstream out;
  out.precision(17);
  out << "# conic program: maximize c^T z\n";
  out << "vars " << n_vars() << "\n";
  for (int j = 0; j < n_vars(); ++j) out << "var " << j << " " << names_[j] << "\n";
  for (int j = 0; j < n_vars(); ++j) {
    if (objective_[j] != 0.0) out << "obj " << j << " " << objective_[j] << "\n";
  }
  // Cone directory: id type first_row n_rows [psd dim] label.
  int row = 0;
  std::vector<int> first_rows;
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& con = constraints_[i];
    const auto rows = detail::cone_rows(con.cone);
    first_rows.push_back(row);
    out << "cone " << i << " " << cone_name(con.cone) << " " << row << " " << rows.size();
    if (const auto* psd = std::get_if<PsdCone>(&con.cone)) out << " dim=" << psd->dim;
    out << " " << (con.label.empty() ? "-" : con.label) << "\n";
    row += static_cast<int>(rows.size());
  }
  out << "rows " << row << "\n";
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    int r = first_rows[i];
    for (const AffineExpr* e : detail::cone_rows(constraints_[i].cone)) {
      for (const auto& t : e->terms()) {
        if (t.coef != 0.0) out << r << " " << t.var << " " << t.coef << "\n";
      }
      if (e->constant() != 0.0) out << r << " -1 " << e->constant() << "\n";
      ++r;
    }
  }
  return out.str();
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

double cone_residual(const Cone& cone, const RVector& z) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, NonnegativeCone>) {
          return std::max(0.0, -k.expr.evaluate(z));
        } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
          double sq = 0.0;
          for (const auto& e : k.tail) sq += std::pow(e.evaluate(z), 2);
          return std::max(0.0, std::sqrt(sq) - k.head.evaluate(z));
        } else if constexpr (std::is_same_v<T, ExponentialCone>) {
          const double a = k.a.evaluate(z);
          const double b = k.b.evaluate(z);
          const double c = k.c.evaluate(z);
          if (b > 0.0) return std::max(0.0, b * std::exp(a / b) - c);
          // Closure at b = 0: a <= 0, c >= 0.
          return std::max({0.0, -b, a, -c});
        } else {
          RMatrix X(k.dim, k.dim);
          for (int r = 0; r < k.dim; ++r) {
            for (int c = 0; c <= r; ++c) X(r, c) = X(c, r) = k.at(r, c).evaluate(z);
          }
          Eigen::SelfAdjointEigenSolver<RMatrix> es(X, Eigen::EigenvaluesOnly);
          return std::max(0.0, -es.eigenvalues().minCoeff());
        }
      },
      cone);
}

double max_cone_residual(const ConicProgram& prog, const RVector& z) {
  double worst = 0.0;
  for (const auto& con : prog.constraints()) {
    const double r = cone_residual(con.cone, z);
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, r);
  }
  return worst;
}

RMatrix herm_to_real(const CMatrix& W) {
  if (W.rows() != W.cols()) throw Error(ErrorCode::kInvalidDimension, "W must be square");
  if ((W - W.adjoint()).norm() > 1e-9) {
    throw Error(ErrorCode::kNotHermitian, "matrix is not Hermitian");
  }
  const Eigen::Index n = W.rows();
  RMatrix M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = W.real();
  M.topRightCorner(n, n) = -W.imag();
  M.bottomLeftCorner(n, n) = W.imag();
  M.bottomRightCorner(n, n) = W.real();
  return M;
}

CMatrix real_to_herm(const RMatrix& M) {
  if (M.rows() != M.cols() || M.rows() % 2 != 0) {
    throw Error(ErrorCode::kInvalidDimension, "embedding must be 2n x 2n");
  }
  const Eigen::Index n = M.rows() / 2;
  CMatrix W(n, n);
  W.real() = M.topLeftCorner(n, n);
  W.imag() = M.bottomLeftCorner(n, n);
  return W;
}

}  // namespace secbeam
