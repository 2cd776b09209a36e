#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "secbeam/common.hpp"

namespace secbeam {

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

/// sum_j coef_j * z[var_j] + constant over the real decision vector z.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(double constant) : constant_(constant) {}

  static AffineExpr variable(int var, double coef = 1.0);

  /// Adds coef * z[var], merging with an existing term on the same variable.
  AffineExpr& add(int var, double coef);
  AffineExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }
  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);

  const std::vector<LinearTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }
  double coefficient(int var) const;
  double evaluate(const RVector& z) const;

 private:
  std::vector<LinearTerm> terms_;
  double constant_ = 0.0;
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator*(double s, AffineExpr a);

/// expr >= 0
struct NonnegativeCone {
  AffineExpr expr;
};

/// head >= |tail|
struct SecondOrderCone {
  AffineExpr head;
  std::vector<AffineExpr> tail;
};

/// c >= b * exp(a / b), b > 0
struct ExponentialCone {
  AffineExpr a;
  AffineExpr b;
  AffineExpr c;
};

/// Symmetric matrix of affine expressions, PSD. Only the lower triangle is
/// stored, row-major: entry (r, c) with c <= r lives at r * (r + 1) / 2 + c.
struct PsdCone {
  explicit PsdCone(int n = 0);

  int dim = 0;
  std::vector<AffineExpr> lower;

  AffineExpr& at(int r, int c);
  const AffineExpr& at(int r, int c) const;
};

using Cone = std::variant<NonnegativeCone, SecondOrderCone, ExponentialCone, PsdCone>;

struct Constraint {
  Cone cone;
  std::string label;
};

struct ConeCounts {
  int nonnegative = 0;
  int second_order = 0;
  int exponential = 0;
  int psd = 0;
};

/// Solver-agnostic conic program: maximize c^T z subject to cone memberships
/// of affine expressions in z.
class ConicProgram {
 public:
  int add_variable(std::string name);
  int n_vars() const { return static_cast<int>(names_.size()); }
  const std::string& variable_name(int var) const { return names_.at(var); }
  std::optional<int> find_variable(const std::string& name) const;

  void set_objective(int var, double coef);
  double objective_coefficient(int var) const;
  /// Dense objective vector (maximize).
  RVector objective() const;

  void add(Cone cone, std::string label = {});
  const std::vector<Constraint>& constraints() const { return constraints_; }

  ConeCounts count() const;

  /// Throws kInvalidArgument if an expression references an undeclared
  /// variable or a PSD block has the wrong number of entries.
  void validate() const;

  /// Plain-text sparse dump: a cone directory mapping each cone to its
  /// scalar rows, then one `row var coefficient` line per nonzero (var -1
  /// holds the constant term).
  std::string dump() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> objective_;
  std::vector<Constraint> constraints_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

const char* to_string(SolveStatus status);

struct SolverOptions {
  /// Relative optimality tolerance: gap <= tol * (1 + |objective|).
  double tol = 1e-7;
  /// Implicit box |z_j| < variable_bound keeping barrier subproblems bounded.
  double variable_bound = 1e6;
  /// Barrier parameter growth per outer iteration.
  double mu = 12.0;
  /// When a later centering fails, the last centered point is returned as
  /// optimal if its gap is within accept_tol * (1 + |objective|).
  double accept_tol = 1e-6;
  int max_newton_steps = 600;
  /// Strictly feasible starting point; skips phase I when interior.
  std::optional<RVector> initial_point;
};

struct SolverResult {
  SolveStatus status = SolveStatus::kNumericalFailure;
  RVector primal;
  double objective_value = 0.0;
  double max_cone_residual = 0.0;
  /// Certified duality-gap bound nu / t of the returned point (inf if none).
  double gap_bound = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::string message;
};

/// Interior-point (log-barrier path-following) solve.
SolverResult solve(const ConicProgram& prog, const SolverOptions& opts = {});

/// Largest violation of a single cone at z (0 when z satisfies it).
double cone_residual(const Cone& cone, const RVector& z);
double max_cone_residual(const ConicProgram& prog, const RVector& z);

/// W = A + iB  ->  [[A, -B], [B, A]].
RMatrix herm_to_real(const CMatrix& W);
/// Inverse of herm_to_real; reads the left block column of a 2n x 2n matrix.
CMatrix real_to_herm(const RMatrix& M);

}  // namespace secbeam
