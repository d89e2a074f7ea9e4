#pragma once

#include <functional>
#include <string_view>

#include "aninorm/statespace.hpp"

namespace aninorm {

/// Solves the Stein equation P = Ahat P Ahat^T + rhs by Smith doubling.
/// Throws Error(SpectralRadius) when rho(Ahat) >= 1 - 1e-12.
MatrixXd solve_dlyap(const MatrixXd& closed_loop, const MatrixXd& rhs);

/// Solves A^T Q + Q A + rhs = 0 through the Kronecker-product linear system.
/// Dense, so n is capped at 64 (Error(TooLarge) above that).
MatrixXd solve_clyap(const MatrixXd& A, const MatrixXd& rhs);

enum class DareStatus { Admissible, Inadmissible };
enum class DareFailure { None, PositivityLoss, NoConvergence, SpectralRadius };

std::string_view to_string(DareFailure reason);

enum class DareMethod {
  // Doubling of the fixed-point map (quadratic in the number of sweeps),
  // polished by Newton steps on the Stein equation.
  Accelerated,
  // Plain fixed-point iteration R <- f(R).
  FixedPoint,
};

struct DareOptions {
  DareMethod method = DareMethod::Accelerated;
  int max_iterations = 100000;
  double step_tolerance = 1e-14;
  double residual_tolerance = 1e-10;
};

/// Result of the q-parameterized Riccati solve
///   R = A^T R A + q C^T C + L^T M^{-2} L,
///   L = M^2 (B^T R A + q D^T C),
///   M = (I - q D^T D - B^T R B)^{-1/2}.
/// Matrix accessors throw when the outcome is inadmissible.
class DareOutcome {
 public:
  static DareOutcome admissible(MatrixXd R, MatrixXd L, MatrixXd M,
                                double closed_loop_radius, int iterations);
  static DareOutcome inadmissible(DareFailure reason, int iterations);

  DareStatus status() const { return status_; }
  bool is_admissible() const { return status_ == DareStatus::Admissible; }
  DareFailure reason() const { return reason_; }
  int iterations() const { return iterations_; }

  const MatrixXd& R() const;
  const MatrixXd& L() const;
  const MatrixXd& M() const;
  double closed_loop_radius() const;

 private:
  DareOutcome() = default;
  void require_admissible() const;

  DareStatus status_ = DareStatus::Inadmissible;
  DareFailure reason_ = DareFailure::None;
  MatrixXd R_, L_, M_;
  double closed_loop_radius_ = 0.0;
  int iterations_ = 0;
};

DareOutcome dare_q(const DtStateSpace& sys, double q,
                   const DareOptions& options = {});

/// Frobenius norm of the residual of the R-equation for an admissible
/// outcome.
double dare_residual(const DtStateSpace& sys, double q, const DareOutcome& out);

struct RootResult {
  double x = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Root of a nondecreasing function on [lo, hi] by bisection safeguarding
/// regula-falsi steps. Stops once |f(x)| <= tol_f or the bracket is no wider
/// than tol_x. Throws Error(Bracket) without a sign change and Error(MaxIter)
/// after 200 iterations.
RootResult find_root_monotone(const std::function<double(double)>& f,
                              double lo, double hi, double tol_f, double tol_x);

}  // namespace aninorm
