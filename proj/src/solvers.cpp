#include "aninorm/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aninorm/error.hpp"

namespace aninorm {
namespace {

MatrixXd symmetrized(const MatrixXd& X) { return 0.5 * (X + X.transpose()); }

void require_square(const char* what, const MatrixXd& A, const MatrixXd& rhs) {
  if (A.rows() != A.cols() || rhs.rows() != rhs.cols() || A.rows() != rhs.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": operands must be square and of equal size");
  }
}

// Sum_{k>=0} Ahat^k rhs Ahat^k^T by repeated squaring.
MatrixXd smith_doubling(const MatrixXd& closed_loop, const MatrixXd& rhs) {
  MatrixXd P = rhs;
  MatrixXd Ak = closed_loop;
  for (int k = 0; k < 100; ++k) {
    const MatrixXd increment = Ak * P * Ak.transpose();
    P += increment;
    if (increment.norm() <= 1e-18 * P.norm() || Ak.norm() < 1e-150) break;
    Ak = Ak * Ak;
  }
  return P;
}

}  // namespace

MatrixXd solve_dlyap(const MatrixXd& closed_loop, const MatrixXd& rhs) {
  require_square("solve_dlyap", closed_loop, rhs);
  if (closed_loop.rows() == 0) return rhs;
  const double rho = spectral_radius(closed_loop);
  if (!(rho < 1.0 - 1e-12)) {
    throw Error(ErrorCode::SpectralRadius,
                "solve_dlyap: closed loop has spectral radius " + std::to_string(rho));
  }
  MatrixXd P = symmetrized(smith_doubling(closed_loop, symmetrized(rhs)));

  // One refinement pass against the accumulated rounding of the doubling.
  const MatrixXd residual =
      rhs + closed_loop * P * closed_loop.transpose() - P;
  if (residual.norm() > 1e-13 * (1.0 + P.norm())) {
    P += smith_doubling(closed_loop, symmetrized(residual));
    P = symmetrized(P);
  }
  return P;
}

MatrixXd solve_clyap(const MatrixXd& A, const MatrixXd& rhs) {
  require_square("solve_clyap", A, rhs);
  const Index n = A.rows();
  if (n == 0) return rhs;
  if (n > 64) {
    throw Error(ErrorCode::TooLarge,
                "solve_clyap: dense Kronecker solve limited to n <= 64");
  }
  const double alpha = spectral_abscissa(A);
  if (!(alpha < -1e-12)) {
    throw Error(ErrorCode::SpectralAbscissa,
                "solve_clyap: A is not Hurwitz (abscissa " + std::to_string(alpha) + ")");
  }
  // Column-major vec: vec(A^T Q) = (I kron A^T) vec Q, vec(Q A) = (A^T kron I) vec Q.
  const MatrixXd At = A.transpose();
  MatrixXd K = MatrixXd::Zero(n * n, n * n);
  for (Index j = 0; j < n; ++j) {
    K.block(j * n, j * n, n, n) += At;
    for (Index i = 0; i < n; ++i) {
      K.block(j * n, i * n, n, n).diagonal().array() += At(j, i);
    }
  }
  const MatrixXd sym_rhs = symmetrized(rhs);
  const Eigen::VectorXd b =
      -Eigen::Map<const Eigen::VectorXd>(sym_rhs.data(), n * n);
  const Eigen::VectorXd x = Eigen::PartialPivLU<MatrixXd>(K).solve(b);
  return symmetrized(Eigen::Map<const MatrixXd>(x.data(), n, n));
}

std::string_view to_string(DareFailure reason) {
  switch (reason) {
    case DareFailure::None: return "None";
    case DareFailure::PositivityLoss: return "PositivityLoss";
    case DareFailure::NoConvergence: return "NoConvergence";
    case DareFailure::SpectralRadius: return "SpectralRadius";
  }
  return "Unknown";
}

DareOutcome DareOutcome::admissible(MatrixXd R, MatrixXd L, MatrixXd M,
                                    double closed_loop_radius, int iterations) {
  DareOutcome out;
  out.status_ = DareStatus::Admissible;
  out.R_ = std::move(R);
  out.L_ = std::move(L);
  out.M_ = std::move(M);
  out.closed_loop_radius_ = closed_loop_radius;
  out.iterations_ = iterations;
  return out;
}

DareOutcome DareOutcome::inadmissible(DareFailure reason, int iterations) {
  DareOutcome out;
  out.status_ = DareStatus::Inadmissible;
  out.reason_ = reason;
  out.iterations_ = iterations;
  return out;
}

void DareOutcome::require_admissible() const {
  if (status_ != DareStatus::Admissible) {
    throw Error(ErrorCode::InadmissibleQ,
                "Riccati outcome is inadmissible (" +
                    std::string(to_string(reason_)) + ")");
  }
}

const MatrixXd& DareOutcome::R() const { require_admissible(); return R_; }
const MatrixXd& DareOutcome::L() const { require_admissible(); return L_; }
const MatrixXd& DareOutcome::M() const { require_admissible(); return M_; }
double DareOutcome::closed_loop_radius() const {
  require_admissible();
  return closed_loop_radius_;
}

DareOutcome dare_q(const DtStateSpace& sys, double q, const DareOptions& options) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw Error(ErrorCode::InvalidArgument, "dare_q: q must be positive and finite");
  }
  require_schur(sys);

  const MatrixXd& A = sys.A();
  const MatrixXd& B = sys.B();
  const MatrixXd& C = sys.C();
  const MatrixXd& D = sys.D();
  const Index n = sys.states();
  const Index m = sys.inputs();

  const MatrixXd Im = MatrixXd::Identity(m, m);
  const MatrixXd base = Im - q * D.transpose() * D;
  const MatrixXd qCC = q * C.transpose() * C;
  const MatrixXd qDC = q * D.transpose() * C;

  // I - q D^T D - B^T R B must stay positive definite along the iteration.
  const auto positive = [](const MatrixXd& Phi) {
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(Phi, Eigen::EigenvaluesOnly)
               .eigenvalues()
               .minCoeff() > 1e-12;
  };

  MatrixXd R = MatrixXd::Zero(n, n);
  int iteration = 0;
  bool converged = false;
  const auto small_step = [&](const MatrixXd& next) {
    return (next - R).norm() <= options.step_tolerance * (1.0 + next.norm());
  };

  if (options.method == DareMethod::Accelerated && n > 0) {
    // Structured doubling. Eliminating the cross term gives
    //   R = At^T R (I + G R)^{-1} At + H,
    //   At = A + B S0^{-1} q D^T C,  G = -B S0^{-1} B^T,  H = q C^T C + qC^T D S0^{-1} qD^T C,
    // with S0 = I - q D^T D, and H_k equals the 2^k-th fixed-point iterate
    // from R = 0. Every iterate stays below the admissible solution, so a
    // loss of positivity on the way is conclusive.
    const Eigen::LLT<MatrixXd> s0(symmetrized(base));
    if (s0.info() != Eigen::Success || !positive(base)) {
      return DareOutcome::inadmissible(DareFailure::PositivityLoss, 0);
    }
    MatrixXd Ak = A + B * s0.solve(qDC);
    MatrixXd Gk = -symmetrized(B * s0.solve(B.transpose()));
    MatrixXd Hk = symmetrized(qCC + qDC.transpose() * s0.solve(qDC));
    const MatrixXd In = MatrixXd::Identity(n, n);
    while (iteration < 200) {
      ++iteration;
      const Eigen::PartialPivLU<MatrixXd> lu(In + Gk * Hk);
      if (!(lu.rcond() > 1e-15)) {
        return DareOutcome::inadmissible(DareFailure::PositivityLoss, iteration);
      }
      const MatrixXd W1 = lu.solve(Ak);              // (I + G H)^{-1} A
      const MatrixXd W2 = lu.solve(Gk);              // (I + G H)^{-1} G
      MatrixXd H_next = symmetrized(Hk + Ak.transpose() * Hk * W1);
      Gk = symmetrized(Gk + Ak * W2 * Ak.transpose());
      Ak = Ak * W1;
      if (!H_next.allFinite() ||
          !positive(symmetrized(base - B.transpose() * H_next * B))) {
        return DareOutcome::inadmissible(DareFailure::PositivityLoss, iteration);
      }
      const bool done = (H_next - Hk).norm() <= options.step_tolerance * (1.0 + H_next.norm());
      Hk = std::move(H_next);
      if (done) break;
    }
    R = Hk;
    // Newton (Hewer) polishing: the Frechet derivative of the Riccati map at R
    // is X -> Abar^T X Abar, so each step is one Stein equation.
    for (int k = 0; k < 20; ++k) {
      ++iteration;
      const MatrixXd Phi = symmetrized(base - B.transpose() * R * B);
      if (!positive(Phi)) {
        return DareOutcome::inadmissible(DareFailure::PositivityLoss, iteration);
      }
      const MatrixXd L = Phi.llt().solve(B.transpose() * R * A + qDC);
      const MatrixXd closed = A + B * L;
      if (!(spectral_radius(closed) < 1.0 - 1e-12)) break;
      const MatrixXd CL = C + D * L;
      const MatrixXd next =
          solve_dlyap(closed.transpose(), symmetrized(q * CL.transpose() * CL - L.transpose() * L));
      const bool done = small_step(next);
      R = next;
      if (done) break;
    }
    converged = true;
  } else {
    while (iteration < options.max_iterations) {
      ++iteration;
      const MatrixXd Phi = symmetrized(base - B.transpose() * R * B);
      if (!positive(Phi)) {
        return DareOutcome::inadmissible(DareFailure::PositivityLoss, iteration);
      }
      const MatrixXd K = B.transpose() * R * A + qDC;
      MatrixXd next = symmetrized(A.transpose() * R * A + qCC + K.transpose() * Phi.llt().solve(K));
      const bool done = small_step(next);
      R = std::move(next);
      if (!R.allFinite()) {
        return DareOutcome::inadmissible(DareFailure::PositivityLoss, iteration);
      }
      if (done) {
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    return DareOutcome::inadmissible(DareFailure::NoConvergence, iteration);
  }

  const MatrixXd Phi = symmetrized(base - B.transpose() * R * B);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(Phi);
  if (!(eig.eigenvalues().minCoeff() > 1e-12)) {
    return DareOutcome::inadmissible(DareFailure::PositivityLoss, iteration);
  }
  const MatrixXd M = symmetrized(eig.eigenvectors() *
                                 eig.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                                 eig.eigenvectors().transpose());
  const MatrixXd L = M * M * (B.transpose() * R * A + qDC);
  const double radius = spectral_radius(A + B * L);
  if (!(radius < 1.0 - 1e-12)) {
    return DareOutcome::inadmissible(DareFailure::SpectralRadius, iteration);
  }
  DareOutcome out = DareOutcome::admissible(R, L, M, radius, iteration);
  if (dare_residual(sys, q, out) > options.residual_tolerance * (1.0 + R.norm())) {
    return DareOutcome::inadmissible(DareFailure::NoConvergence, iteration);
  }
  return out;
}

double dare_residual(const DtStateSpace& sys, double q, const DareOutcome& out) {
  const MatrixXd& R = out.R();
  const MatrixXd& L = out.L();
  const MatrixXd& M = out.M();
  const MatrixXd Minv2 = (M * M).inverse();
  const MatrixXd rhs = sys.A().transpose() * R * sys.A() +
                       q * sys.C().transpose() * sys.C() + L.transpose() * Minv2 * L;
  return (R - rhs).norm();
}

RootResult find_root_monotone(const std::function<double(double)>& f, double lo,
                              double hi, double tol_f, double tol_x) {
  if (!(lo < hi)) {
    throw Error(ErrorCode::Bracket, "find_root_monotone: empty bracket");
  }
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (std::abs(f_lo) <= tol_f) return {lo, f_lo, 0};
  if (std::abs(f_hi) <= tol_f) return {hi, f_hi, 0};
  if (f_lo > 0.0 || f_hi < 0.0) {
    throw Error(ErrorCode::Bracket,
                "find_root_monotone: no sign change on the bracket (f(lo) = " +
                    std::to_string(f_lo) + ", f(hi) = " + std::to_string(f_hi) + ")");
  }

  constexpr int kMaxIterations = 200;
  bool bisect_next = false;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double width = hi - lo;
    if (width <= tol_x) {
      return std::abs(f_lo) <= std::abs(f_hi) ? RootResult{lo, f_lo, it - 1}
                                              : RootResult{hi, f_hi, it - 1};
    }
    double x = 0.5 * (lo + hi);
    if (!bisect_next) {
      const double secant = lo - f_lo * width / (f_hi - f_lo);
      // Keep the trial point strictly inside the bracket.
      const double margin = 1e-3 * width;
      if (std::isfinite(secant)) x = std::clamp(secant, lo + margin, hi - margin);
    }
    const double fx = f(x);
    if (std::abs(fx) <= tol_f) return {x, fx, it};
    if (fx < 0.0) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
      f_hi = fx;
    }
    // Force a bisection whenever a step failed to halve the bracket.
    bisect_next = (hi - lo) > 0.5 * width;
  }
  throw Error(ErrorCode::MaxIter, "find_root_monotone: iteration limit reached");
}

}  // namespace aninorm
