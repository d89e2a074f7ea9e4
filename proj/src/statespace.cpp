#include "aninorm/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "aninorm/error.hpp"
#include "aninorm/kernels.hpp"
#include "aninorm/solvers.hpp"

namespace aninorm {
namespace {

constexpr double kHurwitzMargin = 1e-12;
constexpr double kResolventRcond = 1e-14;

std::string shape(const MatrixXd& X) {
  return std::to_string(X.rows()) + "x" + std::to_string(X.cols());
}

void check_dimensions(const char* what, const MatrixXd& A, const MatrixXd& B,
                      const MatrixXd& C, const MatrixXd& D) {
  const bool ok = A.rows() == A.cols() && B.rows() == A.rows() &&
                  C.cols() == A.rows() && D.rows() == C.rows() &&
                  D.cols() == B.cols();
  if (!ok) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": inconsistent realization A " + shape(A) +
                    ", B " + shape(B) + ", C " + shape(C) + ", D " + shape(D));
  }
  if (B.cols() == 0 || C.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": input and output dimensions must be positive");
  }
  const auto finite = [](const MatrixXd& X) { return X.allFinite(); };
  if (!finite(A) || !finite(B) || !finite(C) || !finite(D)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + ": realization has non-finite entries");
  }
}

}  // namespace

CtStateSpace::CtStateSpace(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  check_dimensions("CtStateSpace", A_, B_, C_, D_);
}

DtStateSpace::DtStateSpace(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  check_dimensions("DtStateSpace", A_, B_, C_, D_);
}

std::vector<Complex> eigenvalues(const MatrixXd& A) {
  std::vector<Complex> out;
  if (A.rows() == 0) return out;
  Eigen::EigenSolver<MatrixXd> solver(A, /*computeEigenvectors=*/false);
  const auto& ev = solver.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

double spectral_radius(const MatrixXd& A) {
  double rho = 0.0;
  for (const Complex& l : eigenvalues(A)) rho = std::max(rho, std::abs(l));
  return rho;
}

double spectral_abscissa(const MatrixXd& A) {
  double alpha = -std::numeric_limits<double>::infinity();
  for (const Complex& l : eigenvalues(A)) alpha = std::max(alpha, l.real());
  return alpha;
}

StabilityReport validate_ct(const CtStateSpace& sys) {
  StabilityReport report;
  report.eigenvalues = eigenvalues(sys.A());
  report.hurwitz = true;
  double min_modulus = std::numeric_limits<double>::infinity();
  for (const Complex& l : report.eigenvalues) {
    report.hurwitz = report.hurwitz && l.real() < -kHurwitzMargin;
    report.rho_A = std::max(report.rho_A, std::abs(l));
    min_modulus = std::min(min_modulus, std::abs(l));
  }
  if (report.eigenvalues.empty()) {
    report.rho_Ainv = 0.0;
  } else if (min_modulus == 0.0 ||
             Eigen::FullPivLU<MatrixXd>(sys.A()).rank() < sys.states()) {
    report.rho_Ainv = std::numeric_limits<double>::infinity();
  } else {
    report.rho_Ainv = 1.0 / min_modulus;
  }
  report.fast_bound = report.rho_A > 0.0
                          ? 1.0 / report.rho_A
                          : std::numeric_limits<double>::infinity();
  report.slow_bound = report.rho_Ainv;
  return report;
}

void require_hurwitz(const CtStateSpace& sys) {
  const double alpha = spectral_abscissa(sys.A());
  if (sys.states() > 0 && !(alpha < -kHurwitzMargin)) {
    throw Error(ErrorCode::NotHurwitz,
                "A is not Hurwitz: spectral abscissa " + std::to_string(alpha));
  }
}

void require_schur(const DtStateSpace& sys) {
  const double rho = spectral_radius(sys.A());
  if (!(rho < 1.0 - 1e-12)) {
    throw Error(ErrorCode::NotSchur,
                "A_T is not Schur stable: spectral radius " + std::to_string(rho));
  }
}

MatrixXcd eval_tf_ct(const CtStateSpace& sys, Complex s) {
  const Index n = sys.states();
  MatrixXcd F = sys.D().cast<Complex>();
  if (n == 0) return F;
  MatrixXcd shifted = -sys.A().cast<Complex>();
  shifted.diagonal().array() += s;
  Eigen::PartialPivLU<MatrixXcd> lu(shifted);
  if (!(lu.rcond() > kResolventRcond)) {
    throw Error(ErrorCode::ResolventSingular,
                "sI - A is numerically singular at the requested point");
  }
  F.noalias() += sys.C().cast<Complex>() * lu.solve(sys.B().cast<Complex>());
  return F;
}

MatrixXcd eval_tf_dt(const DtStateSpace& sys, Complex z) {
  const Index n = sys.states();
  MatrixXcd F = sys.D().cast<Complex>();
  if (n == 0) return F;
  MatrixXcd shifted = -z * sys.A().cast<Complex>();
  shifted.diagonal().array() += 1.0;
  Eigen::PartialPivLU<MatrixXcd> lu(shifted);
  if (!(lu.rcond() > kResolventRcond)) {
    throw Error(ErrorCode::ResolventSingular,
                "I - zA_T is numerically singular at the requested point");
  }
  F.noalias() += z * sys.C().cast<Complex>() * lu.solve(sys.B().cast<Complex>());
  return F;
}

Eigen::VectorXd singular_values_dt(const DtStateSpace& sys, double phi) {
  const MatrixXcd F = eval_tf_dt(sys, std::polar(1.0, phi));
  return Eigen::JacobiSVD<MatrixXcd>(F).singularValues();
}

double h2_dt(const DtStateSpace& sys) {
  double sum = sys.D().squaredNorm();
  if (sys.states() > 0) {
    const MatrixXd Q =
        solve_dlyap(sys.A().transpose(), sys.C().transpose() * sys.C());
    sum += (sys.B().transpose() * Q * sys.B()).trace();
  }
  return std::sqrt(std::max(sum, 0.0));
}

double h2_ct(const CtStateSpace& sys) {
  if (!(sys.D().array() == 0.0).all()) {
    throw Error(ErrorCode::NotStrictlyProper,
                "the H2 norm is infinite unless D = 0");
  }
  if (sys.states() == 0) return 0.0;
  const MatrixXd Q = solve_clyap(sys.A(), sys.C().transpose() * sys.C());
  const double sum = (sys.B().transpose() * Q * sys.B()).trace();
  return std::sqrt(std::max(sum, 0.0));
}

double hinf_dt(const DtStateSpace& sys, const HinfOptions& options) {
  require_schur(sys);
  const double d_norm =
      Eigen::JacobiSVD<MatrixXd>(sys.D()).singularValues()(0);
  if (sys.states() == 0) return d_norm;

  // Lower bound from a grid that contains both phi = 0 and phi = -pi.
  const std::size_t nodes = static_cast<std::size_t>(options.seed_nodes);
  const auto peaks = evaluate_nodes(
      nodes, 1,
      [&](std::size_t j, double* out) {
        const double phi = -std::numbers::pi +
                           2.0 * std::numbers::pi * static_cast<double>(j) /
                               static_cast<double>(nodes);
        out[0] = singular_values_dt(sys, phi)(0);
      },
      Execution::Parallel);
  const double sigma_hat = *std::max_element(peaks.begin(), peaks.end());
  if (sigma_hat == 0.0) return 0.0;

  const auto admissible = [&](double gamma) {
    return dare_q(sys, 1.0 / (gamma * gamma)).is_admissible();
  };

  double lo = sigma_hat;
  double hi = 2.0 * sigma_hat + d_norm;
  for (int k = 0; k < 60 && !admissible(hi); ++k) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 0.25 * options.relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace aninorm
