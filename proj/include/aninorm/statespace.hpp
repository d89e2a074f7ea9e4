#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace aninorm {

using Complex = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

/// Continuous-time realization F(s) = C (sI - A)^{-1} B + D with n states,
/// m inputs and p outputs. n = 0 (a static gain) is allowed.
class CtStateSpace {
 public:
  CtStateSpace(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D);

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& C() const { return C_; }
  const MatrixXd& D() const { return D_; }

  Index states() const { return A_.rows(); }
  Index inputs() const { return B_.cols(); }
  Index outputs() const { return C_.rows(); }

 private:
  MatrixXd A_, B_, C_, D_;
};

/// Discrete-time realization in generating-function form
/// F_T(z) = z C_T (I - z A_T)^{-1} B_T + D_T, i.e. the recursion
/// x_{k+1} = A_T x_k + B_T w_k, y_k = C_T x_k + D_T w_k.
class DtStateSpace {
 public:
  DtStateSpace(MatrixXd A, MatrixXd B, MatrixXd C, MatrixXd D);

  const MatrixXd& A() const { return A_; }
  const MatrixXd& B() const { return B_; }
  const MatrixXd& C() const { return C_; }
  const MatrixXd& D() const { return D_; }

  Index states() const { return A_.rows(); }
  Index inputs() const { return B_.cols(); }
  Index outputs() const { return C_.rows(); }

 private:
  MatrixXd A_, B_, C_, D_;
};

struct StabilityReport {
  std::vector<Complex> eigenvalues;
  bool hurwitz = false;
  double rho_A = 0.0;
  double rho_Ainv = 0.0;  // +inf for singular A
  // Extremes of the transient time scales {1/|lambda|}.
  double fast_bound = 0.0;  // 1 / rho(A)
  double slow_bound = 0.0;  // rho(A^{-1})
};

StabilityReport validate_ct(const CtStateSpace& sys);

/// Throws Error(NotHurwitz) unless every eigenvalue of A has real part
/// below -1e-12.
void require_hurwitz(const CtStateSpace& sys);

/// Throws Error(NotSchur) unless rho(A_T) < 1 - 1e-12.
void require_schur(const DtStateSpace& sys);

std::vector<Complex> eigenvalues(const MatrixXd& A);
double spectral_radius(const MatrixXd& A);
double spectral_abscissa(const MatrixXd& A);

MatrixXcd eval_tf_ct(const CtStateSpace& sys, Complex s);
MatrixXcd eval_tf_dt(const DtStateSpace& sys, Complex z);

/// Singular values of F_T(e^{i phi}), largest first.
Eigen::VectorXd singular_values_dt(const DtStateSpace& sys, double phi);

double h2_dt(const DtStateSpace& sys);
double h2_ct(const CtStateSpace& sys);

struct HinfOptions {
  int seed_nodes = 512;
  double relative_tolerance = 1e-8;
};

/// H-infinity norm on the unit circle, found by bisecting on the
/// admissibility of the q-parameterized Riccati equation.
double hinf_dt(const DtStateSpace& sys, const HinfOptions& options = {});

}  // namespace aninorm
