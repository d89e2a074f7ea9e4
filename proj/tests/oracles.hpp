#pragma once

// Independent reference computations. Nothing here calls into the library
// beyond the data types, so a shared bug cannot hide on both sides.

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "aninorm/statespace.hpp"

namespace oracle {

using aninorm::Complex;
using aninorm::CtStateSpace;
using aninorm::DtStateSpace;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

inline MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g;
  MatrixXd X(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) X(i, j) = g(rng);
  return X;
}

// Hurwitz A with abscissa in [-1.0, -0.1].
inline CtStateSpace random_stable_ct(std::mt19937_64& rng, int n, int m, int p) {
  std::uniform_real_distribution<double> margin(0.1, 1.0);
  MatrixXd A = random_matrix(rng, n, n);
  if (n > 0) {
    const double alpha = A.eigenvalues().real().maxCoeff();
    A -= (alpha + margin(rng)) * MatrixXd::Identity(n, n);
  }
  return CtStateSpace(A, random_matrix(rng, n, m), random_matrix(rng, p, n),
                      random_matrix(rng, p, m));
}

// Schur A with radius in [0.3, 0.9].
inline DtStateSpace random_stable_dt(std::mt19937_64& rng, int n, int m, int p) {
  std::uniform_real_distribution<double> radius(0.3, 0.9);
  MatrixXd A = random_matrix(rng, n, n);
  if (n > 0) A *= radius(rng) / A.eigenvalues().cwiseAbs().maxCoeff();
  return DtStateSpace(A, random_matrix(rng, n, m), random_matrix(rng, p, n),
                      random_matrix(rng, p, m));
}

// F(s) = C (sI - A)^{-1} B + D by an explicit inverse.
inline MatrixXcd tf_ct(const CtStateSpace& s, Complex x) {
  const auto n = s.states();
  if (n == 0) return s.D().cast<Complex>();
  const MatrixXcd R = (x * MatrixXcd::Identity(n, n) - s.A().cast<Complex>()).inverse();
  return s.C().cast<Complex>() * R * s.B().cast<Complex>() + s.D().cast<Complex>();
}

// F_T(z) = D + sum_{k>=1} z^k C A^{k-1} B, summed as z C (I - zA)^{-1} B + D.
inline MatrixXcd tf_dt(const DtStateSpace& s, Complex z) {
  const auto n = s.states();
  if (n == 0) return s.D().cast<Complex>();
  const MatrixXcd R = (MatrixXcd::Identity(n, n) - z * s.A().cast<Complex>()).inverse();
  return z * s.C().cast<Complex>() * R * s.B().cast<Complex>() + s.D().cast<Complex>();
}

inline double sigma_max_dt(const DtStateSpace& s, double phi) {
  const MatrixXcd F = tf_dt(s, std::polar(1.0, phi));
  return Eigen::JacobiSVD<MatrixXcd>(F).singularValues()(0);
}

// Dense grid followed by golden-section refinement around the best nodes.
inline double brute_hinf_dt(const DtStateSpace& s, int N = 20000) {
  const double pi = std::acos(-1.0);
  const double h = 2.0 * pi / N;
  std::vector<double> values(N);
  for (int j = 0; j < N; ++j) values[j] = sigma_max_dt(s, -pi + j * h);
  double best = *std::max_element(values.begin(), values.end());
  for (int j = 0; j < N; ++j) {
    const double prev = values[(j + N - 1) % N], next = values[(j + 1) % N];
    if (values[j] < prev || values[j] < next) continue;
    double lo = -pi + (j - 1) * h, hi = -pi + (j + 1) * h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80; ++it) {
      const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
      if (sigma_max_dt(s, a) > sigma_max_dt(s, b)) hi = b; else lo = a;
    }
    best = std::max(best, sigma_max_dt(s, 0.5 * (lo + hi)));
  }
  return best;
}

// ||F_T||_2^2 = ||D||^2 + sum_k ||C A^k B||^2 by summing the impulse response.
inline double impulse_h2_dt(const DtStateSpace& s, int terms = 20000) {
  double total = s.D().squaredNorm();
  MatrixXd AkB = s.B();
  for (int k = 0; k < terms; ++k) {
    const double term = (s.C() * AkB).squaredNorm();
    total += term;
    if (term < 1e-34 * total && k > 50) break;
    AkB = s.A() * AkB;
  }
  return std::sqrt(total);
}

// P = A P A^T + Q through vec(P) = (I - A (x) A)^{-1} vec(Q).
inline MatrixXd kron_dlyap(const MatrixXd& A, const MatrixXd& Q) {
  const auto n = A.rows();
  const MatrixXd K = MatrixXd::Identity(n * n, n * n) - Eigen::kroneckerProduct(A, A);
  const Eigen::VectorXd v =
      K.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n));
  return Eigen::Map<const MatrixXd>(v.data(), n, n);
}

// Scalar family (A,B,C,D) = (-1,1,1,0), T = 1: A_T = 0, B_T = 1/2, C_T = 1,
// D_T = 1/2, F_T(z) = (1 + z)/2. With s = sqrt(1 - q) the Riccati solution is
// R = 2 - 2s, M = 2/(1+s), L = 2(1-s)/(1+s); closed loop (1-s)/(1+s),
// P = 1/(4s), E|w|^2 = 1/s, norm^2 = 1/(1+s), and the mean anisotropy is
// (1/2) ln((1+s)^2 / (4s)). Continuous pair: ct_L = 1 - s, ct_M = 1.
struct ScalarCase {
  double s, q, R, M, L, P, input_variance, norm, aniso, ct_L, ct_M, closed_loop, lag1;
};

inline ScalarCase scalar_from_s(double s) {
  ScalarCase c{};
  c.s = s;
  c.q = 1.0 - s * s;
  c.R = 2.0 - 2.0 * s;
  c.M = 2.0 / (1.0 + s);
  c.L = 2.0 * (1.0 - s) / (1.0 + s);
  c.P = 1.0 / (4.0 * s);
  c.input_variance = 1.0 / s;
  c.norm = 1.0 / std::sqrt(1.0 + s);
  c.aniso = 0.5 * std::log((1.0 + s) * (1.0 + s) / (4.0 * s));
  c.ct_L = 1.0 - s;
  c.ct_M = 1.0;
  c.closed_loop = (1.0 - s) / (1.0 + s);
  // E(w_k w_{k+1}) = (L P Abar + M^2 B) L
  c.lag1 = (c.L * c.P * c.closed_loop + c.M * c.M * 0.5) * c.L;
  return c;
}

// s solves s + 1/s = 4 e^{2a} - 2 on (0, 1].
inline ScalarCase scalar_from_a(double a) {
  const double t = 4.0 * std::exp(2.0 * a) - 2.0;
  return scalar_from_s(2.0 / (t + std::sqrt(t * t - 4.0)));
}

inline CtStateSpace scalar_system() {
  return CtStateSpace(MatrixXd::Constant(1, 1, -1.0), MatrixXd::Constant(1, 1, 1.0),
                      MatrixXd::Constant(1, 1, 1.0), MatrixXd::Zero(1, 1));
}

// E(w_k w_{k+1}^T) for w_k = L x_k + M v_k, x_{k+1} = (A + BL) x_k + B M v_k.
inline MatrixXd worst_case_lag1(const MatrixXd& A, const MatrixXd& B, const MatrixXd& L,
                                const MatrixXd& M) {
  const MatrixXd Abar = A + B * L;
  const MatrixXd P = kron_dlyap(Abar, B * M * M.transpose() * B.transpose());
  return (L * P * Abar.transpose() + M * M.transpose() * B.transpose()) * L.transpose();
}

}  // namespace oracle
