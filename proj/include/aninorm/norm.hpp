#pragma once

#include <utility>
#include <vector>

#include "aninorm/bilinear.hpp"
#include "aninorm/kernels.hpp"
#include "aninorm/solvers.hpp"
#include "aninorm/spectral.hpp"
#include "aninorm/statespace.hpp"

namespace aninorm {

struct QEvaluation {
  double aniso = 0.0;
  double gain = 0.0;
  DareOutcome outcome;  // always admissible
  MatrixXd P;  // Gramian of (A_T + B_T L_T, B_T M_T)
  double input_variance = 0.0;
};

/// Mean anisotropy and norm value of the worst-case input for a given q.
/// Throws Error(InadmissibleQ) when the Riccati equation has no admissible
/// solution at q.
QEvaluation anisotropy_and_gain_of_q(const DtStateSpace& sys, double q);

struct NormDiagnostics {
  double hinf = 0.0;
  double q_hi = 0.0;
  int bracket_retries = 0;
  int root_iterations = 0;
  double riccati_residual = 0.0;
  // (q, A(q)) pairs evaluated by the root finder, in q order.
  std::vector<std::pair<double, double>> samples;
  bool monotone = true;
};

struct AnisotropicNormSolution {
  double q = 0.0;  // 0 marks the a = 0 sentinel
  MatrixXd R_T, L_T, M_T, P_T;
  double norm_value = 0.0;
  double achieved_anisotropy = 0.0;
  double input_variance = 0.0;
  NormDiagnostics diagnostics;

  bool is_sentinel() const { return q == 0.0; }
};

/// True when Lambda_T(phi) is a constant scalar matrix on a 64-node grid.
bool is_round(const DtStateSpace& sys);

/// (T, a)-anisotropic norm of a stable continuous system.
AnisotropicNormSolution anisotropic_norm(const CtStateSpace& sys, const TimeScale& ts,
                                         double a);

/// a-anisotropic norm of a Schur-stable discrete system.
AnisotropicNormSolution anisotropic_norm_dt(const DtStateSpace& sys, double a);

struct WorstCaseFilter {
  MatrixXd dt_closed_loop;  // A_T + B_T L_T
  MatrixXd dt_input_gain;   // B_T M_T
  MatrixXd dt_L, dt_M;
  MatrixXd ct_L, ct_M;
  MatrixXd ct_closed_loop;  // A + B ct_L
  MatrixXd ct_input_gain;   // B ct_M

  /// Shaping filter G_T(z) = z L_T (I - z(A_T + B_T L_T))^{-1} B_T M_T + M_T.
  DtStateSpace discrete() const;
  /// Shaping filter G(s) = ct_L (sI - A - B ct_L)^{-1} B ct_M + ct_M.
  CtStateSpace continuous() const;
};

WorstCaseFilter worst_case_filter(const CtStateSpace& sys, const TimeScale& ts,
                                  const AnisotropicNormSolution& sol);

/// max over grid nodes of ||Theta^* Theta - I||_F with Theta = [sqrt(q) F_T;
/// G_T^{-1}], folded with the relative residual of E|w|^2 = q E|z|^2 + m.
double isometry_residual(const DtStateSpace& sys, const AnisotropicNormSolution& sol,
                         const PhiGrid& grid = PhiGrid());

struct SweepPoint {
  double a = 0.0;
  double norm = 0.0;
  double q = 0.0;
};

std::vector<SweepPoint> sweep(const CtStateSpace& sys, const TimeScale& ts,
                              const std::vector<double>& a_grid,
                              Execution exec = Execution::Parallel);

}  // namespace aninorm
