#include "aninorm/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "aninorm/error.hpp"

namespace aninorm {
namespace {

double spd_logdet(const MatrixXd& X) {
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<MatrixXd>(X, Eigen::EigenvaluesOnly).eigenvalues();
  return ev.array().log().sum();
}

// Worst-case shaping filter in generating-function form.
DtStateSpace worst_case_dt(const DtStateSpace& sys, const MatrixXd& L, const MatrixXd& M) {
  return DtStateSpace(sys.A() + sys.B() * L, sys.B() * M, L, M);
}

AnisotropicNormSolution sentinel(const DtStateSpace& sys) {
  const Index n = sys.states();
  const Index m = sys.inputs();
  AnisotropicNormSolution sol;
  sol.q = 0.0;
  sol.R_T = MatrixXd::Zero(n, n);
  sol.L_T = MatrixXd::Zero(m, n);
  sol.M_T = MatrixXd::Identity(m, m);
  sol.P_T = n > 0 ? solve_dlyap(sys.A(), sys.B() * sys.B().transpose()) : MatrixXd(0, 0);
  sol.norm_value = h2_dt(sys) / std::sqrt(static_cast<double>(m));
  sol.achieved_anisotropy = 0.0;
  sol.input_variance = static_cast<double>(m);
  return sol;
}

}  // namespace

QEvaluation anisotropy_and_gain_of_q(const DtStateSpace& sys, double q) {
  DareOutcome outcome = dare_q(sys, q);
  if (!outcome.is_admissible()) {
    throw Error(ErrorCode::InadmissibleQ,
                "q = " + std::to_string(q) + " is inadmissible (" +
                    std::string(to_string(outcome.reason())) + ")");
  }
  const MatrixXd& L = outcome.L();
  const MatrixXd& M = outcome.M();
  const MatrixXd M2 = M * M;
  const double m = static_cast<double>(sys.inputs());

  MatrixXd P(0, 0);
  double input_variance = M2.trace();
  if (sys.states() > 0) {
    const MatrixXd BM = sys.B() * M;
    P = solve_dlyap(sys.A() + sys.B() * L, BM * BM.transpose());
    input_variance += (L * P * L.transpose()).trace();
  }
  const double gain = std::sqrt(std::max((input_variance - m) / (q * input_variance), 0.0));
  // -1/2 ln det(m M^2 / input_variance)
  const double aniso = -0.5 * (m * std::log(m / input_variance) + 2.0 * spd_logdet(M));
  return QEvaluation{aniso, gain, std::move(outcome), std::move(P), input_variance};
}

bool is_round(const DtStateSpace& sys) {
  constexpr std::size_t kNodes = 64;
  const PhiGrid grid(kNodes, Execution::Serial);
  const double m = static_cast<double>(sys.inputs());
  std::vector<MatrixXcd> lambdas;
  double mean = 0.0;
  for (std::size_t j = 0; j < kNodes; ++j) {
    lambdas.push_back(gram_dt(sys, grid.node(j), Side::LeftFstarF));
    mean += lambdas.back().trace().real() / m;
  }
  mean /= static_cast<double>(kNodes);
  const MatrixXcd I = MatrixXcd::Identity(sys.inputs(), sys.inputs());
  return std::all_of(lambdas.begin(), lambdas.end(), [&](const MatrixXcd& Lambda) {
    return (Lambda - mean * I).norm() <= 1e-10 * (1.0 + mean);
  });
}

AnisotropicNormSolution anisotropic_norm_dt(const DtStateSpace& sys, double a) {
  if (!(a >= 0.0) || !std::isfinite(a)) {
    throw Error(ErrorCode::InvalidArgument, "anisotropy level a must be finite and >= 0");
  }
  require_schur(sys);
  if (a == 0.0) return sentinel(sys);
  if (is_round(sys)) {
    throw Error(ErrorCode::NonroundRequired,
                "the system is round: its gain does not depend on the input density");
  }

  NormDiagnostics diag;
  // The bracket lives within a relative 1e-6 of 1/hinf^2, and large levels
  // push it much closer, so the boundary has to be known to full precision.
  HinfOptions hinf_options;
  hinf_options.relative_tolerance = 1e-14;
  diag.hinf = hinf_dt(sys, hinf_options);
  const double q_max = 1.0 / (diag.hinf * diag.hinf);
  const double q_lo = 1e-12 * q_max;
  double q_hi = 0.999999 * q_max;

  // A(q) grows without bound towards q_max, but in floating point it
  // saturates; push q_hi closer to the boundary if a is not yet reached.
  double best = anisotropy_and_gain_of_q(sys, q_hi).aniso;
  while (best < a) {
    if (diag.bracket_retries == 40) {
      throw Error(ErrorCode::Bracket,
                  "mean anisotropy saturates at " + std::to_string(best) +
                      " below the requested level " + std::to_string(a));
    }
    ++diag.bracket_retries;
    const double trial = q_max - 0.5 * (q_max - q_hi);
    double value = 0.0;
    try {
      value = anisotropy_and_gain_of_q(sys, trial).aniso;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InadmissibleQ) throw;
      throw Error(ErrorCode::Bracket,
                  "mean anisotropy reaches at most " + std::to_string(best) +
                      " on the admissible range; requested " + std::to_string(a));
    }
    q_hi = trial;
    best = std::max(best, value);
  }
  diag.q_hi = q_hi;

  std::vector<std::pair<double, double>>& samples = diag.samples;
  const auto f = [&](double q) {
    const double value = anisotropy_and_gain_of_q(sys, q).aniso;
    samples.emplace_back(q, value);
    return value - a;
  };
  const RootResult root = find_root_monotone(f, q_lo, q_hi, 1e-9, 1e-14 * q_hi);
  diag.root_iterations = root.iterations;
  std::sort(samples.begin(), samples.end());
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (samples[k].second < samples[k - 1].second - 1e-12) diag.monotone = false;
  }

  QEvaluation eval = anisotropy_and_gain_of_q(sys, root.x);
  diag.riccati_residual = dare_residual(sys, root.x, eval.outcome);

  AnisotropicNormSolution sol;
  sol.q = root.x;
  sol.R_T = eval.outcome.R();
  sol.L_T = eval.outcome.L();
  sol.M_T = eval.outcome.M();
  sol.P_T = std::move(eval.P);
  sol.norm_value = eval.gain;
  sol.achieved_anisotropy = eval.aniso;
  sol.input_variance = eval.input_variance;
  sol.diagnostics = std::move(diag);
  return sol;
}

AnisotropicNormSolution anisotropic_norm(const CtStateSpace& sys, const TimeScale& ts,
                                         double a) {
  require_hurwitz(sys);
  return anisotropic_norm_dt(to_discrete(sys, ts), a);
}

DtStateSpace WorstCaseFilter::discrete() const {
  return DtStateSpace(dt_closed_loop, dt_input_gain, dt_L, dt_M);
}

CtStateSpace WorstCaseFilter::continuous() const {
  return CtStateSpace(ct_closed_loop, ct_input_gain, ct_L, ct_M);
}

WorstCaseFilter worst_case_filter(const CtStateSpace& sys, const TimeScale& ts,
                                  const AnisotropicNormSolution& sol) {
  require_hurwitz(sys);
  const DtStateSpace dt = to_discrete(sys, ts);
  const Index n = sys.states();
  const Index m = sys.inputs();
  if (sol.L_T.rows() != m || sol.L_T.cols() != n || sol.M_T.rows() != m ||
      sol.M_T.cols() != m) {
    throw Error(ErrorCode::DimensionMismatch, "worst_case_filter: solution does not fit the system");
  }

  WorstCaseFilter wc;
  wc.dt_L = sol.L_T;
  wc.dt_M = sol.M_T;
  wc.dt_closed_loop = dt.A() + dt.B() * sol.L_T;
  wc.dt_input_gain = dt.B() * sol.M_T;

  const MatrixXd I = MatrixXd::Identity(n, n);
  if (n > 0) {
    const Eigen::PartialPivLU<MatrixXd> lu(I + wc.dt_closed_loop);
    if (!(lu.rcond() > 1e-14)) {
      throw Error(ErrorCode::SingularShift,
                  "worst_case_filter: I + A_T + B_T L_T is numerically singular");
    }
    const MatrixXd ct_Lt = lu.transpose().solve(sol.L_T.transpose());
    wc.ct_L = ct_Lt.transpose();
    wc.ct_closed_loop = sys.A() + sys.B() * wc.ct_L;
    const MatrixXd expected = ts.omega() * lu.solve(wc.dt_closed_loop - I);
    if ((wc.ct_closed_loop - expected).norm() > 1e-9 * (1.0 + expected.norm())) {
      throw Error(ErrorCode::Inconsistent,
                  "worst_case_filter: A + B L disagrees with the image of the discrete closed loop");
    }
    const double alpha = spectral_abscissa(wc.ct_closed_loop);
    if (!(alpha < -1e-12)) {
      throw Error(ErrorCode::NotHurwitz, "worst_case_filter: A + B L is not Hurwitz");
    }
  } else {
    wc.ct_L = MatrixXd::Zero(m, 0);
    wc.ct_closed_loop = MatrixXd(0, 0);
  }
  wc.ct_M = (MatrixXd::Identity(m, m) - wc.ct_L * dt.B()) * sol.M_T;
  wc.ct_input_gain = sys.B() * wc.ct_M;
  return wc;
}

double isometry_residual(const DtStateSpace& sys, const AnisotropicNormSolution& sol,
                         const PhiGrid& grid) {
  if (sol.is_sentinel()) {
    throw Error(ErrorCode::InvalidArgument,
                "isometry_residual: undefined for the a = 0 solution (q = 0)");
  }
  const Index n = sys.states();
  const Index m = sys.inputs();
  const Index p = sys.outputs();
  const double rq = std::sqrt(sol.q);
  const MatrixXd Minv = sol.M_T.inverse();

  // Theta = [sqrt(q) F_T; G_T^{-1}] sharing the state of F_T.
  MatrixXd C(p + m, n), D(p + m, m);
  C << rq * sys.C(), -Minv * sol.L_T;
  D << rq * sys.D(), Minv;
  const DtStateSpace theta(sys.A(), sys.B(), C, D);
  const DtStateSpace filter = worst_case_dt(sys, sol.L_T, sol.M_T);
  const MatrixXcd I = MatrixXcd::Identity(m, m);

  const auto residuals = evaluate_nodes(
      grid.size(), 1,
      [&](std::size_t j, double* out) {
        out[0] = (gram_dt(theta, grid.node(j), Side::LeftFstarF) - I).norm();
      },
      grid.execution());
  const double worst = *std::max_element(residuals.begin(), residuals.end());

  const Variances v = variances_dt(sys, SpectralDensity(RationalDt{filter}), grid);
  const double variance_gap =
      std::abs(v.input - sol.q * v.output - static_cast<double>(m)) / v.input;
  return std::max(worst, variance_gap);
}

std::vector<SweepPoint> sweep(const CtStateSpace& sys, const TimeScale& ts,
                              const std::vector<double>& a_grid, Execution exec) {
  for (std::size_t k = 0; k < a_grid.size(); ++k) {
    if (!(a_grid[k] >= 0.0) || (k > 0 && !(a_grid[k] > a_grid[k - 1]))) {
      throw Error(ErrorCode::InvalidArgument,
                  "sweep: anisotropy levels must be nonnegative and increasing");
    }
  }
  require_hurwitz(sys);
  const DtStateSpace dt = to_discrete(sys, ts);
  const auto buffer = evaluate_nodes(
      a_grid.size(), 2,
      [&](std::size_t k, double* out) {
        const AnisotropicNormSolution sol = anisotropic_norm_dt(dt, a_grid[k]);
        out[0] = sol.norm_value;
        out[1] = sol.q;
      },
      exec);
  std::vector<SweepPoint> points;
  for (std::size_t k = 0; k < a_grid.size(); ++k) {
    points.push_back({a_grid[k], buffer[2 * k], buffer[2 * k + 1]});
  }
  return points;
}

}  // namespace aninorm
