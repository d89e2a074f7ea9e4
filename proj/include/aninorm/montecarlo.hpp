#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aninorm/bilinear.hpp"
#include "aninorm/kernels.hpp"
#include "aninorm/norm.hpp"
#include "aninorm/statespace.hpp"

namespace aninorm {

struct SimConfig {
  long long steps = 1'000'000;  // per replica, burn-in included
  long long burn_in = 10'000;
  std::uint64_t seed = 42;
  double em_dt = 1e-3;  // seconds, Euler-Maruyama only
  int replicas = 8;
  Execution exec = Execution::Parallel;
};

/// Mean across replicas with a 95% normal-approximation half-width.
struct Estimate {
  double value = 0.0;
  double half_width = 0.0;

  bool covers(double x) const { return std::abs(x - value) <= half_width; }
};

struct SimStats {
  Estimate var_input;   // E|w|^2
  Estimate var_output;  // E|z|^2
  Estimate empirical_gain;
  MatrixXd state_cov, state_cov_hw;
  // Discrete runs: covariance of w_k - L x_k (Gamma). Euler-Maruyama runs:
  // quadratic-variation rate of the input, d<W>/dt.
  MatrixXd innov_cov, innov_cov_hw;
  // E(w_k w_{k+1}^T); one Euler-Maruyama step apart for the filtered input
  // W_T in continuous runs.
  MatrixXd autocov_lag1, autocov_lag1_hw;
  std::vector<double> replica_var_input;
  std::vector<double> replica_var_output;
  long long samples_per_replica = 0;
};

/// Exact simulation of x_{k+1} = A_T x_k + B_T w_k, z_k = C_T x_k + D_T w_k
/// driven either by white noise (no filter) or by the worst-case input
/// w_k = L_T x_k + M_T v_k.
SimStats simulate_dt(const DtStateSpace& sys, const std::optional<WorstCaseFilter>& filter,
                     const SimConfig& cfg = {});

/// Euler-Maruyama run of dX = AX dt + B dW, dZ = CX dt + D dW with
/// dW = ct_L X dt + ct_M dV (or dW = dV), observed through the low-pass
/// states dW_T = -Omega W_T dt + sqrt(2 Omega) dW and likewise Z_T.
SimStats simulate_ct_em(const CtStateSpace& sys, const TimeScale& ts,
                        const std::optional<WorstCaseFilter>& filter,
                        const SimConfig& cfg = {});

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double deviation = 0.0;  // |estimate - target|, or a Frobenius distance
  double bound = 0.0;      // CI half-width it is compared with
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool wide_interval = false;  // CIs too wide for the checks to be informative
  SimStats stats;

  bool passed() const;
};

ValidationReport validate_solution(const CtStateSpace& sys, const TimeScale& ts,
                                   const AnisotropicNormSolution& sol,
                                   const WorstCaseFilter& wc, const SimConfig& cfg = {});

}  // namespace aninorm
