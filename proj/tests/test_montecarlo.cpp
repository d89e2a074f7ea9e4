#include <gtest/gtest.h>

#include "aninorm/bilinear.hpp"
#include "aninorm/error.hpp"
#include "aninorm/montecarlo.hpp"
#include "aninorm/norm.hpp"
#include "oracles.hpp"

using namespace aninorm;

namespace {

struct ScalarWorstCase {
  CtStateSpace sys = oracle::scalar_system();
  TimeScale ts{1.0};
  AnisotropicNormSolution sol;
  WorstCaseFilter wc;
  ScalarWorstCase() {
    sol = anisotropic_norm(sys, ts, 0.5 * std::log(9.0 / 8.0));
    wc = worst_case_filter(sys, ts, sol);
  }
};

SimConfig small(long long steps, Execution exec = Execution::Parallel) {
  SimConfig cfg;
  cfg.steps = steps;
  cfg.burn_in = 1000;
  cfg.exec = exec;
  return cfg;
}

}  // namespace

TEST(MonteCarlo, ReproducibleForFixedSeed) {
  const ScalarWorstCase w;
  const DtStateSpace d = to_discrete(w.sys, w.ts);
  const SimStats a = simulate_dt(d, w.wc, small(20000));
  const SimStats b = simulate_dt(d, w.wc, small(20000, Execution::Serial));
  EXPECT_EQ(a.var_input.value, b.var_input.value);
  EXPECT_EQ(a.var_output.value, b.var_output.value);
  EXPECT_EQ(a.replica_var_input, b.replica_var_input);
  SimConfig other = small(20000);
  other.seed = 43;
  EXPECT_NE(simulate_dt(d, w.wc, other).var_input.value, a.var_input.value);
}

TEST(MonteCarlo, ScalarWorstCaseClosure) {
  const ScalarWorstCase w;
  const DtStateSpace d = to_discrete(w.sys, w.ts);
  const SimStats s = simulate_dt(d, w.wc);
  EXPECT_TRUE(s.var_input.covers(2.0)) << s.var_input.value << " +- " << s.var_input.half_width;
  EXPECT_TRUE(s.empirical_gain.covers(std::sqrt(2.0 / 3.0)));
  EXPECT_LE(std::abs(s.autocov_lag1(0, 0) - 2.0 / 3.0), s.autocov_lag1_hw(0, 0));
  EXPECT_LE(std::abs(s.innov_cov(0, 0) - 16.0 / 9.0), s.innov_cov_hw(0, 0));
  EXPECT_LE(std::abs(s.state_cov(0, 0) - 0.5), s.state_cov_hw(0, 0));
  EXPECT_EQ(s.samples_per_replica, 1'000'000 - 10'000);
}

TEST(MonteCarlo, IntervalsShrinkWithSampleSize) {
  const ScalarWorstCase w;
  const DtStateSpace d = to_discrete(w.sys, w.ts);
  const double wide = simulate_dt(d, w.wc, small(25000)).var_input.half_width;
  const double narrow = simulate_dt(d, w.wc, small(400000)).var_input.half_width;
  // 16x the samples: about a quarter of the width.
  EXPECT_LT(narrow, 0.5 * wide);
  EXPECT_GT(narrow, 0.1 * wide);
}

TEST(MonteCarlo, WhiteInputEulerMaruyama) {
  // Filtered white input through F(s) = 1/(s+1) at T = 1: RMS gain
  // (1/sqrt(m)) ||F_T||_2 = sqrt(1/2).
  const CtStateSpace sys = oracle::scalar_system();
  SimConfig cfg;
  cfg.steps = 2'000'000;
  cfg.burn_in = 20'000;
  const SimStats s = simulate_ct_em(sys, TimeScale(1.0), std::nullopt, cfg);
  EXPECT_NEAR(s.empirical_gain.value, std::sqrt(0.5), 0.02 * std::sqrt(0.5));
}

TEST(MonteCarlo, Guards) {
  const CtStateSpace sys = oracle::scalar_system();
  SimConfig cfg = small(5000);
  try {
    simulate_ct_em(sys, TimeScale(1e-3), std::nullopt, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
  }
  const DtStateSpace unstable(MatrixXd::Constant(1, 1, 1.5), MatrixXd::Ones(1, 1),
                              MatrixXd::Ones(1, 1), MatrixXd::Zero(1, 1));
  try {
    simulate_dt(unstable, std::nullopt, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnstableSystem);
  }
}

TEST(MonteCarlo, ValidationReportOnScalarCase) {
  const ScalarWorstCase w;
  const ValidationReport r = validate_solution(w.sys, w.ts, w.sol, w.wc);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.wide_interval);
  EXPECT_EQ(r.checks.size(), 4u);
}
