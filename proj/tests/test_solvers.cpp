#include <gtest/gtest.h>

#include <random>

#include "aninorm/bilinear.hpp"
#include "aninorm/error.hpp"
#include "aninorm/solvers.hpp"
#include "oracles.hpp"

using namespace aninorm;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no aninorm::Error thrown";
  return ErrorCode::InvalidArgument;
}

DtStateSpace scalar_dt() { return to_discrete(oracle::scalar_system(), TimeScale(1.0)); }

}  // namespace

TEST(Dlyap, MatchesKroneckerSolve) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 8;
    const DtStateSpace s = oracle::random_stable_dt(rng, n, 2, 1);
    const MatrixXd Q = s.B() * s.B().transpose();
    const MatrixXd P = solve_dlyap(s.A(), Q);
    const MatrixXd ref = oracle::kron_dlyap(s.A(), Q);
    EXPECT_LE((P - ref).norm(), 1e-10 * (1.0 + ref.norm())) << "n = " << n;
    EXPECT_LE((P - P.transpose()).norm(), 0.0);
  }
}

TEST(Dlyap, ScalarClosedForm) {
  // p = a^2 p + q  =>  p = q / (1 - a^2)
  const MatrixXd P = solve_dlyap(MatrixXd::Constant(1, 1, 0.5), MatrixXd::Constant(1, 1, 3.0));
  EXPECT_NEAR(P(0, 0), 4.0, 1e-14);
}

TEST(Dlyap, RejectsUnstable) {
  EXPECT_EQ(code_of([] { solve_dlyap(MatrixXd::Constant(1, 1, 1.0), MatrixXd::Ones(1, 1)); }),
            ErrorCode::SpectralRadius);
}

TEST(Clyap, ResidualAndCap) {
  std::mt19937_64 rng(8);
  const CtStateSpace s = oracle::random_stable_ct(rng, 6, 2, 2);
  const MatrixXd Q = s.C().transpose() * s.C();
  const MatrixXd X = solve_clyap(s.A(), Q);
  EXPECT_LE((s.A().transpose() * X + X * s.A() + Q).norm(), 1e-10 * (1.0 + X.norm()));
  EXPECT_EQ(code_of([] { solve_clyap(-MatrixXd::Identity(65, 65), MatrixXd::Identity(65, 65)); }),
            ErrorCode::TooLarge);
  EXPECT_EQ(code_of([] { solve_clyap(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2)); }),
            ErrorCode::SpectralAbscissa);
}

TEST(Dare, ScalarClosedFormOverQ) {
  const DtStateSpace s = scalar_dt();
  for (const double q : {0.1, 0.5, 0.75, 0.9, 0.99, 0.9999}) {
    const auto ref = oracle::scalar_from_s(std::sqrt(1.0 - q));
    const DareOutcome out = dare_q(s, q);
    ASSERT_TRUE(out.is_admissible()) << q;
    EXPECT_NEAR(out.R()(0, 0), ref.R, 1e-11) << q;
    EXPECT_NEAR(out.M()(0, 0), ref.M, 1e-11) << q;
    EXPECT_NEAR(out.L()(0, 0), ref.L, 1e-11) << q;
    EXPECT_NEAR(out.closed_loop_radius(), ref.closed_loop, 1e-11) << q;
  }
}

TEST(Dare, InadmissibleBeyondBoundary) {
  const DtStateSpace s = scalar_dt();  // ||F_T||_inf = 1
  for (const double q : {1.0, 1.01, 2.0, 50.0}) {
    const DareOutcome out = dare_q(s, q);
    EXPECT_FALSE(out.is_admissible()) << q;
    EXPECT_EQ(code_of([&] { (void)out.R(); }), ErrorCode::InadmissibleQ);
  }
}

// Property: the doubling solver and the plain fixed-point iteration land on
// the same stabilizing solution, and the Riccati residual is small.
TEST(Dare, MethodsAgreeOnRandomSystems) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const DtStateSpace s = oracle::random_stable_dt(rng, 1 + trial % 5, 1 + trial % 3, 2);
    const double h = oracle::brute_hinf_dt(s, 4000);
    const double q = 0.7 / (h * h);
    const DareOutcome fast = dare_q(s, q);
    DareOptions slow_options;
    slow_options.method = DareMethod::FixedPoint;
    const DareOutcome slow = dare_q(s, q, slow_options);
    ASSERT_TRUE(fast.is_admissible());
    ASSERT_TRUE(slow.is_admissible());
    EXPECT_LE((fast.R() - slow.R()).norm(), 1e-9 * (1.0 + slow.R().norm()));
    EXPECT_LE(dare_residual(s, q, fast), 1e-10 * (1.0 + fast.R().norm()));
    EXPECT_LT(fast.closed_loop_radius(), 1.0);
    // Ric2 and Ric3 by direct evaluation.
    const MatrixXd& M = fast.M();
    const MatrixXd Phi = MatrixXd::Identity(s.inputs(), s.inputs()) -
                         q * s.D().transpose() * s.D() - s.B().transpose() * fast.R() * s.B();
    EXPECT_LE((M * Phi * M - MatrixXd::Identity(s.inputs(), s.inputs())).norm(), 1e-10);
    const MatrixXd L = M * M * (s.B().transpose() * fast.R() * s.A() + q * s.D().transpose() * s.C());
    EXPECT_LE((L - fast.L()).norm(), 1e-10 * (1.0 + L.norm()));
  }
}

TEST(Dare, AdmissibilitySwitchesAtHinf) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 8; ++trial) {
    const DtStateSpace s = oracle::random_stable_dt(rng, 3, 2, 2);
    const double h = oracle::brute_hinf_dt(s);
    EXPECT_TRUE(dare_q(s, 0.999 / (h * h)).is_admissible());
    EXPECT_FALSE(dare_q(s, 1.001 / (h * h)).is_admissible());
  }
}

TEST(RootFinder, LinearFunction) {
  const RootResult r = find_root_monotone([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-12, 0.0);
  EXPECT_NEAR(r.x, 1.0, 1e-12);
}

TEST(RootFinder, IteratesStayInsideBracket) {
  std::vector<double> seen;
  const auto f = [&](double x) {
    seen.push_back(x);
    return std::expm1(40.0 * (x - 0.2));
  };
  const RootResult r = find_root_monotone(f, 0.0, 1.0, 1e-13, 1e-15);
  EXPECT_NEAR(r.x, 0.2, 1e-12);
  for (std::size_t k = 2; k < seen.size(); ++k) {  // first two are the endpoints
    EXPECT_GT(seen[k], 0.0);
    EXPECT_LT(seen[k], 1.0);
  }
  // Deterministic for fixed inputs.
  const RootResult again = find_root_monotone(f, 0.0, 1.0, 1e-13, 1e-15);
  EXPECT_EQ(r.x, again.x);
  EXPECT_EQ(r.iterations, again.iterations);
}

TEST(RootFinder, Errors) {
  EXPECT_EQ(code_of([] { find_root_monotone([](double x) { return x + 1.0; }, 0.0, 1.0, 1e-12, 0.0); }),
            ErrorCode::Bracket);
  EXPECT_EQ(code_of([] { find_root_monotone([](double x) { return x - 5.0; }, 0.0, 1.0, 1e-12, 0.0); }),
            ErrorCode::Bracket);
  // A jump never meets tol_f and the bracket cannot shrink below one ulp.
  EXPECT_EQ(code_of([] {
              find_root_monotone([](double x) { return x < 0.3 ? -1.0 : 1.0; }, 0.0, 1.0, 0.5, 0.0);
            }),
            ErrorCode::MaxIter);
}
