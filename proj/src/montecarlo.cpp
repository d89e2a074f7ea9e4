#include "aninorm/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <tuple>

#include "aninorm/error.hpp"

namespace aninorm {
namespace {

constexpr double kZ95 = 1.959963984540054;

void check_config(const SimConfig& cfg) {
  if (cfg.steps <= 0 || cfg.burn_in < 0 || cfg.burn_in >= cfg.steps) {
    throw Error(ErrorCode::InvalidArgument, "SimConfig: need 0 <= burn_in < steps");
  }
  if (cfg.replicas <= 0) {
    throw Error(ErrorCode::InvalidArgument, "SimConfig: replicas must be positive");
  }
}

// Independent stream per (seed, replica, stream).
std::mt19937_64 make_engine(std::uint64_t seed, int replica, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

// Per-replica moments packed into one row of doubles:
// [var_in, var_out, state (n*n), innov (m*m), lag1 (m*m)].
struct Layout {
  Index n, m;
  std::size_t width() const { return static_cast<std::size_t>(2 + n * n + 2 * m * m); }
  std::size_t state() const { return 2; }
  std::size_t innov() const { return 2 + static_cast<std::size_t>(n * n); }
  std::size_t lag1() const { return innov() + static_cast<std::size_t>(m * m); }
};

void store(double* out, const MatrixXd& X) { std::copy(X.data(), X.data() + X.size(), out); }

Estimate estimate(const std::vector<double>& values) {
  const double R = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= R;
  if (values.size() < 2) return {mean, std::numeric_limits<double>::infinity()};
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return {mean, kZ95 * std::sqrt(ss / (R - 1.0)) / std::sqrt(R)};
}

// Mean and half-width matrices of a block of the replica buffer.
std::pair<MatrixXd, MatrixXd> matrix_estimate(const std::vector<double>& buffer,
                                              std::size_t width, int replicas,
                                              std::size_t offset, Index rows) {
  MatrixXd mean(rows, rows), hw(rows, rows);
  std::vector<double> column(static_cast<std::size_t>(replicas));
  for (Index k = 0; k < rows * rows; ++k) {
    for (int r = 0; r < replicas; ++r) column[r] = buffer[r * width + offset + k];
    const Estimate e = estimate(column);
    mean.data()[k] = e.value;
    hw.data()[k] = e.half_width;
  }
  return {mean, hw};
}

SimStats collect(const std::vector<double>& buffer, const Layout& layout, int replicas,
                 long long samples) {
  const std::size_t width = layout.width();
  SimStats stats;
  stats.samples_per_replica = samples;
  std::vector<double> gains;
  for (int r = 0; r < replicas; ++r) {
    const double vin = buffer[r * width];
    const double vout = buffer[r * width + 1];
    stats.replica_var_input.push_back(vin);
    stats.replica_var_output.push_back(vout);
    gains.push_back(vin > 0.0 ? std::sqrt(vout / vin) : 0.0);
  }
  stats.var_input = estimate(stats.replica_var_input);
  stats.var_output = estimate(stats.replica_var_output);
  stats.empirical_gain = estimate(gains);
  stats.empirical_gain.value = stats.var_input.value > 0.0
                                   ? std::sqrt(stats.var_output.value / stats.var_input.value)
                                   : 0.0;
  std::tie(stats.state_cov, stats.state_cov_hw) =
      matrix_estimate(buffer, width, replicas, layout.state(), layout.n);
  std::tie(stats.innov_cov, stats.innov_cov_hw) =
      matrix_estimate(buffer, width, replicas, layout.innov(), layout.m);
  std::tie(stats.autocov_lag1, stats.autocov_lag1_hw) =
      matrix_estimate(buffer, width, replicas, layout.lag1(), layout.m);
  return stats;
}

}  // namespace

SimStats simulate_dt(const DtStateSpace& sys, const std::optional<WorstCaseFilter>& filter,
                     const SimConfig& cfg) {
  check_config(cfg);
  const Index n = sys.states();
  const Index m = sys.inputs();
  if (spectral_radius(sys.A()) >= 1.0 - 1e-12) {
    throw Error(ErrorCode::UnstableSystem, "simulate_dt: A_T is not Schur stable");
  }
  MatrixXd L = MatrixXd::Zero(m, n);
  MatrixXd M = MatrixXd::Identity(m, m);
  if (filter) {
    if (filter->dt_L.rows() != m || filter->dt_L.cols() != n || filter->dt_M.rows() != m) {
      throw Error(ErrorCode::DimensionMismatch, "simulate_dt: filter does not fit the system");
    }
    L = filter->dt_L;
    M = filter->dt_M;
    if (n > 0 && spectral_radius(sys.A() + sys.B() * L) >= 1.0 - 1e-12) {
      throw Error(ErrorCode::UnstableSystem, "simulate_dt: filter closed loop is not Schur stable");
    }
  }

  const Layout layout{n, m};
  const long long samples = cfg.steps - cfg.burn_in;
  const auto buffer = evaluate_nodes(
      static_cast<std::size_t>(cfg.replicas), layout.width(),
      [&](std::size_t r, double* out) {
        std::mt19937_64 engine = make_engine(cfg.seed, static_cast<int>(r), 0);
        std::normal_distribution<double> normal;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n), x_next(n);
        Eigen::VectorXd v(m), w(m), innov(m), w_prev = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd z(sys.outputs());
        double sum_in = 0.0, sum_out = 0.0;
        MatrixXd state = MatrixXd::Zero(n, n);
        MatrixXd gamma = MatrixXd::Zero(m, m);
        MatrixXd lag1 = MatrixXd::Zero(m, m);
        for (long long k = 0; k < cfg.steps; ++k) {
          for (Index i = 0; i < m; ++i) v(i) = normal(engine);
          innov.noalias() = M * v;
          w.noalias() = L * x;
          w += innov;
          z.noalias() = sys.C() * x;
          z.noalias() += sys.D() * w;
          if (k >= cfg.burn_in) {
            sum_in += w.squaredNorm();
            sum_out += z.squaredNorm();
            state.noalias() += x * x.transpose();
            gamma.noalias() += innov * innov.transpose();
            if (k > cfg.burn_in) lag1.noalias() += w_prev * w.transpose();
          }
          w_prev = w;
          x_next.noalias() = sys.A() * x;
          x_next.noalias() += sys.B() * w;
          x.swap(x_next);
        }
        const double N = static_cast<double>(samples);
        out[0] = sum_in / N;
        out[1] = sum_out / N;
        store(out + layout.state(), state / N);
        store(out + layout.innov(), gamma / N);
        store(out + layout.lag1(), samples > 1 ? MatrixXd(lag1 / (N - 1.0)) : lag1);
      },
      cfg.exec);
  return collect(buffer, layout, cfg.replicas, samples);
}

SimStats simulate_ct_em(const CtStateSpace& sys, const TimeScale& ts,
                        const std::optional<WorstCaseFilter>& filter, const SimConfig& cfg) {
  check_config(cfg);
  const double dt = cfg.em_dt;
  const double omega = ts.omega();
  if (!(dt > 0.0) || dt * omega > 0.1) {
    throw Error(ErrorCode::StepTooLarge,
                "simulate_ct_em: em_dt * Omega must not exceed 0.1 (got " +
                    std::to_string(dt * omega) + ")");
  }
  const Index n = sys.states();
  const Index m = sys.inputs();
  const Index p = sys.outputs();
  if (n > 0 && spectral_abscissa(sys.A()) >= -1e-12) {
    throw Error(ErrorCode::UnstableSystem, "simulate_ct_em: A is not Hurwitz");
  }
  MatrixXd L = MatrixXd::Zero(m, n);
  MatrixXd M = MatrixXd::Identity(m, m);
  if (filter) {
    if (filter->ct_L.rows() != m || filter->ct_L.cols() != n || filter->ct_M.rows() != m) {
      throw Error(ErrorCode::DimensionMismatch, "simulate_ct_em: filter does not fit the system");
    }
    L = filter->ct_L;
    M = filter->ct_M;
    if (n > 0 && spectral_abscissa(sys.A() + sys.B() * L) >= -1e-12) {
      throw Error(ErrorCode::UnstableSystem, "simulate_ct_em: filter closed loop is not Hurwitz");
    }
  }

  const Layout layout{n, m};
  const long long samples = cfg.steps - cfg.burn_in;
  const double sqrt_dt = std::sqrt(dt);
  const double lowpass = std::sqrt(2.0 * omega);
  const auto buffer = evaluate_nodes(
      static_cast<std::size_t>(cfg.replicas), layout.width(),
      [&](std::size_t r, double* out) {
        std::mt19937_64 engine = make_engine(cfg.seed, static_cast<int>(r), 1);
        std::normal_distribution<double> normal;
        Eigen::VectorXd X = Eigen::VectorXd::Zero(n), dX(n);
        Eigen::VectorXd WT = Eigen::VectorXd::Zero(m), WT_prev(m);
        Eigen::VectorXd ZT = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd dV(m), dW(m), dW_noise(m), dZ(p);
        double sum_in = 0.0, sum_out = 0.0;
        MatrixXd state = MatrixXd::Zero(n, n);
        MatrixXd qv = MatrixXd::Zero(m, m);
        MatrixXd lag1 = MatrixXd::Zero(m, m);
        for (long long k = 0; k < cfg.steps; ++k) {
          for (Index i = 0; i < m; ++i) dV(i) = sqrt_dt * normal(engine);
          dW_noise.noalias() = M * dV;
          dW.noalias() = dt * (L * X);
          dW += dW_noise;
          dZ.noalias() = dt * (sys.C() * X);
          dZ.noalias() += sys.D() * dW;
          dX.noalias() = dt * (sys.A() * X);
          dX.noalias() += sys.B() * dW;
          WT_prev = WT;
          WT += -omega * dt * WT + lowpass * dW;
          ZT += -omega * dt * ZT + lowpass * dZ;
          X += dX;
          if (k >= cfg.burn_in) {
            sum_in += WT.squaredNorm();
            sum_out += ZT.squaredNorm();
            state.noalias() += X * X.transpose();
            qv.noalias() += dW_noise * dW_noise.transpose();
            lag1.noalias() += WT_prev * WT.transpose();
          }
        }
        const double N = static_cast<double>(samples);
        out[0] = sum_in / N;
        out[1] = sum_out / N;
        store(out + layout.state(), state / N);
        store(out + layout.innov(), qv / (N * dt));
        store(out + layout.lag1(), lag1 / N);
      },
      cfg.exec);
  return collect(buffer, layout, cfg.replicas, samples);
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed; });
}

ValidationReport validate_solution(const CtStateSpace& sys, const TimeScale& ts,
                                   const AnisotropicNormSolution& sol,
                                   const WorstCaseFilter& wc, const SimConfig& cfg) {
  const DtStateSpace dt = to_discrete(sys, ts);
  ValidationReport report;
  report.stats = simulate_dt(dt, wc, cfg);
  const SimStats& s = report.stats;
  const double m = static_cast<double>(sys.inputs());

  const auto add = [&](std::string name, double deviation, double bound) {
    report.checks.push_back({std::move(name), deviation <= bound, deviation, bound});
  };

  add("gain", std::abs(s.empirical_gain.value - sol.norm_value), s.empirical_gain.half_width);

  std::vector<double> gaps;
  for (std::size_t r = 0; r < s.replica_var_input.size(); ++r) {
    gaps.push_back(s.replica_var_input[r] - sol.q * s.replica_var_output[r] - m);
  }
  const Estimate gap = estimate(gaps);
  add("isometry", std::abs(gap.value), gap.half_width);

  add("state_covariance", (s.state_cov - sol.P_T).norm(), s.state_cov_hw.norm());
  add("innovation_covariance", (s.innov_cov - sol.M_T * sol.M_T).norm(),
      s.innov_cov_hw.norm());

  const double scale = std::max(sol.norm_value, 1e-300);
  report.wide_interval = s.empirical_gain.half_width > 0.05 * scale ||
                         gap.half_width > 0.05 * s.var_input.value ||
                         s.var_input.half_width > 0.05 * s.var_input.value;
  return report;
}

}  // namespace aninorm
