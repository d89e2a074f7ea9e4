#include "aninorm/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aninorm/bilinear.hpp"
#include "aninorm/error.hpp"
#include "aninorm/model_io.hpp"
#include "aninorm/montecarlo.hpp"
#include "aninorm/norm.hpp"
#include "aninorm/spectral.hpp"
#include "aninorm/statespace.hpp"

namespace aninorm::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string ct_path, dt_path, out_path, filter_path;
  std::optional<double> T;
  double a = 0.0;
  std::size_t grid = 4096;
  double tol = 1e-8;
  std::uint64_t seed = 42;
  long long steps = 1'000'000;
  long long burn_in = 10'000;
  int replicas = 8;
  bool inverse = false;
  double a_max = 5.0;
  int points = 21;
  std::vector<double> a_values;
};

// The system under analysis in whichever domains are reachable from the
// flags: a continuous model always has a discrete image once T is known,
// and a discrete model has a continuous preimage for the same T.
struct Resolved {
  std::optional<CtStateSpace> ct;
  std::optional<DtStateSpace> dt;
  std::optional<TimeScale> ts;
};

Model load(const Options& o) {
  if (o.ct_path.empty() == o.dt_path.empty()) {
    throw UsageError("give exactly one of --ct or --dt");
  }
  Model model = read_model(o.ct_path.empty() ? o.dt_path : o.ct_path);
  const bool is_ct = std::holds_alternative<CtStateSpace>(model);
  if (is_ct && o.ct_path.empty()) throw UsageError("--dt file holds a continuous model (A,B,C,D)");
  if (!is_ct && o.dt_path.empty()) throw UsageError("--ct file holds a discrete model (A_T,...)");
  return model;
}

Resolved resolve(const Options& o, bool need_ct, bool need_dt) {
  const Model model = load(o);
  Resolved r;
  if (o.T) r.ts.emplace(*o.T);
  if (const auto* ct = std::get_if<CtStateSpace>(&model)) {
    require_hurwitz(*ct);
    r.ct = *ct;
    if (need_dt) {
      if (!r.ts) throw UsageError("--T is required for a continuous model");
      r.dt = to_discrete(*ct, *r.ts);
    }
  } else {
    const auto& dt = std::get<DtStateSpace>(model);
    require_schur(dt);
    r.dt = dt;
    if (need_ct) {
      if (!r.ts) throw UsageError("--T is required to map a discrete model back");
      r.ct = to_continuous(dt, *r.ts);
    }
  }
  return r;
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(o.out_path);
  if (!file) throw UsageError("cannot write " + o.out_path);
  file << text;
}

void emit_json(const Options& o, std::ostream& out, const json& j) {
  emit(o, out, dump(j) + "\n");
}

json estimate_json(const Estimate& e) {
  return json{{"value", e.value}, {"half_width", e.half_width}};
}

void cmd_convert(const Options& o, std::ostream& out) {
  if (!o.T) throw UsageError("--T is required");
  const TimeScale ts(*o.T);
  const Model model = load(o);
  if (const auto* ct = std::get_if<CtStateSpace>(&model)) {
    if (o.inverse) throw UsageError("--inverse expects a discrete model (--dt)");
    require_hurwitz(*ct);
    emit_json(o, out, to_json(to_discrete(*ct, ts)));
  } else {
    const auto& dt = std::get<DtStateSpace>(model);
    require_schur(dt);
    emit_json(o, out, to_json(to_continuous(dt, ts)));
  }
}

void cmd_spectrum(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, true, false);
  const StabilityReport rep = validate_ct(*r.ct);
  json eig = json::array();
  for (const Complex& l : rep.eigenvalues) eig.push_back(json::array({l.real(), l.imag()}));
  emit_json(o, out,
            json{{"eigenvalues", eig},
                 {"hurwitz", rep.hurwitz},
                 {"rho_A", rep.rho_A},
                 {"rho_Ainv", rep.rho_Ainv},
                 {"fast_bound", rep.fast_bound},
                 {"slow_bound", rep.slow_bound}});
}

void cmd_norm(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, false, true);
  const AnisotropicNormSolution sol = anisotropic_norm_dt(*r.dt, o.a);
  json j{{"a", o.a},
         {"norm", sol.norm_value},
         {"q", sol.q},
         {"achieved_anisotropy", sol.achieved_anisotropy},
         {"input_variance", sol.input_variance}};
  if (r.ts) j["T"] = r.ts->T();
  if (!sol.is_sentinel()) {
    j["hinf"] = sol.diagnostics.hinf;
    j["root_iterations"] = sol.diagnostics.root_iterations;
    j["riccati_residual"] = sol.diagnostics.riccati_residual;
    j["monotone"] = sol.diagnostics.monotone;
    j["isometry_residual"] = isometry_residual(*r.dt, sol, PhiGrid(o.grid));
  }
  emit_json(o, out, j);
}

void cmd_sweep(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, true, true);
  std::vector<double> levels = o.a_values;
  if (levels.empty()) {
    if (o.points < 2 || !(o.a_max > 0.0)) throw UsageError("--points >= 2 and --a-max > 0 required");
    for (int k = 0; k < o.points; ++k) levels.push_back(o.a_max * k / (o.points - 1));
  }
  const auto points = sweep(*r.ct, *r.ts, levels);
  std::ostringstream csv;
  csv << "a,norm,q\n";
  for (const SweepPoint& p : points) {
    csv << format_double(p.a) << ',' << format_double(p.norm) << ',' << format_double(p.q) << '\n';
  }
  emit(o, out, csv.str());
}

void cmd_sv(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, false, true);
  const PhiGrid grid(o.grid);
  const Index k = std::min(r.dt->inputs(), r.dt->outputs());
  const auto values = evaluate_nodes(
      grid.size(), static_cast<std::size_t>(k),
      [&](std::size_t j, double* dst) {
        const Eigen::VectorXd s = singular_values_dt(*r.dt, grid.node(j));
        for (Index i = 0; i < k; ++i) dst[i] = s(i);
      },
      grid.execution());
  std::ostringstream csv;
  csv << "phi";
  for (Index i = 1; i <= k; ++i) csv << ",sigma_" << i;
  csv << '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    csv << format_double(grid.node(j));
    for (Index i = 0; i < k; ++i) csv << ',' << format_double(values[j * k + i]);
    csv << '\n';
  }
  emit(o, out, csv.str());
}

void cmd_gain(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, true, true);
  json j;
  if (o.filter_path.empty()) {
    const SpectralDensity white(ConstantScalar{1.0, r.ct->inputs()});
    j["density"] = "white";
    j["gain"] = rms_gain(*r.ct, white, *r.ts, PhiGrid(o.grid));
    j["white_gain"] = white_gain(*r.ct, *r.ts);
  } else {
    const Model filter = read_model(o.filter_path);
    const SpectralDensity S = std::holds_alternative<CtStateSpace>(filter)
                                  ? SpectralDensity(RationalCt{std::get<CtStateSpace>(filter)})
                                  : SpectralDensity(RationalDt{std::get<DtStateSpace>(filter)});
    j["density"] = "filter";
    j["gain"] = rms_gain(*r.ct, S, *r.ts, PhiGrid(o.grid));
  }
  j["T"] = r.ts->T();
  emit_json(o, out, j);
}

void cmd_hinf(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, false, true);
  HinfOptions opt;
  opt.relative_tolerance = o.tol;
  emit_json(o, out, json{{"hinf", hinf_dt(*r.dt, opt)}});
}

void cmd_h2(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, false, true);
  const double h2 = h2_dt(*r.dt);
  json j{{"h2", h2},
         {"h2_over_sqrt_m", h2 / std::sqrt(static_cast<double>(r.dt->inputs()))}};
  if (r.ct && (r.ct->D().array() == 0.0).all()) j["h2_ct"] = h2_ct(*r.ct);
  emit_json(o, out, j);
}

void cmd_worstcase(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, true, true);
  const AnisotropicNormSolution sol = anisotropic_norm_dt(*r.dt, o.a);
  const WorstCaseFilter wc = worst_case_filter(*r.ct, *r.ts, sol);
  emit_json(o, out,
            json{{"a", o.a},
                 {"q", sol.q},
                 {"norm", sol.norm_value},
                 {"L_T", to_json(wc.dt_L)},
                 {"M_T", to_json(wc.dt_M)},
                 {"ct_L", to_json(wc.ct_L)},
                 {"ct_M", to_json(wc.ct_M)},
                 {"dt_closed_loop", to_json(wc.dt_closed_loop)},
                 {"dt_input_gain", to_json(wc.dt_input_gain)},
                 {"ct_closed_loop", to_json(wc.ct_closed_loop)},
                 {"P_T", to_json(sol.P_T)},
                 {"filter_dt", to_json(wc.discrete())},
                 {"filter_ct", to_json(wc.continuous())}});
}

void cmd_validate(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, true, true);
  const AnisotropicNormSolution sol = anisotropic_norm_dt(*r.dt, o.a);
  const WorstCaseFilter wc = worst_case_filter(*r.ct, *r.ts, sol);
  SimConfig cfg;
  cfg.seed = o.seed;
  cfg.steps = o.steps;
  cfg.burn_in = std::min(o.burn_in, o.steps / 2);
  cfg.replicas = o.replicas;
  const ValidationReport rep = validate_solution(*r.ct, *r.ts, sol, wc, cfg);
  json checks = json::array();
  for (const ValidationCheck& c : rep.checks) {
    checks.push_back(json{{"name", c.name}, {"passed", c.passed},
                          {"deviation", c.deviation}, {"bound", c.bound}});
  }
  emit_json(o, out,
            json{{"a", o.a},
                 {"norm", sol.norm_value},
                 {"q", sol.q},
                 {"passed", rep.passed()},
                 {"wide_interval", rep.wide_interval},
                 {"checks", checks},
                 {"empirical_gain", estimate_json(rep.stats.empirical_gain)},
                 {"var_input", estimate_json(rep.stats.var_input)},
                 {"var_output", estimate_json(rep.stats.var_output)},
                 {"steps", cfg.steps},
                 {"replicas", cfg.replicas},
                 {"seed", cfg.seed}});
}

void cmd_limits(const Options& o, std::ostream& out) {
  const Resolved r = resolve(o, true, false);
  const GainLimits lim = gain_limits(*r.ct);
  json j{{"limit_T_inf", lim.limit_T_inf}, {"limit_T_zero", lim.limit_T_zero}};
  j["small_T_coeff"] = lim.small_T_coeff ? json(*lim.small_T_coeff) : json(nullptr);
  emit_json(o, out, j);
}

void add_model(CLI::App* sub, Options& o) {
  auto* ct = sub->add_option("--ct", o.ct_path, "continuous model (A,B,C,D) JSON");
  auto* dt = sub->add_option("--dt", o.dt_path, "discrete model (A_T,B_T,C_T,D_T) JSON");
  ct->excludes(dt);
  sub->add_option("--T", o.T, "time scale T = 1/Omega (seconds)");
  sub->add_option("--out", o.out_path, "output file (default: stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anisotropic norm analysis of linear continuous-time systems", "aninorm"};
  app.require_subcommand(1);
  Options o;
  std::function<void(const Options&, std::ostream&)> action;

  const auto command = [&](const char* name, const char* help, auto handler) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_model(sub, o);
    sub->callback([&action, handler] { action = handler; });
    return sub;
  };

  auto* convert = command("convert", "bilinear map between continuous and discrete realizations",
                          cmd_convert);
  convert->add_flag("--inverse", o.inverse, "discrete -> continuous");
  command("spectrum", "eigenvalues and transient time-scale bounds", cmd_spectrum);
  auto* norm = command("norm", "(T,a)-anisotropic norm", cmd_norm);
  norm->add_option("--a", o.a, "mean anisotropy level")->required()->check(CLI::NonNegativeNumber);
  norm->add_option("--grid", o.grid, "circle grid size for the isometry check");
  auto* sw = command("sweep", "norm over a grid of anisotropy levels (CSV a,norm,q)", cmd_sweep);
  sw->add_option("--a-max", o.a_max, "largest level of an evenly spaced grid");
  sw->add_option("--points", o.points, "number of grid points");
  sw->add_option("--a-values", o.a_values, "explicit increasing levels")->delimiter(',');
  auto* sv = command("sv", "singular values of F_T on the circle (CSV)", cmd_sv);
  sv->add_option("--grid", o.grid, "number of circle nodes (power of two)");
  auto* gain = command("gain", "RMS gain under a shaping-filter density", cmd_gain);
  gain->add_option("--filter", o.filter_path, "shaping filter model JSON (default: white noise)");
  gain->add_option("--grid", o.grid, "circle grid size");
  auto* hinf = command("hinf", "H-infinity norm of F_T", cmd_hinf);
  hinf->add_option("--tol", o.tol, "relative tolerance");
  command("h2", "H2 norm of F_T", cmd_h2);
  auto* wc = command("worstcase", "worst-case shaping filter (JSON)", cmd_worstcase);
  wc->add_option("--a", o.a, "mean anisotropy level")->required()->check(CLI::NonNegativeNumber);
  auto* val = command("validate", "Monte Carlo check of the worst case (JSON)", cmd_validate);
  val->add_option("--a", o.a, "mean anisotropy level")->required()->check(CLI::NonNegativeNumber);
  val->add_option("--seed", o.seed, "random seed");
  val->add_option("--steps", o.steps, "steps per replica")->check(CLI::PositiveNumber);
  val->add_option("--replicas", o.replicas, "independent replicas")->check(CLI::PositiveNumber);
  command("limits", "large- and small-T limits of the white-noise gain", cmd_limits);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    action(o, out);
  } catch (const UsageError& e) {
    err << "aninorm: " << e.what() << "\n";
    return 1;
  } catch (const ModelError& e) {
    err << "aninorm: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << dump(json{{"code", std::string(to_string(e.code()))}, {"message", e.what()}}, 0)
        << "\n";
    return 2;
  }
  return 0;
}

}  // namespace aninorm::cli
