// Command-line front end: evaluates scale functions, the first-passage law
// catalogue, omega/Parisian extensions, dividend-barrier optimization, and
// the Monte Carlo cross-checks. Emits plain values or CSV (LF, UTF-8).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "scalekit/dividends.hpp"
#include "scalekit/mc.hpp"
#include "scalekit/model_json.hpp"
#include "scalekit/omega.hpp"
#include "scalekit/parisian.hpp"
#include "scalekit/passage_laws.hpp"
#include "scalekit/scale_set.hpp"

using namespace scalekit;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);  // LF line endings on every platform
  if (!file) throw ConfigError("cannot open output file: " + path);
  return file;
}

Backend parse_backend(const std::string& name) {
  if (name == "rational") return Backend::Rational;
  if (name == "series") return Backend::Series;
  if (name == "inversion") return Backend::Inversion;
  throw ConfigError("unknown backend: " + name);
}

ScaleSet make_set(const LevyModel& m, double delta, Backend backend, double h, double x_max) {
  switch (backend) {
    case Backend::Rational:
      return build_rational(m, delta);
    case Backend::Series:
      return build_series(m, delta, GridSpec{h, x_max});
    case Backend::Inversion:
    default:
      return build_inversion(m, delta);
  }
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("bad parameter token: " + item);
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

double get_or(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

// Azcue-Muler style example used by the figure presets.
LevyModel figure_model(double sigma) {
  LevyModel m;
  m.sigma = sigma;
  m.drift = 107.0 / 5.0;
  m.jumps.lambda = 10.0;
  m.jumps.law = ErlangJumps{2, 1.0};
  m.description = "Erlang(2,1) claims with Gaussian perturbation";
  return m;
}

int run_eval(const std::string& model_path, double delta, const std::string& backend_name,
             double h, double x_max, double theta, const std::string& output) {
  LevyModel m = model_from_json_file(model_path);
  ScaleSet set = make_set(m, delta, parse_backend(backend_name), h, x_max);
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  out << "x,W,Wp,Wpp,Z,Zbar,Ztheta\n";
  int n = int(x_max / h);
  for (int i = 0; i <= n; ++i) {
    double x = i * h;
    double wpp;
    try {
      wpp = set.w(x, 2);
    } catch (const DerivativeUnavailable&) {
      wpp = std::numeric_limits<double>::quiet_NaN();
    }
    out << fmt(x) << ',' << fmt(set.w(x)) << ',' << fmt(set.w(x, 1)) << ',' << fmt(wpp) << ','
        << fmt(set.z(x)) << ',' << fmt(set.zbar(x)) << ',' << fmt(set.z(x, theta)) << "\n";
  }
  return 0;
}

double eval_law(const ScaleSet& set, const std::string& law, double x, double b, double theta,
                double vartheta, const std::map<std::string, double>& extra) {
  if (law == "two-sided-exit") return two_sided_exit_up(set, x, b);
  if (law == "gerber-shiu") return gerber_shiu_exit(set, x, b, UpperMode::Absorb, theta);
  if (law == "gerber-shiu-reflected")
    return gerber_shiu_exit(set, x, b, UpperMode::Reflect, theta);
  if (law == "ruin-transform") return gerber_shiu_exit(set, x, kInf, UpperMode::None, theta);
  if (law == "hitting-time") return hitting_time_transform(set, x);
  if (law == "three-level-hitting")
    return three_level_hitting(set, x, get_or(extra, "i", 0.5 * b), get_or(extra, "a", 0.0), b);
  if (law == "creeping") return creeping_probability(set, x);
  if (law == "maximal-severity") return maximal_severity(set, x, get_or(extra, "u", 1.0));
  if (law == "exit-time") return exit_time_transform(set, x, b);
  if (law == "capital-injection") return capital_injection_transform(set, x, b, theta);
  if (law == "drawdown-joint")
    return drawdown_deficit_joint_density(set, x, get_or(extra, "m", x),
                                          get_or(extra, "d", 1.0), theta);
  if (law == "drawdown-no-recovery") return drawdown_deficit_no_recovery(set, x, theta);
  if (law == "bailout-before-tau-b")
    return bailout_exponential_time(set, x, b, theta, BailoutVariant::BeforeTauB);
  if (law == "bailout-up-to-min")
    return bailout_exponential_time(set, x, b, theta, BailoutVariant::UpToMin);
  if (law == "bailout-doubly-reflected")
    return bailout_exponential_time(set, x, b, theta, BailoutVariant::DoublyReflected);
  if (law == "dividends-penalty")
    return dividends_penalty_transform(set, x, b, theta, vartheta);
  if (law == "joint-dividends-bailouts")
    return joint_dividends_bailouts(set, x, b, theta, vartheta);
  if (law == "expected-ruin-time-negative")
    return expected_ruin_time(set, x, RuinTimeVariant::NegativeDrift);
  if (law == "expected-ruin-time-conditional")
    return expected_ruin_time(set, x, RuinTimeVariant::PositiveDriftConditional);
  if (law == "expected-ruin-time-reflected")
    return expected_ruin_time(set, x, RuinTimeVariant::ReflectedAtB, b);
  if (law == "expected-hitting-time") return expected_hitting_time(set, x);
  if (law == "expected-dividends") return expected_dividends(set, x, b, Horizon::UntilRuin);
  if (law == "expected-dividends-infinite")
    return expected_dividends(set, x, b, Horizon::Infinite);
  if (law == "expected-bailouts")
    return expected_bailouts(set, x, b, BailoutHorizon::UntilTauB);
  if (law == "expected-bailouts-infinite")
    return expected_bailouts(set, x, b, BailoutHorizon::Infinite);
  if (law == "gerber-shiu-exponential")
    return smooth_gerber_shiu(set, ExponentialPenalty{theta}, x);
  if (law == "gerber-shiu-linear")
    return smooth_gerber_shiu(set, LinearPenalty{get_or(extra, "k", 1.0), get_or(extra, "K", 0.0)},
                              x);
  if (law == "parisian-survival") return parisian_survival(set, x, get_or(extra, "r", 1.0));
  if (law == "occupation-positive-lt")
    return occupation_positive_lt(set.model(), set.delta(), get_or(extra, "r", 1.0));
  if (law == "taxed-exit")
    return taxed_drawdown_exit(set, x, b, get_or(extra, "xi", 0.0), get_or(extra, "d", 1.0),
                               get_or(extra, "gamma", 0.0));
  if (law == "taxed-dividends")
    return taxed_drawdown_dividends(set, x, b, get_or(extra, "xi", 0.0), get_or(extra, "d", 1.0),
                                    get_or(extra, "gamma", 0.0));
  throw ConfigError("unknown law: " + law);
}

int run_law(const std::string& model_path, double delta, const std::string& backend_name,
            const std::string& law, double x, double b, double theta, double vartheta,
            const std::string& params, bool csv, int samples, const std::string& output) {
  LevyModel m = model_from_json_file(model_path);
  auto extra = parse_params(params);
  ScaleSet set = make_set(m, delta, parse_backend(backend_name), 1.0 / 512.0,
                          std::isfinite(b) && b > 0 ? std::max(2.0 * b, 8.0) : 0.0);
  if (!csv) {
    std::cout << fmt(eval_law(set, law, x, b, theta, vartheta, extra)) << "\n";
    return 0;
  }
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  out << "x,value\n";
  double hi = std::isfinite(b) && b > 0 ? b : std::max(1.0, 2.0 * x);
  for (int i = 0; i <= samples; ++i) {
    double xx = hi * i / samples;
    out << fmt(xx) << ',' << fmt(eval_law(set, law, xx, b, theta, vartheta, extra)) << "\n";
  }
  return 0;
}

int run_omega(const std::string& model_path, const std::string& steps_json, double h,
              double x_max, const std::string& output) {
  LevyModel m = model_from_json_file(model_path);
  std::vector<OmegaSpec::Step> steps;
  try {
    auto parsed = nlohmann::json::parse(steps_json);
    for (const auto& item : parsed)
      steps.push_back(OmegaSpec::Step{item.at("from").get<double>(), item.at("to").get<double>(),
                                      item.at("rate").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad step spec: ") + e.what());
  }
  ScaleSet zero = build_rational(m, 0.0);
  OmegaScales sol = omega_scales(zero, OmegaSpec::steps(steps, h, x_max));
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  out << "x,Womega,Zomega\n";
  for (int i = 0; i <= sol.grid.n; ++i)
    out << fmt(sol.grid.x(i)) << ',' << fmt(sol.w_omega[i]) << ',' << fmt(sol.z_omega[i])
        << "\n";
  return 0;
}

BarrierObjective parse_objective(const std::string& tag,
                                 const std::map<std::string, double>& p) {
  if (tag == "definetti") return DeFinetti{};
  if (tag == "definetti-penalty")
    return DeFinettiPenalty{get_or(p, "K", 0.0), get_or(p, "k", 0.0)};
  if (tag == "slg") return Slg{get_or(p, "k", 1.0)};
  if (tag == "dividends-penalty")
    return DividendsPenalty{get_or(p, "theta", 0.0), get_or(p, "vartheta", 0.0)};
  if (tag == "dividends-time") return DividendsTime{get_or(p, "vartheta", 0.0)};
  if (tag == "taxed-drawdown")
    return TaxedDrawdown{get_or(p, "xi", 0.0), get_or(p, "d", 1.0), get_or(p, "gamma", 0.0)};
  throw ConfigError("unknown objective: " + tag);
}

int run_optimize(const std::string& model_path, double delta, const std::string& objective_tag,
                 const std::string& params, double b_max, double step) {
  LevyModel m = model_from_json_file(model_path);
  auto p = parse_params(params);
  BarrierObjective obj = parse_objective(objective_tag, p);
  ScaleSet set = build_rational(m, delta);
  BarrierResult res = optimize_barrier(obj, set, ScanParams{b_max, step});
  std::cout << "b_star " << fmt(res.b_star) << "\n";
  std::cout << "H(b_star) " << fmt(res.h_star) << "\n";
  std::cout << "multimodal " << (res.multimodal ? "true" : "false") << "\n";
  std::cout << "local_maxima";
  for (std::size_t i = 0; i < res.local_maxima.size(); ++i)
    std::cout << ' ' << fmt(res.local_maxima[i]) << ':' << fmt(res.local_maxima_values[i]);
  std::cout << "\n";
  return 0;
}

int run_figure(const std::string& preset, double sigma, double theta, double vartheta,
               double b_max, int samples, const std::string& output) {
  if (sigma != 1.4 && sigma != 2.0)
    throw ConfigError("figure presets are defined for sigma in {1.4, 2}");
  LevyModel m = figure_model(sigma);
  const double delta = 0.1;
  ScaleSet set = build_rational(m, delta);
  BarrierObjective obj;
  if (preset == "azcue-hdp") {
    obj = DividendsPenalty{theta, vartheta};
  } else if (preset == "azcue-hdt") {
    obj = DividendsTime{vartheta};
  } else {
    throw ConfigError("unknown figure preset: " + preset);
  }
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  out << "b,H\n";
  for (int i = 0; i <= samples; ++i) {
    double b = b_max * i / samples;
    out << fmt(b) << ',' << fmt(barrier_function(obj, set, b)) << "\n";
  }
  out << "inf," << fmt(barrier_limit_at_infinity(obj, set)) << "\n";
  return 0;
}

int run_simulate(const std::string& model_path, const std::string& dynamics_name,
                 const std::string& functional_name, const std::string& params, long paths,
                 std::uint64_t seed, double dt, double horizon) {
  LevyModel m = model_from_json_file(model_path);
  auto p = parse_params(params);
  const double delta = get_or(p, "delta", 0.0);
  const double x = get_or(p, "x", 1.0);
  const double b = get_or(p, "b", 2.0);
  const double theta = get_or(p, "theta", 0.0);
  const double r = get_or(p, "r", 1.0);

  Dynamics dyn;
  if (dynamics_name == "free") dyn = Free{};
  else if (dynamics_name == "reflect0") dyn = ReflectBelow0{};
  else if (dynamics_name == "reflectb") dyn = ReflectAt{b};
  else if (dynamics_name == "doubly") dyn = DoublyReflect{b};
  else if (dynamics_name == "taxed") dyn = Taxed{get_or(p, "gamma", 0.0), 0.0};
  else if (dynamics_name == "parisian") dyn = ParisianObserved{r};
  else throw ConfigError("unknown dynamics: " + dynamics_name);

  Functional fn;
  double analytic = 0.0;
  ScaleSet set = build_rational(m, delta > 0 ? delta : 0.0);
  if (functional_name == "ruin-prob") {
    fn = RuinProb{x};
    analytic = gerber_shiu_exit(set, x, kInf, UpperMode::None, 0.0);
  } else if (functional_name == "killed-exit-up") {
    fn = KilledExitUp{delta, x, b};
    analytic = two_sided_exit_up(set, x, b);
  } else if (functional_name == "ruin-transform") {
    fn = RuinTransform{delta, x, theta};
    analytic = gerber_shiu_exit(set, x, kInf, UpperMode::None, theta);
  } else if (functional_name == "capital-injection") {
    fn = CapitalInjection{delta, x, b, theta};
    analytic = capital_injection_transform(set, x, b, theta);
  } else if (functional_name == "discounted-dividends") {
    fn = DiscountedDividends{delta, x, b, true};
    analytic = expected_dividends(set, x, b, Horizon::UntilRuin);
  } else if (functional_name == "discounted-dividends-infinite") {
    fn = DiscountedDividends{delta, x, b, false};
    analytic = expected_dividends(set, x, b, Horizon::Infinite);
  } else if (functional_name == "discounted-injections-infinite") {
    fn = DiscountedInjections{delta, x, b, false};
    analytic = expected_bailouts(set, x, b, BailoutHorizon::Infinite);
  } else if (functional_name == "occupation-below0-lt") {
    fn = OccupationBelow0LT{x, r};
    analytic = parisian_survival(set, x, r);
  } else if (functional_name == "occupation-positive-lt") {
    fn = OccupationPositiveLT{delta, x, r};
    analytic = occupation_positive_lt(m, delta, r);
  } else if (functional_name == "parisian-ruin") {
    fn = ParisianRuinProb{x};
    analytic = 1.0 - parisian_survival(set, x, r);
  } else if (functional_name == "taxed-exit") {
    double xi = get_or(p, "xi", 0.0), d = get_or(p, "d", 1.0), gamma = get_or(p, "gamma", 0.0);
    double a = get_or(p, "a", b);
    fn = TaxedExit{delta, x, a, xi, d, gamma};
    analytic = taxed_drawdown_exit(set, x, a, xi, d, gamma);
  } else if (functional_name == "drawdown-deficit") {
    double d = get_or(p, "d", 1.0);
    fn = DrawdownDeficitMC{delta, x, d, theta};
    analytic = delta_zw(set, d, theta) / set.w(d, 1);
  } else {
    throw ConfigError("unknown functional: " + functional_name);
  }

  SimConfig cfg;
  cfg.n_paths = paths;
  cfg.seed = seed;
  cfg.dt = dt;
  cfg.horizon = horizon;
  PathEstimate est = estimate(simulate(m, cfg, dyn), fn);
  std::cout << "mean " << fmt(est.mean) << " se " << fmt(est.std_error) << "\n";
  std::cout << "analytic " << fmt(analytic) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scale-function kit for spectrally negative Levy processes"};
  app.require_subcommand(1);

  std::string model_path, backend = "rational", law, output, params, steps_json = "[]";
  std::string objective_tag, preset, dynamics_name, functional_name;
  double delta = 0.0, h = 1.0 / 512.0, x_max = 4.0, theta = 0.0, vartheta = 0.0;
  double x = 0.0, b = kInf, b_max = 0.0, step = 0.0, sigma = 1.4, dt = 1e-3, horizon = 0.0;
  long paths = 100000;
  std::uint64_t seed = 1;
  int samples = 400;
  bool csv = false;

  auto* eval_cmd = app.add_subcommand("eval", "tabulate W, Z and relatives as CSV");
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--delta", delta);
  eval_cmd->add_option("--backend", backend);
  eval_cmd->add_option("--step", h);
  eval_cmd->add_option("--x-max", x_max);
  eval_cmd->add_option("--theta", theta);
  eval_cmd->add_option("--output", output);

  auto* law_cmd = app.add_subcommand("law", "evaluate one first-passage law");
  law_cmd->add_option("--law", law)->required();
  law_cmd->add_option("--model", model_path)->required();
  law_cmd->add_option("--delta", delta);
  law_cmd->add_option("--backend", backend);
  law_cmd->add_option("--x", x);
  law_cmd->add_option("--b", b);
  law_cmd->add_option("--theta", theta);
  law_cmd->add_option("--vartheta", vartheta);
  law_cmd->add_option("--params", params, "extra key=value pairs");
  law_cmd->add_flag("--csv", csv, "emit a grid sweep instead of one value");
  law_cmd->add_option("--samples", samples);
  law_cmd->add_option("--output", output);

  auto* omega_cmd = app.add_subcommand("omega", "solve the omega-scale renewal equations");
  omega_cmd->add_option("--model", model_path)->required();
  omega_cmd->add_option("--steps", steps_json, "step spec [{\"from\":..,\"to\":..,\"rate\":..}]")
      ->required();
  omega_cmd->add_option("--step", h);
  omega_cmd->add_option("--x-max", x_max);
  omega_cmd->add_option("--output", output);

  auto* opt_cmd = app.add_subcommand("optimize", "optimize a dividend barrier");
  opt_cmd->add_option("--objective", objective_tag)->required();
  opt_cmd->add_option("--model", model_path)->required();
  opt_cmd->add_option("--delta", delta);
  opt_cmd->add_option("--params", params);
  opt_cmd->add_option("--b-max", b_max);
  opt_cmd->add_option("--coarse-step", step);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate with analytic reference");
  sim_cmd->add_option("--model", model_path)->required();
  sim_cmd->add_option("--dynamics", dynamics_name)->required();
  sim_cmd->add_option("--functional", functional_name)->required();
  sim_cmd->add_option("--params", params);
  sim_cmd->add_option("--paths", paths);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--dt", dt);
  sim_cmd->add_option("--horizon", horizon);

  auto* fig_cmd = app.add_subcommand("figure", "emit a barrier-function figure as CSV");
  fig_cmd->add_option("--preset", preset)->required();
  fig_cmd->add_option("--sigma", sigma);
  fig_cmd->add_option("--theta", theta)->default_val(-0.01);
  fig_cmd->add_option("--vartheta", vartheta)->default_val(1.0);
  fig_cmd->add_option("--b-max", b_max)->default_val(12.0);
  fig_cmd->add_option("--samples", samples)->default_val(480);
  fig_cmd->add_option("--output", output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (eval_cmd->parsed()) return run_eval(model_path, delta, backend, h, x_max, theta, output);
    if (law_cmd->parsed())
      return run_law(model_path, delta, backend, law, x, b, theta, vartheta, params, csv,
                     samples, output);
    if (omega_cmd->parsed()) return run_omega(model_path, steps_json, h, x_max, output);
    if (opt_cmd->parsed())
      return run_optimize(model_path, delta, objective_tag, params, b_max, step);
    if (sim_cmd->parsed())
      return run_simulate(model_path, dynamics_name, functional_name, params, paths, seed, dt,
                          horizon);
    if (fig_cmd->parsed())
      return run_figure(preset, sigma, theta, vartheta, b_max, samples, output);
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const DeltaError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const DriftSignError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IncompatibleDynamics& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
