#include "scalekit/mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace scalekit {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Per-path stream; the antithetic twin mirrors every uniform draw.
class PathRng {
 public:
  PathRng(std::uint64_t master, long stream, bool antithetic)
      : eng_(splitmix64(master ^ splitmix64(0x5CA1AB1EULL + std::uint64_t(stream)))),
        anti_(antithetic) {}

  double uniform() {
    double u = std::uniform_real_distribution<double>(
        std::numeric_limits<double>::min(), 1.0)(eng_);
    return anti_ ? 1.0 - u * (1.0 - 1e-16) : u;
  }
  double exponential(double rate) { return -std::log(uniform()) / rate; }
  double normal() {
    double u1 = uniform(), u2 = raw_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  double raw_uniform() {
    return std::uniform_real_distribution<double>(std::numeric_limits<double>::min(),
                                                  1.0)(eng_);
  }

  double claim(const JumpSpec& jumps) {
    struct Visitor {
      PathRng* rng;
      double operator()(const NoJumps&) const { return 0.0; }
      double operator()(const ExponentialJumps& e) const { return rng->exponential(e.rate); }
      double operator()(const ErlangJumps& e) const {
        double out = 0.0;
        for (int i = 0; i < e.shape; ++i) out += rng->exponential(e.rate);
        return out;
      }
      double operator()(const HyperExponentialJumps& h) const {
        double u = rng->uniform(), acc = 0.0;
        for (std::size_t i = 0; i < h.rates.size(); ++i) {
          acc += h.weights[i];
          if (u <= acc || i + 1 == h.rates.size()) return rng->exponential(h.rates[i]);
        }
        return 0.0;
      }
    };
    return std::visit(Visitor{this}, jumps.law);
  }

 private:
  std::mt19937_64 eng_;
  bool anti_;
};

struct Accumulator {
  long double sum = 0.0L, sumsq = 0.0L;
  long n = 0;
  void add(double v) {
    sum += v;
    sumsq += static_cast<long double>(v) * v;
    ++n;
  }
  PathEstimate finish() const {
    PathEstimate out;
    out.n_effective = n;
    out.mean = double(sum / n);
    long double var = (sumsq - sum * sum / n) / (n > 1 ? n - 1 : 1);
    out.std_error = std::sqrt(double(std::max(var, 0.0L)) / n);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Exact compound Poisson paths (sigma = 0): linear drift between jumps.
// ---------------------------------------------------------------------------

struct FreeRecord {
  double ruin_time = kNever;
  double deficit = 0.0;          // X(tau_0^-) <= 0
  double exit_time = kNever;     // tau_b^+
  double hit0_time = kNever;     // first creep back to level 0
  double min_before_recovery = 0.0;
  bool recovered = false;
  double drawdown_time = kNever;
  double drawdown_overshoot = 0.0;
};

enum class StopRule { FirstPassage, UntilRecovery, UntilDrawdown };

// Exact simulation of the free path with optional upper level b and drawdown
// width d; stops per `rule` or at the horizon.
FreeRecord run_free_cp(const LevyModel& m, PathRng& rng, double x0, double b, double d,
                       double horizon, StopRule rule) {
  FreeRecord rec;
  const double c = m.drift;
  const double lambda = m.jumps.lambda;
  double t = 0.0, x = x0, xbar = x0;

  auto done = [&]() {
    switch (rule) {
      case StopRule::FirstPassage:
        return rec.ruin_time < kNever || rec.exit_time < kNever;
      case StopRule::UntilRecovery:
        return rec.recovered;
      case StopRule::UntilDrawdown:
        return rec.drawdown_time < kNever;
    }
    return true;
  };

  while (t < horizon && !done()) {
    double seg = (lambda > 0.0) ? rng.exponential(lambda) : (horizon - t);
    double t_end = std::min(t + seg, horizon);

    // Linear climb on [t, t_end]: handle level crossings in time order.
    if (x < 0.0 && c > 0.0) {
      double t_cross = t + (0.0 - x) / c;
      if (t_cross <= t_end) {
        if (rec.hit0_time == kNever) rec.hit0_time = t_cross;
        if (rec.ruin_time < kNever && !rec.recovered) rec.recovered = true;
        if (rule == StopRule::UntilRecovery && rec.recovered) {
          // position at the crossing is 0; path state no longer needed
          return rec;
        }
      }
    }
    if (std::isfinite(b) && x <= b && c > 0.0) {
      double t_up = t + (b - x) / c;
      if (t_up <= t_end && rec.exit_time == kNever && rec.ruin_time == kNever) {
        rec.exit_time = t_up;
        if (rule == StopRule::FirstPassage) return rec;
      }
    }
    double x_end = x + c * (t_end - t);
    xbar = std::max(xbar, x_end);
    x = x_end;
    t = t_end;
    if (t >= horizon) break;

    // Jump.
    double jump = rng.claim(m.jumps);
    double x_new = x - jump;
    if (x >= 0.0 && x_new < 0.0 && rec.ruin_time == kNever) {
      rec.ruin_time = t;
      rec.deficit = x_new;
      rec.min_before_recovery = x_new;
    } else if (rec.ruin_time < kNever && !rec.recovered && x_new < rec.min_before_recovery) {
      rec.min_before_recovery = x_new;
    }
    if (xbar - x_new >= d && rec.drawdown_time == kNever) {
      rec.drawdown_time = t;
      rec.drawdown_overshoot = (xbar - x_new) - d;
      if (rule == StopRule::UntilDrawdown) return rec;
    }
    x = x_new;
    if (rule == StopRule::FirstPassage && rec.ruin_time < kNever) return rec;
  }
  return rec;
}

// Euler substeps with Brownian-bridge crossing corrections; supports ruin
// and upper-exit detection only.
FreeRecord run_free_gauss(const LevyModel& m, PathRng& rng, double x0, double b, double dt,
                          double horizon) {
  FreeRecord rec;
  const double c = m.drift, sigma = m.sigma;
  const double lambda = m.jumps.lambda;
  double t = 0.0, x = x0;
  double t_jump = (lambda > 0.0) ? rng.exponential(lambda) : kNever;

  while (t < horizon) {
    double step = std::min(dt, horizon - t);
    bool jump_now = t_jump <= t + step;
    if (jump_now) step = t_jump - t;
    if (step > 0.0) {
      double z = rng.normal();
      double x1 = x + c * step + sigma * std::sqrt(step) * z;
      // bridge crossing probabilities for the two levels
      if (x > 0.0 && x1 > 0.0) {
        double p = std::exp(-2.0 * x * x1 / (sigma * sigma * step));
        if (rng.raw_uniform() < p) {
          rec.ruin_time = t + 0.5 * step;
          rec.deficit = 0.0;
          return rec;
        }
      } else if (x1 <= 0.0) {
        rec.ruin_time = t + step;
        rec.deficit = x1;
        return rec;
      }
      if (std::isfinite(b)) {
        if (x1 >= b) {
          rec.exit_time = t + step;
          return rec;
        }
        double p = std::exp(-2.0 * (b - x) * (b - x1) / (sigma * sigma * step));
        if (rng.raw_uniform() < p) {
          rec.exit_time = t + 0.5 * step;
          return rec;
        }
      }
      x = x1;
      t += step;
    }
    if (jump_now) {
      double x_new = x - rng.claim(m.jumps);
      if (x_new <= 0.0) {
        rec.ruin_time = t;
        rec.deficit = x_new;
        return rec;
      }
      x = x_new;
      t_jump = t + ((lambda > 0.0) ? rng.exponential(lambda) : kNever);
    }
  }
  return rec;
}

struct ReflectedRecord {
  double tau_b = kNever;         // first passage of the reflected-below process to b
  double rstar_at_tau_b = 0.0;
  double disc_injections = 0.0;  // int e^{-delta t} dR_* up to tau_b (or horizon)
};

ReflectedRecord run_reflected_below_cp(const LevyModel& m, PathRng& rng, double x0, double b,
                                       double delta, double horizon) {
  ReflectedRecord rec;
  const double c = m.drift, lambda = m.jumps.lambda;
  double t = 0.0, x = x0, rstar = 0.0;
  while (t < horizon) {
    double seg = (lambda > 0.0) ? rng.exponential(lambda) : (horizon - t);
    double t_end = std::min(t + seg, horizon);
    double t_up = t + (b - x) / c;
    if (t_up <= t_end) {
      rec.tau_b = t_up;
      rec.rstar_at_tau_b = rstar;
      return rec;
    }
    x += c * (t_end - t);
    t = t_end;
    if (t >= horizon) break;
    double x_new = x - rng.claim(m.jumps);
    if (x_new < 0.0) {
      double push = -x_new;
      rstar += push;
      rec.disc_injections += std::exp(-delta * t) * push;
      x_new = 0.0;
    }
    x = x_new;
  }
  return rec;
}

struct DoublyReflectedRecord {
  double disc_dividends = 0.0;
  double disc_injections = 0.0;
  double dividends_until_ruin = 0.0;  // reflect-above only, absorb at 0
  double ruin_time = kNever;
};

// mode 0: reflect above at b, absorb below 0 (dividends until ruin)
// mode 1: doubly reflected (infinite-horizon discounted regulators)
DoublyReflectedRecord run_upper_reflected_cp(const LevyModel& m, PathRng& rng, double x0,
                                             double b, double delta, double horizon, int mode) {
  DoublyReflectedRecord rec;
  const double c = m.drift, lambda = m.jumps.lambda;
  double t = 0.0, x = std::min(x0, b);
  while (t < horizon) {
    double seg = (lambda > 0.0) ? rng.exponential(lambda) : (horizon - t);
    double t_end = std::min(t + seg, horizon);
    if (x < b) {
      double t_up = t + (b - x) / c;
      if (t_up < t_end) {
        // pays dividends at rate c while sitting at b
        double a0 = std::exp(-delta * t_up), a1 = std::exp(-delta * t_end);
        double amount = c * (a0 - a1) / delta;
        rec.disc_dividends += amount;
        rec.dividends_until_ruin += amount;
        x = b;
      } else {
        x += c * (t_end - t);
      }
    } else {
      double a0 = std::exp(-delta * t), a1 = std::exp(-delta * t_end);
      double amount = c * (a0 - a1) / delta;
      rec.disc_dividends += amount;
      rec.dividends_until_ruin += amount;
    }
    t = t_end;
    if (t >= horizon) break;
    double x_new = x - rng.claim(m.jumps);
    if (x_new < 0.0) {
      if (mode == 0) {
        rec.ruin_time = t;
        return rec;
      }
      rec.disc_injections += std::exp(-delta * t) * (-x_new);
      x_new = 0.0;
    }
    x = x_new;
    if (x < -1e-12 || x > b + 1e-12) throw ConfigError("reflected path left [0, b]");
  }
  return rec;
}

struct OccupationRecord {
  double time_below = 0.0;
  double time_above = 0.0;
  double final_x = 0.0;
};

OccupationRecord run_occupation_cp(const LevyModel& m, PathRng& rng, double x0, double horizon) {
  OccupationRecord rec;
  const double c = m.drift, lambda = m.jumps.lambda;
  double t = 0.0, x = x0;
  while (t < horizon) {
    double seg = (lambda > 0.0) ? rng.exponential(lambda) : (horizon - t);
    double t_end = std::min(t + seg, horizon);
    double dt_seg = t_end - t;
    if (x >= 0.0) {
      rec.time_above += dt_seg;
    } else {
      double t_cross = (0.0 - x) / c;
      if (t_cross >= dt_seg) {
        rec.time_below += dt_seg;
      } else {
        rec.time_below += t_cross;
        rec.time_above += dt_seg - t_cross;
      }
    }
    x += c * dt_seg;
    t = t_end;
    if (t >= horizon) break;
    x -= rng.claim(m.jumps);
  }
  rec.final_x = x;
  return rec;
}

double run_parisian_cp(const LevyModel& m, PathRng& rng, double x0, double r, double horizon) {
  // Returns the Parisian ruin time (exponential observation clocks restarted
  // per negative excursion are equivalent to a global Poisson observer).
  const double c = m.drift, lambda = m.jumps.lambda;
  double t = 0.0, x = x0;
  double obs = kNever;  // next observation time while below 0
  while (t < horizon) {
    double seg = (lambda > 0.0) ? rng.exponential(lambda) : (horizon - t);
    double t_end = std::min(t + seg, horizon);
    if (x < 0.0) {
      double t_cross = t + (0.0 - x) / c;
      if (obs == kNever) obs = t + rng.exponential(r);
      if (obs <= std::min(t_cross, t_end)) return obs;
      if (t_cross <= t_end) obs = kNever;  // recovered unobserved
    }
    x += c * (t_end - t);
    t = t_end;
    if (t >= horizon) break;
    double was_neg = x < 0.0;
    x -= rng.claim(m.jumps);
    if (x < 0.0 && !was_neg) obs = kNever;  // new excursion: clock drawn lazily above
  }
  return kNever;
}

struct TaxedRecord {
  double exit_time = kNever;      // tau^+_{a,gamma}
  double drawdown_time = kNever;  // sigma_{xi,gamma}
};

TaxedRecord run_taxed_cp(const LevyModel& m, PathRng& rng, double u0, double a, double xi,
                         double d, double gamma, double horizon) {
  // Simulate the untaxed pair (X, Xbar); the taxed process is
  // U = X - gamma (Xbar - u0), Ubar = (1-gamma) Xbar + gamma u0.
  TaxedRecord rec;
  const double c = m.drift, lambda = m.jumps.lambda;
  double t = 0.0, x = u0, xbar = u0;
  const double xbar_exit = (a - gamma * u0) / (1.0 - gamma);  // U > a at the max
  auto drawdown_hit = [&](double xx, double mbar) {
    double U = xx - gamma * (mbar - u0);
    double Ubar = (1.0 - gamma) * mbar + gamma * u0;
    return U < xi * Ubar - d;
  };
  while (t < horizon) {
    double seg = (lambda > 0.0) ? rng.exponential(lambda) : (horizon - t);
    double t_end = std::min(t + seg, horizon);
    double x_end = x + c * (t_end - t);
    // Xbar up-crosses the exit level only while X sits at the maximum, so the
    // crossing instant is just X climbing through it (xbar <= xbar_exit here).
    if (x_end >= xbar_exit) {
      rec.exit_time = t + (xbar_exit - x) / c;
      return rec;
    }
    x = x_end;
    xbar = std::max(xbar, x);
    t = t_end;
    if (t >= horizon) break;
    x -= rng.claim(m.jumps);
    if (drawdown_hit(x, xbar)) {
      rec.drawdown_time = t;
      return rec;
    }
  }
  return rec;
}

long streams_for(const SimConfig& cfg) { return cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths; }

template <class PerPath>
PathEstimate run_paths(const SimConfig& cfg, PerPath&& per_path) {
  Accumulator acc;
  PathEstimate stats;
  long streams = streams_for(cfg);
  for (long i = 0; i < streams; ++i) {
    {
      PathRng rng(cfg.seed, i, false);
      acc.add(per_path(rng, stats));
    }
    if (cfg.antithetic) {
      PathRng rng(cfg.seed, i, true);
      acc.add(per_path(rng, stats));
    }
  }
  PathEstimate out = acc.finish();
  out.ruin_count = stats.ruin_count;
  out.exit_count = stats.exit_count;
  out.drawdown_count = stats.drawdown_count;
  out.parisian_ruin_count = stats.parisian_ruin_count;
  return out;
}

double pick_horizon(const SimConfig& cfg, double delta) {
  if (cfg.horizon > 0.0) return cfg.horizon;
  if (delta > 0.0) return 40.0 / delta;
  return 2000.0;
}

void require_dynamics(bool ok) {
  if (!ok) throw IncompatibleDynamics("functional incompatible with the ensemble dynamics");
}

}  // namespace

PathEstimate estimate(const PathEnsemble& ensemble, const Functional& functional) {
  ensemble.config.validate();
  const LevyModel& m = ensemble.model;
  const SimConfig& cfg = ensemble.config;
  const bool exact = m.sigma == 0.0;
  const bool is_free = std::holds_alternative<Free>(ensemble.dynamics);

  struct Visitor {
    const LevyModel& m;
    const SimConfig& cfg;
    const PathEnsemble& ens;
    bool exact, is_free;

    PathEstimate operator()(const RuinProb& f) const {
      require_dynamics(is_free);
      double T = pick_horizon(cfg, 0.0);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        FreeRecord r = exact
                           ? run_free_cp(m, rng, f.x, kNever, kNever, T, StopRule::FirstPassage)
                           : run_free_gauss(m, rng, f.x, kNever, cfg.dt, T);
        if (r.ruin_time < kNever) ++s.ruin_count;
        return r.ruin_time < kNever ? 1.0 : 0.0;
      });
    }
    PathEstimate operator()(const KilledExitUp& f) const {
      require_dynamics(is_free);
      double T = pick_horizon(cfg, f.delta);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        FreeRecord r = exact ? run_free_cp(m, rng, f.x, f.b, kNever, T, StopRule::FirstPassage)
                             : run_free_gauss(m, rng, f.x, f.b, cfg.dt, T);
        if (r.exit_time < kNever && r.ruin_time == kNever) {
          ++s.exit_count;
          return std::exp(-f.delta * r.exit_time);
        }
        return 0.0;
      });
    }
    PathEstimate operator()(const RuinTransform& f) const {
      require_dynamics(is_free);
      double T = pick_horizon(cfg, f.delta);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        FreeRecord r = exact
                           ? run_free_cp(m, rng, f.x, kNever, kNever, T, StopRule::FirstPassage)
                           : run_free_gauss(m, rng, f.x, kNever, cfg.dt, T);
        if (r.ruin_time == kNever) return 0.0;
        ++s.ruin_count;
        return std::exp(-f.delta * r.ruin_time + f.theta * r.deficit);
      });
    }
    PathEstimate operator()(const KilledHitting& f) const {
      require_dynamics(is_free && exact);
      double T = pick_horizon(cfg, f.delta);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        FreeRecord r = run_free_cp(m, rng, f.x, kNever, kNever, T, StopRule::UntilRecovery);
        return r.hit0_time < kNever ? std::exp(-f.delta * r.hit0_time) : 0.0;
      });
    }
    PathEstimate operator()(const HittingMean& f) const {
      require_dynamics(is_free && exact);
      double T = pick_horizon(cfg, 0.0);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        FreeRecord r = run_free_cp(m, rng, f.x, kNever, kNever, T, StopRule::UntilRecovery);
        return r.hit0_time < kNever ? r.hit0_time : 0.0;
      });
    }
    PathEstimate operator()(const MeanExitTime& f) const {
      require_dynamics(is_free && exact);
      double T = pick_horizon(cfg, 0.0);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        FreeRecord r = run_free_cp(m, rng, f.x, f.b, kNever, T, StopRule::FirstPassage);
        return std::min(std::min(r.ruin_time, r.exit_time), T);
      });
    }
    PathEstimate operator()(const MaximalSeverityFreq& f) const {
      require_dynamics(is_free && exact);
      double T = pick_horizon(cfg, 0.0);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        FreeRecord r = run_free_cp(m, rng, f.x, kNever, kNever, T, StopRule::UntilRecovery);
        if (r.ruin_time == kNever) return 0.0;
        ++s.ruin_count;
        return (r.min_before_recovery > -f.u) ? 1.0 : 0.0;
      });
    }
    PathEstimate operator()(const CapitalInjection& f) const {
      require_dynamics(exact && std::holds_alternative<ReflectBelow0>(ens.dynamics));
      double T = pick_horizon(cfg, f.delta);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        auto r = run_reflected_below_cp(m, rng, f.x, f.b, f.delta, T);
        if (r.tau_b == kNever) return 0.0;
        ++s.exit_count;
        return std::exp(-f.delta * r.tau_b - f.theta * r.rstar_at_tau_b);
      });
    }
    PathEstimate operator()(const ParisianRuinProb& f) const {
      require_dynamics(exact && std::holds_alternative<ParisianObserved>(ens.dynamics));
      double r_obs = std::get<ParisianObserved>(ens.dynamics).r;
      double T = pick_horizon(cfg, 0.0);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        double tp = run_parisian_cp(m, rng, f.x, r_obs, T);
        if (tp < kNever) {
          ++s.parisian_ruin_count;
          return 1.0;
        }
        return 0.0;
      });
    }
    PathEstimate operator()(const DiscountedDividends& f) const {
      double T = pick_horizon(cfg, f.delta);
      if (f.until_ruin) {
        require_dynamics(exact && std::holds_alternative<ReflectAt>(ens.dynamics) &&
                         std::get<ReflectAt>(ens.dynamics).b == f.b);
        return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
          auto r = run_upper_reflected_cp(m, rng, f.x, f.b, f.delta, T, 0);
          if (r.ruin_time < kNever) ++s.ruin_count;
          return r.dividends_until_ruin;
        });
      }
      require_dynamics(exact && std::holds_alternative<DoublyReflect>(ens.dynamics) &&
                       std::get<DoublyReflect>(ens.dynamics).b == f.b);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        return run_upper_reflected_cp(m, rng, f.x, f.b, f.delta, T, 1).disc_dividends;
      });
    }
    PathEstimate operator()(const DiscountedInjections& f) const {
      double T = pick_horizon(cfg, f.delta);
      if (f.until_tau_b) {
        require_dynamics(exact && std::holds_alternative<ReflectBelow0>(ens.dynamics));
        return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
          return run_reflected_below_cp(m, rng, f.x, f.b, f.delta, T).disc_injections;
        });
      }
      require_dynamics(exact && std::holds_alternative<DoublyReflect>(ens.dynamics) &&
                       std::get<DoublyReflect>(ens.dynamics).b == f.b);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        return run_upper_reflected_cp(m, rng, f.x, f.b, f.delta, T, 1).disc_injections;
      });
    }
    PathEstimate operator()(const OccupationBelow0LT& f) const {
      require_dynamics(is_free && exact);
      double T = pick_horizon(cfg, 0.0);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        return std::exp(-f.r * run_occupation_cp(m, rng, f.x, T).time_below);
      });
    }
    PathEstimate operator()(const OccupationPositiveLT& f) const {
      require_dynamics(is_free && exact);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        double TE = rng.exponential(f.delta);
        return std::exp(-f.r * run_occupation_cp(m, rng, f.x, TE).time_above) / f.delta;
      });
    }
    PathEstimate operator()(const OccupationJointLT& f) const {
      require_dynamics(is_free && exact);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate&) {
        double TE = rng.exponential(f.delta);
        OccupationRecord rec = run_occupation_cp(m, rng, f.x, TE);
        if (rec.final_x < f.lo || rec.final_x > f.hi) return 0.0;
        return std::exp(-f.rm * rec.time_below - f.rp * rec.time_above) / f.delta;
      });
    }
    PathEstimate operator()(const DrawdownDeficitMC& f) const {
      require_dynamics(is_free && exact);
      double T = pick_horizon(cfg, f.delta);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        FreeRecord r = run_free_cp(m, rng, f.x, kNever, f.d, T, StopRule::UntilDrawdown);
        if (r.drawdown_time == kNever) return 0.0;
        ++s.drawdown_count;
        return std::exp(-f.delta * r.drawdown_time - f.theta * r.drawdown_overshoot);
      });
    }
    PathEstimate operator()(const TaxedExit& f) const {
      require_dynamics(exact && std::holds_alternative<Taxed>(ens.dynamics) &&
                       std::get<Taxed>(ens.dynamics).gamma == f.gamma);
      double T = pick_horizon(cfg, f.delta);
      return run_paths(cfg, [&](PathRng& rng, PathEstimate& s) {
        TaxedRecord r = run_taxed_cp(m, rng, f.u, f.a, f.xi, f.d, f.gamma, T);
        if (r.exit_time < kNever) {
          ++s.exit_count;
          return std::exp(-f.delta * r.exit_time);
        }
        if (r.drawdown_time < kNever) ++s.drawdown_count;
        return 0.0;
      });
    }
  };
  return std::visit(Visitor{m, cfg, ensemble, exact, is_free}, functional);
}

TerminalSamples simulate_terminal_samples(const LevyModel& m, const SimConfig& config,
                                          double t_end) {
  config.validate();
  TerminalSamples out;
  long streams = streams_for(config);
  for (long i = 0; i < (config.antithetic ? 2 * streams : streams); ++i) {
    PathRng rng(config.seed, config.antithetic ? i / 2 : i,
                config.antithetic && (i % 2 == 1));
    double t = 0.0, x = 0.0, xbar = 0.0, xmin = 0.0;
    if (m.sigma == 0.0) {
      while (t < t_end) {
        double seg = (m.jumps.lambda > 0.0) ? rng.exponential(m.jumps.lambda) : (t_end - t);
        double dt_seg = std::min(seg, t_end - t);
        x += m.drift * dt_seg;
        xbar = std::max(xbar, x);
        t += dt_seg;
        if (t >= t_end) break;
        x -= rng.claim(m.jumps);
        xmin = std::min(xmin, x);
      }
    } else {
      double t_jump = (m.jumps.lambda > 0.0) ? rng.exponential(m.jumps.lambda) : kNever;
      while (t < t_end) {
        double step = std::min(config.dt, t_end - t);
        bool jump_now = t_jump <= t + step;
        if (jump_now) step = std::max(t_jump - t, 0.0);
        if (step > 0.0) {
          double x1 = x + m.drift * step + m.sigma * std::sqrt(step) * rng.normal();
          double span = x1 - x;
          double mx = 0.5 * (x + x1 +
                             std::sqrt(span * span -
                                       2.0 * m.sigma * m.sigma * step * std::log(rng.raw_uniform())));
          double mn = 0.5 * (x + x1 -
                             std::sqrt(span * span -
                                       2.0 * m.sigma * m.sigma * step * std::log(rng.raw_uniform())));
          xbar = std::max(xbar, mx);
          xmin = std::min(xmin, mn);
          x = x1;
          t += step;
        }
        if (jump_now) {
          x -= rng.claim(m.jumps);
          xmin = std::min(xmin, x);
          t_jump = t + ((m.jumps.lambda > 0.0) ? rng.exponential(m.jumps.lambda) : kNever);
        }
      }
    }
    out.running_max.push_back(xbar);
    out.drawdown.push_back(xbar - x);
    out.drawup.push_back(x - xmin);
    out.neg_infimum.push_back(-xmin);
  }
  return out;
}

std::vector<double> sample_reflected_dividends(const LevyModel& m, const SimConfig& config,
                                               double x, double b, double delta) {
  // Total top-regulator mass R at an independent exponential time for the
  // process DOUBLY reflected at 0 and b. Compound Poisson paths are exact;
  // a Gaussian part uses substeps with bridge extremes (small O(dt) bias in
  // the rare substeps that touch both boundaries).
  config.validate();
  std::vector<double> out;
  for (long i = 0; i < config.n_paths; ++i) {
    PathRng rng(config.seed, i, false);
    double TE = rng.exponential(delta);
    double t = 0.0, cur = std::min(x, b), R = 0.0;
    if (m.sigma == 0.0) {
      while (t < TE) {
        double seg = (m.jumps.lambda > 0.0) ? rng.exponential(m.jumps.lambda) : (TE - t);
        double t_end = std::min(t + seg, TE);
        double t_up = cur < b ? t + (b - cur) / m.drift : t;
        if (t_up < t_end) {
          R += m.drift * (t_end - t_up);
          cur = b;
        } else {
          cur += m.drift * (t_end - t);
        }
        t = t_end;
        if (t >= TE) break;
        cur -= rng.claim(m.jumps);
        if (cur < 0.0) cur = 0.0;
      }
    } else {
      double t_jump = (m.jumps.lambda > 0.0) ? rng.exponential(m.jumps.lambda) : kNever;
      while (t < TE) {
        double step = std::min(config.dt, TE - t);
        bool jump_now = t_jump <= t + step;
        if (jump_now) step = std::max(t_jump - t, 0.0);
        if (step > 0.0) {
          double x1 = cur + m.drift * step + m.sigma * std::sqrt(step) * rng.normal();
          double span = x1 - cur;
          double s2t = m.sigma * m.sigma * step;
          double mx = 0.5 * (cur + x1 + std::sqrt(span * span - 2.0 * s2t * std::log(rng.raw_uniform())));
          double mn = 0.5 * (cur + x1 - std::sqrt(span * span - 2.0 * s2t * std::log(rng.raw_uniform())));
          if (mx > b) {  // top regulator: clip at b by the bridge maximum
            R += mx - b;
            x1 -= mx - b;
          }
          if (mn < 0.0) x1 += -mn;  // bottom regulator pushes by the bridge depth
          cur = std::min(std::max(x1, 0.0), b);
          t += step;
        }
        if (jump_now) {
          cur -= rng.claim(m.jumps);
          if (cur < 0.0) cur = 0.0;
          t_jump = t + ((m.jumps.lambda > 0.0) ? rng.exponential(m.jumps.lambda) : kNever);
        }
      }
    }
    out.push_back(R);
  }
  return out;
}

}  // namespace scalekit
