#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

#include "CLI11.hpp"
#include "persuasion/error.hpp"
#include "persuasion/io.hpp"
#include "persuasion/numeric.hpp"
#include "persuasion/oracle.hpp"
#include "persuasion/robust.hpp"
#include "persuasion/sdsu.hpp"
#include "persuasion/sisu.hpp"

namespace persuasion::cli {

namespace {

using io::json;

constexpr std::size_t kFamilyCap = 8;

double parse_double(const std::string& s, const std::string& what) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x)) {
    throw ValidationError("bad " + what + " '" + s + "'");
  }
  return x;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ValidationError("bad " + what + " '" + s + "'");
  return n;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) return parts;
    start = pos + 1;
  }
}

std::string csv_double(double x) {
  if (!std::isfinite(x)) return io::format_double(x);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

struct Config {
  std::string instance_path;
  std::string beta = "1";
  std::string mode;
  std::string scheme;
  std::size_t grid_points = 2001;
  bool augment = false;
  std::size_t n = 1000000;
  std::uint64_t seed = 7;
  bool csv = false;
  std::string family;
  std::string m_range = "3..6";
};

oracle::GridOptions grid_options(const Config& c) {
  oracle::GridOptions g;
  g.points = c.grid_points;
  return g;
}

Instance require_instance(const Config& c) {
  if (c.instance_path.empty()) throw ValidationError("--instance is required");
  return io::load_instance(c.instance_path);
}

struct Solved {
  Scheme scheme;
  std::optional<CensorshipParams> params;
  std::string note;
  std::string extra_key;
  json extra;
};

Solved solve_one(const std::string& mode, const Instance& inst, const RationalityLevel& level,
                 const Config& c) {
  Solved s;
  if (mode == "rational") {
    s.params = sisu::rational_optimal(inst);
    s.scheme = make_censorship(inst, *s.params);
  } else if (mode == "sisu") {
    if (!inst.state_independent()) throw ValidationError("mode sisu needs equal sender utilities");
    auto q = sisu::quantal_optimal(inst, level);
    s.params = q.params;
    s.scheme = std::move(q.scheme);
    s.note = q.note;
  } else if (mode == "sdsu-binary") {
    auto b = sdsu::binary_optimal(inst, level);
    s.params = b.params;
    s.scheme = std::move(b.scheme);
    s.note = b.note;
    s.extra_key = "regime";
    s.extra = sdsu::regime_name(b.regime);
  } else if (mode == "pairwise") {
    s.scheme = sdsu::optimal_pairwise(inst, level, grid_options(c));
  } else if (mode == "four-approx") {
    auto f = sdsu::four_approx(inst, level, grid_options(c));
    s.scheme = std::move(f.scheme);
    s.extra_key = "assignment";
    s.extra = json{{"integral", f.integral.value}, {"fractional", f.fractional.value}};
  } else if (mode == "censorship-approx" || mode == "direct-approx") {
    auto a = mode == "censorship-approx" ? sdsu::censorship_m_approx(inst, level)
                                         : sdsu::direct_m_approx(inst, level, grid_options(c));
    s.params = a.params;
    s.scheme = std::move(a.scheme);
    s.extra_key = "chosen";
    s.extra = a.chosen;
  } else {
    throw ValidationError("unknown mode '" + mode + "'");
  }
  return s;
}

int cmd_solve(const Config& c, std::ostream& out) {
  const Instance inst = require_instance(c);
  if (c.mode.empty()) throw ValidationError("--mode is required");
  const auto levels = c.mode == "rational" ? std::vector{RationalityLevel::fully_rational()}
                                           : parse_level_spec(c.beta);
  if (c.csv) out << "beta,payoff,log_payoff,signals\n";
  json results = json::array();
  for (const auto& level : levels) {
    const Solved s = solve_one(c.mode, inst, level, c);
    const double pay = evaluate_payoff(inst, level, s.scheme);
    const double lp = log_payoff(inst, level, s.scheme);
    if (c.csv) {
      out << level.label() << ',' << csv_double(pay) << ',' << csv_double(lp) << ',' << s.scheme.size() << '\n';
      continue;
    }
    json r{{"beta", level.label()}, {"payoff", pay}, {"log_payoff", io::number(lp)},
           {"scheme", io::to_json(s.scheme)}};
    if (s.params) r["params"] = io::to_json(*s.params);
    if (!s.note.empty()) r["note"] = s.note;
    if (!s.extra_key.empty()) r[s.extra_key] = s.extra;
    results.push_back(std::move(r));
  }
  if (!c.csv) out << json{{"command", "solve"}, {"mode", c.mode}, {"results", std::move(results)}}.dump(2) << '\n';
  return kOk;
}

Scheme named_scheme(const std::string& name, const Instance& inst,
                    const std::vector<RationalityLevel>& levels, json& meta) {
  if (name == "rational-censorship") return robust::sisu_robust_scheme(inst);
  if (name.rfind("opt:", 0) == 0) {
    const auto level = parse_level(name.substr(4));
    auto o = robust::optimum(inst, level);
    meta["solver"] = o.solver;
    return o.scheme;
  }
  if (name.rfind("binary-robust", 0) == 0) {
    double K = 1.0;
    std::optional<double> beta0;
    const auto colon = name.find(':');
    if (colon != std::string::npos) {
      for (const auto& kv : split(name.substr(colon + 1), ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ValidationError("expected key=value in '" + kv + "'");
        const auto key = kv.substr(0, eq);
        const double val = parse_double(kv.substr(eq + 1), key);
        if (key == "K") K = val;
        else if (key == "beta0") beta0 = val;
        else throw ValidationError("unknown binary-robust parameter '" + key + "'");
      }
    }
    if (!beta0) {
      for (const auto& l : levels) {
        if (l.is_finite() && l.beta() > 0.0) beta0 = beta0 ? std::min(*beta0, l.beta()) : l.beta();
      }
      if (!beta0) throw ValidationError("binary-robust needs beta0 or a positive finite beta");
    }
    const auto br = robust::binary_robust_scheme(inst, *beta0, K);
    meta["K"] = K;
    meta["beta0"] = *beta0;
    meta["q"] = br.q;
    meta["certified_bound"] = br.certified_bound;
    return br.scheme;
  }
  return io::load_scheme(name);
}

int cmd_robust(const Config& c, std::ostream& out) {
  const Instance inst = require_instance(c);
  if (c.scheme.empty()) throw ValidationError("--scheme is required");
  const auto levels = parse_level_spec(c.beta);
  json meta = json::object();
  const Scheme scheme = named_scheme(c.scheme, inst, levels, meta);
  robust::RobustOptions opts;
  opts.grid = grid_options(c);
  const auto report = robust::robust_ratio(inst, scheme, levels, opts);
  if (c.csv) {
    out << "beta,opt_payoff,scheme_payoff,ratio,solver\n";
    for (const auto& r : report.rows) {
      out << r.level.label() << ',' << csv_double(r.opt_payoff) << ',' << csv_double(r.scheme_payoff) << ','
          << csv_double(r.ratio) << ',' << r.solver << '\n';
    }
    return kOk;
  }
  json j = io::to_json(report);
  j["command"] = "robust";
  j["scheme_name"] = c.scheme;
  j["scheme"] = io::to_json(scheme);
  if (!meta.empty()) j["scheme_meta"] = std::move(meta);
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_bench(const Config& c, std::ostream& out) {
  const auto [lo, hi] = parse_m_range(c.m_range);
  if (c.family == "sisu-direct") {
    out << "m,beta,log_opt,log_best_direct,ratio,bound\n";
    for (std::size_t m = lo; m <= hi; ++m) {
      const auto gi = sisu::direct_gap_instance(m);
      const double lo_opt = sisu::quantal_optimal(gi.instance, gi.level).log_payoff;
      const double lo_dir = sisu::best_direct(gi.instance, gi.level).log_payoff;
      out << m << ',' << csv_double(gi.level.beta()) << ',' << csv_double(lo_opt) << ',' << csv_double(lo_dir)
          << ',' << csv_double(std::exp(lo_opt - lo_dir)) << ','
          << csv_double(static_cast<double>(m) / (4.0 * std::numbers::e + 1.0)) << '\n';
    }
  } else if (c.family == "sdsu-lower") {
    out << "m,beta,log_witness,log_best_censorship,log_best_direct,censorship_ratio,direct_ratio\n";
    for (std::size_t m = lo; m <= hi; ++m) {
      const auto li = sdsu::signal_count_instance(m);
      const double lw = log_payoff(li.instance, li.level, sdsu::signal_count_witness(li.instance, li.level));
      const double lc = sdsu::best_censorship(li.instance, li.level).log_payoff;
      const double ld = sdsu::best_censorship(li.instance, li.level, 201, true).log_payoff;
      out << m << ',' << csv_double(li.level.beta()) << ',' << csv_double(lw) << ',' << csv_double(lc) << ','
          << csv_double(ld) << ',' << csv_double(std::exp(lw - lc)) << ',' << csv_double(std::exp(lw - ld))
          << '\n';
    }
  } else if (c.family == "impossibility") {
    // Row m uses the levels 1, 4, ..., 4^(m-1).
    out << "m,top_beta,factor_revealing_bound,cross_ratio\n";
    const Instance inst = robust::cross_level_instance();
    for (std::size_t m = lo; m <= hi; ++m) {
      std::vector<double> levels;
      for (std::size_t l = 0; l < m; ++l) levels.push_back(std::pow(4.0, static_cast<double>(l)));
      const double fr = robust::factor_revealing_bound(inst, levels).bound;
      double cross = 1.0;
      if (m >= 2) {
        const auto top = RationalityLevel::finite(levels.back());
        const auto prev = RationalityLevel::finite(levels[m - 2]);
        cross = evaluate_payoff(inst, top, robust::optimum(inst, prev).scheme) / robust::optimum(inst, top).payoff;
      }
      out << m << ',' << csv_double(levels.back()) << ',' << csv_double(fr) << ',' << csv_double(cross) << '\n';
    }
  } else {
    throw ValidationError("unknown family '" + c.family + "' (sisu-direct, sdsu-lower, impossibility)");
  }
  return kOk;
}

int cmd_oracle(const Config& c, std::ostream& out) {
  const Instance inst = require_instance(c);
  const auto levels = parse_level_spec(c.beta);
  json rows = json::array();
  if (c.csv) out << "beta,grid_size,value,dual_value,duality_gap,solver_payoff,gap\n";
  for (const auto& level : levels) {
    if (level.is_fully_rational()) throw ValidationError("the grid oracle needs a finite beta");
    oracle::GridOptions g = grid_options(c);
    std::optional<robust::OptimumValue> exact;
    if (inst.state_independent() || inst.size() == 2) {
      exact = robust::optimum(inst, level);
      if (c.augment) {
        for (const Signal& s : exact->scheme.signals()) g.extra.push_back(s.delta);
      }
    }
    const auto lp = oracle::grid_lp_optimal(inst, level, g);
    const double gap = exact ? std::abs(lp.value - exact->payoff) : std::nan("");
    if (c.csv) {
      out << level.label() << ',' << lp.grid.size() << ',' << csv_double(lp.value) << ','
          << csv_double(lp.dual_value) << ',' << csv_double(lp.duality_gap) << ','
          << csv_double(exact ? exact->payoff : std::nan("")) << ',' << csv_double(gap) << '\n';
      continue;
    }
    json r{{"beta", level.label()},
           {"grid_points", c.grid_points},
           {"grid_size", lp.grid.size()},
           {"augmented", c.augment},
           {"value", lp.value},
           {"dual_value", lp.dual_value},
           {"duality_gap", lp.duality_gap},
           {"pivots", lp.pivots},
           {"scheme", io::to_json(lp.scheme)}};
    if (exact) {
      r["solver"] = exact->solver;
      r["solver_payoff"] = exact->payoff;
      r["gap"] = gap;
    }
    rows.push_back(std::move(r));
  }
  if (!c.csv) out << json{{"command", "oracle"}, {"results", std::move(rows)}}.dump(2) << '\n';
  return kOk;
}

int cmd_simulate(const Config& c, std::ostream& out) {
  const Instance inst = require_instance(c);
  if (c.n == 0) throw ValidationError("--n must be at least 1");
  const auto levels = parse_level_spec(c.beta);
  if (levels.size() != 1 || !levels.front().is_finite()) {
    throw ValidationError("simulate needs exactly one finite beta");
  }
  const auto& level = levels.front();
  json meta = json::object();
  const Scheme scheme = c.scheme.empty() || c.scheme == "opt" ? robust::optimum(inst, level).scheme
                                                              : named_scheme(c.scheme, inst, levels, meta);
  const auto rep = oracle::gumbel_simulate(inst, level, scheme, c.n, c.seed);
  if (c.csv) {
    out << "delta,expected,rate,tolerance,within\n";
    for (const auto& s : rep.signals) {
      out << csv_double(s.delta) << ',' << csv_double(s.expected) << ',' << csv_double(s.rate) << ','
          << csv_double(s.tolerance) << ',' << (s.within ? 1 : 0) << '\n';
    }
    return kOk;
  }
  json j = io::to_json(rep);
  j["command"] = "simulate";
  j["beta"] = level.label();
  out << j.dump(2) << '\n';
  return kOk;
}

void write_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

std::vector<RationalityLevel> parse_level_spec(const std::string& spec) {
  std::vector<RationalityLevel> levels;
  for (const auto& token : split(spec, ',')) {
    if (token.empty()) throw ValidationError("empty token in level spec '" + spec + "'");
    if (token.find(':') == std::string::npos) {
      levels.push_back(parse_level(token));
      continue;
    }
    const auto parts = split(token, ':');
    if (parts.size() != 3) throw ValidationError("range must be a:b:N or a:b:Nlog, got '" + token + "'");
    const double a = parse_double(parts[0], "range start");
    const double b = parse_double(parts[1], "range end");
    std::string count = parts[2];
    const bool log = count.size() > 3 && count.compare(count.size() - 3, 3, "log") == 0;
    if (log) count.resize(count.size() - 3);
    const std::size_t n = parse_count(count, "range count");
    if (n == 0 || a < 0.0 || b < a) throw ValidationError("range '" + token + "' is empty or negative");
    if (log && a <= 0.0) throw ValidationError("log range needs a positive start");
    for (double x : log ? numeric::logspace(a, b, n) : numeric::linspace(a, b, n)) {
      levels.push_back(RationalityLevel::finite(x));
    }
  }
  if (levels.empty()) throw ValidationError("level spec is empty");
  return levels;
}

std::pair<std::size_t, std::size_t> parse_m_range(const std::string& spec) {
  const auto dots = spec.find("..");
  std::size_t lo = 0, hi = 0;
  if (dots == std::string::npos) {
    lo = hi = parse_count(spec, "m");
  } else {
    lo = parse_count(spec.substr(0, dots), "m");
    hi = parse_count(spec.substr(dots + 2), "m");
  }
  if (lo < 1 && lo <= hi) throw ValidationError("m must be at least 1");
  if (hi > kFamilyCap && lo <= hi) {
    throw ValidationError("m is capped at " + std::to_string(kFamilyCap) + " for these families");
  }
  return {lo, hi};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal and robust signaling schemes for a logit receiver", "persuade"};
  app.require_subcommand(1);
  Config c;
  auto common = [&c](CLI::App* sub) {
    sub->add_option("--instance", c.instance_path, "Instance JSON file");
    sub->add_option("--beta", c.beta, "Levels: numbers, inf, a:b:N or a:b:Nlog, comma separated");
    sub->add_option("--grid-points", c.grid_points, "Uniform grid size for the grid LP");
    sub->add_flag("--csv", c.csv, "Emit CSV instead of JSON");
  };
  auto* solve = app.add_subcommand("solve", "Compute a scheme");
  common(solve);
  solve->add_option("--mode", c.mode,
                    "sisu, sdsu-binary, pairwise, four-approx, censorship-approx, direct-approx, rational");
  auto* rob = app.add_subcommand("robust", "Worst ratio to the per-level optimum");
  common(rob);
  rob->add_option("--scheme", c.scheme, "PATH, rational-censorship, binary-robust:K=..[,beta0=..] or opt:BETA");
  auto* bench = app.add_subcommand("bench", "Separation tables");
  bench->add_option("--family", c.family, "sisu-direct, sdsu-lower or impossibility")->required();
  bench->add_option("--m", c.m_range, "State-count range A..B");
  auto* orc = app.add_subcommand("oracle", "Grid LP oracle");
  common(orc);
  orc->add_flag("--augment-analytic", c.augment, "Add the exact solver's signals to the grid");
  auto* sim = app.add_subcommand("simulate", "Gumbel-shock receiver simulation");
  common(sim);
  sim->add_option("--scheme", c.scheme, "PATH or a scheme name; defaults to the optimum at beta");
  sim->add_option("--n", c.n, "Draws per signal");
  sim->add_option("--seed", c.seed, "PRNG seed");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    write_error(err, "usage", e.what());
    return kInputError;
  }

  try {
    if (solve->parsed()) return cmd_solve(c, out);
    if (rob->parsed()) return cmd_robust(c, out);
    if (bench->parsed()) return cmd_bench(c, out);
    if (orc->parsed()) return cmd_oracle(c, out);
    return cmd_simulate(c, out);
  } catch (const ValidationError& e) {
    write_error(err, "validation", e.what());
    return kInputError;
  } catch (const NumericError& e) {
    write_error(err, "numeric", e.what());
    return kNumericError;
  } catch (const std::exception& e) {
    write_error(err, "internal", e.what());
    return kNumericError;
  }
}

}  // namespace persuasion::cli
