#include "persuasion/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "persuasion/error.hpp"

namespace persuasion::io {

namespace {

std::size_t state_index(const std::string& key, std::size_t m) {
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
  if (ec != std::errc{} || ptr != key.data() + key.size() || idx == 0 || idx > m) {
    throw ValidationError("state index '" + key + "' is not in 1.." + std::to_string(m));
  }
  return idx - 1;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

double read_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ValidationError("expected a number, got " + j.dump());
}

json to_json(const Instance& inst) {
  json states = json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    json s;
    if (inst.log_weight_mode()) {
      s["log_lambda"] = number(inst.raw_log_weights()[i]);
    } else {
      s["lambda"] = inst.lambda(i);
    }
    s["v"] = inst.v(i);
    s["u"] = inst.u(i);
    states.push_back(std::move(s));
  }
  return json{{"states", std::move(states)}};
}

Instance instance_from_json(const json& j) {
  return guarded([&] {
    if (!j.is_object() || !j.contains("states") || !j["states"].is_array()) {
      throw ValidationError("instance needs a 'states' array");
    }
    const json& arr = j["states"];
    if (arr.empty()) throw ValidationError("instance has no states");
    const bool log_mode = arr.front().contains("log_lambda");
    std::vector<State> states;
    std::vector<double> logw, v, u;
    for (const json& s : arr) {
      if (s.contains("log_lambda") != log_mode || s.contains("lambda") == log_mode) {
        throw ValidationError("every state needs exactly one of 'lambda' or 'log_lambda', consistently");
      }
      const double vi = read_number(s.at("v"));
      const double ui = read_number(s.at("u"));
      if (log_mode) {
        logw.push_back(read_number(s.at("log_lambda")));
        v.push_back(vi);
        u.push_back(ui);
      } else {
        states.push_back(State{read_number(s.at("lambda")), vi, ui});
      }
    }
    if (log_mode) return Instance::from_log_weights(std::move(logw), std::move(v), std::move(u));
    return Instance::from_states(std::move(states));
  });
}

json to_json(const Scheme& scheme) {
  json signals = json::array();
  for (const Signal& s : scheme.signals()) {
    json mass = json::object();
    for (const auto& [i, p] : s.mass) mass[std::to_string(i + 1)] = p;
    signals.push_back(json{{"delta", s.delta}, {"mass", std::move(mass)}});
  }
  json out{{"signals", std::move(signals)}};
  if (scheme.is_split()) out["split"] = true;
  return out;
}

Scheme scheme_from_json(const json& j) {
  return guarded([&] {
    if (!j.is_object() || !j.contains("signals") || !j["signals"].is_array()) {
      throw ValidationError("scheme needs a 'signals' array");
    }
    std::vector<Signal> signals;
    for (const json& s : j["signals"]) {
      Signal sig;
      sig.delta = read_number(s.at("delta"));
      if (!std::isfinite(sig.delta)) throw ValidationError("signal delta must be finite");
      for (const auto& [key, val] : s.at("mass").items()) {
        const double p = read_number(val);
        if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("signal mass must be finite and nonnegative");
        sig.mass[state_index(key, std::numeric_limits<std::size_t>::max() - 1)] = p;
      }
      signals.push_back(std::move(sig));
    }
    if (j.value("split", false)) return Scheme::split(std::move(signals));
    return Scheme(std::move(signals));
  });
}

json to_json(const CensorshipParams& params) {
  json high = json::array();
  for (std::size_t i : params.high_states) high.push_back(i + 1);
  return json{{"i_dagger", params.threshold_state + 1},
              {"p_dagger", params.threshold_prob},
              {"delta_dagger", number(params.pooling_signal)},
              {"high_states", std::move(high)}};
}

CensorshipParams params_from_json(const json& j) {
  return guarded([&] {
    CensorshipParams p;
    const auto idx = j.at("i_dagger").get<std::size_t>();
    if (idx == 0) throw ValidationError("i_dagger is 1-based");
    p.threshold_state = idx - 1;
    p.threshold_prob = read_number(j.at("p_dagger"));
    p.pooling_signal = read_number(j.at("delta_dagger"));
    for (const json& h : j.at("high_states")) {
      const auto k = h.get<std::size_t>();
      if (k == 0) throw ValidationError("high_states are 1-based");
      p.high_states.push_back(k - 1);
    }
    return p;
  });
}

json to_json(const robust::RobustReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back(json{{"beta", r.level.label()},
                        {"opt_payoff", number(r.opt_payoff)},
                        {"scheme_payoff", number(r.scheme_payoff)},
                        {"ratio", number(r.ratio)},
                        {"log_ratio", number(r.log_ratio)},
                        {"solver", r.solver}});
  }
  return json{{"gamma", number(report.gamma)}, {"infinite", report.infinite()}, {"rows", std::move(rows)}};
}

json to_json(const oracle::SimulationReport& report) {
  json rows = json::array();
  for (const auto& s : report.signals) {
    rows.push_back(json{{"delta", s.delta},
                        {"expected", s.expected},
                        {"rate", s.rate},
                        {"tolerance", s.tolerance},
                        {"within", s.within}});
  }
  return json{{"seed", report.seed}, {"n", report.n}, {"all_within", report.all_within()},
              {"signals", std::move(rows)}};
}

Instance load_instance(const std::string& path) { return instance_from_json(read_file(path)); }

Scheme load_scheme(const std::string& path) { return scheme_from_json(read_file(path)); }

}  // namespace persuasion::io
