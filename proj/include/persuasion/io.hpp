#pragma once

#include <string>

#include "json.hpp"

#include "persuasion/model.hpp"
#include "persuasion/oracle.hpp"
#include "persuasion/robust.hpp"

namespace persuasion::io {

using nlohmann::json;

/// Shortest decimal that round-trips; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Finite doubles as numbers, non-finite ones as the strings above.
json number(double x);
/// Accepts a number or one of the strings "inf", "-inf", "nan".
double read_number(const json& j);

json to_json(const Instance& inst);
Instance instance_from_json(const json& j);

json to_json(const Scheme& scheme);
Scheme scheme_from_json(const json& j);

json to_json(const CensorshipParams& params);
CensorshipParams params_from_json(const json& j);

json to_json(const robust::RobustReport& report);
json to_json(const oracle::SimulationReport& report);

Instance load_instance(const std::string& path);
Scheme load_scheme(const std::string& path);

}  // namespace persuasion::io
