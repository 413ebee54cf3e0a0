#pragma once

#include <string>

#include "scalekit/levy_model.hpp"

namespace scalekit {

/// Model schema:
///   {"sigma": number, "drift": number,
///    "jumps": {"kind": "exp"|"erlang"|"hyperexp"|"none", "lambda": number, ...},
///    "description": string}
/// with per-kind parameters: exp {"rate"}, erlang {"shape", "rate"},
/// hyperexp {"weights": [...], "rates": [...]}.
LevyModel model_from_json(const std::string& text);
LevyModel model_from_json_file(const std::string& path);
std::string model_to_json(const LevyModel& m);

}  // namespace scalekit
