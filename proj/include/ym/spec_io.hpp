#pragma once

#include <string>

#include "json.hpp"

#include "ym/domain.hpp"
#include "ym/measure.hpp"
#include "ym/monte_carlo.hpp"

namespace ym {

// Function spec document:
//   {
//     "dimension": 1,
//     "domain":   [ [[0, 1]] ],                 // boxes of [lo, hi] pairs
//     "codomain": [[0, 1]],
//     "pieces": [ { "subdomain": [[0, 0.5]], "forward": ["2*x"],
//                   "inverse": ["y/2"], "jacobian_inverse": "1/2",
//                   "monotone": true } ],
//     "tail_mass": 0
//   }
PiecewiseFunction function_from_json(const nlohmann::json& doc);
nlohmann::json function_to_json(const PiecewiseFunction& f);

// Reads a spec file. Throws IoError when unreadable, InputError when
// malformed.
PiecewiseFunction load_function_spec(const std::string& path);

// Builtin fixtures by name: harmonic (truncated at `truncation`), identity,
// square, constant.
bool is_builtin(const std::string& name);
PiecewiseFunction builtin_function(const std::string& name, int truncation);

nlohmann::json report_to_json(const ValidationReport& r);
nlohmann::json measure_to_json(const YoungMeasure& m);
nlohmann::json estimate_to_json(const FunctionalEstimate& e);

}  // namespace ym
