#pragma once

#include <string>

#include "json.hpp"
#include "ym/domain.hpp"
#include "ym/spec_io.hpp"

namespace fixtures {

inline ym::PiecewiseFunction from_json(const std::string& text) {
  return ym::function_from_json(nlohmann::json::parse(text));
}

// f(x) = x on (0, 1).
inline ym::PiecewiseFunction identity() { return ym::builtin_function("identity", 0); }

// f(x) = x^2 on (0, 1), density 1 / (2 sqrt(y)).
inline ym::PiecewiseFunction square() { return ym::builtin_function("square", 0); }

// 2 on (0, 1/2), 5 on (1/2, 1).
inline ym::PiecewiseFunction two_level() { return ym::builtin_function("constant", 0); }

// f(x) = 2x + 1 on (0, 1), K = [1, 3]: density 1/2 on [1, 3].
inline ym::PiecewiseFunction affine() {
  return from_json(R"js({
    "dimension": 1, "domain": [[[0, 1]]], "codomain": [[1, 3]],
    "pieces": [{"subdomain": [[0, 1]], "forward": ["2*x + 1"],
                "inverse": ["(y - 1)/2"], "jacobian_inverse": "1/2"}]
  })js");
}

// f(x) = x^2 on (1, 2), K = [1, 4]: density 1 / (2 sqrt(y)) on [1, 4].
inline ym::PiecewiseFunction shifted_square() {
  return from_json(R"js({
    "dimension": 1, "domain": [[[1, 2]]], "codomain": [[1, 4]],
    "pieces": [{"subdomain": [[1, 2]], "forward": ["x^2"], "monotone": true}]
  })js");
}

// Decreasing piece plus an increasing one with overlapping images.
// f = 1 - x on (0, 1/2), f = 2x - 1 on (1/2, 1). Image [1/2, 1] and [0, 1].
inline ym::PiecewiseFunction folded() {
  return from_json(R"js({
    "dimension": 1, "domain": [[[0, 1]]], "codomain": [[0, 1]],
    "pieces": [
      {"subdomain": [[0, 0.5]], "forward": ["1 - x"], "inverse": ["1 - y"],
       "jacobian_inverse": "1"},
      {"subdomain": [[0.5, 1]], "forward": ["2*x - 1"], "monotone": true}
    ]
  })js");
}

}  // namespace fixtures
