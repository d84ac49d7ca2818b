#include "ym/spec_io.hpp"

#include <fstream>
#include <sstream>

#include "ym/analytic.hpp"
#include "ym/error.hpp"
#include "ym/philox.hpp"

namespace ym {

using nlohmann::json;

namespace {

Interval interval_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InputError(where + ": expected a [lo, hi] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Box box_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw InputError(where + ": expected an array of [lo, hi] pairs");
  }
  Box box;
  for (std::size_t k = 0; k < j.size(); ++k) {
    box.push_back(interval_from_json(j[k], where));
  }
  return box;
}

json box_to_json(const Box& box) {
  json out = json::array();
  for (const auto& iv : box) out.push_back({iv.lo, iv.hi});
  return out;
}

std::vector<Expression> expressions_from_json(const json& j,
                                              const Symbols& symbols,
                                              const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of strings");
  std::vector<Expression> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw InputError(where + ": expected a string");
    try {
      out.push_back(parse_expression(e.get<std::string>(), symbols));
    } catch (const ParseError& err) {
      throw ParseError(where + ": " + err.what(), err.offset());
    }
  }
  return out;
}

const json& required(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw InputError(std::string("function spec is missing '") + key + "'");
  }
  return doc.at(key);
}

}  // namespace

PiecewiseFunction function_from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("function spec must be a JSON object");
  const json& dim = required(doc, "dimension");
  if (!dim.is_number_integer() || dim.get<int>() < 1) {
    throw InputError("'dimension' must be a positive integer");
  }
  const int d = dim.get<int>();

  const json& dom = required(doc, "domain");
  if (!dom.is_array()) throw InputError("'domain' must be an array of boxes");
  std::vector<Box> boxes;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    boxes.push_back(box_from_json(dom[i], "domain[" + std::to_string(i) + "]"));
  }
  Domain domain(d, std::move(boxes));

  Box codomain = box_from_json(required(doc, "codomain"), "codomain");
  const int l = static_cast<int>(codomain.size());
  const Symbols xs = Symbols::domain(d);
  const Symbols ys = Symbols::indexed("y", l);

  const json& pj = required(doc, "pieces");
  if (!pj.is_array()) throw InputError("'pieces' must be an array");
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    const std::string where = "pieces[" + std::to_string(i) + "]";
    const json& item = pj[i];
    if (!item.is_object()) throw InputError(where + " must be an object");
    Piece p;
    p.subdomain = box_from_json(required(item, "subdomain"), where + ".subdomain");
    p.forward = expressions_from_json(required(item, "forward"), xs,
                                      where + ".forward");
    if (item.contains("inverse")) {
      p.inverse = expressions_from_json(item.at("inverse"), ys, where + ".inverse");
    }
    if (item.contains("jacobian_inverse")) {
      const json& jac = item.at("jacobian_inverse");
      if (!jac.is_string()) {
        throw InputError(where + ".jacobian_inverse must be a string");
      }
      try {
        p.jacobian_inverse = parse_expression(jac.get<std::string>(), ys);
      } catch (const ParseError& err) {
        throw ParseError(where + ".jacobian_inverse: " + err.what(), err.offset());
      }
    }
    if (item.contains("monotone")) {
      if (!item.at("monotone").is_boolean()) {
        throw InputError(where + ".monotone must be a boolean");
      }
      p.monotone = item.at("monotone").get<bool>();
    }
    pieces.push_back(std::move(p));
  }

  double tail = 0.0;
  if (doc.contains("tail_mass")) {
    if (!doc.at("tail_mass").is_number()) {
      throw InputError("'tail_mass' must be a number");
    }
    tail = doc.at("tail_mass").get<double>();
  }
  return PiecewiseFunction(std::move(domain), std::move(pieces),
                           std::move(codomain), tail);
}

json function_to_json(const PiecewiseFunction& f) {
  const Symbols xs = Symbols::domain(f.dimension());
  const Symbols ys = Symbols::indexed("y", f.codomain_dimension());
  json doc;
  doc["dimension"] = f.dimension();
  json dom = json::array();
  for (const auto& box : f.domain().boxes()) dom.push_back(box_to_json(box));
  doc["domain"] = dom;
  doc["codomain"] = box_to_json(f.codomain());
  json pieces = json::array();
  for (const auto& p : f.pieces()) {
    json item;
    item["subdomain"] = box_to_json(p.subdomain);
    json fwd = json::array();
    for (const auto& e : p.forward) fwd.push_back(e.to_string(xs));
    item["forward"] = fwd;
    if (p.inverse) {
      json inv = json::array();
      for (const auto& e : *p.inverse) inv.push_back(e.to_string(ys));
      item["inverse"] = inv;
    }
    if (p.jacobian_inverse) item["jacobian_inverse"] = p.jacobian_inverse->to_string(ys);
    if (p.monotone) item["monotone"] = true;
    pieces.push_back(item);
  }
  doc["pieces"] = pieces;
  doc["tail_mass"] = f.tail_mass();
  return doc;
}

PiecewiseFunction load_function_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return function_from_json(doc);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

bool is_builtin(const std::string& name) {
  return name == "harmonic" || name == "identity" || name == "square" ||
         name == "constant";
}

PiecewiseFunction builtin_function(const std::string& name, int truncation) {
  if (name == "harmonic") return harmonic_staircase(truncation).function;
  json doc;
  if (name == "identity") {
    doc = json::parse(R"js({
      "dimension": 1, "domain": [[[0, 1]]], "codomain": [[0, 1]],
      "pieces": [{"subdomain": [[0, 1]], "forward": ["x"], "inverse": ["y"],
                  "jacobian_inverse": "1", "monotone": true}]
    })js");
  } else if (name == "square") {
    // No jacobian_inverse: the density falls back to finite differences.
    doc = json::parse(R"js({
      "dimension": 1, "domain": [[[0, 1]]], "codomain": [[0, 1]],
      "pieces": [{"subdomain": [[0, 1]], "forward": ["x^2"],
                  "inverse": ["sqrt(y)"], "monotone": true}]
    })js");
  } else if (name == "constant") {
    doc = json::parse(R"js({
      "dimension": 1, "domain": [[[0, 1]]], "codomain": [[0, 5]],
      "pieces": [{"subdomain": [[0, 0.5]], "forward": ["2"]},
                 {"subdomain": [[0.5, 1]], "forward": ["5"]}]
    })js");
  } else {
    throw InputError("unknown builtin function '" + name + "'");
  }
  return function_from_json(doc);
}

json report_to_json(const ValidationReport& r) {
  json out;
  out["ok"] = r.ok();
  json overlaps = json::array();
  for (const auto& [a, b] : r.overlaps) overlaps.push_back({a, b});
  out["overlaps"] = overlaps;
  out["outside_domain"] = r.outside_domain;
  out["domain_measure"] = r.domain_measure;
  out["covered_measure"] = r.covered_measure;
  out["tail_mass"] = r.tail_mass;
  out["coverage_defect"] = r.coverage_defect;
  out["coverage_tolerance"] = ValidationReport::kCoverageTolerance;
  out["samples_per_piece"] = r.samples_per_piece;
  out["image_escape_count"] = r.image_escape_count;
  json escapes = json::array();
  for (const auto& e : r.image_escapes) {
    escapes.push_back({{"piece", e.piece}, {"x", e.x}, {"value", e.value}});
  }
  out["image_escapes"] = escapes;
  json mism = json::array();
  for (const auto& m : r.inverse_mismatches) {
    mism.push_back({{"piece", m.piece}, {"y", m.y}, {"residual", m.residual}});
  }
  out["inverse_mismatches"] = mism;
  json fails = json::array();
  for (const auto& f : r.evaluation_failures) {
    fails.push_back({{"piece", f.piece}, {"message", f.message}});
  }
  out["evaluation_failures"] = fails;
  return out;
}

json measure_to_json(const YoungMeasure& m) {
  json out;
  out["variant"] = variant_name(m);
  if (const auto* a = std::get_if<DiracMixture>(&m)) {
    json atoms = json::array();
    for (std::size_t i = 0; i < a->size(); ++i) {
      const auto loc = a->location(i);
      atoms.push_back({{"location", std::vector<double>(loc.begin(), loc.end())},
                       {"weight", a->weight(i)}});
    }
    out["dimension"] = a->dimension();
    out["atoms"] = atoms;
  } else if (const auto* d = std::get_if<DensityTable>(&m)) {
    out["grid"] = d->grid;
    out["values"] = d->values;
    out["tail_bound"] = d->tail_bound;
    out["domain_measure"] = d->domain_measure;
  } else if (const auto* e = std::get_if<EmpiricalMeasure>(&m)) {
    out["samples"] = e->samples;
    out["seed"] = e->seed;
    out["rejected"] = e->rejected;
    out["generator"] = CounterStream::kName;
  }
  return out;
}

json estimate_to_json(const FunctionalEstimate& e) {
  json out;
  out["value"] = e.value;
  out["stderr"] = e.standard_error;
  out["n"] = e.n;
  out["method"] = method_name(e.method);
  if (e.method == EstimateMethod::monte_carlo) {
    out["seed"] = e.seed;
    out["generator"] = std::string(CounterStream::kName) + "/" +
                       CounterStream::kVersion;
    out["rejected"] = e.rejected;
    out["evaluation_failures"] = e.evaluation_failures;
  } else {
    out["seed"] = nullptr;
    out["generator"] = nullptr;
    out["tolerance"] = e.tolerance;
  }
  return out;
}

}  // namespace ym
