#pragma once
// File formats: JSON readers for surface specs, pair files, interpolation
// parameter files and modulus domains, JSON writers for the computed
// objects, the fixed CSV formatting used by the command line tool, and the
// start:stop:step grid syntax.
//
// Schema errors raise ParseError so callers can separate malformed input
// (exit code 2) from semantically invalid input caught by validate()
// (exit code 1).  Complex numbers are written as [re, im]; a bare number is
// accepted on input as a real value.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "strebel/modulus.hpp"
#include "strebel/qc_maps.hpp"
#include "strebel/ray.hpp"
#include "strebel/surface.hpp"

namespace strebel {

using nlohmann::json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const json& require(const json& j, const char* field,
                           const char* context) {
  auto it = j.find(field);
  if (it == j.end())
    throw ParseError(std::string(context) + ": missing field '" + field + "'");
  return *it;
}

inline double require_number(const json& j, const char* field,
                             const char* context) {
  const json& v = require(j, field, context);
  if (!v.is_number())
    throw ParseError(std::string(context) + ": field '" + field +
                     "' must be a number");
  return v.get<double>();
}

inline std::complex<double> parse_complex(const json& j, const char* context) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ParseError(std::string(context) +
                   ": expected a number or [re, im] pair");
}

}  // namespace detail

// ---- surface specs ----------------------------------------------------------

inline BoundaryArc arc_from_json(const json& j) {
  BoundaryArc a;
  const json& cyl = detail::require(j, "cylinder", "gluing arc");
  if (!cyl.is_string())
    throw ParseError("gluing arc: 'cylinder' must be a string label");
  a.cylinder = cyl.get<std::string>();
  a.side = static_cast<int>(detail::require_number(j, "side", "gluing arc"));
  a.start = detail::require_number(j, "start", "gluing arc");
  a.length = detail::require_number(j, "length", "gluing arc");
  return a;
}

inline CylinderDecomposition surface_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("surface spec: expected a JSON object");
  CylinderDecomposition s;
  s.genus = static_cast<int>(detail::require_number(j, "genus", "surface spec"));
  s.punctures = j.value("punctures", 0);
  s.unit_norm = j.value("unit_norm", false);
  const json& cyls = detail::require(j, "cylinders", "surface spec");
  if (!cyls.is_array()) throw ParseError("surface spec: 'cylinders' must be an array");
  for (const auto& c : cyls) {
    Cylinder cyl;
    const json& label = detail::require(c, "label", "cylinder");
    if (!label.is_string()) throw ParseError("cylinder: 'label' must be a string");
    cyl.label = label.get<std::string>();
    cyl.circumference = detail::require_number(c, "circumference", "cylinder");
    cyl.modulus = detail::require_number(c, "modulus", "cylinder");
    s.cylinders.push_back(std::move(cyl));
  }
  if (auto it = j.find("gluings"); it != j.end()) {
    if (!it->is_array()) throw ParseError("surface spec: 'gluings' must be an array");
    for (const auto& g : *it)
      s.gluings.push_back({arc_from_json(detail::require(g, "first", "gluing")),
                           arc_from_json(detail::require(g, "second", "gluing"))});
  }
  if (auto it = j.find("critical_points"); it != j.end()) {
    if (!it->is_array())
      throw ParseError("surface spec: 'critical_points' must be an array");
    for (const auto& p : *it)
      s.critical_points.push_back(
          {static_cast<int>(detail::require_number(p, "order", "critical point"))});
  }
  return s;
}

inline json arc_to_json(const BoundaryArc& a) {
  return json{{"cylinder", a.cylinder},
              {"side", a.side},
              {"start", a.start},
              {"length", a.length}};
}

inline json surface_to_json(const CylinderDecomposition& s) {
  json cyls = json::array();
  for (const auto& c : s.cylinders)
    cyls.push_back({{"label", c.label},
                    {"circumference", c.circumference},
                    {"modulus", c.modulus}});
  json gluings = json::array();
  for (const auto& g : s.gluings)
    gluings.push_back(
        {{"first", arc_to_json(g.first)}, {"second", arc_to_json(g.second)}});
  json crits = json::array();
  for (const auto& p : s.critical_points) crits.push_back({{"order", p.order}});
  return json{{"genus", s.genus},         {"punctures", s.punctures},
              {"unit_norm", s.unit_norm}, {"cylinders", cyls},
              {"gluings", gluings},       {"critical_points", crits}};
}

// ---- pair files --------------------------------------------------------------

struct PairFile {
  CylinderDecomposition left;
  CylinderDecomposition right;
  std::map<std::string, std::string> curve_match;  // left label -> right label
  std::optional<double> end_distance;
};

inline PairFile pair_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("pair file: expected a JSON object");
  PairFile p;
  p.left = surface_from_json(detail::require(j, "left", "pair file"));
  p.right = surface_from_json(detail::require(j, "right", "pair file"));
  if (auto it = j.find("curve_match"); it != j.end()) {
    if (!it->is_object())
      throw ParseError("pair file: 'curve_match' must map labels to labels");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_string())
        throw ParseError("pair file: curve_match values must be strings");
      p.curve_match[k] = v.get<std::string>();
    }
  }
  if (auto it = j.find("end_distance"); it != j.end()) {
    if (!it->is_number())
      throw ParseError("pair file: 'end_distance' must be a number");
    p.end_distance = it->get<double>();
  }
  return p;
}

// Build the similarity outcome for a pair file.  The curve match is applied
// by renaming right-hand cylinders to their left-hand partners; labels
// without an entry must already agree.
inline SimilarityOutcome pair_outcome(const PairFile& p) {
  CylinderDecomposition right = p.right;
  if (!p.curve_match.empty()) {
    std::map<std::string, std::string> reverse;
    for (const auto& [l, r] : p.curve_match) {
      if (!reverse.emplace(r, l).second)
        throw std::invalid_argument(
            "pair file: curve_match sends two curves to '" + r + "'");
    }
    for (auto& c : right.cylinders) {
      if (auto it = reverse.find(c.label); it != reverse.end())
        c.label = it->second;
    }
    for (auto& g : right.gluings) {
      for (BoundaryArc* a : {&g.first, &g.second}) {
        if (auto it = reverse.find(a->cylinder); it != reverse.end())
          a->cylinder = it->second;
      }
    }
  }
  SimilarityOutcome outcome = check_similar(p.left, right);
  if (auto* sp = std::get_if<SimilarPair>(&outcome)) {
    sp->end_distance = p.end_distance;
  }
  return outcome;
}

// ---- interpolation parameter files ------------------------------------------

inline TransitionInput transition_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("params entry: expected a JSON object");
  TransitionInput in;
  if (auto it = j.find("label"); it != j.end() && it->is_string())
    in.label = it->get<std::string>();
  in.modulus_ratio = detail::require_number(j, "ratio", "params entry");
  in.base_modulus = j.value("base_modulus", 1.0);
  in.eps = j.value("eps", 0.25);
  if (auto it = j.find("exponent"); it != j.end()) {
    if (!it->is_number())
      throw ParseError("params entry: 'exponent' must be a number");
    in.exponent_override = it->get<double>();
  }
  auto read_side = [&](const char* key, std::complex<double>* coeff,
                       std::vector<std::complex<double>>* tail, double* outer) {
    auto it = j.find(key);
    if (it == j.end()) return;
    const json& side = *it;
    if (!side.is_object())
      throw ParseError(std::string("params entry: '") + key +
                       "' must be an object");
    if (auto c = side.find("coeff"); c != side.end())
      *coeff = detail::parse_complex(*c, "side coeff");
    if (auto tl = side.find("tail"); tl != side.end()) {
      if (!tl->is_array()) throw ParseError("side tail must be an array");
      for (const auto& e : *tl)
        tail->push_back(detail::parse_complex(e, "side tail entry"));
    }
    if (auto o = side.find("outer_dilatation"); o != side.end()) {
      if (!o->is_number())
        throw ParseError("side outer_dilatation must be a number");
      *outer = o->get<double>();
    }
  };
  read_side("side1", &in.coeff_side1, &in.tail_side1, &in.outer_dilatation_side1);
  read_side("side2", &in.coeff_side2, &in.tail_side2, &in.outer_dilatation_side2);
  return in;
}

inline std::vector<TransitionInput> params_from_json(const json& j) {
  const json* list = &j;
  if (j.is_object()) list = &detail::require(j, "cylinders", "params file");
  if (!list->is_array())
    throw ParseError("params file: expected an array of cylinder entries");
  std::vector<TransitionInput> out;
  for (const auto& e : *list) out.push_back(transition_from_json(e));
  if (out.empty()) throw ParseError("params file: no cylinder entries");
  return out;
}

// ---- modulus domains ---------------------------------------------------------

inline GridDomain domain_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("domain file: expected a JSON object");
  const json& kind = detail::require(j, "kind", "domain file");
  if (!kind.is_string())
    throw ParseError("domain file: 'kind' must be \"quad\" or \"annulus\"");
  const std::string k = kind.get<std::string>();
  if (k == "quad") {
    const double a = detail::require_number(j, "width", "quad domain");
    const double b = detail::require_number(j, "height", "quad domain");
    const std::string m = j.value("marked", std::string("horizontal"));
    if (m != "horizontal" && m != "vertical")
      throw ParseError("quad domain: 'marked' must be horizontal or vertical");
    return GridDomain::quad(a, b,
                            m == "horizontal" ? GridDomain::Marked::horizontal
                                              : GridDomain::Marked::vertical);
  }
  if (k == "annulus") {
    return GridDomain::annulus(
        detail::require_number(j, "inner_radius", "annulus domain"));
  }
  throw ParseError("domain file: unknown kind '" + k + "'");
}

// ---- computed objects out ----------------------------------------------------

inline json validation_to_json(const ValidationReport& rep) {
  return json{{"valid", rep.valid()},
              {"errors", rep.errors},
              {"warnings", rep.warnings}};
}

inline json ray_point_to_json(const RayPoint& p) {
  json cyls = json::array();
  for (const auto& c : p.cylinders)
    cyls.push_back({{"label", c.label},
                    {"base_modulus", c.base_modulus},
                    {"scaled_modulus", c.scaled_modulus},
                    {"log_inner_radius", c.log_inner_radius}});
  return json{{"t", p.t}, {"cylinders", cyls}};
}

inline json noded_limit_to_json(const NodedLimit& lim) {
  json nodes = json::array();
  for (const auto& n : lim.nodes) nodes.push_back({{"cylinder", n.cylinder}});
  json comps = json::array();
  for (const auto& c : lim.components) {
    json disks = json::array();
    for (const auto& d : c.disks)
      disks.push_back({{"cylinder", d.cylinder}, {"side", d.side}});
    json gluings = json::array();
    for (const auto& g : c.gluings)
      gluings.push_back(
          {{"first", arc_to_json(g.first)}, {"second", arc_to_json(g.second)}});
    comps.push_back({{"disks", disks}, {"gluings", gluings}});
  }
  return json{{"nodes", nodes}, {"components", comps}};
}

// ---- files -------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// ---- CSV ---------------------------------------------------------------------

// Fixed 12-significant-digit formatting; this is the reproducibility contract
// for all CSV output.
inline std::string fmt_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct CsvWriter {
  std::ostream& os;
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os << ',';
      os << fields[i];
    }
    os << '\n';
  }
};

// ---- sweep grids -------------------------------------------------------------

// "start:stop:step" (inclusive of stop up to rounding) or a single value.
inline std::vector<double> parse_grid(const std::string& text) {
  auto to_double = [&](const std::string& s) -> double {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw ParseError("grid: cannot parse number '" + s + "'");
    }
    if (pos != s.size())
      throw ParseError("grid: trailing characters in '" + s + "'");
    if (!std::isfinite(v)) throw ParseError("grid: values must be finite");
    return v;
  };
  const auto c1 = text.find(':');
  if (c1 == std::string::npos) return {to_double(text)};
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw ParseError("grid: expected start:stop:step, got '" + text + "'");
  const double start = to_double(text.substr(0, c1));
  const double stop = to_double(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = to_double(text.substr(c2 + 1));
  if (!(step > 0.0)) throw ParseError("grid: step must be positive");
  if (stop < start) throw ParseError("grid: stop must not precede start");
  const long long count =
      static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (count > 10'000'000) throw ParseError("grid: too many points");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long long k = 0; k < count; ++k) out.push_back(start + k * step);
  return out;
}

inline std::vector<double> grid_from_json(const json& j, const char* context) {
  if (!j.is_array()) throw ParseError(std::string(context) + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number())
      throw ParseError(std::string(context) + ": grid entries must be numbers");
    out.push_back(v.get<double>());
  }
  if (out.empty()) throw ParseError(std::string(context) + ": grid is empty");
  return out;
}

}  // namespace strebel
