// Command line front end: validate surface specs, sweep ray distances and
// shifted distances for a matched pair, sweep the interpolation dilatations,
// and query the modulus oracle.  CSV output is byte-stable: 12 significant
// digits, '.' decimal separator, '\n' line endings, header always present.
//
// Exit codes: 0 success (a divergent pair is a successful result), 1 domain
// or validation failure, 2 IO or parse failure.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "strebel/asymptotics.hpp"
#include "strebel/io.hpp"
#include "strebel/modulus.hpp"
#include "strebel/qc_maps.hpp"
#include "strebel/ray.hpp"
#include "strebel/surface.hpp"

namespace {

struct Common {
  std::string out;
  std::string format = "csv";
  int resolution = 32;
  long long seed = 0;  // reserved for sampled diagnostics
};

bool verbose() {
  const char* v = std::getenv("STREBEL_LOG");
  return v && *v && std::string(v) != "0";
}

void log_info(const std::string& msg) {
  if (verbose()) std::cerr << "strebel: " << msg << '\n';
}

void add_common(CLI::App* sub, Common* c, const char* default_format = "csv") {
  c->format = default_format;
  sub->add_option("--out", c->out, "write output to this file instead of stdout");
  sub->add_option("--format", c->format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--resolution", c->resolution,
                  "grid resolution for discrete solves");
  sub->add_option("--seed", c->seed, "seed for sampled diagnostics (reserved)");
}

// Stream the output either to --out or to stdout.
class Output {
 public:
  explicit Output(const Common& c) {
    if (!c.out.empty()) {
      file_.open(c.out);
      if (!file_) throw strebel::ParseError("cannot open output file: " + c.out);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<double> pick_grid(const std::string& flag_text, const nlohmann::json& file,
                              const char* file_key) {
  if (!flag_text.empty()) return strebel::parse_grid(flag_text);
  if (auto it = file.find(file_key); it != file.end())
    return strebel::grid_from_json(*it, file_key);
  throw strebel::ParseError(std::string("no grid given: pass --") +
                            (file_key[0] == 't' ? "t" : "alpha") +
                            " or put a \"" + file_key + "\" array in the file");
}

void check_t_grid(const std::vector<double>& ts) {
  for (double t : ts)
    if (!(t >= 0.0))
      throw std::domain_error("t grid must contain only values >= 0");
}

// ---- validate ----------------------------------------------------------------

int cmd_validate(const std::string& path, const Common& common,
                 std::optional<double> ray_t, bool limit_point_out) {
  const auto doc = strebel::load_json_file(path);
  const auto spec = strebel::surface_from_json(doc);
  const auto rep = strebel::validate(spec);
  log_info("validate: " + std::to_string(rep.errors.size()) + " error(s), " +
           std::to_string(rep.warnings.size()) + " warning(s)");
  Output out(common);
  if (!rep.valid()) {
    out.os() << (common.format == "json"
                     ? strebel::validation_to_json(rep).dump(2) + "\n"
                     : rep.summary());
    return 1;
  }
  if (ray_t) {
    const auto p = strebel::ray_point(spec, *ray_t);
    out.os() << strebel::ray_point_to_json(p).dump(2) << '\n';
    return 0;
  }
  if (limit_point_out) {
    const auto lim = strebel::limit_point(spec);
    out.os() << strebel::noded_limit_to_json(lim).dump(2) << '\n';
    return 0;
  }
  out.os() << (common.format == "json"
                   ? strebel::validation_to_json(rep).dump(2) + "\n"
                   : "valid\n" + rep.summary());
  return 0;
}

// ---- distance and shift ------------------------------------------------------

std::vector<strebel::TransitionInput> pair_transitions(
    const strebel::SimilarPair& sp, double eps, double end_distance) {
  std::vector<strebel::TransitionInput> inputs;
  const double outer_k = std::exp(2.0 * end_distance);
  for (std::size_t i = 0; i < sp.cylinder_count(); ++i) {
    strebel::TransitionInput in;
    in.label = sp.left.cylinders[sp.curve_match[i].first].label;
    in.modulus_ratio = sp.right_modulus(i) / sp.left_modulus(i);
    in.base_modulus = sp.left_modulus(i);
    in.eps = eps;
    in.outer_dilatation_side1 = outer_k;
    in.outer_dilatation_side2 = outer_k;
    inputs.push_back(std::move(in));
  }
  return inputs;
}

void emit_divergent(Output& out, const Common& common,
                    const std::vector<std::string>& header,
                    const std::string& reason) {
  log_info("pair is not similar: " + reason);
  if (common.format == "json") {
    out.os() << nlohmann::json{{"result", "divergent"}, {"reason", reason}}.dump(2)
             << '\n';
    return;
  }
  strebel::CsvWriter csv{out.os()};
  csv.row(header);
  std::vector<std::string> row(header.size());
  row[0] = "divergent";
  csv.row(row);
}

int cmd_distance(const std::string& path, const Common& common,
                 const std::string& t_flag, double eps) {
  const auto doc = strebel::load_json_file(path);
  const auto pf = strebel::pair_from_json(doc);
  auto outcome = strebel::pair_outcome(pf);
  Output out(common);
  const std::vector<std::string> header = {"t", "lower_bound", "half_log_K_F",
                                           "theorem_value"};
  if (auto* ns = std::get_if<strebel::NotSimilar>(&outcome)) {
    emit_divergent(out, common, header, ns->reason);
    return 0;
  }
  const auto& sp = std::get<strebel::SimilarPair>(outcome);
  auto ts = pick_grid(t_flag, doc, "t_grid");
  check_t_grid(ts);
  const auto result = strebel::asymptotic_distance(sp);
  const double lower = strebel::lower_bound(sp);
  const double d_end = result.end_term();
  const auto inputs = pair_transitions(sp, eps, d_end);
  log_info("distance sweep over " + std::to_string(ts.size()) + " point(s)");

  nlohmann::json rows = nlohmann::json::array();
  strebel::CsvWriter csv{out.os()};
  if (common.format == "csv") csv.row(header);
  for (double t : ts) {
    const auto asm_k = strebel::assemble_dilatation(inputs, t);
    if (common.format == "csv") {
      csv.row({strebel::fmt_g12(t), strebel::fmt_g12(lower),
               strebel::fmt_g12(asm_k.half_log),
               strebel::fmt_g12(result.value())});
    } else {
      rows.push_back({{"t", t},
                      {"lower_bound", lower},
                      {"half_log_K_F", asm_k.half_log},
                      {"theorem_value", result.value()}});
    }
  }
  if (common.format == "json")
    out.os() << nlohmann::json{{"rows", rows},
                               {"modulus_term", result.modulus_term()},
                               {"end_term", result.end_term()}}
                    .dump(2)
             << '\n';
  return 0;
}

int cmd_shift(const std::string& path, const Common& common,
              const std::string& alpha_flag) {
  const auto doc = strebel::load_json_file(path);
  const auto pf = strebel::pair_from_json(doc);
  auto outcome = strebel::pair_outcome(pf);
  Output out(common);
  const std::vector<std::string> header = {"alpha", "shifted_value"};
  if (auto* ns = std::get_if<strebel::NotSimilar>(&outcome)) {
    emit_divergent(out, common, header, ns->reason);
    return 0;
  }
  const auto& sp = std::get<strebel::SimilarPair>(outcome);
  const double alpha_star = strebel::optimal_shift(sp);

  std::vector<double> alphas;
  if (!alpha_flag.empty()) {
    alphas = strebel::parse_grid(alpha_flag);
  } else if (auto it = doc.find("alpha_grid"); it != doc.end()) {
    alphas = strebel::grid_from_json(*it, "alpha_grid");
  } else {
    // default: 1001 points centered on the optimal shift
    for (int k = 0; k <= 1000; ++k)
      alphas.push_back(alpha_star - 2.0 + 4.0 * k / 1000.0);
  }
  log_info("shift sweep over " + std::to_string(alphas.size()) + " point(s)");

  double min_value = std::numeric_limits<double>::infinity();
  nlohmann::json rows = nlohmann::json::array();
  strebel::CsvWriter csv{out.os()};
  if (common.format == "csv") csv.row(header);
  for (double a : alphas) {
    const double v = strebel::shifted_asymptotic_distance(sp, a).value();
    if (v < min_value) min_value = v;
    if (common.format == "csv")
      csv.row({strebel::fmt_g12(a), strebel::fmt_g12(v)});
    else
      rows.push_back({{"alpha", a}, {"shifted_value", v}});
  }
  if (common.format == "json") {
    out.os() << nlohmann::json{{"rows", rows},
                               {"alpha_star", alpha_star},
                               {"min_value", min_value}}
                    .dump(2)
             << '\n';
  } else {
    std::cerr << "alpha_star = " << strebel::fmt_g12(alpha_star) << '\n'
              << "min_value = " << strebel::fmt_g12(min_value) << '\n';
  }
  return 0;
}

// ---- qc-sweep ------------------------------------------------------------------

int cmd_qc_sweep(const std::string& path, const Common& common,
                 const std::string& t_flag, const std::string& eps_flag) {
  const auto doc = strebel::load_json_file(path);
  if (!t_flag.empty() && !eps_flag.empty())
    throw strebel::ParseError("qc-sweep: give --t or --eps, not both");

  Output out(common);
  strebel::CsvWriter csv{out.os()};
  nlohmann::json rows = nlohmann::json::array();

  std::vector<double> eps_grid;
  if (!eps_flag.empty()) {
    eps_grid = strebel::parse_grid(eps_flag);
  } else if (t_flag.empty()) {
    if (auto it = doc.find("eps_grid"); it != doc.end() && doc.find("t_grid") == doc.end())
      eps_grid = strebel::grid_from_json(*it, "eps_grid");
  }

  if (!eps_grid.empty()) {
    // node-map mode: sup dilatation of the straightening map per eps
    log_info("node map sweep over " + std::to_string(eps_grid.size()) + " eps value(s)");
    if (common.format == "csv") csv.row({"eps", "K_H"});
    for (double e : eps_grid) {
      const double k = strebel::node_map_sup_dilatation(e, common.resolution);
      if (common.format == "csv")
        csv.row({strebel::fmt_g12(e), strebel::fmt_g12(k)});
      else
        rows.push_back({{"eps", e}, {"K_H", k}});
    }
    if (common.format == "json")
      out.os() << nlohmann::json{{"rows", rows}}.dump(2) << '\n';
    return 0;
  }

  const auto inputs = strebel::params_from_json(doc);
  auto ts = pick_grid(t_flag, doc, "t_grid");
  check_t_grid(ts);
  log_info("dilatation sweep over " + std::to_string(ts.size()) + " point(s), " +
           std::to_string(inputs.size()) + " annulus/annuli");
  if (common.format == "csv")
    csv.row({"label", "t", "K_P", "K_Q_sup", "K_h", "K_F"});
  for (double t : ts) {
    const auto asm_k = strebel::assemble_dilatation(inputs, t);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto& s = asm_k.per_cylinder[i];
      const double kp = std::max(s[0].inner, s[1].inner);
      const double kq = std::max(s[0].blend, s[1].blend);
      const double kh = std::max(s[0].outer, s[1].outer);
      if (common.format == "csv") {
        csv.row({inputs[i].label, strebel::fmt_g12(t), strebel::fmt_g12(kp),
                 strebel::fmt_g12(kq), strebel::fmt_g12(kh),
                 strebel::fmt_g12(asm_k.total)});
      } else {
        rows.push_back({{"label", inputs[i].label},
                        {"t", t},
                        {"K_P", kp},
                        {"K_Q_sup", kq},
                        {"K_h", kh},
                        {"K_F", asm_k.total}});
      }
    }
  }
  if (common.format == "json")
    out.os() << nlohmann::json{{"rows", rows}}.dump(2) << '\n';
  return 0;
}

// ---- oracle --------------------------------------------------------------------

int cmd_oracle(const std::string& path, const Common& common) {
  const auto doc = strebel::load_json_file(path);
  const auto dom = strebel::domain_from_json(doc);
  Output out(common);
  double value = 0.0, err_est = 0.0, analytic = 0.0;
  int resolution = 0;
  bool analytic_only = false;
  if (dom.kind == strebel::GridDomain::Kind::quad) {
    analytic = strebel::quad_modulus_analytic(dom);
    const auto r = strebel::quad_modulus(dom, common.resolution);
    value = r.value;
    err_est = r.err_est;
    resolution = r.resolution;
  } else {
    const auto r = strebel::annulus_modulus(dom, common.resolution);
    analytic = r.analytic;
    if (r.discrete) {
      value = r.discrete->value;
      err_est = r.discrete->err_est;
      resolution = r.discrete->resolution;
    } else {
      value = r.analytic;
      analytic_only = true;
    }
  }
  log_info("oracle: value " + strebel::fmt_g12(value));
  if (common.format == "csv") {
    strebel::CsvWriter csv{out.os()};
    csv.row({"value", "err_est", "resolution", "analytic"});
    csv.row({strebel::fmt_g12(value), strebel::fmt_g12(err_est),
             std::to_string(resolution), strebel::fmt_g12(analytic)});
  } else {
    out.os() << nlohmann::json{{"value", value},
                               {"err_est", err_est},
                               {"resolution", resolution},
                               {"analytic", analytic},
                               {"analytic_only", analytic_only}}
                    .dump(2)
             << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cylinder decompositions, geodesic rays, and quasiconformal "
      "interpolation sweeps"};
  app.require_subcommand(1);

  std::string validate_path, distance_path, shift_path, sweep_path, oracle_path;
  std::string t_flag, alpha_flag, eps_flag;
  double eps_slack = 0.25;
  std::optional<double> ray_t;
  bool limit_out = false;
  Common c_validate, c_distance, c_shift, c_sweep, c_oracle;

  auto* v = app.add_subcommand("validate", "check a surface spec file");
  v->add_option("path", validate_path, "surface spec JSON")->required();
  v->add_option("--ray-point", ray_t, "emit the ray point at this time as JSON");
  v->add_flag("--limit-point", limit_out, "emit the noded limit as JSON");
  add_common(v, &c_validate);

  auto* d = app.add_subcommand("distance",
                               "sweep ray distance bounds for a matched pair");
  d->add_option("path", distance_path, "pair JSON")->required();
  d->add_option("--t", t_flag, "time grid start:stop:step");
  d->add_option("--eps", eps_slack, "slack for the interpolation exponent");
  add_common(d, &c_distance);

  auto* s = app.add_subcommand("shift",
                               "sweep shifted asymptotic distance for a pair");
  s->add_option("path", shift_path, "pair JSON")->required();
  s->add_option("--alpha", alpha_flag, "shift grid start:stop:step");
  add_common(s, &c_shift);

  auto* q = app.add_subcommand("qc-sweep", "sweep interpolation dilatations");
  q->add_option("path", sweep_path, "params JSON")->required();
  q->add_option("--t", t_flag, "time grid start:stop:step");
  q->add_option("--eps", eps_flag, "node-map eps grid start:stop:step");
  add_common(q, &c_sweep);

  auto* o = app.add_subcommand("oracle", "modulus of a quad or annulus domain");
  o->add_option("path", oracle_path, "domain JSON")->required();
  add_common(o, &c_oracle, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (v->parsed()) return cmd_validate(validate_path, c_validate, ray_t, limit_out);
    if (d->parsed()) return cmd_distance(distance_path, c_distance, t_flag, eps_slack);
    if (s->parsed()) return cmd_shift(shift_path, c_shift, alpha_flag);
    if (q->parsed()) return cmd_qc_sweep(sweep_path, c_sweep, t_flag, eps_flag);
    if (o->parsed()) return cmd_oracle(oracle_path, c_oracle);
  } catch (const strebel::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
