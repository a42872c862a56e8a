#include "greenwalk/taskrunner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "greenwalk/errors.hpp"
#include "greenwalk/fourier.hpp"
#include "greenwalk/greens.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/montecarlo.hpp"
#include "greenwalk/oscillating.hpp"
#include "greenwalk/walk.hpp"
#include "greenwalk/wiener_hopf.hpp"

namespace greenwalk {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// schema violations carry the dotted config path of the offending field
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail_at(const std::string& path, const std::string& msg) {
  throw config_error(path + ": " + msg);
}

void check_keys(const ordered_json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail_at(join(path, it.key()), "unknown key");
  }
}

const ordered_json& need(const ordered_json& obj, const char* key,
                         const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    fail_at(join(path, key), "missing required field");
  return obj.at(key);
}

std::string as_string(const ordered_json& j, const std::string& path) {
  if (!j.is_string()) fail_at(path, "expected a string");
  return j.get<std::string>();
}

double as_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) fail_at(path, "expected a number");
  return j.get<double>();
}

long long as_integer(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer()) fail_at(path, "expected an integer");
  return j.get<long long>();
}

double number_or(const ordered_json& obj, const char* key,
                 const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return as_number(obj.at(key), join(path, key));
}

long long integer_or(const ordered_json& obj, const char* key,
                     const std::string& path, long long fallback) {
  if (!obj.contains(key)) return fallback;
  return as_integer(obj.at(key), join(path, key));
}

bool bool_or(const ordered_json& obj, const char* key, const std::string& path,
             bool fallback) {
  if (!obj.contains(key)) return fallback;
  const ordered_json& j = obj.at(key);
  if (!j.is_boolean()) fail_at(join(path, key), "expected true or false");
  return j.get<bool>();
}

LatticeMeasure parse_measure(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail_at(path, "expected a measure object");
  if (j.contains("atoms")) {
    check_keys(j, path, {"atoms"});
    const ordered_json& atoms = j.at("atoms");
    if (!atoms.is_array())
      fail_at(join(path, "atoms"), "expected an array of [site, weight] pairs");
    std::vector<std::pair<long long, double>> pts;
    for (size_t i = 0; i < atoms.size(); ++i) {
      std::string apath = join(path, "atoms[" + std::to_string(i) + "]");
      const ordered_json& a = atoms[i];
      if (!a.is_array() || a.size() != 2)
        fail_at(apath, "expected a [site, weight] pair");
      if (!a[0].is_number_integer()) fail_at(apath, "site must be an integer");
      long long site = a[0].get<long long>();
      if (!a[1].is_number()) fail_at(apath, "weight must be a number");
      double w = a[1].get<double>();
      if (!std::isfinite(w)) fail_at(apath, "weight must be finite");
      if (w < 0.0) {
        std::ostringstream os;
        os << "negative weight (" << w << ") at site " << site;
        fail_at(apath, os.str());
      }
      pts.emplace_back(site, w);
    }
    return points_measure(pts);
  }
  if (!j.contains("family"))
    fail_at(path, "a measure needs either \"atoms\" or a \"family\"");
  std::string family = as_string(j.at("family"), join(path, "family"));
  if (family == "dirac") {
    check_keys(j, path, {"family", "at"});
    return dirac(as_integer(need(j, "at", path), join(path, "at")));
  }
  if (family == "geometric") {
    check_keys(j, path, {"family", "p", "reflected"});
    double p = as_number(need(j, "p", path), join(path, "p"));
    if (!(p > 0.0 && p < 1.0)) fail_at(join(path, "p"), "needs 0 < p < 1");
    return geometric_measure(p, bool_or(j, "reflected", path, false));
  }
  if (family == "zeta" || family == "symmetric-zeta") {
    bool symmetric = family == "symmetric-zeta";
    if (symmetric)
      check_keys(j, path, {"family", "a", "window"});
    else
      check_keys(j, path, {"family", "a", "window", "reflected"});
    double a = as_number(need(j, "a", path), join(path, "a"));
    if (!(a > 0.0)) fail_at(join(path, "a"), "needs a > 0");
    long long window = integer_or(j, "window", path, 1 << 16);
    if (window < 1) fail_at(join(path, "window"), "needs window >= 1");
    if (symmetric) return symmetric_zeta_measure(a, window);
    return zeta_measure(a, window, bool_or(j, "reflected", path, false));
  }
  fail_at(join(path, "family"), "unknown family \"" + family +
                                    "\" (dirac, geometric, zeta, "
                                    "symmetric-zeta)");
}

WalkSpec parse_walk(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail_at(path, "expected a walk object");
  std::string kind = as_string(need(j, "kind", path), join(path, "kind"));
  WalkSpec spec;
  if (kind == "homogeneous") {
    check_keys(j, path, {"kind", "step"});
    spec = HomogeneousWalk{
        parse_measure(need(j, "step", path), join(path, "step"))};
  } else if (kind == "oscillating") {
    check_keys(j, path, {"kind", "neg_side", "pos_side"});
    spec = OscillatingWalk{
        parse_measure(need(j, "neg_side", path), join(path, "neg_side")),
        parse_measure(need(j, "pos_side", path), join(path, "pos_side"))};
  } else if (kind == "concentrated") {
    check_keys(j, path, {"kind", "mu_plus", "nu_minus"});
    spec = ConcentratedWalk{
        parse_measure(need(j, "mu_plus", path), join(path, "mu_plus")),
        parse_measure(need(j, "nu_minus", path), join(path, "nu_minus"))};
  } else {
    fail_at(join(path, "kind"),
            "unknown walk kind \"" + kind +
                "\" (homogeneous, oscillating, concentrated)");
  }
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    fail_at(path, e.what());
  }
  return spec;
}

// every reported value carries its error bar and the algorithm behind it
struct ValueRow {
  std::string name;
  double value = 0.0;
  double error = 0.0;
  std::string provenance;
};

struct TaskReport {
  std::string task;
  ordered_json results;
  std::vector<ValueRow> values;
  bool undetermined = false;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// floats rendered with 17 significant digits so reports round-trip exactly;
// non-finite values degrade to null, never to invalid tokens
void write_json(const ordered_json& j, std::ostream& os, int depth) {
  const std::string pad(static_cast<size_t>(depth) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ",\n";
      first = false;
      os << pad << "  " << ordered_json(it.key()).dump() << ": ";
      write_json(it.value(), os, depth + 1);
    }
    os << "\n" << pad << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << "[\n";
    bool first = true;
    for (const auto& el : j) {
      if (!first) os << ",\n";
      first = false;
      os << pad << "  ";
      write_json(el, os, depth + 1);
    }
    os << "\n" << pad << "]";
  } else if (j.is_number_float()) {
    double v = j.get<double>();
    os << (std::isfinite(v) ? fmt17(v) : "null");
  } else {
    os << j.dump();
  }
}

std::string csv_field(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const std::vector<ValueRow>& rows, std::ostream& os) {
  os << "name,value,error,provenance\n";
  for (const ValueRow& r : rows) {
    os << csv_field(r.name) << ',';
    if (std::isfinite(r.value)) os << fmt17(r.value);
    os << ',';
    if (std::isfinite(r.error)) os << fmt17(r.error);
    os << ',' << csv_field(r.provenance) << '\n';
  }
}

ordered_json evidence_json(const std::vector<Evidence>& evidence) {
  ordered_json arr = ordered_json::array();
  for (const Evidence& e : evidence) {
    ordered_json row;
    row["name"] = e.name;
    row["value"] = e.value;
    row["error"] = e.error;
    row["provenance"] = e.provenance;
    row["note"] = e.note;
    arr.push_back(std::move(row));
  }
  return arr;
}

const char* coarse_regime(Regime r) {
  switch (r) {
    case Regime::transient: return "transient";
    case Regime::undetermined: return "undetermined";
    default: return "recurrent";
  }
}

FactorizeOptions ladder_only_options() {
  FactorizeOptions opts;
  opts.with_monte_carlo = false;
  return opts;
}

ConcentratedSpec concentrated_of(const WalkSpec& walk) {
  if (const auto* c = std::get_if<ConcentratedWalk>(&walk))
    return concentrated_from_factors(c->mu_plus, c->nu_minus);
  const auto& o = std::get<OscillatingWalk>(walk);
  return build_concentrated(o.neg_side, o.pos_side, ladder_only_options());
}

double walk_tail_mass(const WalkSpec& walk) {
  double tail = 0.0;
  if (const auto* h = std::get_if<HomogeneousWalk>(&walk)) {
    tail = h->step.tail_mass;
  } else if (const auto* o = std::get_if<OscillatingWalk>(&walk)) {
    tail = o->neg_side.tail_mass + o->pos_side.tail_mass;
  } else {
    const auto& c = std::get<ConcentratedWalk>(walk);
    tail = c.mu_plus.tail_mass + c.nu_minus.tail_mass;
  }
  return tail;
}

TaskReport task_classify(const WalkSpec& walk, const ordered_json& t,
                         const std::string& path) {
  check_keys(t, path, {"task", "tol"});
  double tol = number_or(t, "tol", path, 1e-8);

  ClassificationReport rep;
  std::string factors;
  if (const auto* h = std::get_if<HomogeneousWalk>(&walk)) {
    rep = classify_homogeneous(h->step, tol);
  } else {
    ConcentratedSpec spec = concentrated_of(walk);
    factors = spec.provenance;
    rep = classify_oscillating(spec, tol);
  }

  TaskReport out;
  out.task = "classify";
  out.undetermined = rep.regime == Regime::undetermined;
  out.results["regime"] = coarse_regime(rep.regime);
  out.results["regime_detail"] = to_string(rep.regime);
  out.results["inputs"] = rep.inputs_echo;
  out.results["tail_mass"] = walk_tail_mass(walk);
  if (!factors.empty()) out.results["entrance_factors"] = factors;
  out.results["evidence"] = evidence_json(rep.evidence);
  for (const Evidence& e : rep.evidence)
    out.values.push_back({e.name, e.value, e.error, e.provenance});
  return out;
}

ordered_json factor_summary(const LatticeMeasure& m) {
  ordered_json f;
  f["mass"] = m.total_mass();
  f["tail_mass"] = m.tail_mass;
  if (!m.empty()) {
    f["support_min"] = m.support_min;
    f["support_max"] = m.support_max();
  }
  constexpr size_t kAtomCap = 128;
  ordered_json atoms = ordered_json::array();
  for (size_t i = 0; i < m.weights.size() && i < kAtomCap; ++i) {
    if (m.weights[i] == 0.0) continue;
    atoms.push_back(ordered_json::array(
        {m.support_min + static_cast<long long>(i), m.weights[i]}));
  }
  f["atoms"] = std::move(atoms);
  f["atoms_truncated"] = m.weights.size() > kAtomCap;
  return f;
}

TaskReport task_factorize(const WalkSpec& walk, const ordered_json& t,
                          const std::string& path, int workers) {
  check_keys(t, path,
             {"task", "ladder_horizon", "cmp_s", "exp_n_max", "mc_trials",
              "mc_step_cap", "seed", "monte_carlo"});
  const auto* h = std::get_if<HomogeneousWalk>(&walk);
  if (!h)
    throw std::invalid_argument(
        "factorize needs a homogeneous walk (one step law on all of Z)");

  FactorizeOptions opts;
  opts.ladder_horizon =
      integer_or(t, "ladder_horizon", path, opts.ladder_horizon);
  opts.cmp_s = number_or(t, "cmp_s", path, opts.cmp_s);
  opts.exp_n_max =
      static_cast<int>(integer_or(t, "exp_n_max", path, opts.exp_n_max));
  opts.mc_trials = integer_or(t, "mc_trials", path, opts.mc_trials);
  opts.mc_step_cap = integer_or(t, "mc_step_cap", path, opts.mc_step_cap);
  opts.mc_seed = static_cast<uint64_t>(
      integer_or(t, "seed", path, static_cast<long long>(opts.mc_seed)));
  opts.with_monte_carlo = bool_or(t, "monte_carlo", path, true);
  opts.workers = workers;

  FactorizationResult r = factorize(h->step, opts);

  TaskReport out;
  out.task = "factorize";
  ordered_json routes = ordered_json::array();
  auto route = [](const char* name, double s, double mass, double error,
                  const char* provenance) {
    ordered_json row;
    row["route"] = name;
    row["s"] = s;
    row["mass"] = mass;
    row["error"] = error;
    row["provenance"] = provenance;
    return row;
  };
  double ladder_err = r.via_ladder.unentered_mass + r.via_ladder.trimmed_mass;
  routes.push_back(route("ladder", 1.0, r.via_ladder.factor.total_mass(),
                         ladder_err, "first-entry ladder recursion"));
  routes.push_back(route(
      "ladder", r.ladder_at_cmp_s.s, r.ladder_at_cmp_s.factor.total_mass(),
      r.ladder_at_cmp_s.unentered_mass + r.ladder_at_cmp_s.trimmed_mass,
      "first-entry ladder recursion, discounted"));
  routes.push_back(route(
      "exponential", r.via_exponential.s, r.via_exponential.factor.total_mass(),
      r.via_exponential.log_truncation_bound +
          r.via_exponential.exp_remainder_bound,
      "exponential of the discounted log series"));
  if (opts.with_monte_carlo) {
    routes.push_back(route("monte-carlo", 1.0,
                           r.via_monte_carlo.factor.total_mass(),
                           r.via_monte_carlo.deficit_radius3,
                           "first-entry sampling"));
  }
  for (const auto& row : routes)
    out.values.push_back({std::string("entrance mass (") +
                              row["route"].get<std::string>() + ", s=" +
                              fmt17(row["s"].get<double>()) + ")",
                          row["mass"].get<double>(), row["error"].get<double>(),
                          row["provenance"].get<std::string>()});
  out.results["routes"] = std::move(routes);

  ordered_json tv;
  tv["cmp_s"] = opts.cmp_s;
  tv["ladder_exp"] = r.tv_ladder_exp;
  if (opts.with_monte_carlo) {
    tv["ladder_mc"] = r.tv_ladder_mc;
    tv["exp_mc"] = r.tv_exp_mc;
    tv["mc_allowance3"] = r.mc_allowance3;
  }
  out.results["pairwise_tv"] = std::move(tv);
  out.results["mass_deficit"] = r.mass_deficit;
  out.results["factor"] = factor_summary(r.via_ladder.factor);

  out.values.push_back({"tv distance (ladder vs exponential)", r.tv_ladder_exp,
                        0.0, "total variation at the comparison discount"});
  if (opts.with_monte_carlo) {
    out.values.push_back({"tv distance (ladder vs monte-carlo)", r.tv_ladder_mc,
                          r.mc_allowance3, "total variation, 3-sigma allowance"});
    out.values.push_back({"tv distance (exponential vs monte-carlo)",
                          r.tv_exp_mc, r.mc_allowance3,
                          "total variation, 3-sigma allowance"});
  }
  out.values.push_back({"entrance mass deficit", r.mass_deficit, ladder_err,
                        "first-entry ladder recursion"});
  return out;
}

TaskReport task_green(const WalkSpec& walk, const ordered_json& t,
                      const std::string& path) {
  TaskReport out;
  out.task = "green";

  if (const auto* h = std::get_if<HomogeneousWalk>(&walk)) {
    check_keys(t, path, {"task", "horizon", "tol"});
    long long horizon = integer_or(t, "horizon", path, 10'000);
    if (horizon < 1) fail_at(join(path, "horizon"), "needs horizon >= 1");
    double tol = number_or(t, "tol", path, 1e-8);

    GreenTable g = green_finite(walk, horizon, 0);
    ResolventLimit rl = chung_fuchs_limit(h->step);
    QuadratureResult sp = spitzer_integral(h->step, tol);

    ordered_json dp;
    dp["value"] = g.value(0);
    dp["horizon"] = horizon;
    dp["leaked_mass"] = g.leaked_mass;
    out.results["dp"] = std::move(dp);

    ordered_json res;
    res["value"] = rl.limit.value;
    res["error"] = rl.limit.error;
    res["verdict"] = to_string(rl.limit.verdict);
    res["s1_integral"] = rl.s1_integral;
    res["s1_integral_finite"] = rl.s1_integral_finite;
    out.results["resolvent"] = std::move(res);

    ordered_json spj;
    spj["value"] = sp.value;
    spj["error"] = sp.abs_error_estimate;
    spj["diverged"] = sp.diverged;
    spj["nodes"] = sp.nodes_used;
    out.results["spitzer"] = std::move(spj);

    out.values.push_back({"occupation partial sum", g.value(0), g.leaked_mass,
                          "finite-horizon DP at the origin"});
    out.values.push_back({"resolvent limit", rl.limit.value, rl.limit.error,
                          "discounted resolvent along s = 1 - 2^-k"});
    out.values.push_back({"spitzer integral", sp.value, sp.abs_error_estimate,
                          "singular-ring quadrature"});
    return out;
  }

  check_keys(t, path, {"task", "modes", "series_budget", "s_levels", "tol"});
  long long budget = integer_or(t, "series_budget", path, 1 << 19);
  int s_levels = static_cast<int>(integer_or(t, "s_levels", path, 30));
  double tol = number_or(t, "tol", path, 1e-9);

  std::vector<std::pair<std::string, GreenZMode>> modes;
  if (t.contains("modes")) {
    const ordered_json& list = t.at("modes");
    if (!list.is_array()) fail_at(join(path, "modes"), "expected an array");
    for (size_t i = 0; i < list.size(); ++i) {
      std::string mpath = join(path, "modes[" + std::to_string(i) + "]");
      std::string name = as_string(list[i], mpath);
      if (name == "series")
        modes.emplace_back(name, GreenZMode::series);
      else if (name == "fourier-s")
        modes.emplace_back(name, GreenZMode::fourier_s);
      else if (name == "symmetric")
        modes.emplace_back(name, GreenZMode::symmetric);
      else
        fail_at(mpath, "unknown mode \"" + name +
                           "\" (series, fourier-s, symmetric)");
    }
  } else {
    modes.emplace_back("series", GreenZMode::series);
    modes.emplace_back("fourier-s", GreenZMode::fourier_s);
  }

  ConcentratedSpec spec = concentrated_of(walk);
  out.results["entrance_factors"] = spec.provenance;
  ordered_json mode_rows = ordered_json::array();
  for (const auto& [name, mode] : modes) {
    GreenZ gz = green_z(spec, mode, budget, s_levels, tol);
    ordered_json row;
    row["mode"] = name;
    row["value"] = gz.limit.value;
    row["error"] = gz.limit.error;
    row["verdict"] = to_string(gz.limit.verdict);
    row["tail_note"] = gz.tail_note;
    row["detail"] = gz.detail;
    ordered_json partials = ordered_json::array();
    for (double p : gz.partials) partials.push_back(p);
    row["partials"] = std::move(partials);
    mode_rows.push_back(std::move(row));
    out.values.push_back(
        {"green (" + name + ")", gz.limit.value, gz.limit.error, gz.detail});
  }
  out.results["modes"] = std::move(mode_rows);
  return out;
}

TaskReport task_identities(const WalkSpec& walk, const ordered_json& t,
                           const std::string& path) {
  check_keys(t, path, {"task", "set"});
  const auto* h = std::get_if<HomogeneousWalk>(&walk);
  if (!h)
    throw std::invalid_argument(
        "identities needs a homogeneous walk (one step law on all of Z)");

  struct Entry {
    std::string name;
    double tol = 0.0;
    long long x = 1;
    long long horizon = 4096;
  };
  auto default_tol = [](const std::string& name) {
    if (name == "herglotz") return 1e-6;
    if (name == "varia") return 1e-5;
    return 1e-4;  // delta
  };

  std::vector<Entry> entries;
  if (t.contains("set")) {
    const ordered_json& list = t.at("set");
    if (!list.is_array()) fail_at(join(path, "set"), "expected an array");
    for (size_t i = 0; i < list.size(); ++i) {
      std::string epath = join(path, "set[" + std::to_string(i) + "]");
      Entry e;
      if (list[i].is_string()) {
        e.name = list[i].get<std::string>();
      } else if (list[i].is_object()) {
        e.name = as_string(need(list[i], "name", epath), join(epath, "name"));
        if (e.name == "delta")
          check_keys(list[i], epath, {"name", "tol", "x", "horizon"});
        else
          check_keys(list[i], epath, {"name", "tol"});
        e.x = integer_or(list[i], "x", epath, e.x);
        e.horizon = integer_or(list[i], "horizon", epath, e.horizon);
      } else {
        fail_at(epath, "expected an identity name or an object");
      }
      if (e.name != "herglotz" && e.name != "varia" && e.name != "delta")
        fail_at(epath, "unknown identity \"" + e.name +
                           "\" (herglotz, varia, delta)");
      e.tol = list[i].is_object()
                  ? number_or(list[i], "tol", epath, default_tol(e.name))
                  : default_tol(e.name);
      entries.push_back(e);
    }
  } else {
    entries.push_back({"herglotz", default_tol("herglotz"), 1, 4096});
    entries.push_back({"varia", default_tol("varia"), 1, 4096});
  }

  TaskReport out;
  out.task = "identities";
  ordered_json rows = ordered_json::array();
  for (const Entry& e : entries) {
    double lhs = 0, lhs_err = 0, rhs = 0, rhs_err = 0;
    std::string lhs_prov, rhs_prov;
    ordered_json row;
    row["name"] = e.name;
    if (e.name == "delta") {
      QuadratureResult a = delta_analytic(h->step, e.x, 1e-8);
      DeltaProbabilistic p = delta_probabilistic(h->step, e.x, e.horizon);
      lhs = a.value;
      lhs_err = a.abs_error_estimate;
      rhs = p.value;
      rhs_err = p.error;
      lhs_prov = "cosine-defect quadrature";
      rhs_prov = "taboo occupation DP with escape correction";
      row["x"] = e.x;
    } else {
      IdentityCheck c = identity_check(
          h->step, e.name == "herglotz" ? Identity::herglotz : Identity::varia);
      lhs = c.lhs;
      lhs_err = c.lhs_error;
      rhs = c.rhs;
      rhs_err = c.rhs_error;
      lhs_prov = "singular-ring quadrature";
      rhs_prov = "closed form in the step moments";
    }
    double gap = std::abs(lhs - rhs);
    row["lhs"] = lhs;
    row["rhs"] = rhs;
    row["gap"] = gap;
    row["tol"] = e.tol;
    row["pass"] = gap <= e.tol;
    rows.push_back(std::move(row));
    out.values.push_back({e.name + " lhs", lhs, lhs_err, lhs_prov});
    out.values.push_back({e.name + " rhs", rhs, rhs_err, rhs_prov});
    out.values.push_back(
        {e.name + " gap", gap, lhs_err + rhs_err, "two-route comparison"});
  }
  out.results["identities"] = std::move(rows);
  return out;
}

const char* event_name(EventKind e) {
  switch (e) {
    case EventKind::return_frequency: return "return-frequency";
    case EventKind::hitting_probability: return "hitting";
    case EventKind::occupation_count: return "occupation";
  }
  return "?";
}

TaskReport task_simulate(const WalkSpec& walk, const ordered_json& t,
                         const std::string& path, int workers) {
  check_keys(t, path, {"task", "event", "trials", "horizon", "seed", "origin",
                       "target", "site", "stop_at"});
  SimulationConfig cfg;
  cfg.spec = walk;
  std::string event = t.contains("event")
                          ? as_string(t.at("event"), join(path, "event"))
                          : "return-frequency";
  if (event == "return-frequency")
    cfg.event = EventKind::return_frequency;
  else if (event == "hitting")
    cfg.event = EventKind::hitting_probability;
  else if (event == "occupation")
    cfg.event = EventKind::occupation_count;
  else
    fail_at(join(path, "event"),
            "unknown event \"" + event +
                "\" (return-frequency, hitting, occupation)");
  cfg.trials = integer_or(t, "trials", path, cfg.trials);
  if (cfg.trials < 1) fail_at(join(path, "trials"), "needs trials >= 1");
  cfg.horizon = integer_or(t, "horizon", path, cfg.horizon);
  if (cfg.horizon < 1) fail_at(join(path, "horizon"), "needs horizon >= 1");
  cfg.seed = static_cast<uint64_t>(integer_or(t, "seed", path, 1));
  cfg.origin = integer_or(t, "origin", path, 0);
  cfg.target = integer_or(t, "target", path, 0);
  cfg.site = integer_or(t, "site", path, 0);
  if (t.contains("stop_at"))
    cfg.stop_at = as_integer(t.at("stop_at"), join(path, "stop_at"));
  cfg.workers = workers;

  EstimateResult r = estimate_event(cfg);

  TaskReport out;
  out.task = "simulate";
  out.results["event"] = event;
  out.results["trials"] = cfg.trials;
  out.results["horizon"] = cfg.horizon;
  out.results["seed"] = static_cast<long long>(cfg.seed);
  out.results["origin"] = cfg.origin;
  if (cfg.event == EventKind::hitting_probability)
    out.results["target"] = cfg.target;
  if (cfg.event == EventKind::occupation_count) {
    out.results["site"] = cfg.site;
    if (cfg.stop_at) out.results["stop_at"] = *cfg.stop_at;
  }
  out.results["mean"] = r.mean;
  out.results["sigma"] = r.sigma;
  out.results["ci3"] = ordered_json::array({r.ci3_lo, r.ci3_hi});
  out.results["censored_fraction"] = r.censored_fraction;

  std::ostringstream prov;
  prov << "counter-stream Monte Carlo (" << cfg.trials << " trials, horizon "
       << cfg.horizon << ")";
  double cf = r.censored_fraction;
  double cf_err = std::sqrt(std::max(cf * (1.0 - cf), 0.0) /
                            static_cast<double>(cfg.trials));
  out.values.push_back(
      {std::string(event_name(cfg.event)) + " mean", r.mean, r.sigma,
       prov.str()});
  out.values.push_back({"censored fraction", cf, cf_err, prov.str()});
  return out;
}

TaskReport task_transition_check(const WalkSpec& walk, const ordered_json& t,
                                 const std::string& path) {
  check_keys(t, path, {"task", "n_max", "window", "x", "tol"});
  const auto* c = std::get_if<ConcentratedWalk>(&walk);
  if (!c)
    throw std::invalid_argument(
        "transition-check needs a concentrated walk (entrance factors as the "
        "step laws)");
  long long n_max = integer_or(t, "n_max", path, 12);
  if (n_max < 0) fail_at(join(path, "n_max"), "needs n_max >= 0");
  long long window = integer_or(t, "window", path, 12);
  if (window < 0) fail_at(join(path, "window"), "needs window >= 0");
  long long x = integer_or(t, "x", path, 0);
  double tol = number_or(t, "tol", path, 1e-12);

  ConcentratedSpec spec = concentrated_from_factors(c->mu_plus, c->nu_minus);
  size_t atoms = spec.mu_plus.weights.size() + spec.nu_minus.weights.size();
  if (atoms > 1024) {
    std::ostringstream os;
    os << "transition-check handles point supports up to 1024 atoms, got "
       << atoms;
    throw resource_error(os.str());
  }

  // exact map DP against the crossing-split formula
  std::map<long long, double> dist{{x, 1.0}};
  double max_gap = 0.0;
  long long comparisons = 0;
  for (long long n = 0; n <= n_max; ++n) {
    for (long long y = -window; y <= window; ++y) {
      double dp = 0.0;
      if (auto it = dist.find(y); it != dist.end()) dp = it->second;
      double formula = transition_probability(spec, x, y, n);
      max_gap = std::max(max_gap, std::abs(dp - formula));
      ++comparisons;
    }
    if (n == n_max) break;
    std::map<long long, double> next;
    for (const auto& [pos, w] : dist) {
      const LatticeMeasure& law = pos <= 0 ? spec.mu_plus : spec.nu_minus;
      for (size_t i = 0; i < law.weights.size(); ++i) {
        if (law.weights[i] == 0.0) continue;
        next[pos + law.support_min + static_cast<long long>(i)] +=
            w * law.weights[i];
      }
    }
    dist = std::move(next);
  }
  double mass = 0.0;
  for (const auto& [pos, w] : dist) mass += w;

  TaskReport out;
  out.task = "transition-check";
  out.results["x"] = x;
  out.results["n_max"] = n_max;
  out.results["window"] = window;
  out.results["comparisons"] = comparisons;
  out.results["max_gap"] = max_gap;
  out.results["tol"] = tol;
  out.results["pass"] = max_gap <= tol;
  out.results["final_deficit"] = 1.0 - mass;
  out.values.push_back({"max transition gap", max_gap, 0.0,
                        "crossing-split formula vs map DP"});
  out.values.push_back({"final row deficit", 1.0 - mass, 0.0,
                        "mass beyond the materialized jumps"});
  return out;
}

TaskReport dispatch_task(const WalkSpec& walk, const ordered_json& t,
                         const std::string& path, int workers) {
  if (!t.is_object()) fail_at(path, "expected a task object");
  std::string name = as_string(need(t, "task", path), join(path, "task"));
  if (name == "classify") return task_classify(walk, t, path);
  if (name == "factorize") return task_factorize(walk, t, path, workers);
  if (name == "green") return task_green(walk, t, path);
  if (name == "identities") return task_identities(walk, t, path);
  if (name == "simulate") return task_simulate(walk, t, path, workers);
  if (name == "transition-check") return task_transition_check(walk, t, path);
  fail_at(join(path, "task"),
          "unknown task \"" + name +
              "\" (classify, factorize, green, identities, simulate, "
              "transition-check)");
}

struct ParsedConfig {
  WalkSpec walk;
  ordered_json walk_echo;
  std::string basename = "report";
  std::vector<ordered_json> tasks;
};

ParsedConfig parse_config(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "config parse error at line " << line << ", column " << col << ": "
       << e.what();
    throw config_error(os.str());
  }
  if (!j.is_object()) throw config_error("config root must be an object");
  check_keys(j, "", {"version", "walk", "output", "tasks"});
  if (!j.contains("version")) fail_at("version", "missing (expected 1)");
  if (!j.at("version").is_number_integer() ||
      j.at("version").get<long long>() != 1)
    fail_at("version", "unsupported value (expected 1)");

  ParsedConfig out;
  out.walk = parse_walk(need(j, "walk", ""), "walk");
  out.walk_echo = j.at("walk");
  if (j.contains("output")) {
    const ordered_json& o = j.at("output");
    if (!o.is_object()) fail_at("output", "expected an object");
    check_keys(o, "output", {"basename"});
    if (o.contains("basename")) {
      std::string b = as_string(o.at("basename"), "output.basename");
      if (b.empty() || b.find('/') != std::string::npos ||
          b.find('\\') != std::string::npos)
        fail_at("output.basename", "must be a plain file stem");
      out.basename = b;
    }
  }
  const ordered_json& tasks = need(j, "tasks", "");
  if (!tasks.is_array()) fail_at("tasks", "expected an array");
  for (const auto& t : tasks) out.tasks.push_back(t);
  return out;
}

std::string iso_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json values_json(const std::vector<ValueRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const ValueRow& r : rows) {
    ordered_json row;
    row["name"] = r.name;
    row["value"] = r.value;
    row["error"] = r.error;
    row["provenance"] = r.provenance;
    arr.push_back(std::move(row));
  }
  return arr;
}

}  // namespace

int resolve_workers(const RunOptions& opts) {
  if (opts.workers > 0) return opts.workers;
  const char* env = std::getenv("GREENWALK_WORKERS");
  if (!env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 1024) return 1;
  return static_cast<int>(v);
}

int run_config(const std::string& config_path, const RunOptions& opts,
               std::ostream& log) {
  std::string text;
  {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      log << "cannot read config file " << config_path << "\n";
      return 1;
    }
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }

  ParsedConfig cfg;
  try {
    cfg = parse_config(text);
  } catch (const config_error& e) {
    log << e.what() << "\n";
    return 1;
  }

  const int workers = resolve_workers(opts);
  fs::path out_dir(opts.out_dir);
  try {
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    log << "cannot create output directory " << opts.out_dir << ": " << e.what()
        << "\n";
    return 1;
  }

  const std::string stamp = opts.no_timestamp ? std::string{} : iso_now();
  bool any_undetermined = false;
  for (size_t i = 0; i < cfg.tasks.size(); ++i) {
    const std::string path = "tasks[" + std::to_string(i) + "]";
    std::string label = "?";
    if (cfg.tasks[i].is_object() && cfg.tasks[i].contains("task") &&
        cfg.tasks[i].at("task").is_string())
      label = cfg.tasks[i].at("task").get<std::string>();

    TaskReport rep;
    try {
      rep = dispatch_task(cfg.walk, cfg.tasks[i], path, workers);
    } catch (const config_error& e) {
      log << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      log << "task " << i + 1 << " (" << label << ") failed: " << e.what()
          << "\n";
      return 1;
    }
    any_undetermined = any_undetermined || rep.undetermined;

    ordered_json doc;
    doc["version"] = 1;
    doc["task"] = rep.task;
    doc["index"] = static_cast<long long>(i + 1);
    if (!stamp.empty()) doc["timestamp"] = stamp;
    doc["walk"] = cfg.walk_echo;
    doc["results"] = std::move(rep.results);
    doc["values"] = values_json(rep.values);

    const std::string stem =
        cfg.basename + "-" + std::to_string(i + 1) + "-" + rep.task;
    fs::path json_path = out_dir / (stem + ".json");
    fs::path csv_path = out_dir / (stem + ".csv");
    std::ofstream jf(json_path, std::ios::binary);
    if (!jf) {
      log << "cannot write " << json_path.string() << "\n";
      return 1;
    }
    write_json(doc, jf, 0);
    jf << "\n";
    std::ofstream cf(csv_path, std::ios::binary);
    if (!cf) {
      log << "cannot write " << csv_path.string() << "\n";
      return 1;
    }
    write_csv(rep.values, cf);

    log << "task " << i + 1 << " (" << rep.task << "): wrote "
        << json_path.string() << "\n";
    if (doc["results"].contains("regime_detail"))
      log << "  regime: " << doc["results"]["regime_detail"].get<std::string>()
          << "\n";
  }

  if (opts.strict && any_undetermined) {
    log << "undetermined verdict present; strict mode exit\n";
    return 2;
  }
  return 0;
}

int classify_inline(const std::string& measure_json, const RunOptions& opts,
                    std::ostream& log) {
  try {
    ordered_json j;
    try {
      j = ordered_json::parse(measure_json);
    } catch (const nlohmann::json::parse_error& e) {
      log << "measure parse error: " << e.what() << "\n";
      return 1;
    }
    LatticeMeasure m = parse_measure(j, "measure");
    ClassificationReport rep = classify_homogeneous(m);

    ordered_json doc;
    doc["version"] = 1;
    doc["task"] = "classify";
    if (!opts.no_timestamp) doc["timestamp"] = iso_now();
    doc["measure"] = j;
    ordered_json results;
    results["regime"] = coarse_regime(rep.regime);
    results["regime_detail"] = to_string(rep.regime);
    results["inputs"] = rep.inputs_echo;
    results["tail_mass"] = m.tail_mass;
    results["evidence"] = evidence_json(rep.evidence);
    doc["results"] = std::move(results);
    write_json(doc, log, 0);
    log << "\n";
    return opts.strict && rep.regime == Regime::undetermined ? 2 : 0;
  } catch (const config_error& e) {
    log << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    log << "classify failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace greenwalk
