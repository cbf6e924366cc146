// Scenario configuration (JSON, strict keys), family/chain construction,
// batch task execution with tolerance checks, run reports and convergence
// studies.
#pragma once

#include <fftw3.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cslab/chains.hpp"
#include "cslab/connections.hpp"
#include "cslab/core.hpp"
#include "cslab/families.hpp"
#include "cslab/forms.hpp"
#include "cslab/quadrature.hpp"
#include "cslab/torus.hpp"
#include "cslab/transgression.hpp"
#include "cslab/trig_field.hpp"

namespace cslab {

using json = nlohmann::json;

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

// ---------------------------------------------------------------------------
// strict JSON field access

class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ValidationError(at(key) + ": missing required field");
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    return convert<T>(raw(key), at(key));
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(j_.at(key), at(key));
  }

  const json* optional(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ValidationError(at(key) + ": unknown key");
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ValidationError(where + ": expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ValidationError(where + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ValidationError(where + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<long long>() < 0) throw ValidationError(where + ": expected a nonnegative integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ValidationError(where + ": expected a number");
      return v.get<T>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported field type");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline const json& expect_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array");
  return v;
}

inline std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

inline Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return Complex{v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return Complex{v[0].get<double>(), v[1].get<double>()};
  throw ValidationError(where + ": expected a number or [re, im]");
}

inline std::vector<Complex> parse_complex_list(const json& v, const std::string& where) {
  std::vector<Complex> out;
  expect_array(v, where);
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_complex(v[i], index_path(where, i)));
  return out;
}

inline SquareMatrix parse_matrix(const json& v, int n, const std::string& where) {
  expect_array(v, where);
  if (static_cast<int>(v.size()) != n) throw ValidationError(where + ": expected " + std::to_string(n) + " rows");
  SquareMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string row = index_path(where, static_cast<std::size_t>(i));
    const json& r = expect_array(v[static_cast<std::size_t>(i)], row);
    if (static_cast<int>(r.size()) != n) throw ValidationError(row + ": expected " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) m(i, j) = parse_complex(r[static_cast<std::size_t>(j)], index_path(row, static_cast<std::size_t>(j)));
  }
  return m;
}

inline json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline CycleSpec parse_cycle(const json& v, const std::string& where) {
  Fields f(v, where);
  CycleSpec c;
  const json& axes = expect_array(f.raw("axes"), f.at("axes"));
  for (std::size_t i = 0; i < axes.size(); ++i) c.axes.push_back(Fields::convert<int>(axes[i], index_path(f.at("axes"), i)));
  if (const json* o = f.optional("offsets")) {
    expect_array(*o, f.at("offsets"));
    for (std::size_t i = 0; i < o->size(); ++i)
      c.offsets.push_back(Fields::convert<int>((*o)[i], index_path(f.at("offsets"), i)));
  }
  c.orientation = f.get_or<int>("orientation", 1);
  f.finish();
  return c;
}

inline json cycle_json(const CycleSpec& c) {
  json j{{"axes", c.axes}, {"orientation", c.orientation}};
  if (!c.offsets.empty()) j["offsets"] = c.offsets;
  return j;
}

// ---------------------------------------------------------------------------
// configuration

struct FamilySpec {
  std::string name;
  std::string kind;
  json params;  // the whole family object, re-read strictly by build_family
};

struct ChainSpec {
  std::string name;
  std::vector<std::pair<long long, std::string>> terms;  // (coeff, family)
  std::string boundary_of;                               // chain or family name
};

struct TaskSpec {
  std::string kind;
  std::string family;
  std::string chain;
  int p = 1;
  std::vector<CycleSpec> cycles;
  std::optional<CycleSpec> cycle;
  std::vector<CycleSpec> boundary_parts;
  bool expect_zero = false;
  std::vector<Complex> expected;
  std::string reference;  // omega: reference family; rho_flat: reference chain
  std::optional<double> tolerance;
  std::optional<json> contraction;
  json echo;
};

struct Tolerances {
  double kform = 1e-8;
  double oform = 1e-8;
  double eta = 1e-8;
  double eta_agreement = 1e-10;
  double rigidity = 1e-11;
  double flat_vanishing = 1e-11;
  double tp_refinement_affine = 1e-12;
  double tp_refinement_closed = 1e-9;
  double omega_refinement = 1e-9;
  double integer_shift = 1e-10;
  double rho = 1e-8;
  double rho_flat = 1e-8;
  double coboundary = 1e-8;
  std::optional<double> min_order;  // convergence studies

  json to_json() const {
    json j{{"kform", kform},
           {"oform", oform},
           {"eta", eta},
           {"eta_agreement", eta_agreement},
           {"rigidity", rigidity},
           {"flat_vanishing", flat_vanishing},
           {"tp_refinement_affine", tp_refinement_affine},
           {"tp_refinement_closed", tp_refinement_closed},
           {"omega_refinement", omega_refinement},
           {"integer_shift", integer_shift},
           {"rho", rho},
           {"rho_flat", rho_flat},
           {"coboundary", coboundary}};
    if (min_order) j["min_order"] = *min_order;
    return j;
  }
};

struct ScenarioConfig {
  std::string name = "unnamed";
  std::string description;
  TorusChart chart{};
  int rank = 1;
  std::uint64_t seed = 0;
  SimplexRuleKind rule_kind = SimplexRuleKind::collapsed_gauss;
  int affine_degree = -1;
  int closed_form_degree = 21;
  json contraction = json{{"path", "linear"}};
  std::vector<FamilySpec> families;
  std::vector<ChainSpec> chains;
  std::vector<TaskSpec> tasks;
  Tolerances tolerances;
  json source;  // the parsed config document
};

inline const std::set<std::string>& family_kinds() {
  static const std::set<std::string> k{"constant_pencil", "fourier_random", "gauge_orbit", "abelian_loop", "large_gauge"};
  return k;
}

inline const std::set<std::string>& task_kinds() {
  static const std::set<std::string> k{"kform", "oform", "eta", "tp", "omega", "rho", "rho_flat", "coboundary"};
  return k;
}

inline void parse_contraction(const json& v, const std::string& where) {
  Fields f(v, where);
  const auto path = f.get<std::string>("path");
  if (path == "linear") {
  } else if (path == "bent") {
    if (f.get_or<int>("max_mode", 1) < 1) throw ValidationError(f.at("max_mode") + ": must be >= 1");
    if (!(f.get_or<double>("amplitude", 0.5) >= 0.0)) throw ValidationError(f.at("amplitude") + ": must be >= 0");
  } else {
    throw ValidationError(f.at("path") + ": expected \"linear\" or \"bent\"");
  }
  f.finish();
}

/// Simplex dimension declared by a family spec (structural read only).
inline int declared_simplex_dim(const FamilySpec& fs, const std::map<std::string, int>& known, const std::string& where) {
  const json& p = fs.params;
  if (fs.kind == "constant_pencil") return static_cast<int>(p.at("vertices").size()) - 1;
  if (fs.kind == "fourier_random" || fs.kind == "gauge_orbit") return p.at("simplex_dim").get<int>();
  if (fs.kind == "abelian_loop") {
    const json& rows = p.at("cosine");
    return rows.empty() ? 0 : static_cast<int>(rows[0].size());
  }
  const std::string of = p.at("of").get<std::string>();
  auto it = known.find(of);
  if (it == known.end()) throw ValidationError(where + ".of: unknown family \"" + of + "\" (families must be declared before use)");
  return it->second;
}

/// Structural validation of one family object (shapes, types, unknown keys).
inline void check_family_params(const FamilySpec& fs, const ScenarioConfig& cfg, const std::string& where) {
  Fields f(fs.params, where);
  f.get<std::string>("name");
  f.get<std::string>("kind");
  const int n = cfg.rank;
  const int d = cfg.chart.dim;
  auto check_one_form = [&](const json& v, const std::string& at) {
    expect_array(v, at);
    if (static_cast<int>(v.size()) != d) throw ValidationError(at + ": expected one matrix per axis (" + std::to_string(d) + ")");
    for (std::size_t j = 0; j < v.size(); ++j) parse_matrix(v[j], n, index_path(at, j));
  };
  if (fs.kind == "constant_pencil") {
    const json& verts = expect_array(f.raw("vertices"), f.at("vertices"));
    if (verts.empty()) throw ValidationError(f.at("vertices") + ": need at least one vertex");
    for (std::size_t i = 0; i < verts.size(); ++i) check_one_form(verts[i], index_path(f.at("vertices"), i));
    f.get_or<bool>("flat", false);
  } else if (fs.kind == "fourier_random") {
    const int r = f.get<int>("simplex_dim");
    if (r < 0 || r > 4) throw ValidationError(f.at("simplex_dim") + ": must be in [0, 4]");
    if (f.get<int>("max_mode") < 1) throw ValidationError(f.at("max_mode") + ": must be >= 1");
    if (!(f.get<double>("amplitude") >= 0.0)) throw ValidationError(f.at("amplitude") + ": must be >= 0");
  } else if (fs.kind == "gauge_orbit") {
    const int r = f.get<int>("simplex_dim");
    if (r < 0 || r > 4) throw ValidationError(f.at("simplex_dim") + ": must be in [0, 4]");
    if (f.get<int>("max_mode") < 1) throw ValidationError(f.at("max_mode") + ": must be >= 1");
    if (!(f.get<double>("amplitude") >= 0.0)) throw ValidationError(f.at("amplitude") + ": must be >= 0");
    if (const json* b = f.optional("base")) check_one_form(*b, f.at("base"));
  } else if (fs.kind == "abelian_loop") {
    const auto h = parse_complex_list(f.raw("diagonal"), f.at("diagonal"));
    if (static_cast<int>(h.size()) != n) throw ValidationError(f.at("diagonal") + ": expected " + std::to_string(n) + " entries");
    const auto off = parse_complex_list(f.raw("offset"), f.at("offset"));
    if (static_cast<int>(off.size()) != d) throw ValidationError(f.at("offset") + ": expected one entry per axis");
    std::optional<std::size_t> r;
    for (const char* key : {"cosine", "sine"}) {
      const json& rows = expect_array(f.raw(key), f.at(key));
      if (static_cast<int>(rows.size()) != d) throw ValidationError(f.at(key) + ": expected one row per axis");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto row = parse_complex_list(rows[j], index_path(f.at(key), j));
        if (!r) r = row.size();
        if (row.size() != *r) throw ValidationError(index_path(f.at(key), j) + ": rows must have equal length");
      }
    }
  } else if (fs.kind == "large_gauge") {
    f.get<std::string>("of");
    const json& w = expect_array(f.raw("windings"), f.at("windings"));
    if (static_cast<int>(w.size()) != n) throw ValidationError(f.at("windings") + ": expected " + std::to_string(n) + " integers");
    for (std::size_t i = 0; i < w.size(); ++i) Fields::convert<int>(w[i], index_path(f.at("windings"), i));
    const int axis = f.get_or<int>("axis", 0);
    if (axis < 0 || axis >= d) throw ValidationError(f.at("axis") + ": out of range");
  }
  f.finish();
}

inline int max_mode_of(const FamilySpec& fs) {
  if (fs.kind == "fourier_random") return fs.params.at("max_mode").get<int>();
  return 0;
}

inline ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig cfg;
  cfg.source = doc;
  Fields top(doc, "config");
  cfg.name = top.get_or<std::string>("name", "unnamed");
  cfg.description = top.get_or<std::string>("description", "");
  {
    Fields c(top.raw("chart"), "config.chart");
    const int dim = c.get<int>("dim");
    const int res = c.get<int>("resolution");
    const auto mode = c.get_or<std::string>("derivative", "spectral");
    c.finish();
    DerivativeMode dm{};
    try {
      dm = derivative_mode_from_string(mode);
    } catch (const Error&) {
      throw ValidationError("config.chart.derivative: expected spectral, fd2 or fd4");
    }
    try {
      cfg.chart = TorusChart(dim, res, dm);
    } catch (const Error& e) {
      throw ValidationError(std::string("config.chart: ") + e.what());
    }
  }
  cfg.rank = top.get<int>("rank");
  if (cfg.rank < 1 || cfg.rank > 4) throw ValidationError("config.rank: must be in [1, 4]");
  cfg.seed = top.get_or<std::uint64_t>("seed", 0);
  if (const json* q = top.optional("quadrature")) {
    Fields f(*q, "config.quadrature");
    const auto rule = f.get_or<std::string>("rule", "collapsed_gauss");
    if (rule == "collapsed_gauss") cfg.rule_kind = SimplexRuleKind::collapsed_gauss;
    else if (rule == "grundmann_moller") cfg.rule_kind = SimplexRuleKind::grundmann_moller;
    else throw ValidationError(f.at("rule") + ": expected collapsed_gauss or grundmann_moller");
    cfg.affine_degree = f.get_or<int>("affine_degree", -1);
    cfg.closed_form_degree = f.get_or<int>("closed_form_degree", 21);
    if (cfg.closed_form_degree < 1 || cfg.closed_form_degree > 80)
      throw ValidationError(f.at("closed_form_degree") + ": must be in [1, 80]");
    if (cfg.affine_degree > 80) throw ValidationError(f.at("affine_degree") + ": must be <= 80");
    f.finish();
  }
  if (const json* c = top.optional("contraction")) {
    parse_contraction(*c, "config.contraction");
    cfg.contraction = *c;
  }

  std::map<std::string, int> family_dims;
  std::map<std::string, std::size_t> family_index;
  if (const json* fams = top.optional("families")) {
    expect_array(*fams, "config.families");
    for (std::size_t i = 0; i < fams->size(); ++i) {
      const std::string where = index_path("config.families", i);
      const json& fj = (*fams)[i];
      if (!fj.is_object()) throw ValidationError(where + ": expected an object");
      FamilySpec fs;
      fs.name = Fields::convert<std::string>(fj.contains("name") ? fj.at("name") : json(), where + ".name");
      fs.kind = Fields::convert<std::string>(fj.contains("kind") ? fj.at("kind") : json(), where + ".kind");
      if (!family_kinds().count(fs.kind)) throw ValidationError(where + ".kind: unknown family constructor \"" + fs.kind + "\"");
      if (family_dims.count(fs.name)) throw ValidationError(where + ".name: duplicate family name \"" + fs.name + "\"");
      fs.params = fj;
      check_family_params(fs, cfg, where);
      family_dims[fs.name] = declared_simplex_dim(fs, family_dims, where);
      family_index[fs.name] = i;
      cfg.families.push_back(std::move(fs));
    }
  }

  std::map<std::string, int> chain_dims;
  if (const json* chains = top.optional("chains")) {
    expect_array(*chains, "config.chains");
    for (std::size_t i = 0; i < chains->size(); ++i) {
      const std::string where = index_path("config.chains", i);
      Fields f((*chains)[i], where);
      ChainSpec cs;
      cs.name = f.get<std::string>("name");
      if (chain_dims.count(cs.name)) throw ValidationError(f.at("name") + ": duplicate chain name \"" + cs.name + "\"");
      const json* terms = f.optional("terms");
      const json* bof = f.optional("boundary_of");
      if ((terms == nullptr) == (bof == nullptr)) throw ValidationError(where + ": give exactly one of terms or boundary_of");
      int r = -1;
      if (terms) {
        expect_array(*terms, f.at("terms"));
        if (terms->empty()) throw ValidationError(f.at("terms") + ": empty chain");
        for (std::size_t k = 0; k < terms->size(); ++k) {
          Fields t((*terms)[k], index_path(f.at("terms"), k));
          const auto fam = t.get<std::string>("family");
          const auto coeff = t.get_or<long long>("coeff", 1);
          t.finish();
          auto it = family_dims.find(fam);
          if (it == family_dims.end()) throw ValidationError(t.at("family") + ": unknown family \"" + fam + "\"");
          if (r >= 0 && it->second != r) throw ValidationError(t.at("family") + ": terms must share the simplex dimension");
          r = it->second;
          cs.terms.emplace_back(coeff, fam);
        }
      } else {
        cs.boundary_of = Fields::convert<std::string>(*bof, f.at("boundary_of"));
        if (auto it = chain_dims.find(cs.boundary_of); it != chain_dims.end()) r = it->second - 1;
        else if (auto jt = family_dims.find(cs.boundary_of); jt != family_dims.end()) r = jt->second - 1;
        else throw ValidationError(f.at("boundary_of") + ": unknown chain or family \"" + cs.boundary_of + "\"");
        if (r < 0) throw ValidationError(f.at("boundary_of") + ": boundary of a 0-dimensional object");
      }
      f.finish();
      chain_dims[cs.name] = r;
      cfg.chains.push_back(std::move(cs));
    }
  }

  if (const json* tasks = top.optional("tasks")) {
    expect_array(*tasks, "config.tasks");
    for (std::size_t i = 0; i < tasks->size(); ++i) {
      const std::string where = index_path("config.tasks", i);
      Fields f((*tasks)[i], where);
      TaskSpec t;
      t.echo = (*tasks)[i];
      t.kind = f.get<std::string>("kind");
      if (!task_kinds().count(t.kind)) throw ValidationError(f.at("kind") + ": unknown task kind \"" + t.kind + "\"");
      t.p = f.get<int>("p");
      if (t.p < 1) throw ValidationError(f.at("p") + ": task " + std::to_string(i) + " requires p >= 1");
      if (t.p > cfg.rank)
        throw ValidationError(f.at("p") + ": task " + std::to_string(i) + " requests p = " + std::to_string(t.p) +
                              " > rank n = " + std::to_string(cfg.rank));
      const bool on_chain = t.kind == "rho" || t.kind == "rho_flat" || t.kind == "coboundary";
      int r = 0;
      if (on_chain) {
        t.chain = f.get<std::string>("chain");
        auto it = chain_dims.find(t.chain);
        if (it == chain_dims.end()) throw ValidationError(f.at("chain") + ": unknown chain \"" + t.chain + "\"");
        r = it->second;
      } else {
        t.family = f.get<std::string>("family");
        auto it = family_dims.find(t.family);
        if (it == family_dims.end()) throw ValidationError(f.at("family") + ": unknown family \"" + t.family + "\"");
        r = it->second;
      }
      const std::string tag = "task " + std::to_string(i) + " (" + t.kind + ")";
      if (t.kind == "kform" && r < 1) throw ValidationError(where + ": " + tag + " requires simplex dimension r >= 1");
      if ((t.kind == "oform" || t.kind == "omega") && !(t.p > r))
        throw ValidationError(where + ": " + tag + " requires p > r");
      if (t.kind == "eta" && r != 1) throw ValidationError(where + ": " + tag + " requires a path (r = 1)");
      if (t.kind == "tp" && r > 2 * t.p) throw ValidationError(where + ": " + tag + " requires r <= 2p");
      if (on_chain && !(t.p > r && r >= 1)) throw ValidationError(where + ": " + tag + " requires p > r >= 1");

      if (const json* cy = f.optional("cycles")) {
        expect_array(*cy, f.at("cycles"));
        for (std::size_t k = 0; k < cy->size(); ++k) {
          const std::string at = index_path(f.at("cycles"), k);
          CycleSpec c = parse_cycle((*cy)[k], at);
          c.validate(cfg.chart);
          if (c.dimension() != 2 * t.p - r - 1)
            throw ValidationError(at + ": cycle dimension " + std::to_string(c.dimension()) + " does not match 2p - r - 1 = " +
                                  std::to_string(2 * t.p - r - 1));
          t.cycles.push_back(std::move(c));
        }
      }
      if (const json* cy = f.optional("cycle")) {
        CycleSpec c = parse_cycle(*cy, f.at("cycle"));
        c.validate(cfg.chart);
        if (c.dimension() != 2 * t.p - r)
          throw ValidationError(f.at("cycle") + ": cycle dimension " + std::to_string(c.dimension()) +
                                " does not match 2p - r = " + std::to_string(2 * t.p - r));
        t.cycle = c;
      }
      if (const json* bp = f.optional("boundary_parts")) {
        expect_array(*bp, f.at("boundary_parts"));
        for (std::size_t k = 0; k < bp->size(); ++k) {
          const std::string at = index_path(f.at("boundary_parts"), k);
          CycleSpec c = parse_cycle((*bp)[k], at);
          c.validate(cfg.chart);
          if (c.dimension() != 2 * t.p - r - 1) throw ValidationError(at + ": boundary part must have dimension 2p - r - 1");
          t.boundary_parts.push_back(std::move(c));
        }
      }
      if (t.kind == "coboundary" && !t.cycle) throw ValidationError(where + ": coboundary task requires a cycle");
      if (t.kind != "coboundary" && (t.cycle || !t.boundary_parts.empty()))
        throw ValidationError(where + ": cycle/boundary_parts only apply to coboundary tasks");
      if ((t.kind == "rho" || t.kind == "rho_flat" || t.kind == "omega") == false && !t.cycles.empty())
        throw ValidationError(f.at("cycles") + ": cycles only apply to omega, rho and rho_flat tasks");

      t.expect_zero = f.get_or<bool>("expect_zero", false);
      if (const json* ex = f.optional("expected")) {
        t.expected = parse_complex_list(*ex, f.at("expected"));
        if (t.expected.size() != t.cycles.size()) throw ValidationError(f.at("expected") + ": need one value per cycle");
        if (t.kind != "rho" && t.kind != "rho_flat" && t.kind != "omega")
          throw ValidationError(f.at("expected") + ": only applies to omega, rho and rho_flat tasks");
      }
      t.reference = f.get_or<std::string>("reference", "");
      if (!t.reference.empty()) {
        if (t.kind == "omega") {
          auto it = family_dims.find(t.reference);
          if (it == family_dims.end()) throw ValidationError(f.at("reference") + ": unknown family \"" + t.reference + "\"");
          if (it->second != r) throw ValidationError(f.at("reference") + ": reference must have the same simplex dimension");
        } else if (t.kind == "rho_flat") {
          auto it = chain_dims.find(t.reference);
          if (it == chain_dims.end()) throw ValidationError(f.at("reference") + ": unknown chain \"" + t.reference + "\"");
          if (it->second != r) throw ValidationError(f.at("reference") + ": reference must have the same dimension");
        } else {
          throw ValidationError(f.at("reference") + ": only applies to omega and rho_flat tasks");
        }
      }
      if (const json* tol = f.optional("tolerance")) {
        t.tolerance = Fields::convert<double>(*tol, f.at("tolerance"));
        if (!(*t.tolerance >= 0.0)) throw ValidationError(f.at("tolerance") + ": must be >= 0");
      }
      if (const json* c = f.optional("contraction")) {
        parse_contraction(*c, f.at("contraction"));
        t.contraction = *c;
      }
      f.get_or<std::string>("label", "");
      f.finish();

      // band-limit check for spectral differentiation of trig-polynomial families
      if (cfg.chart.mode == DerivativeMode::spectral) {
        int k = 0;
        std::vector<std::string> names;
        if (on_chain) {
          std::function<void(const std::string&)> collect = [&](const std::string& chain) {
            for (const auto& cs : cfg.chains)
              if (cs.name == chain) {
                for (const auto& [c, fam] : cs.terms) names.push_back(fam);
                if (!cs.boundary_of.empty()) {
                  if (chain_dims.count(cs.boundary_of)) collect(cs.boundary_of);
                  else names.push_back(cs.boundary_of);
                }
              }
          };
          collect(t.chain);
        } else {
          names.push_back(t.family);
          if (!t.reference.empty()) names.push_back(t.reference);
        }
        for (const auto& nm : names) k = std::max(k, max_mode_of(cfg.families[family_index.at(nm)]));
        if (k > 0 && cfg.chart.resolution < 4 * t.p * k + 2)
          throw ValidationError(where + ": resolution " + std::to_string(cfg.chart.resolution) +
                                " is below the aliasing bound 4pK + 2 = " + std::to_string(4 * t.p * k + 2));
      }
      cfg.tasks.push_back(std::move(t));
    }
  }
  if (const json* tj = top.optional("tolerances")) {
    Fields f(*tj, "config.tolerances");
    Tolerances& t = cfg.tolerances;
    auto rd = [&](const char* key, double& dst) {
      dst = f.get_or<double>(key, dst);
      if (!(dst >= 0.0)) throw ValidationError(f.at(key) + ": must be >= 0");
    };
    rd("kform", t.kform);
    rd("oform", t.oform);
    rd("eta", t.eta);
    rd("eta_agreement", t.eta_agreement);
    rd("rigidity", t.rigidity);
    rd("flat_vanishing", t.flat_vanishing);
    rd("tp_refinement_affine", t.tp_refinement_affine);
    rd("tp_refinement_closed", t.tp_refinement_closed);
    rd("omega_refinement", t.omega_refinement);
    rd("integer_shift", t.integer_shift);
    rd("rho", t.rho);
    rd("rho_flat", t.rho_flat);
    rd("coboundary", t.coboundary);
    if (const json* mo = f.optional("min_order")) t.min_order = Fields::convert<double>(*mo, f.at("min_order"));
    f.finish();
  }
  top.finish();
  return cfg;
}

inline ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

// ---------------------------------------------------------------------------
// construction

inline Rng family_rng(std::uint64_t seed, const std::string& stream) { return Rng(seed ^ fnv1a64(stream)); }

inline std::string rng_stream_description() {
  return std::string(Rng::kAlgorithm) + "; each family (and the bent contraction) draws from its own engine seeded "
         "with seed XOR FNV-1a-64(name) (\"contraction\" for the bend)";
}

struct BuiltFamily {
  SimplexFamily family;
  bool flat_tagged = false;
  double flatness_residual = 0.0;
};

/// Builds one family.  Flat-tagged constructors are gated: fiberwise flatness
/// residual at the default samples must not exceed 1e-8.
inline BuiltFamily build_family(const FamilySpec& fs, const ScenarioConfig& cfg,
                                const std::map<std::string, BuiltFamily>& earlier) {
  const TorusChart& chart = cfg.chart;
  const int n = cfg.rank;
  const int d = chart.dim;
  const json& p = fs.params;
  const std::string where = "family \"" + fs.name + "\"";
  auto one_form = [&](const json& v, const std::string& at) {
    std::vector<SquareMatrix> m;
    for (std::size_t j = 0; j < v.size(); ++j) m.push_back(parse_matrix(v[j], n, index_path(at, j)));
    return Connection::constant(chart, m);
  };
  BuiltFamily out;
  if (fs.kind == "constant_pencil") {
    std::vector<Connection> verts;
    for (std::size_t i = 0; i < p.at("vertices").size(); ++i)
      verts.push_back(one_form(p.at("vertices")[i], where + ".vertices[" + std::to_string(i) + "]"));
    out.family = SimplexFamily::affine(std::move(verts), fs.name);
    out.flat_tagged = p.value("flat", false);
  } else if (fs.kind == "fourier_random") {
    Rng rng = family_rng(cfg.seed, fs.name);
    const int r = p.at("simplex_dim").get<int>();
    const int k = p.at("max_mode").get<int>();
    const double amp = p.at("amplitude").get<double>();
    std::vector<Connection> verts;
    for (int i = 0; i <= r; ++i) verts.push_back(Connection(TrigOneForm::random(d, n, k, amp, rng).sample(chart)));
    out.family = SimplexFamily::affine(std::move(verts), fs.name);
  } else if (fs.kind == "gauge_orbit") {
    Rng rng = family_rng(cfg.seed, fs.name);
    const int r = p.at("simplex_dim").get<int>();
    const int k = p.at("max_mode").get<int>();
    const double amp = p.at("amplitude").get<double>();
    Connection base = p.contains("base") ? one_form(p.at("base"), where + ".base") : Connection::zero(chart, n);
    if (flatness_residual(base) > kFlatnessGate) throw ValidationError(where + ": gauge_orbit base connection is not flat");
    std::vector<TrigField> xi;
    for (int i = 0; i < r; ++i) xi.push_back(TrigField::random(d, n, k, amp, rng));
    out.family = SimplexFamily::closed_form(std::make_shared<GaugeOrbitFamily>(std::move(base), std::move(xi)), fs.name);
    out.flat_tagged = true;
  } else if (fs.kind == "abelian_loop") {
    AbelianFamily::Coefficients c;
    c.offset = parse_complex_list(p.at("offset"), where + ".offset");
    for (std::size_t j = 0; j < p.at("cosine").size(); ++j) {
      c.cosine.push_back(parse_complex_list(p.at("cosine")[j], where + ".cosine"));
      c.sine.push_back(parse_complex_list(p.at("sine")[j], where + ".sine"));
    }
    const auto h = parse_complex_list(p.at("diagonal"), where + ".diagonal");
    const int r = c.cosine.empty() ? 0 : static_cast<int>(c.cosine[0].size());
    out.family = SimplexFamily::closed_form(std::make_shared<AbelianFamily>(chart, h, r, c), fs.name);
    out.flat_tagged = true;
  } else if (fs.kind == "large_gauge") {
    const auto of = p.at("of").get<std::string>();
    const BuiltFamily& parent = earlier.at(of);
    std::vector<int> w = p.at("windings").get<std::vector<int>>();
    const GaugeMap g = GaugeMap::winding(chart, w, p.value("axis", 0));
    out.family = gauge_transform(parent.family, g);
    out.flat_tagged = parent.flat_tagged;
  } else {
    throw ValidationError(where + ": unknown constructor");
  }
  if (out.flat_tagged) {
    out.flatness_residual = fiberwise_flat_residual(out.family, default_flatness_samples(out.family.dim()));
    if (!(out.flatness_residual <= kFlatnessGate))
      throw ValidationError(where + ": flatness gate failed (residual " + std::to_string(out.flatness_residual) + ")");
  }
  return out;
}

struct BuiltScenario {
  std::map<std::string, BuiltFamily> families;
  std::map<std::string, SimplexChain> chains;
};

inline BuiltScenario build_scenario(const ScenarioConfig& cfg) {
  BuiltScenario b;
  for (const auto& fs : cfg.families) b.families.emplace(fs.name, build_family(fs, cfg, b.families));
  for (const auto& cs : cfg.chains) {
    SimplexChain chain(0);
    if (!cs.terms.empty()) {
      chain = SimplexChain(b.families.at(cs.terms.front().second).family.dim());
      for (const auto& [coeff, fam] : cs.terms) chain.add(coeff, b.families.at(fam).family);
    } else if (auto it = b.chains.find(cs.boundary_of); it != b.chains.end()) {
      chain = boundary(it->second);
    } else {
      chain = boundary(SimplexChain::single(b.families.at(cs.boundary_of).family));
    }
    b.chains.emplace(cs.name, std::move(chain));
  }
  return b;
}

inline std::optional<Connection> bend_connection(const json& contraction, const ScenarioConfig& cfg) {
  if (contraction.at("path").get<std::string>() != "bent") return std::nullopt;
  Rng rng = family_rng(cfg.seed, "contraction");
  const int k = contraction.value("max_mode", 1);
  const double amp = contraction.value("amplitude", 0.5);
  return Connection(TrigOneForm::random(cfg.chart.dim, cfg.rank, k, amp, rng).sample(cfg.chart));
}

inline TransgressionOptions transgression_options(const ScenarioConfig& cfg, const json& contraction) {
  TransgressionOptions o;
  o.rule_kind = cfg.rule_kind;
  o.affine_degree = cfg.affine_degree;
  o.closed_form_degree = cfg.closed_form_degree;
  o.path.bend = bend_connection(contraction, cfg);
  return o;
}

// ---------------------------------------------------------------------------
// execution

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool ok() const { return value <= tolerance; }
};

struct TaskResult {
  std::size_t index = 0;
  std::string kind;
  std::string status = "pass";  // pass | fail | error
  std::string message;
  json inputs;
  std::vector<Residual> residuals;
  json values = json::object();
  double wall_time_s = 0.0;

  json to_json() const {
    json res = json::array();
    for (const auto& r : residuals)
      res.push_back(json{{"name", r.name}, {"value", r.value}, {"tolerance", r.tolerance}, {"ok", r.ok()}});
    json j{{"index", index}, {"kind", kind}, {"status", status}, {"inputs", inputs},
           {"residuals", res}, {"values", values}, {"wall_time_s", wall_time_s}};
    if (!message.empty()) j["message"] = message;
    return j;
  }
};

struct RunReport {
  json header;
  std::vector<TaskResult> tasks;
  double wall_time_s = 0.0;

  int exit_status() const {
    for (const auto& t : tasks)
      if (t.status != "pass") return 1;
    return 0;
  }

  json to_json() const {
    json tj = json::array();
    std::size_t passed = 0, failed = 0, errors = 0;
    for (const auto& t : tasks) {
      tj.push_back(t.to_json());
      (t.status == "pass" ? passed : t.status == "fail" ? failed : errors) += 1;
    }
    json j = header;
    j["tasks"] = tj;
    j["summary"] = json{{"tasks", tasks.size()}, {"passed", passed}, {"failed", failed}, {"errors", errors},
                        {"exit_status", exit_status()}};
    j["wall_time_s"] = wall_time_s;
    return j;
  }
};

/// Removes every "wall_time_s" entry (the only nondeterministic fields).
inline json strip_timing(json j) {
  if (j.is_object()) {
    j.erase("wall_time_s");
    for (auto& [k, v] : j.items()) v = strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = strip_timing(v);
  }
  return j;
}

inline json environment_stamp() {
  std::ostringstream cxx;
#if defined(__clang__)
  cxx << "clang " << __clang_major__ << "." << __clang_minor__ << "." << __clang_patchlevel__;
#elif defined(__GNUC__)
  cxx << "gcc " << __GNUC__ << "." << __GNUC_MINOR__ << "." << __GNUC_PATCHLEVEL__;
#else
  cxx << "unknown";
#endif
  return json{{"compiler", cxx.str()},
              {"cxx_standard", static_cast<long>(__cplusplus)},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"fftw", std::string(fftw_version)},
              {"fftw_planner", "FFTW_ESTIMATE"}};
}

inline json report_header(const ScenarioConfig& cfg) {
  return json{{"scenario", cfg.name},
              {"description", cfg.description},
              {"config_hash", "fnv1a64:" + hex64(fnv1a64(cfg.source.dump()))},
              {"generator", json{{"algorithm", Rng::kAlgorithm}, {"seed", cfg.seed}, {"streams", rng_stream_description()}}},
              {"chart", json{{"dim", cfg.chart.dim}, {"resolution", cfg.chart.resolution},
                             {"derivative", to_string(cfg.chart.mode)}}},
              {"rank", cfg.rank},
              {"conventions", json{{"signs", sign_conventions()},
                                   {"normalization", "curvature scaled by -1/(2 pi i); lattice Z"},
                                   {"contraction", cfg.contraction},
                                   {"contraction_path", ContractionPath{bend_connection(cfg.contraction, cfg)}.describe()},
                                   {"axes", "0-based"},
                                   {"quadrature", json{{"simplex_rule", to_string(cfg.rule_kind)},
                                                       {"affine_degree", cfg.affine_degree < 0 ? json("2p+1") : json(cfg.affine_degree)},
                                                       {"closed_form_degree", cfg.closed_form_degree},
                                                       {"prism_s_rule", "Gauss-Legendre, p+1 nodes (2p+1 on the bent path)"}}}}},
              {"tolerances", cfg.tolerances.to_json()},
              {"environment", environment_stamp()}};
}

namespace detail {

inline double max_abs(const std::vector<Complex>& v) {
  double m = 0.0;
  for (auto z : v) m = std::max(m, std::abs(z));
  return m;
}

inline double nearest_integer_deviation(Complex z) {
  return std::hypot(z.real() - std::round(z.real()), z.imag());
}

struct TaskContext {
  const ScenarioConfig& cfg;
  const BuiltScenario& built;
  const TaskSpec& spec;
  TaskResult& result;
  TransgressionOptions opt;

  double tol(double fallback) const { return spec.tolerance.value_or(fallback); }
  void residual(const std::string& name, double value, double fallback) {
    result.residuals.push_back(Residual{name, value, tol(fallback)});
  }
  const SimplexFamily& family(const std::string& name) const { return built.families.at(name).family; }
};

inline void run_kform(TaskContext& c) {
  const SimplexFamily& fam = c.family(c.spec.family);
  const int r = fam.dim();
  c.result.values["simplex_dim"] = r;
  c.result.values["trivial_by_degree"] = 2 * c.spec.p - r + 1 > c.cfg.chart.dim;
  c.residual("identity", verify_kform(fam, c.spec.p, c.opt), c.cfg.tolerances.kform);
}

inline void run_oform(TaskContext& c) {
  const SimplexFamily& fam = c.family(c.spec.family);
  const int r = fam.dim();
  const int p = c.spec.p;
  c.result.values["simplex_dim"] = r;
  c.result.values["trivial_by_degree"] = 2 * p - r > c.cfg.chart.dim;
  if (r == 0) {
    const Connection a = fam.connection_at({1.0});
    const double res = max_norm_difference(exterior_derivative_x(cs_form(a, p, c.opt)), chern_form(a, p));
    c.residual("cs_identity", res, c.cfg.tolerances.oform);
  } else {
    c.residual("identity", verify_oform(fam, p, c.opt), c.cfg.tolerances.oform);
  }
}

inline void run_eta(TaskContext& c) {
  const SimplexFamily& fam = c.family(c.spec.family);
  const int p = c.spec.p;
  const MixedForm eta = eta_form(fam, p, c.opt);
  const MixedForm direct = eta_form_direct(fam, p);
  const MixedForm dc = chern_form(fam.connection_at({0.0, 1.0}), p) - chern_form(fam.connection_at({1.0, 0.0}), p);
  c.result.values["eta_norm"] = eta.max_norm();
  c.result.values["trivial_by_degree"] = 2 * p - 1 > c.cfg.chart.dim;
  c.residual("transgression", max_norm_difference(exterior_derivative_x(eta), dc), c.cfg.tolerances.eta);
  c.residual("route_agreement", max_norm_difference(eta, direct), c.cfg.tolerances.eta_agreement);
  if (p == 1 && fam.is_affine()) {
    const MixedForm tr = kChernNormalization * trace(fam.vertices()[1].form() - fam.vertices()[0].form());
    c.residual("trace_formula", max_norm_difference(eta, tr), c.cfg.tolerances.eta_agreement);
  }
  if (c.spec.expect_zero) c.residual("eta_norm", eta.max_norm(), c.cfg.tolerances.rigidity);
}

inline void run_tp(TaskContext& c) {
  const SimplexFamily& fam = c.family(c.spec.family);
  const int p = c.spec.p;
  const int r = fam.dim();
  if (2 * p - r > c.cfg.chart.dim)
    throw Error("degree 2p - r = " + std::to_string(2 * p - r) + " exceeds the chart dimension");
  const MixedForm tp = transgress_tp(fam, p, c.opt);
  c.result.values["tp_norm"] = tp.max_norm();
  c.residual("refinement_delta", quadrature_refinement_delta(fam, p, c.opt),
             fam.is_affine() ? c.cfg.tolerances.tp_refinement_affine : c.cfg.tolerances.tp_refinement_closed);
  if (c.spec.expect_zero) {
    double density = 0.0;
    for (const auto& t : default_flatness_samples(r)) density = std::max(density, chern_density(fam, p, t).max_norm());
    c.result.values["density_norm"] = density;
    c.residual("tp_norm", tp.max_norm(), c.cfg.tolerances.flat_vanishing);
    c.residual("density_norm", density, c.cfg.tolerances.flat_vanishing);
  }
}

inline void run_omega(TaskContext& c) {
  const SimplexFamily& fam = c.family(c.spec.family);
  const int p = c.spec.p;
  const int r = fam.dim();
  if (2 * p - r - 1 > c.cfg.chart.dim)
    throw Error("degree 2p - r - 1 = " + std::to_string(2 * p - r - 1) + " exceeds the chart dimension");
  const MixedForm om = omega_form(fam, p, c.opt);
  c.result.values["omega_norm"] = om.max_norm();
  std::vector<Complex> integrals;
  json ij = json::array();
  for (const auto& cy : c.spec.cycles) {
    integrals.push_back(integrate_cycle(om, cy));
    ij.push_back(json{{"cycle", cycle_json(cy)}, {"integral", complex_json(integrals.back())}});
  }
  c.result.values["integrals"] = ij;
  c.residual("refinement_delta", omega_refinement_delta(fam, p, c.opt), c.cfg.tolerances.omega_refinement);
  if (!c.spec.expected.empty()) {
    double err = 0.0;
    for (std::size_t i = 0; i < integrals.size(); ++i) err = std::max(err, std::abs(integrals[i] - c.spec.expected[i]));
    c.residual("expected_error", err, c.cfg.tolerances.rho);
  }
  if (!c.spec.reference.empty()) {
    const MixedForm ref = omega_form(c.family(c.spec.reference), p, c.opt);
    double dev = 0.0;
    json sj = json::array();
    for (const auto& cy : c.spec.cycles) {
      const Complex shift = integrate_cycle(om, cy) - integrate_cycle(ref, cy);
      sj.push_back(complex_json(shift));
      dev = std::max(dev, nearest_integer_deviation(shift));
    }
    c.result.values["shifts"] = sj;
    c.residual("integer_shift", dev, c.cfg.tolerances.integer_shift);
  }
}

inline json pairings_json(const std::vector<CyclePairing>& ps) {
  json j = json::array();
  for (const auto& pr : ps) j.push_back(json{{"cycle", cycle_json(pr.cycle)}, {"value", complex_json(pr.value)}});
  return j;
}

inline void check_chain_degree(const TaskContext& c, int r, int extra) {
  if (2 * c.spec.p - r - extra > c.cfg.chart.dim)
    throw Error("pairing degree " + std::to_string(2 * c.spec.p - r - extra) + " exceeds the chart dimension");
}

inline void run_rho(TaskContext& c) {
  const SimplexChain& chain = c.built.chains.at(c.spec.chain);
  check_chain_degree(c, chain.dim(), 1);
  const DifferentialCharacter ch = rho(chain, c.cfg.chart, c.spec.p, c.spec.cycles, c.opt);
  c.result.values["degree"] = ch.degree;
  c.result.values["pairings"] = pairings_json(ch.pairings);
  c.result.values["form_norm"] = ch.form.max_norm();
  c.result.values["flat_class"] = ch.is_flat_class();
  c.result.values["mod_lattice"] = ch.mod_lattice;
  std::vector<Complex> v;
  for (const auto& pr : ch.pairings) v.push_back(pr.value);
  if (c.spec.expect_zero) c.residual("pairings_max", max_abs(v), c.cfg.tolerances.rho);
  if (!c.spec.expected.empty()) {
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - c.spec.expected[i]));
    c.residual("expected_error", err, c.cfg.tolerances.rho);
  }
}

inline json modz_json(const std::vector<ModZPairing>& ps) {
  json j = json::array();
  for (const auto& pr : ps) j.push_back(json{{"cycle", cycle_json(pr.cycle)}, {"value", complex_json(pr.value.representative)}});
  return j;
}

inline void run_rho_flat(TaskContext& c) {
  const SimplexChain& chain = c.built.chains.at(c.spec.chain);
  check_chain_degree(c, chain.dim(), 1);
  const auto vals = rho_flat(chain, c.cfg.chart, c.spec.p, c.spec.cycles, c.opt);
  c.result.values["modz"] = modz_json(vals);
  c.result.values["flatness_residual"] = fiberwise_flat_residual(chain);
  if (!c.spec.expected.empty()) {
    double err = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i)
      err = std::max(err, mod_distance(vals[i].value, mod_reduce(c.spec.expected[i])));
    c.residual("expected_error", err, c.cfg.tolerances.rho_flat);
  }
  if (!c.spec.reference.empty()) {
    const auto ref = rho_flat(c.built.chains.at(c.spec.reference), c.cfg.chart, c.spec.p, c.spec.cycles, c.opt);
    double err = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) err = std::max(err, mod_distance(vals[i].value, ref[i].value));
    c.result.values["reference_modz"] = modz_json(ref);
    c.residual("reference_distance", err, c.cfg.tolerances.rho_flat);
  }
}

inline void run_coboundary(TaskContext& c) {
  const SimplexChain& chain = c.built.chains.at(c.spec.chain);
  check_chain_degree(c, chain.dim(), 0);
  c.residual("identity", coboundary_residual(chain, c.cfg.chart, c.spec.p, *c.spec.cycle, c.spec.boundary_parts, c.opt),
             c.cfg.tolerances.coboundary);
}

}  // namespace detail

inline TaskResult run_task(const ScenarioConfig& cfg, const BuiltScenario& built, std::size_t index) {
  const TaskSpec& spec = cfg.tasks[index];
  TaskResult result;
  result.index = index;
  result.kind = spec.kind;
  result.inputs = spec.echo;
  const auto start = std::chrono::steady_clock::now();
  try {
    detail::TaskContext ctx{cfg, built, spec, result,
                            transgression_options(cfg, spec.contraction.value_or(cfg.contraction))};
    result.values["contraction_path"] = ctx.opt.path.describe();
    if (spec.kind == "kform") detail::run_kform(ctx);
    else if (spec.kind == "oform") detail::run_oform(ctx);
    else if (spec.kind == "eta") detail::run_eta(ctx);
    else if (spec.kind == "tp") detail::run_tp(ctx);
    else if (spec.kind == "omega") detail::run_omega(ctx);
    else if (spec.kind == "rho") detail::run_rho(ctx);
    else if (spec.kind == "rho_flat") detail::run_rho_flat(ctx);
    else if (spec.kind == "coboundary") detail::run_coboundary(ctx);
    for (const auto& r : result.residuals)
      if (!r.ok()) result.status = "fail";
  } catch (const std::exception& e) {
    result.status = "error";
    result.message = e.what();
  }
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

inline RunReport run_scenario(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.header = report_header(cfg);
  const BuiltScenario built = build_scenario(cfg);
  json fams = json::array();
  for (const auto& fs : cfg.families) {
    const BuiltFamily& b = built.families.at(fs.name);
    json fj{{"name", fs.name}, {"kind", fs.kind}, {"simplex_dim", b.family.dim()},
            {"variant", b.family.is_affine() ? "affine" : "closed_form"}, {"flat_tagged", b.flat_tagged}};
    if (b.flat_tagged) fj["flatness_residual"] = b.flatness_residual;
    fams.push_back(fj);
  }
  rep.header["families"] = fams;
  json chains = json::array();
  for (const auto& cs : cfg.chains) {
    const SimplexChain& ch = built.chains.at(cs.name);
    chains.push_back(json{{"name", cs.name}, {"dim", ch.dim()}, {"terms", ch.terms().size()},
                          {"is_cycle", ch.dim() == 0 || is_cycle(ch)}});
  }
  rep.header["chains"] = chains;
  for (std::size_t i = 0; i < cfg.tasks.size(); ++i) rep.tasks.push_back(run_task(cfg, built, i));
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// One line per residual: index,kind,status,residual,value,tolerance.
inline std::string report_csv(const RunReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "index,kind,status,residual,value,tolerance\n";
  for (const auto& t : rep.tasks) {
    if (t.residuals.empty()) os << t.index << "," << t.kind << "," << t.status << ",,,\n";
    for (const auto& r : t.residuals)
      os << t.index << "," << t.kind << "," << t.status << "," << r.name << "," << r.value << "," << r.tolerance << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// convergence

struct ConvergenceRow {
  int resolution = 0;
  double residual = 0.0;
  std::optional<double> order_estimate;  // against the previous row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::optional<double> fitted_order;  // minus the log-log least-squares slope

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "N,residual,order_estimate\n";
    for (const auto& r : rows) {
      os << r.resolution << "," << r.residual << ",";
      if (r.order_estimate) os << *r.order_estimate;
      os << "\n";
    }
    return os.str();
  }

  json to_json() const {
    json rj = json::array();
    for (const auto& r : rows)
      rj.push_back(json{{"N", r.resolution}, {"residual", r.residual},
                        {"order_estimate", r.order_estimate ? json(*r.order_estimate) : json(nullptr)}});
    return json{{"rows", rj}, {"fitted_order", fitted_order ? json(*fitted_order) : json(nullptr)}};
  }
};

/// Least-squares order fit over the points with positive residual.
inline std::optional<double> fit_order(const std::vector<ConvergenceRow>& rows) {
  std::vector<double> x, y;
  for (const auto& r : rows)
    if (r.residual > 0.0 && std::isfinite(r.residual)) {
      x.push_back(std::log(static_cast<double>(r.resolution)));
      y.push_back(std::log(r.residual));
    }
  if (x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return -(n * sxy - sx * sy) / den;
}

/// Reruns every task at each resolution; the residual per row is the largest
/// residual over all tasks.
inline ConvergenceTable convergence_study(const ScenarioConfig& base, const std::vector<int>& resolutions) {
  if (resolutions.size() < 3) throw ValidationError("converge: need at least 3 resolutions");
  if (base.tasks.empty()) throw ValidationError("converge: config has no tasks");
  ConvergenceTable table;
  for (int n : resolutions) {
    json doc = base.source;
    doc["chart"]["resolution"] = n;
    const ScenarioConfig cfg = parse_config(doc);
    const RunReport rep = run_scenario(cfg);
    double worst = 0.0;
    for (const auto& t : rep.tasks) {
      if (t.status == "error") throw Error("converge: task " + std::to_string(t.index) + " failed: " + t.message);
      for (const auto& r : t.residuals) worst = std::max(worst, r.value);
    }
    ConvergenceRow row{n, worst, std::nullopt};
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      if (prev.residual > 0.0 && worst > 0.0)
        row.order_estimate = std::log(prev.residual / worst) / std::log(static_cast<double>(n) / prev.resolution);
    }
    table.rows.push_back(row);
  }
  table.fitted_order = fit_order(table.rows);
  return table;
}

}  // namespace cslab
