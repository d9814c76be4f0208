#include "dnlskam/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dnlskam {

using nlohmann::json;

RunConfig::RunConfig() {
  kam.dnls.mode_cutoff = 8;
  kam.r = 1e-130;
  kam.per_axis = 3;
  kam.max_steps = 4;
  kam.eps_floor = 0;
  kam.globals.c = 1.4e-220;
}

double RunConfig::rho() const {
  return std::pow(kam.r, 1.5) / std::sqrt(static_cast<double>(kam.J.size()));
}

void RunConfig::finalize() {
  kam.globals.n = static_cast<int>(kam.J.size());
  if (!alpha0_given) kam.globals.alpha0 = alpha0_rho_factor * rho();
  validate();
}

void RunConfig::validate() const {
  const auto& g = kam.globals;
  if (kam.J.size() < 2) throw ConfigError("J", "need n >= 2 sites");
  if (std::set<int>(kam.J.begin(), kam.J.end()).size() != kam.J.size())
    throw ConfigError("J", "sites must be distinct");
  for (int j : kam.J)
    if (std::abs(j) > kam.dnls.mode_cutoff) throw ConfigError("J", "sites must satisfy |j| <= J_max");
  if (g.tau < static_cast<double>(kam.J.size()) + 3) throw ConfigError("tau", "need tau >= n + 3");
  if (std::abs(kam.p - kam.q - 1) > 1e-15) throw ConfigError("p", "need p - q = 1");
  if (!(g.s0 > 0 && g.s0 < 1)) throw ConfigError("s0", "width must lie in (0,1)");
  if (!(kam.r > 0 && kam.r < 1)) throw ConfigError("r", "width must lie in (0,1)");
  if (kam.a < 0 || kam.a >= 1) throw ConfigError("a", "must lie in [0,1)");
  if (!(g.beta > 0)) throw ConfigError("beta", "must be positive");
  if (!(g.alpha0 > 0)) throw ConfigError("alpha0", "must be positive");
  if (!(g.c > 0)) throw ConfigError("c", "must be positive");
  if (g.gamma0 < 0 || g.gamma0 > 0.25) throw ConfigError("gamma0", "must lie in [0, 1/4]");
  if (kam.degree_max < 2) throw ConfigError("degree_max", "must be at least 2");
  if (kam.fourier_max < 1) throw ConfigError("fourier_max", "must be positive");
  if (kam.per_axis < 2) throw ConfigError("per_axis", "need at least 2 points per axis");
  if (kam.max_steps < 0) throw ConfigError("max_steps", "must be nonnegative");
  if (kam.ranges.k_max < 1) throw ConfigError("k_max", "empty k-range");
  if (kam.ranges.mode_max < 0) throw ConfigError("mode_max", "must be nonnegative");
  if (kam.dnls.N < 0 || kam.dnls.N > kam.dnls.mode_cutoff) throw ConfigError("N", "must lie in [0, J_max]");
  if (kam.dnls.degree_max < 4) throw ConfigError("birkhoff_degree", "must be at least 4");
  for (auto& q : kam.dnls.quintic)
    if (q.u_pow < 0 || q.ubar_pow < 0 || q.u_pow + q.ubar_pow < 5)
      throw ConfigError("quintic", "entries need u + ubar >= 5 with nonnegative powers");
  for (double a : alpha_sweep)
    if (!(a > 0)) throw ConfigError("alpha_sweep", "entries must be positive");
  if (appendix_samples < 1) throw ConfigError("appendix_samples", "must be positive");
  if (appendix_kmax < 1) throw ConfigError("appendix_kmax", "must be positive");
  try {
    kam.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config", e.what());
  }
}

namespace {

template <class T>
T get(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "wrong type");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config", "top level must be an object");
  if (!doc.contains("schema_version")) throw ConfigError("schema_version", "missing");
  if (get<int>(doc["schema_version"], "schema_version") != RunConfig::kSchemaVersion)
    throw ConfigError("schema_version", "unsupported version");

  RunConfig c;
  auto& k = c.kam;
  auto& g = k.globals;
  for (auto& [key, v] : doc.items()) {
    if (key == "schema_version") continue;
    else if (key == "J") k.J = get<std::vector<int>>(v, key);
    else if (key == "J_max") k.dnls.mode_cutoff = get<int>(v, key);
    else if (key == "mu") k.dnls.mu = get<double>(v, key);
    else if (key == "N") k.dnls.N = get<int>(v, key);
    else if (key == "birkhoff_degree") k.dnls.degree_max = get<int>(v, key);
    else if (key == "quintic") {
      if (!v.is_array()) throw ConfigError(key, "must be an array");
      for (auto& e : v) {
        if (!e.is_object()) throw ConfigError(key, "entries must be objects");
        QuinticEntry q;
        for (auto& [qk, qv] : e.items()) {
          if (qk == "kappa") q.kappa = get<int>(qv, "quintic.kappa");
          else if (qk == "u") q.u_pow = get<int>(qv, "quintic.u");
          else if (qk == "ubar") q.ubar_pow = get<int>(qv, "quintic.ubar");
          else if (qk == "re") q.c.real(get<double>(qv, "quintic.re"));
          else if (qk == "im") q.c.imag(get<double>(qv, "quintic.im"));
          else throw ConfigError("quintic." + qk, "unknown key");
        }
        k.dnls.quintic.push_back(q);
      }
    }
    else if (key == "degree_max") k.degree_max = get<int>(v, key);
    else if (key == "fourier_max") k.fourier_max = get<int>(v, key);
    else if (key == "r") k.r = get<double>(v, key);
    else if (key == "per_axis") k.per_axis = get<int>(v, key);
    else if (key == "p") k.p = get<double>(v, key);
    else if (key == "q") k.q = get<double>(v, key);
    else if (key == "a") k.a = get<double>(v, key);
    else if (key == "s0") g.s0 = get<double>(v, key);
    else if (key == "alpha0") {
      g.alpha0 = get<double>(v, key);
      c.alpha0_given = true;
    }
    else if (key == "alpha0_rho_factor") c.alpha0_rho_factor = get<double>(v, key);
    else if (key == "beta") g.beta = get<double>(v, key);
    else if (key == "tau") g.tau = get<double>(v, key);
    else if (key == "gamma0") g.gamma0 = get<double>(v, key);
    else if (key == "c") g.c = get<double>(v, key);
    else if (key == "C_J") g.C_J = get<int>(v, key);
    else if (key == "m0") g.m0 = get<double>(v, key);
    else if (key == "E0") g.E0 = get<double>(v, key);
    else if (key == "M1") g.M10 = get<double>(v, key);
    else if (key == "M2") g.M20 = get<double>(v, key);
    else if (key == "M3") g.M30 = get<double>(v, key);
    else if (key == "max_steps") k.max_steps = get<int>(v, key);
    else if (key == "eps_floor") k.eps_floor = get<double>(v, key);
    else if (key == "lie_order") k.lie_order = get<int>(v, key);
    else if (key == "k_max") k.ranges.k_max = get<int>(v, key);
    else if (key == "mode_max") k.ranges.mode_max = get<int>(v, key);
    else if (key == "enforce_contraction") k.enforce_contraction = get<bool>(v, key);
    else if (key == "halt_on_horizon") k.halt_on_horizon = get<bool>(v, key);
    else if (key == "seed") k.seed = get<uint64_t>(v, key);
    else if (key == "bypass_admissibility") c.bypass_admissibility = get<bool>(v, key);
    else if (key == "alpha_sweep") c.alpha_sweep = get<std::vector<double>>(v, key);
    else if (key == "measure_Pi") c.measure_Pi = get<int>(v, key);
    else if (key == "appendix_samples") c.appendix_samples = get<int>(v, key);
    else if (key == "appendix_kmax") c.appendix_kmax = get<int>(v, key);
    else throw ConfigError(key, "unknown key");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  const auto& k = c.kam;
  const auto& g = k.globals;
  json q = json::array();
  for (auto& e : k.dnls.quintic)
    q.push_back({{"kappa", e.kappa}, {"u", e.u_pow}, {"ubar", e.ubar_pow},
                 {"re", static_cast<double>(e.c.real())}, {"im", static_cast<double>(e.c.imag())}});
  json d = {{"schema_version", RunConfig::kSchemaVersion},
            {"J", k.J},
            {"J_max", k.dnls.mode_cutoff},
            {"mu", k.dnls.mu},
            {"N", k.dnls.N},
            {"birkhoff_degree", k.dnls.degree_max},
            {"quintic", q},
            {"degree_max", k.degree_max},
            {"fourier_max", k.fourier_max},
            {"r", k.r},
            {"per_axis", k.per_axis},
            {"p", k.p},
            {"q", k.q},
            {"a", k.a},
            {"s0", g.s0},
            {"alpha0", g.alpha0},
            {"beta", g.beta},
            {"tau", g.tau},
            {"gamma0", g.gamma0},
            {"c", g.c},
            {"C_J", g.C_J},
            {"m0", g.m0},
            {"E0", g.E0},
            {"M1", g.M10},
            {"M2", g.M20},
            {"M3", g.M30},
            {"max_steps", k.max_steps},
            {"eps_floor", static_cast<double>(k.eps_floor)},
            {"lie_order", k.lie_order},
            {"k_max", k.ranges.k_max},
            {"mode_max", k.ranges.mode_max},
            {"enforce_contraction", k.enforce_contraction},
            {"halt_on_horizon", k.halt_on_horizon},
            {"seed", k.seed},
            {"bypass_admissibility", c.bypass_admissibility},
            {"alpha_sweep", c.alpha_sweep},
            {"measure_Pi", c.measure_Pi},
            {"appendix_samples", c.appendix_samples},
            {"appendix_kmax", c.appendix_kmax}};
  return d.dump(2);
}

}  // namespace dnlskam
