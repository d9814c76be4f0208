#include "dnlskam/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dnlskam/appendix.hpp"
#include "json.hpp"

namespace dnlskam {

using nlohmann::json;

namespace {

// long doubles outside the double range are kept as decimal strings
json ld(real v) {
  if (v == 0 || !std::isfinite(v)) return static_cast<double>(v);
  if (std::fabs(v) >= 2.2250738585072014e-308L && std::fabs(v) <= 1.7976931348623157e308L)
    return static_cast<double>(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return std::string(buf);
}

std::string doc(const json& j) { return j.dump(2) + "\n"; }

EnumRanges ranges_of(const RunConfig& c) {
  EnumRanges r = c.kam.ranges;
  if (r.mode_max <= 0) r.mode_max = c.kam.dnls.mode_cutoff;
  return r;
}

FrequencyData freq_data(const RunConfig& c) {
  const auto& k = c.kam;
  auto sites = std::make_shared<const SiteSet>(k.J, ranges_of(c).mode_max);
  return frequency_maps(sites, default_parameter_box(k.J, k.r, k.per_axis), c.bypass_admissibility);
}

std::string series_text(const FormalSeries& s) {
  std::ostringstream os;
  write_text(os, s);
  return os.str();
}

json piece(const FormalSeries& H) {
  NormWeights w;
  return {{"terms", H.size()},
          {"max_abs_coeff", ld(max_abs_coeff(H))},
          {"majorant", ld(majorant_norm_hamiltonian(H, w))}};
}

}  // namespace

CommandOutput cmd_admissible(const RunConfig& c) {
  CommandOutput o;
  Verdict v = admissible(c.kam.J);
  json out = {{"command", "admissible"},
              {"J", c.kam.J},
              {"n", c.kam.J.size()},
              {"verdict", to_string(v)},
              {"admissible", v == Verdict::admissible}};
  if (v == Verdict::violates_divisibility) out["reason"] = "divisibility";
  if (v == Verdict::violates_sign_condition) out["reason"] = "sign";
  o.report = doc(out);
  o.exit_code = v == Verdict::admissible ? kExitOk : kExitNegative;
  return o;
}

CommandOutput cmd_assumptions(const RunConfig& c) {
  CommandOutput o;
  auto fd = freq_data(c);
  auto r = ranges_of(c);
  auto au = audit_assumptions(fd, r);
  json wit = json::array();
  for (auto& w : au.witnesses)
    wit.push_back({{"assumption", w.assumption}, {"detail", w.detail}, {"value", w.value}, {"bound", w.bound}});
  json out = {{"command", "assumptions"},
              {"J", c.kam.J},
              {"k_max", r.k_max},
              {"mode_max", r.mode_max},
              {"grid_points", fd.grid.size()},
              {"m", au.m},
              {"M1", au.M1},
              {"M2", au.M2},
              {"M3", au.M3},
              {"m_reference", au.m_paper},
              {"M1_reference", au.M1_paper},
              {"M2_reference", au.M2_paper},
              {"M3_reference", au.M3_paper},
              {"specs_checked", au.specs_checked},
              {"dichotomy_failures", au.lemma32_none},
              {"ok", au.ok()},
              {"witnesses", wit}};
  o.report = doc(out);
  o.exit_code = au.ok() ? kExitOk : kExitNegative;
  return o;
}

CommandOutput cmd_normal_form(const RunConfig& c, bool files) {
  CommandOutput o;
  auto d = c.kam.dnls_resolved();
  auto split = build_dnls_hamiltonian(d);
  auto nf = partial_birkhoff(split, {d.degree_max, 0, d.mode_cutoff});
  json out = {{"command", "normal-form"},
              {"J_max", d.mode_cutoff},
              {"N", d.N},
              {"degree_max", d.degree_max},
              {"delta1_residual", nf.delta1_residual},
              {"order4_mismatch", nf.order4_mismatch},
              {"zero_divisors", nf.zero_divisors.size()},
              {"lie_orders", nf.lie_orders},
              {"identity_transform", nf.F4.empty()},
              {"split",
               {{"Lambda", piece(split.Lambda)},
                {"B", piece(split.B)},
                {"Q1", piece(split.Q1)},
                {"Q2", piece(split.Q2)},
                {"K", piece(split.K)}}},
              {"F4", piece(nf.F4)},
              {"normal4", piece(nf.normal4)},
              {"R", piece(nf.R)}};
  o.report = doc(out);
  if (files) {
    std::pair<const char*, const FormalSeries*> dumps[] = {
        {"Lambda", &split.Lambda}, {"B", &split.B}, {"Q1", &split.Q1},     {"Q2", &split.Q2},
        {"K", &split.K},           {"F4", &nf.F4},  {"H_nf", &nf.H_nf}, {"R", &nf.R}};
    for (auto& [name, s] : dumps) o.files.emplace_back(std::string(name) + ".txt", series_text(*s));
    o.files.emplace_back("normal_form.json", o.report);
  }
  return o;
}

CommandOutput cmd_kam(const RunConfig& c, bool files, bool require_gate) {
  CommandOutput o;
  std::ostringstream lines;
  RunResult res;
  try {
    res = run(c.kam, &lines);
  } catch (const ContractionFailure& e) {
    o.warnings.push_back(std::string("contraction failure: ") + e.what());
    res.reports = e.reports;
    res.status = "contraction_failure";
    o.exit_code = kExitNegative;
  } catch (const AllExcluded& e) {
    o.warnings.push_back(e.what());
    res.status = "all_excluded";
    o.exit_code = kExitNegative;
  }
  auto v = verify_contraction(res.reports, c.kam.globals);
  if (res.reports.empty()) v.ok = o.exit_code == kExitOk;
  if (o.exit_code == kExitOk && c.kam.enforce_contraction && !v.ok) o.exit_code = kExitNegative;
  if (!res.gate_ok && !res.reports.empty()) {
    o.warnings.push_back("eps0 is above the smallness gate (alpha0 gamma)^(1+beta); the gate is advisory");
    if (require_gate && o.exit_code == kExitOk) o.exit_code = kExitNegative;
  }

  json ratios = json::array();
  for (auto& r : res.reports) ratios.push_back(r.contraction_ratio());
  size_t active = 0;
  for (char m : res.torus.mask) active += m != 0;
  json out = {{"command", "kam"},
              {"status", res.status},
              {"steps", res.reports.size()},
              {"eps0", ld(res.eps0)},
              {"gate_ok", res.gate_ok},
              {"gate_rhs", ld(res.gate_rhs)},
              {"alpha0", c.kam.globals.alpha0},
              {"c", c.kam.globals.c},
              {"contraction_ratios", ratios},
              {"contraction_verified", v.ok},
              {"c_min", v.c_min},
              {"diagnostics", v.diagnostics},
              {"active_points", active},
              {"grid_points", res.torus.mask.size()}};
  o.report = doc(out);
  o.stream = lines.str();
  if (!files) return o;

  o.files.emplace_back("kam.jsonl", o.stream);
  o.files.emplace_back("kam_summary.json", o.report);
  if (res.torus.mask.empty()) return o;
  json mask = json::array();
  for (char m : res.torus.mask) mask.push_back(m != 0);
  o.files.emplace_back("torus.json", doc({{"mask", mask}, {"frequencies", res.torus.frequencies}}));
  SiteSet S(c.kam.J, c.kam.dnls.mode_cutoff);
  std::vector<std::string> names;
  for (int b = 0; b < S.n(); ++b) names.push_back("exp_ix_" + std::to_string(b));
  for (int b = 0; b < S.n(); ++b) names.push_back("y_" + std::to_string(b));
  for (int m = 0; m < S.mode_count(); ++m) names.push_back("z_" + std::to_string(S.mode(m)));
  for (int m = 0; m < S.mode_count(); ++m) names.push_back("zbar_" + std::to_string(S.mode(m)));
  size_t e = 0;
  for (size_t p = 0; p < res.torus.mask.size(); ++p) {
    if (!res.torus.mask[p]) continue;
    std::ostringstream ef;
    const auto& emb = res.torus.embedding[e++];
    for (size_t t = 0; t < emb.size(); ++t) {
      ef << "# " << (t < names.size() ? names[t] : std::to_string(t)) << "\n";
      write_text(ef, emb[t]);
    }
    o.files.emplace_back("embedding_p" + std::to_string(p) + ".txt", ef.str());
  }
  return o;
}

CommandOutput cmd_measure(const RunConfig& c, bool files) {
  if (c.alpha_sweep.empty()) throw ConfigError("alpha_sweep", "empty sweep");
  CommandOutput o;
  auto fd = freq_data(c);
  auto ranges = ranges_of(c);
  const int Pi = c.measure_Pi > 0 ? c.measure_Pi : c.kam.dnls.mode_cutoff;
  const double tau = c.kam.globals.tau;
  std::ostringstream table;
  table << "alpha,alpha2,theta1_grid,theta2_grid,theta1_analytic,theta2_analytic,zones1,zones2,identically_zero\n";
  json rows = json::array();
  std::vector<double> totals;
  bool zero_divisor = false;
  for (size_t t = 0; t < c.alpha_sweep.size(); ++t) {
    const double a = c.alpha_sweep[t], a2 = a / Pi;
    std::vector<ResonanceZone> zones;
    auto st = exclude_step(fd, ranges, 0, a, a2, tau, Pi, nullptr, true, &zones);
    zero_divisor = zero_divisor || st.identically_zero;
    double cv = fd.grid.cell_volume(), g1 = 0, g2 = 0;
    for (size_t p = 0; p < fd.grid.size(); ++p) {
      g1 += st.mask1[p] ? cv : 0.0;
      g2 += st.mask2[p] ? cv : 0.0;
    }
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%zu,%d\n", a, a2, g1, g2,
                  st.analytic1, st.analytic2, st.zones1, st.zones2, st.identically_zero ? 1 : 0);
    table << buf;
    totals.push_back(st.analytic1 + st.analytic2);
    rows.push_back({{"alpha", a},
                    {"theta1_grid", g1},
                    {"theta2_grid", g2},
                    {"theta1_analytic", st.analytic1},
                    {"theta2_analytic", st.analytic2},
                    {"identically_zero", st.identically_zero}});
    if (files) {
      std::ostringstream z;
      write_zone_csv(z, zones);
      o.files.emplace_back("zones_" + std::to_string(t) + ".csv", z.str());
    }
  }
  // ratio of totals and log(ratio)/log(alpha ratio); 2 and 1 for a doubling sweep
  json ratios = json::array(), exponents = json::array();
  for (size_t t = 1; t < totals.size(); ++t) {
    if (!(totals[t - 1] > 0)) {
      ratios.push_back(nullptr);
      exponents.push_back(nullptr);
      continue;
    }
    double q = totals[t] / totals[t - 1];
    ratios.push_back(q);
    exponents.push_back(std::log(q) / std::log(c.alpha_sweep[t] / c.alpha_sweep[t - 1]));
  }
  // drift family over steps at alpha_2 = alpha 2^-nu / Pi
  json theta2 = json::array();
  for (int nu = 0; nu < std::max(1, c.kam.max_steps); ++nu) {
    auto st = exclude_step(fd, ranges, nu, 0.0, c.alpha_sweep[0] * std::pow(2.0, -nu) / Pi, tau, Pi,
                           nullptr, true);
    theta2.push_back(st.analytic2);
  }
  json out = {{"command", "measure"},
              {"J", c.kam.J},
              {"rho", c.rho()},
              {"box_volume", fd.grid.box_volume()},
              {"Pi", Pi},
              {"tau", tau},
              {"sweep", rows},
              {"ratios", ratios},
              {"exponents", exponents},
              {"theta2_by_step", theta2},
              {"full_exclusion", zero_divisor}};
  o.report = doc(out);
  if (files) {
    o.files.emplace_back("measure.csv", table.str());
    o.files.emplace_back("measure.json", o.report);
  }
  return o;
}

CommandOutput cmd_verify_bounds(const RunConfig& c) {
  CommandOutput o;
  auto rep = verify_appendix_bounds(c.appendix_samples, c.kam.seed, c.appendix_kmax);
  json t = json::array();
  for (auto& x : rep.tallies)
    t.push_back({{"lemma", x.lemma},
                 {"statement", x.statement},
                 {"passed", x.passed},
                 {"failed", x.failed},
                 {"worst_ratio", x.worst_ratio},
                 {"diagnostic", x.diagnostic},
                 {"witnesses", x.witnesses}});
  json out = {{"command", "verify-bounds"},
              {"samples", c.appendix_samples},
              {"kmax", c.appendix_kmax},
              {"seed", c.kam.seed},
              {"all_passed", rep.all_passed()},
              {"tallies", t}};
  o.report = doc(out);
  o.exit_code = rep.all_passed() ? kExitOk : kExitNegative;
  return o;
}

}  // namespace dnlskam
