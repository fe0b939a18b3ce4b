#include "bgkimex/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bgkimex/errors.hpp"
#include "json.hpp"

namespace bgkimex {

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::TypeA: return "A";
    case SchemeKind::TypeARS: return "ARS";
    case SchemeKind::TypeCK: return "CK";
  }
  return "?";
}

SchemeKind scheme_kind_from_string(const std::string& s) {
  if (s == "A" || s == "a") return SchemeKind::TypeA;
  if (s == "ARS" || s == "ars") return SchemeKind::TypeARS;
  if (s == "CK" || s == "ck") return SchemeKind::TypeCK;
  throw TableauError("unknown scheme kind '" + s + "' (expected A, ARS or CK)");
}

std::vector<double> TableauPair::c_explicit() const {
  std::vector<double> c(nu, 0.0);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j < i; ++j) c[i] += ae(i, j);
  return c;
}

std::vector<double> TableauPair::c_implicit() const {
  std::vector<double> c(nu, 0.0);
  for (int i = 0; i < nu; ++i)
    for (int j = 0; j <= i; ++j) c[i] += ai(i, j);
  return c;
}

void TableauPair::validate() const {
  if (nu < 1) throw TableauError("tableau needs at least one stage");
  const auto n = static_cast<std::size_t>(nu);
  if (a_explicit.size() != n * n || a_implicit.size() != n * n)
    throw TableauError("tableau matrices must be nu x nu");
  if (w_explicit.size() != n || w_implicit.size() != n)
    throw TableauError("weight vectors must have length nu");
  for (double v : a_explicit)
    if (!std::isfinite(v)) throw TableauError("non-finite explicit coefficient");
  for (double v : a_implicit)
    if (!std::isfinite(v)) throw TableauError("non-finite implicit coefficient");
  if (!std::isfinite(alpha) || alpha < 0.0) throw TableauError("alpha must be >= 0");

  for (int i = 0; i < nu; ++i) {
    for (int j = i; j < nu; ++j)
      if (ae(i, j) != 0.0)
        throw TableauError("explicit tableau must be strictly lower triangular");
    for (int j = i + 1; j < nu; ++j)
      if (ai(i, j) != 0.0) throw TableauError("implicit tableau must be lower triangular");
  }

  if (gsa) {
    for (int j = 0; j < nu; ++j) {
      if (w_explicit[j] != ae(nu - 1, j) || w_implicit[j] != ai(nu - 1, j))
        throw TableauError("GSA tableau requires w equal to the last stage row");
    }
  }

  if (kind == SchemeKind::TypeA) {
    for (int i = 0; i < nu; ++i)
      if (ai(i, i) == 0.0) throw TableauError("type A tableau requires nonzero a_ii");
  } else if (kind == SchemeKind::TypeARS) {
    for (int j = 0; j < nu; ++j)
      if (ai(0, j) != 0.0) throw TableauError("type ARS tableau requires zero first implicit row");
    for (int i = 0; i < nu; ++i)
      if (ai(i, 0) != 0.0)
        throw TableauError("type ARS tableau requires zero first implicit column");
    if (w_implicit[0] != 0.0) throw TableauError("type ARS tableau requires w_1 = 0");
    for (int i = 1; i < nu; ++i)
      if (ai(i, i) == 0.0) throw TableauError("type ARS tableau requires nonzero a_ii for i >= 2");
  }
}

namespace {

void push(std::vector<OrderCondition>& out, std::string name, int order, double value,
          double target) {
  out.push_back({std::move(name), order, value, target, value - target});
}

}  // namespace

std::vector<OrderCondition> check_order_conditions(const TableauPair& t, int order,
                                                   CorrectionVariant variant) {
  t.validate();
  if (order < 1 || order > 3) throw TableauError("order must be 1, 2 or 3");

  const auto ct = t.c_explicit();
  const auto c = t.c_implicit();
  const auto& wt = t.w_explicit;
  const auto& w = t.w_implicit;
  const int nu = t.nu;

  std::vector<OrderCondition> out;

  double swt = 0.0, sw = 0.0;
  for (int i = 0; i < nu; ++i) {
    swt += wt[i];
    sw += w[i];
  }
  push(out, "sum(wt)", 1, swt, 1.0);
  push(out, "sum(w)", 1, sw, 1.0);
  if (order < 2) return out;

  double wt_ct = 0.0, wt_c = 0.0, w_ct = 0.0, w_c = 0.0;
  for (int i = 0; i < nu; ++i) {
    wt_ct += wt[i] * ct[i];
    wt_c += wt[i] * c[i];
    w_ct += w[i] * ct[i];
    w_c += w[i] * c[i];
  }
  push(out, "sum(wt.ct)", 2, wt_ct, 0.5);
  push(out, "sum(wt.c)", 2, wt_c, 0.5);
  push(out, "sum(w.ct)", 2, w_ct, 0.5);
  push(out, "sum(w.c)-alpha", 2, w_c - t.alpha, 0.5);
  if (order < 3) return out;

  // Third-order conditions. The alpha shifts differ between the f* = f^n
  // variant and the f* = f^{n+1} (or f-tilde) variant.
  double wt_At_ct = 0.0, wt_At_c = 0.0, wt_A_ct = 0.0, wt_A_c = 0.0;
  double w_At_ct = 0.0, w_At_c = 0.0, w_A_ct = 0.0, w_A_c = 0.0;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < i; ++j) {
      wt_At_ct += wt[i] * t.ae(i, j) * ct[j];
      wt_At_c += wt[i] * t.ae(i, j) * c[j];
      w_At_ct += w[i] * t.ae(i, j) * ct[j];
      w_At_c += w[i] * t.ae(i, j) * c[j];
    }
    for (int j = 0; j <= i; ++j) {
      wt_A_ct += wt[i] * t.ai(i, j) * ct[j];
      wt_A_c += wt[i] * t.ai(i, j) * c[j];
      w_A_ct += w[i] * t.ai(i, j) * ct[j];
      w_A_c += w[i] * t.ai(i, j) * c[j];
    }
  }
  const double sixth = 1.0 / 6.0;
  push(out, "sum(wt.At.ct)", 3, wt_At_ct, sixth);
  push(out, "sum(wt.At.c)", 3, wt_At_c, sixth);
  push(out, "sum(wt.A.ct)", 3, wt_A_ct, sixth);
  push(out, "sum(wt.A.c)", 3, wt_A_c, sixth);
  push(out, "sum(w.At.ct)", 3, w_At_ct, sixth);
  push(out, "sum(w.At.c)", 3, w_At_c, sixth);
  push(out, "sum(w.A.ct)-alpha", 3, w_A_ct - t.alpha, sixth);
  push(out, "sum(w.A.c)-alpha", 3, w_A_c - t.alpha, sixth);

  double wt_ctct = 0.0, wt_ctc = 0.0, wt_cc = 0.0;
  double w_ctct = 0.0, w_ctc = 0.0, w_cc = 0.0;
  for (int i = 0; i < nu; ++i) {
    wt_ctct += wt[i] * ct[i] * ct[i];
    wt_ctc += wt[i] * ct[i] * c[i];
    wt_cc += wt[i] * c[i] * c[i];
    w_ctct += w[i] * ct[i] * ct[i];
    w_ctc += w[i] * ct[i] * c[i];
    w_cc += w[i] * c[i] * c[i];
  }
  const double third = 1.0 / 3.0;
  push(out, "sum(wt.ct.ct)", 3, wt_ctct, third);
  push(out, "sum(wt.ct.c)", 3, wt_ctc, third);
  push(out, "sum(wt.c.c)", 3, wt_cc, third);
  push(out, "sum(w.ct.ct)", 3, w_ctct, third);
  if (variant == CorrectionVariant::FStarFn) {
    push(out, "sum(w.ct.c)", 3, w_ctc, third);
    push(out, "sum(w.c.c)", 3, w_cc, third);
  } else {
    push(out, "sum(w.ct.c)-alpha", 3, w_ctc - t.alpha, third);
    push(out, "sum(w.c.c)-2alpha", 3, w_cc - 2.0 * t.alpha, third);
  }
  return out;
}

double max_abs_residual(const std::vector<OrderCondition>& conditions) {
  double m = 0.0;
  for (const auto& c : conditions) m = std::max(m, std::abs(c.residual));
  return m;
}

namespace {

std::string coeff_label(const char* base, int i, int j) {
  return std::string(base) + "_" + std::to_string(i) + std::to_string(j);
}

void add_coeff(PositivityReport& rep, const char* base, int i, int j, double value) {
  const bool ok = value >= -kPositivityTol;
  rep.coefficients.push_back({coeff_label(base, i, j), i, j, value, ok});
  if (!ok) {
    std::ostringstream os;
    os << coeff_label(base, i, j) << " = " << value << " < 0";
    rep.violations.push_back(os.str());
  }
}

void add_ratio(PositivityReport& rep, int i, int j, double num, double den) {
  PositivityRatio r{i, j, num, den, std::nullopt};
  if (std::abs(den) > 1e-14) r.ratio = num / den;
  rep.ratios.push_back(r);
}

void finish_report(PositivityReport& rep) {
  rep.feasible = rep.violations.empty();
  std::optional<double> m;
  for (const auto& r : rep.ratios)
    if (r.ratio && (!m || *r.ratio < *m)) m = *r.ratio;
  rep.c_sch = m;
}

}  // namespace

ShuOsherCoefficients shu_osher_coefficients(const TableauPair& t) {
  t.validate();
  if (t.kind == SchemeKind::TypeCK)
    throw TableauError("Shu-Osher coefficients are defined for type A and type ARS tableaus");
  const bool ars = t.kind == SchemeKind::TypeARS;
  const int nu = t.nu;
  const int j0 = ars ? 1 : 0;  // first column carrying an implicit term

  // Elimination of the implicit terms of earlier stages (b, b-tilde
  // recursions); 0-based indices. For ARS stage 1 has no implicit part and
  // b-tilde additionally covers T(f^n).
  std::vector<double> b(nu * nu, 0.0), bt(nu * nu, 0.0);
  for (int i = j0; i < nu; ++i) {
    const double inv = 1.0 / t.ai(i, i);
    b[i * nu + i] = inv;
    for (int j = j0; j < i; ++j) {
      double s = 0.0;
      for (int l = j; l < i; ++l) s += t.ai(i, l) * b[l * nu + j];
      b[i * nu + j] = -inv * s;
    }
    for (int j = 0; j < i; ++j) {
      double st = 0.0;
      for (int l = j + 1; l < i; ++l) st += t.ai(i, l) * bt[l * nu + j];
      bt[i * nu + j] = inv * (-t.ae(i, j) - st);
    }
  }

  ShuOsherCoefficients so;
  so.c0.assign(nu, 1.0);
  so.ct0.assign(nu, 0.0);
  so.c.assign(nu * nu, 0.0);
  so.ct.assign(nu * nu, 0.0);
  for (int i = 0; i < nu; ++i) {
    for (int j = j0; j < i; ++j) {
      double cij = 0.0;
      for (int l = j; l < i; ++l) cij += t.ai(i, l) * b[l * nu + j];
      double ctij = t.ae(i, j);
      for (int l = j + 1; l < i; ++l) ctij += t.ai(i, l) * bt[l * nu + j];
      so.c[i * nu + j] = cij;
      so.ct[i * nu + j] = ctij;
      so.c0[i] -= cij;
    }
    if (ars) {
      double ct0 = t.ae(i, 0);
      for (int j = 1; j < i; ++j) ct0 += t.ai(i, j) * bt[j * nu + 0];
      so.ct0[i] = ct0;
    }
  }
  return so;
}

namespace {

PositivityReport positivity_report_from(const TableauPair& t) {
  if (!t.gsa) throw TableauError("positivity analysis requires a GSA tableau");
  const auto so = shu_osher_coefficients(t);
  const bool ars = t.kind == SchemeKind::TypeARS;
  const int nu = t.nu;
  const int i0 = ars ? 1 : 0;
  const int j0 = ars ? 1 : 0;

  PositivityReport rep;
  rep.kind = t.kind;
  for (int i = i0; i < nu; ++i) {
    if (!(t.ai(i, i) > 0.0)) {
      std::ostringstream os;
      os << "a_" << (i + 1) << (i + 1) << " = " << t.ai(i, i) << " <= 0";
      rep.violations.push_back(os.str());
    }
    double row_sum = 0.0;
    for (int j = j0; j < i; ++j) {
      const double cij = so.c[i * nu + j];
      const double ctij = so.ct[i * nu + j];
      row_sum += cij;
      add_coeff(rep, "c", i + 1, j + 1, cij);
      add_coeff(rep, "ct", i + 1, j + 1, ctij);
      add_ratio(rep, i + 1, j + 1, cij, ctij);
    }
    add_coeff(rep, "c", i + 1, 0, so.c0[i]);
    if (ars) {
      add_coeff(rep, "ct", i + 1, 0, so.ct0[i]);
      add_ratio(rep, i + 1, 0, so.c0[i], so.ct0[i]);
    }
    rep.convexity_defect = std::max(rep.convexity_defect, std::abs(so.c0[i] + row_sum - 1.0));
  }
  finish_report(rep);
  return rep;
}

}  // namespace

PositivityReport positivity_analysis_type_a(const TableauPair& t) {
  t.validate();
  if (t.kind != SchemeKind::TypeA)
    throw TableauError("positivity_analysis_type_a requires a type A tableau");
  return positivity_report_from(t);
}

PositivityReport positivity_analysis_type_ars(const TableauPair& t) {
  t.validate();
  if (t.kind != SchemeKind::TypeARS)
    throw TableauError("positivity_analysis_type_ars requires a type ARS tableau");
  return positivity_report_from(t);
}

PositivityReport positivity_analysis(const TableauPair& t) {
  switch (t.kind) {
    case SchemeKind::TypeA: return positivity_analysis_type_a(t);
    case SchemeKind::TypeARS: return positivity_analysis_type_ars(t);
    default:
      throw TableauError("positivity analysis is defined for type A and type ARS tableaus");
  }
}

namespace {

TableauPair make_scheme_a() {
  TableauPair t;
  t.name = "scheme_a";
  t.nu = 3;
  t.kind = SchemeKind::TypeA;
  t.gsa = true;
  t.alpha = 0.27973737915215;
  t.a_explicit = {
      0.0,              0.0,              0.0,
      0.73695027152854, 0.0,              0.0,
      0.32152816910844, 0.67847183089156, 0.0};
  t.a_implicit = {
      0.62863517121833, 0.0,               0.0,
      0.24310046553707, 0.19593925696632,  0.0,
      0.48036510509894, 0.074643281386981, 0.44499161351408};
  t.w_explicit = {0.32152816910844, 0.67847183089156, 0.0};
  t.w_implicit = {0.48036510509894, 0.074643281386981, 0.44499161351408};
  return t;
}

TableauPair make_scheme_ars() {
  TableauPair t;
  t.name = "scheme_ars";
  t.nu = 4;
  t.kind = SchemeKind::TypeARS;
  t.gsa = true;
  t.alpha = 0.8;
  t.a_explicit = {
      0.0, 0.0, 0.0, 0.0,
      0.0, 0.0, 0.0, 0.0,
      1.0, 0.0, 0.0, 0.0,
      0.5, 0.0, 0.5, 0.0};
  t.a_implicit = {
      0.0, 0.0, 0.0, 0.0,
      0.0, 1.6, 0.0, 0.0,
      0.0, 0.3, 0.7, 0.0,
      0.0, 0.5, 0.3, 0.2};
  t.w_explicit = {0.5, 0.0, 0.5, 0.0};
  t.w_implicit = {0.0, 0.5, 0.3, 0.2};
  return t;
}

// Standard ARS(2,2,2) scheme of Ascher, Ruuth & Spiteri (1997), built from
// gamma = 1 - sqrt(2)/2, delta = 1 - 1/(2 gamma). Second-order baseline with
// no correction step; kept as the non-positivity-preserving comparison case.
TableauPair make_ars222() {
  const double gamma = 1.0 - std::sqrt(2.0) / 2.0;
  const double delta = 1.0 - 1.0 / (2.0 * gamma);
  TableauPair t;
  t.name = "ars222";
  t.nu = 3;
  t.kind = SchemeKind::TypeARS;
  t.gsa = true;
  t.alpha = 0.0;
  t.a_explicit = {
      0.0,   0.0,         0.0,
      gamma, 0.0,         0.0,
      delta, 1.0 - delta, 0.0};
  t.a_implicit = {
      0.0, 0.0,         0.0,
      0.0, gamma,       0.0,
      0.0, 1.0 - gamma, gamma};
  t.w_explicit = {delta, 1.0 - delta, 0.0};
  t.w_implicit = {0.0, 1.0 - gamma, gamma};
  return t;
}

// Heun's two-stage SSP-RK2; explicit reference tableau (implicit part empty).
TableauPair make_ssp_rk2() {
  TableauPair t;
  t.name = "ssp_rk2_explicit";
  t.nu = 2;
  t.kind = SchemeKind::TypeCK;
  t.gsa = false;
  t.alpha = 0.0;
  t.a_explicit = {0.0, 0.0, 1.0, 0.0};
  t.a_implicit = {0.0, 0.0, 0.0, 0.0};
  t.w_explicit = {0.5, 0.5};
  t.w_implicit = {0.0, 0.0};
  return t;
}

}  // namespace

const std::map<std::string, TableauPair>& builtin_schemes() {
  static const std::map<std::string, TableauPair> registry = [] {
    std::map<std::string, TableauPair> m;
    for (auto&& t : {make_scheme_a(), make_scheme_ars(), make_ars222(), make_ssp_rk2()}) {
      t.validate();
      m.emplace(t.name, t);
    }
    return m;
  }();
  return registry;
}

TableauPair get_scheme(const std::string& name) {
  const auto& reg = builtin_schemes();
  auto it = reg.find(name);
  if (it == reg.end()) {
    std::string known;
    for (const auto& [k, v] : reg) known += (known.empty() ? "" : ", ") + k;
    throw TableauError("unknown scheme '" + name + "' (built-in: " + known + ")");
  }
  return it->second;
}

TableauPair tableau_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw TableauError(std::string("tableau JSON parse error: ") + e.what());
  }
  TableauPair t;
  try {
    t.nu = j.at("nu").get<int>();
    t.a_explicit = j.at("a_explicit").get<std::vector<double>>();
    t.a_implicit = j.at("a_implicit").get<std::vector<double>>();
    t.w_explicit = j.at("w_explicit").get<std::vector<double>>();
    t.w_implicit = j.at("w_implicit").get<std::vector<double>>();
    t.alpha = j.at("alpha").get<double>();
    t.kind = scheme_kind_from_string(j.at("kind").get<std::string>());
    t.gsa = j.at("gsa").get<bool>();
    t.name = j.value("name", std::string("custom"));
  } catch (const nlohmann::json::exception& e) {
    throw TableauError(std::string("tableau JSON field error: ") + e.what());
  }
  t.validate();
  return t;
}

TableauPair load_tableau_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TableauError("cannot open tableau file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return tableau_from_json_text(ss.str());
}

std::string tableau_to_json_text(const TableauPair& t) {
  nlohmann::json j;
  j["nu"] = t.nu;
  j["a_explicit"] = t.a_explicit;
  j["a_implicit"] = t.a_implicit;
  j["w_explicit"] = t.w_explicit;
  j["w_implicit"] = t.w_implicit;
  j["alpha"] = t.alpha;
  j["kind"] = to_string(t.kind);
  j["gsa"] = t.gsa;
  j["name"] = t.name;
  return j.dump(2);
}

}  // namespace bgkimex
