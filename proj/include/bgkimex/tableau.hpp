#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bgkimex {

enum class SchemeKind { TypeA, TypeARS, TypeCK };

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& s);

/// Double Butcher tableau of an IMEX-RK scheme plus the correction weight
/// alpha of the extra implicit step. Matrices are row-major nu x nu;
/// a_explicit is strictly lower triangular, a_implicit lower triangular.
struct TableauPair {
  int nu = 0;
  std::vector<double> a_explicit;
  std::vector<double> a_implicit;
  std::vector<double> w_explicit;
  std::vector<double> w_implicit;
  double alpha = 0.0;
  SchemeKind kind = SchemeKind::TypeCK;
  bool gsa = false;
  std::string name;

  double ae(int i, int j) const { return a_explicit[i * nu + j]; }
  double ai(int i, int j) const { return a_implicit[i * nu + j]; }

  /// c-tilde: row sums of the explicit tableau (c~_i = sum_{j<i} a~_ij).
  std::vector<double> c_explicit() const;
  /// c: row sums of the implicit tableau (c_i = sum_{j<=i} a_ij).
  std::vector<double> c_implicit() const;

  /// Throws TableauError on shape/triangularity/kind/GSA violations.
  void validate() const;
};

/// Which state f* the correction step linearizes around. The two choices
/// only change the third-order condition set.
enum class CorrectionVariant { FStarFn, FStarFnp1 };

struct OrderCondition {
  std::string name;
  int order = 0;
  double value = 0.0;
  double target = 0.0;
  double residual = 0.0;  // value - target, alpha shifts already applied
};

/// Residuals of the accuracy conditions up to `order` (1, 2 or 3).
/// Caller decides the acceptance tolerance.
std::vector<OrderCondition> check_order_conditions(const TableauPair& t, int order,
                                                   CorrectionVariant variant = CorrectionVariant::FStarFn);

double max_abs_residual(const std::vector<OrderCondition>& conditions);

struct PositivityCoefficient {
  std::string label;  // e.g. "c_30" or "ct_21"
  int i = 0;          // 1-based stage indices as in the derivation
  int j = 0;          // 0 marks the f^n / T(f^n) column
  double value = 0.0;
  bool satisfied = true;
};

struct PositivityRatio {
  int i = 0;
  int j = 0;
  double numerator = 0.0;
  double denominator = 0.0;
  std::optional<double> ratio;  // nullopt: zero denominator, excluded from the min
};

struct PositivityReport {
  SchemeKind kind = SchemeKind::TypeA;
  bool feasible = false;
  std::optional<double> c_sch;  // nullopt if every ratio has zero denominator
  std::vector<PositivityCoefficient> coefficients;
  std::vector<PositivityRatio> ratios;
  std::vector<std::string> violations;
  double convexity_defect = 0.0;  // max_i |c_i0 + sum_j c_ij - 1|
};

/// Inequalities are accepted down to -kPositivityTol to absorb coefficient
/// sets truncated to 14 digits.
inline constexpr double kPositivityTol = 1e-12;

/// Coefficients of the stage rewrite as convex combinations of forward Euler
/// steps: f^(i) relaxes from c0_i f^n (+ dt ct0_i T(f^n) for ARS) +
/// sum_j [c_ij f^(j) + dt ct_ij T(f^(j))]. Matrices are nu x nu row-major;
/// only the active lower part is populated (columns >= 2 for ARS).
struct ShuOsherCoefficients {
  std::vector<double> c0, ct0;  // ct0 all zero for type A
  std::vector<double> c, ct;
};

ShuOsherCoefficients shu_osher_coefficients(const TableauPair& t);

PositivityReport positivity_analysis_type_a(const TableauPair& t);
PositivityReport positivity_analysis_type_ars(const TableauPair& t);
/// Dispatches on t.kind; TypeCK is rejected.
PositivityReport positivity_analysis(const TableauPair& t);

/// Built-in schemes: "scheme_a", "scheme_ars", "ars222", "ssp_rk2_explicit".
const std::map<std::string, TableauPair>& builtin_schemes();
TableauPair get_scheme(const std::string& name);

TableauPair tableau_from_json_text(const std::string& text);
TableauPair load_tableau_file(const std::string& path);
std::string tableau_to_json_text(const TableauPair& t);

}  // namespace bgkimex
