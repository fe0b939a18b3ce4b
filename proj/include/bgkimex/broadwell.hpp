#pragma once

#include <optional>
#include <vector>

#include "bgkimex/imex.hpp"
#include "bgkimex/mesh.hpp"
#include "bgkimex/tableau.hpp"

namespace bgkimex {

/// Mass densities of the speed +1, 0, -1 particles.
struct BroadwellTriple {
  double fp = 0.0;
  double f0 = 0.0;
  double fm = 0.0;
};

/// Moment variables rho = f+ + 2 f0 + f-, m = f+ - f-, z = f+ + f-.
/// The triple is nonnegative iff rho >= z >= |m|.
struct BroadwellMoments {
  double rho = 0.0;
  double m = 0.0;
  double z = 0.0;
};

BroadwellMoments broadwell_moments(const BroadwellTriple& f);
BroadwellTriple broadwell_triple(const BroadwellMoments& u);

inline bool broadwell_nonneg(const BroadwellTriple& f) {
  return f.fp >= 0.0 && f.f0 >= 0.0 && f.fm >= 0.0;
}

/// Equilibrium closure z = (rho^2 + m^2) / (2 rho).
double broadwell_equilibrium_z(double rho, double m);

/// Q(f) = (q, -q, q) with q = f0^2 - f+ f-.
BroadwellTriple broadwell_collision(const BroadwellTriple& f);

/// Closed-form solve of f - b Q(f) = g for b >= 0: rho and m are unchanged,
/// z_f = (b/2 (rho^2 + m^2) + z_g) / (1 + b rho). Requires g >= 0.
BroadwellTriple broadwell_relax(const BroadwellTriple& g, double b);

/// dx * sum_j [f+ log f+ + 2 f0 log f0 + f- log f-], 0 log 0 = 0.
double broadwell_entropy_cell(const BroadwellTriple& f);

struct BroadwellField {
  SpatialMesh mesh;
  double time = 0.0;
  std::vector<double> fp, f0, fm;  // per cell

  BroadwellField() = default;
  BroadwellField(SpatialMesh mesh_)
      : mesh(mesh_), fp(mesh_.n_x, 0.0), f0(mesh_.n_x, 0.0), fm(mesh_.n_x, 0.0) {}

  BroadwellTriple cell(int j) const { return {fp[j], f0[j], fm[j]}; }
  void set_cell(int j, const BroadwellTriple& t) {
    fp[j] = t.fp;
    f0[j] = t.f0;
    fm[j] = t.fm;
  }
};

double broadwell_entropy(const BroadwellField& f);

struct BroadwellConfig {
  TableauPair scheme;
  double eps = 1.0;
  SpatialScheme spatial = SpatialScheme::Weno5Limited;  // Upwind1 for entropy runs
  bool positivity_strict = true;
};

struct BroadwellDiagnostics {
  int step = 0;
  double time = 0.0;
  double rho_total = 0.0;
  double m_total = 0.0;
  double min_component = 0.0;
  double stage_min_raw = 0.0;
  double entropy = std::numeric_limits<double>::quiet_NaN();
  /// max_j |z_j - (rho_j^2 + m_j^2)/(2 rho_j)|
  double closure_residual = 0.0;
};

/// Corrected IMEX stepper for the Broadwell system: limited WENO transport of
/// f+ (speed +1) and f- (speed -1), closed-form implicit relaxation, and the
/// correction step with b = alpha dt^2 rho_{f*} / eps^2. Periodic only.
class BroadwellStepper {
public:
  BroadwellStepper(BroadwellConfig cfg, SpatialMesh mesh);
  BroadwellDiagnostics step(BroadwellField& f, double dt);
  /// Positivity bound c_sch * (1/12) * dx (speeds are +-1).
  double positivity_dt() const;
  double c_sch() const { return c_sch_; }

private:
  void transport(const BroadwellField& f, std::vector<double>& tp, std::vector<double>& tm);

  BroadwellConfig cfg_;
  SpatialMesh mesh_;
  double c_sch_ = 0.0;
  RowWorkspace ws_;
  std::vector<std::vector<double>> Tp_, Tm_;            // transport terms per stage
  std::vector<std::vector<BroadwellTriple>> QQ_;        // collision terms per stage
  std::vector<double> rho_star_;
};

}  // namespace bgkimex
