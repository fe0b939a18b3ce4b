#include "bgkimex/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bgkimex {

VelocityGrid::VelocityGrid(double v_max_, int n_v_) {
  if (!(v_max_ > 0.0) || n_v_ < 2) throw SolverError("velocity grid needs v_max > 0, n_v >= 2");
  v_max = v_max_;
  n_v = n_v_;
  dv = 2.0 * v_max / n_v;
  nodes.resize(n_v);
  // v_k = -v_max + (k + 1/2) dv, written so that nodes negate exactly under
  // k <-> n_v-1-k.
  for (int k = 0; k < n_v; ++k) nodes[k] = (2 * k + 1 - n_v) * (0.5 * dv);
}

ConservedState moments(std::span<const double> f, const VelocityGrid& grid) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (int k = 0; k < grid.n_v; ++k) {
    const double v = grid.nodes[k];
    s0 += f[k];
    s1 += f[k] * v;
    s2 += f[k] * v * v;
  }
  return {s0 * grid.dv, s1 * grid.dv, 0.5 * s2 * grid.dv};
}

Primitive primitive_from_conserved(const ConservedState& U) {
  if (!U.admissible()) {
    std::ostringstream os;
    os << "inadmissible state: rho = " << U.rho << ", internal energy = "
       << (U.rho > 0.0 ? U.E - 0.5 * U.m * U.m / U.rho : U.E);
    throw AdmissibilityError(os.str(), U.rho, U.rho > 0.0 ? U.internal_energy() : 0.0);
  }
  const double u = U.m / U.rho;
  return {U.rho, u, 2.0 * U.E / U.rho - u * u};
}

ConservedState conserved_from_primitive(const Primitive& p) {
  return {p.rho, p.rho * p.u, 0.5 * p.rho * p.T + 0.5 * p.rho * p.u * p.u};
}

void maxwellian_into(const Primitive& p, const VelocityGrid& grid, std::span<double> out) {
  if (!(p.rho > 0.0) || !(p.T > 0.0))
    throw AdmissibilityError("maxwellian requires rho > 0 and T > 0", p.rho, p.T);
  const int n = grid.n_v;
  const double amp = p.rho / std::sqrt(2.0 * std::numbers::pi * p.T);
  const double dv = grid.dv;

  // Gaussian over uniform nodes via a two-term product recurrence outward
  // from the peak node: the exponent is quadratic in k, so successive ratios
  // form a geometric sequence. Three exp() calls per evaluation instead of
  // n_v; once the tail underflows it stays at zero, which is the correct
  // limit. Relative drift is bounded by ~n_v ulps.
  auto phi = [&](int k) {
    const double d = grid.nodes[k] - p.u;
    return -d * d / (2.0 * p.T);
  };
  int kp = static_cast<int>(std::floor((p.u + grid.v_max) / dv));
  kp = std::clamp(kp, 0, n - 1);
  const double r = std::exp(-dv * dv / p.T);  // ratio of successive ratios
  out[kp] = amp * std::exp(phi(kp));
  if (kp + 1 < n) {
    double q = std::exp(phi(kp + 1) - phi(kp));
    double e = out[kp];
    for (int k = kp + 1; k < n; ++k) {
      e *= q;
      q *= r;
      out[k] = e;
    }
  }
  if (kp > 0) {
    double q = std::exp(phi(kp - 1) - phi(kp));
    double e = out[kp];
    for (int k = kp - 1; k >= 0; --k) {
      e *= q;
      q *= r;
      out[k] = e;
    }
  }
}

std::vector<double> maxwellian(const Primitive& p, const VelocityGrid& grid) {
  std::vector<double> out(grid.n_v);
  maxwellian_into(p, grid, out);
  return out;
}

double maxwellian_mass_defect(const Primitive& p, const VelocityGrid& grid) {
  const auto M = maxwellian(p, grid);
  return std::abs(moments(M, grid).rho - p.rho) / p.rho;
}

bool maxwellian_tail_warning(const Primitive& p, const VelocityGrid& grid) {
  return maxwellian_mass_defect(p, grid) > kTailWarnThreshold;
}

namespace {

[[noreturn]] void newton_failure(const char* why, const ConservedState& U) {
  std::ostringstream os;
  os << "discrete_maxwellian: " << why << " (target rho = " << U.rho << ", m = " << U.m
     << ", E = " << U.E << ", T = " << primitive_from_conserved(U).T << ")";
  throw SolverError(os.str());
}

}  // namespace

void discrete_maxwellian_into(const ConservedState& U, const VelocityGrid& grid,
                              std::span<double> out) {
  Primitive p = primitive_from_conserved(U);
  const int n = grid.n_v;
  const double scale_rho = U.rho;
  const double scale_m = std::max(std::abs(U.m), U.rho);
  const double scale_E = U.E;

  for (int iter = 0; iter < kMaxwellianMaxIter; ++iter) {
    maxwellian_into(p, grid, out);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (int k = 0; k < n; ++k) {
      const double v = grid.nodes[k];
      s0 += out[k];
      s1 += out[k] * v;
      s2 += out[k] * v * v;
    }
    const double r0 = s0 * grid.dv - U.rho;
    const double r1 = s1 * grid.dv - U.m;
    const double r2 = 0.5 * s2 * grid.dv - U.E;
    if (std::abs(r0) <= kMaxwellianTol * scale_rho && std::abs(r1) <= kMaxwellianTol * scale_m &&
        std::abs(r2) <= kMaxwellianTol * scale_E)
      return;

    // Jacobian of the discrete moments w.r.t. (rho, u, T); derivative node
    // values reuse the Maxwellian just computed.
    double J[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (int k = 0; k < n; ++k) {
      const double v = grid.nodes[k];
      const double w = v - p.u;
      const double drho = out[k] / p.rho;
      const double du = out[k] * w / p.T;
      const double dT = out[k] * (w * w / (2.0 * p.T * p.T) - 0.5 / p.T);
      J[0][0] += drho;
      J[0][1] += du;
      J[0][2] += dT;
      J[1][0] += drho * v;
      J[1][1] += du * v;
      J[1][2] += dT * v;
      J[2][0] += 0.5 * drho * v * v;
      J[2][1] += 0.5 * du * v * v;
      J[2][2] += 0.5 * dT * v * v;
    }
    for (auto& row : J)
      for (double& x : row) x *= grid.dv;

    // Solve J * delta = residual by elimination with partial pivoting.
    double A[3][4] = {{J[0][0], J[0][1], J[0][2], r0},
                      {J[1][0], J[1][1], J[1][2], r1},
                      {J[2][0], J[2][1], J[2][2], r2}};
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int row = col + 1; row < 3; ++row)
        if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
      if (A[piv][col] == 0.0) newton_failure("singular Jacobian in Newton solve", U);
      if (piv != col) std::swap(A[piv], A[col]);
      for (int row = 0; row < 3; ++row) {
        if (row == col) continue;
        const double fac = A[row][col] / A[col][col];
        for (int c = col; c < 4; ++c) A[row][c] -= fac * A[col][c];
      }
    }
    double d_rho = A[0][3] / A[0][0];
    double d_u = A[1][3] / A[1][1];
    double d_T = A[2][3] / A[2][2];
    // damp steps that would leave the admissible parameter set
    int halvings = 0;
    while ((p.rho - d_rho <= 0.0 || p.T - d_T <= 0.0) && halvings < 60) {
      d_rho *= 0.5;
      d_u *= 0.5;
      d_T *= 0.5;
      ++halvings;
    }
    if (halvings == 60) newton_failure("step damping exhausted", U);
    p.rho -= d_rho;
    p.u -= d_u;
    p.T -= d_T;
  }
  newton_failure("Newton did not converge in 25 iterations", U);
}

std::vector<double> discrete_maxwellian(const ConservedState& U, const VelocityGrid& grid) {
  std::vector<double> out(grid.n_v);
  discrete_maxwellian_into(U, grid, out);
  return out;
}

void bgk_relax_into(std::span<const double> f_star, std::span<const double> M, double b,
                    std::span<double> out) {
  const double wf = 1.0 / (1.0 + b);
  const double wm = b / (1.0 + b);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = wf * f_star[k] + wm * M[k];
}

std::vector<double> bgk_relax(std::span<const double> f_star, std::span<const double> M,
                              double b) {
  std::vector<double> out(f_star.size());
  bgk_relax_into(f_star, M, b, out);
  return out;
}

std::vector<double> collision_bgk(std::span<const double> f, const VelocityGrid& grid,
                                  const TauFn& tau) {
  const ConservedState U = moments(f, grid);
  const Primitive p = primitive_from_conserved(U);
  auto M = discrete_maxwellian(U, grid);
  const double t = tau(p.rho, p.T);
  for (int k = 0; k < grid.n_v; ++k) M[k] = t * (M[k] - f[k]);
  return M;
}

double entropy_of_values(std::span<const double> f, double dx, double dv) {
  double s = 0.0;
  for (double v : f) {
    if (v < 0.0) throw SolverError("entropy undefined for negative values");
    if (v > 0.0) s += v * std::log(v);
  }
  return dx * dv * s;
}

}  // namespace bgkimex
