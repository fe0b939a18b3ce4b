#include "bgkimex/stability.hpp"

#include <cmath>

#include "bgkimex/errors.hpp"

namespace bgkimex {

std::complex<double> amplification_factor(const TableauPair& t, std::complex<double> z1,
                                          double z2) {
  t.validate();
  const int nu = t.nu;
  std::vector<std::complex<double>> g(nu);
  for (int i = 0; i < nu; ++i) {
    std::complex<double> rhs = 1.0;
    for (int j = 0; j < i; ++j) rhs += (t.ae(i, j) * z1 + t.ai(i, j) * z2) * g[j];
    const double denom = 1.0 - t.ai(i, i) * z2;
    if (denom == 0.0) throw SolverError("singular stage solve: 1 - a_ii z2 = 0");
    g[i] = rhs / denom;
  }
  std::complex<double> f = 1.0;
  for (int i = 0; i < nu; ++i) f += (t.w_explicit[i] * z1 + t.w_implicit[i] * z2) * g[i];
  return f / (1.0 + t.alpha * z2 * z2);
}

StabilitySlice stability_boundary_slice(const TableauPair& t, double z2, const Window& window,
                                        int resolution) {
  if (resolution < 16) throw SolverError("stability slice resolution must be >= 16");
  StabilitySlice slice;
  slice.z2 = z2;
  slice.window = window;
  slice.resolution = resolution;
  if (!(window.x_hi > window.x_lo) || !(window.y_hi > window.y_lo)) return slice;

  const int n = resolution;
  const double dx = (window.x_hi - window.x_lo) / (n - 1);
  const double dy = (window.y_hi - window.y_lo) / (n - 1);

  std::vector<double> mag(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    const double y = window.y_lo + iy * dy;
    for (int ix = 0; ix < n; ++ix) {
      const double x = window.x_lo + ix * dx;
      mag[static_cast<std::size_t>(iy) * n + ix] =
          std::abs(amplification_factor(t, {x, y}, z2)) - 1.0;
    }
  }

  // Marching squares with linear interpolation on |P| - 1.
  auto at = [&](int ix, int iy) { return mag[static_cast<std::size_t>(iy) * n + ix]; };
  auto cross = [&](double xa, double ya, double va, double xb, double yb, double vb) {
    const double s = va / (va - vb);
    slice.boundary.emplace_back(xa + s * (xb - xa), ya + s * (yb - ya));
  };
  for (int iy = 0; iy + 1 < n; ++iy) {
    const double y0 = window.y_lo + iy * dy;
    const double y1 = y0 + dy;
    for (int ix = 0; ix + 1 < n; ++ix) {
      const double x0 = window.x_lo + ix * dx;
      const double x1 = x0 + dx;
      const double v00 = at(ix, iy), v10 = at(ix + 1, iy);
      const double v01 = at(ix, iy + 1), v11 = at(ix + 1, iy + 1);
      if ((v00 <= 0) != (v10 <= 0)) cross(x0, y0, v00, x1, y0, v10);
      if ((v00 <= 0) != (v01 <= 0)) cross(x0, y0, v00, x0, y1, v01);
      // right/top edges only on the boundary of the window to avoid duplicates
      if (ix + 2 == n && (v10 <= 0) != (v11 <= 0)) cross(x1, y0, v10, x1, y1, v11);
      if (iy + 2 == n && (v01 <= 0) != (v11 <= 0)) cross(x0, y1, v01, x1, y1, v11);
    }
  }
  return slice;
}

}  // namespace bgkimex
