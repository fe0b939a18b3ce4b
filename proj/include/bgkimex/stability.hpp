#pragma once

#include <complex>
#include <vector>

#include "bgkimex/tableau.hpp"

namespace bgkimex {

/// Amplification factor P(z1, z2) of the corrected scheme on the scalar test
/// problem df/dt = lambda1 f + lambda2 f, z_i = lambda_i dt. The correction
/// step contributes the divisor (1 + alpha z2^2).
std::complex<double> amplification_factor(const TableauPair& t, std::complex<double> z1,
                                          double z2);

struct Window {
  double x_lo = -6.0;
  double x_hi = 1.0;
  double y_lo = -5.0;
  double y_hi = 5.0;
};

struct StabilitySlice {
  double z2 = 0.0;
  Window window;
  int resolution = 0;
  std::vector<std::pair<double, double>> boundary;  // |P| = 1 contour points
};

/// Marching-squares contour of |P(x+iy, z2)| = 1 sampled on a
/// resolution x resolution grid over the window.
StabilitySlice stability_boundary_slice(const TableauPair& t, double z2,
                                        const Window& window = Window{}, int resolution = 400);

}  // namespace bgkimex
