#pragma once

#include <array>

namespace bgkimex {

// Quadrature rules on the reference cell [-1/2, 1/2]; weights sum to 1 so
// they average rather than integrate. Both rules are exact through degree 5.
namespace quadrature {

// Four-point Gauss-Lobatto: endpoints included, omega_1 = omega_4 = 1/12.
inline constexpr std::array<double, 4> lobatto4_nodes = {
    -0.5, -0.22360679774997896, 0.22360679774997896, 0.5};
inline constexpr std::array<double, 4> lobatto4_weights = {1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0,
                                                           1.0 / 12.0};

// Three-point Gauss-Legendre.
inline constexpr std::array<double, 3> legendre3_nodes = {-0.3872983346207417, 0.0,
                                                          0.3872983346207417};
inline constexpr std::array<double, 3> legendre3_weights = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};

// Interior Lobatto mass omega_2 + omega_3, the denominator of the limiter's
// xi_j.
inline constexpr double lobatto4_interior = 5.0 / 6.0;

}  // namespace quadrature

}  // namespace bgkimex
