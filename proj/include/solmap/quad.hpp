#ifndef SOLMAP_QUAD_HPP
#define SOLMAP_QUAD_HPP

#include <span>
#include <vector>

namespace solmap {

enum class Quadrature { Trapezoid, Simpson4 };

/** Cumulative integral S_k = \int_{s_0}^{s_k} f over a uniform grid, S_0 = 0.
 *  Trapezoid: order 2, exact on linear integrands.
 *  Simpson4: cubic-interpolant steps (Adams-Moulton weights), order 4,
 *  exact on cubic integrands; falls back to lower order below 4 points. */
void cumulative_integral(std::span<const double> f, double h, Quadrature rule,
                         std::span<double> out);

std::vector<double> cumulative_integral(std::span<const double> f, double h, Quadrature rule);

}  // namespace solmap

#endif
