#ifndef SOLMAP_IMPLICIT_ODE_HPP
#define SOLMAP_IMPLICIT_ODE_HPP

#include <string>
#include <vector>

#include "solmap/expr.hpp"
#include "solmap/grid.hpp"
#include "solmap/transport.hpp"  // SolveError

namespace solmap::implicit_ode {

/** Implicit IVP phi(s, y, y') = 0 on [0,1] with y(0) = eta.
 *  phi uses variables (t, xi1, xi2) where xi1 = y, xi2 = y'. */
struct ImplicitIVP {
    double eta = 0.0;
    Expression phi;
    int n = 100;  // step count, >= 8
};

/** p_i = d_i phi o [id; y, y'] along the trajectory; regular iff p3 stays
 *  away from zero (threshold 1e-8 by default). */
struct RegularityTrace {
    GridFn1D p2, p3;
    double min_abs_p3 = 0.0;
    bool regular = false;
};

struct IntegrateResult {
    GridFn1D y;
    GridFn1D slope;  // resolved y' at the nodes
    RegularityTrace trace;
};

/** Newton iteration on w -> phi(s, y, w) from w_guess to |phi| <= 1e-13. */
double resolve_slope(const Expression& phi, const Expression& dphi_dxi2, double s, double y,
                     double w_guess);

/** Classical RK4 on y' = psi(s,y), psi by implicit resolution, warm-started. */
IntegrateResult integrate(const ImplicitIVP& problem, double regularity_threshold = 1e-8);

/** Solution of p3 u' + p2 u = g with u(0) = u0 by integrating factor,
 *  u = e^{-A} (u0 + int_0^t e^{A} p3^{-1} g), A = int_0^t p3^{-1} p2,
 *  cumulative integrals at the node grid. */
GridFn1D variational_solve(const GridFn1D& p2, const GridFn1D& p3, double u0, const GridFn1D& g);

struct ScanRow {
    double parameter = 0.0;
    double min_abs_p3 = 0.0;
    bool regular = false;
    bool solved = false;
    std::string error;
};

/** Solve the family phi(t, xi1, xi2; parameter) over a parameter grid and
 *  tabulate min |p3|; per-entry failures are recorded and the scan continues. */
std::vector<ScanRow> regularity_scan(const Expression& phi_family, const std::string& parameter,
                                     const std::vector<double>& values, double eta, int n);

}  // namespace solmap::implicit_ode

#endif
