#ifndef SOLMAP_BVP_HPP
#define SOLMAP_BVP_HPP

#include <vector>

#include "solmap/expr.hpp"
#include "solmap/grid.hpp"
#include "solmap/linalg.hpp"
#include "solmap/transport.hpp"  // SolveError

namespace solmap::bvp {

/** y'' = phi(s, y, y') on [0,1], y(0) = eta0, y(1) = eta1.
 *  phi uses variables (t, xi1, xi2); n is the interior node count. */
struct BVProblem {
    double eta0 = 0.0, eta1 = 0.0;
    Expression phi;
    int n = 200;  // >= 16
};

/** Green operator for y'' = z with zero boundary values:
 *  y(s) = z2(s) - z2(1) s, z2 = double cumulative integral (order-4 rule). */
GridFn1D green_ell(const GridFn1D& z);

/** Affine interpolant eta0 + (eta1 - eta0) s on n_nodes uniform nodes. */
GridFn1D eta_bar(double eta0, double eta1, int n_nodes);

/** Dense discretization of u -> u'' - p3 u' - p2 u on the zero-boundary
 *  interior, order-2 central stencils. */
struct LinearizedBVP {
    DenseMatrix op;        // n x n interior operator
    GridFn1D p2, p3;
    double sigma_min = 0.0;
    double op_norm = 0.0;
    std::vector<double> kernel;  // unit direction attaining sigma_min
    bool near_singular() const { return sigma_min <= 1e-8 * op_norm; }
};

LinearizedBVP assemble_linearized(const GridFn1D& p2, const GridFn1D& p3);

/** Solve u'' - p3 u' - p2 u = rhs (interior values of rhs), zero boundary. */
GridFn1D linearized_bvp_solve(const GridFn1D& p2, const GridFn1D& p3, const GridFn1D& rhs);

struct NewtonReport {
    int steps = 0;
    std::vector<double> residuals;  // sup |f0| per iterate
    double sigma_min = 0.0;
    double op_norm = 0.0;
    bool near_singular = false;
    bool converged = false;
};

struct NewtonResult {
    GridFn1D y;  // eta_bar + increment, full grid
    NewtonReport report;
};

/** Damped Newton on f0(w) = w - green_ell(phi o [id; w+eta_bar, w'+eta_bar']).
 *  Steps solve the assembled dense system (I - ell(p3 d + p2)) u = -f0. */
NewtonResult newton_solve(const BVProblem& problem, const GridFn1D* init = nullptr,
                          double tol = 1e-11, int max_steps = 50);

struct ResonancePoint {
    double r = 0.0;
    double sigma_min = 0.0;
};

/** Smallest singular value of the operator with p2 = r, p3 = 0 over a scan
 *  of r values (inverse power iteration on the normal operator). */
std::vector<ResonancePoint> resonance_scan(double rmin, double rmax, int steps, int n_interior);

/** Local minima of a scan table (dips below `ceiling`). */
std::vector<ResonancePoint> scan_dips(const std::vector<ResonancePoint>& table,
                                      double ceiling = 1.0);

struct OrthogonalityReport {
    double residual = 0.0;       // normalized kernel correlation of rhs = v''
    double ls_residual = 0.0;    // linear residual after kernel deflation
    double sine_integral = 0.0;  // int_0^1 v sin(n pi t)
    double sigma_min = 0.0;
    bool solvable = false;
};

/** At resonance p2 = -n^2 pi^2, p3 = 0: solvability of rhs v'' against the
 *  kernel mode sin(n pi t). */
OrthogonalityReport range_orthogonality_check(int n_mode, const GridFn1D& v);

}  // namespace solmap::bvp

#endif
