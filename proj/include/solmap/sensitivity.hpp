#ifndef SOLMAP_SENSITIVITY_HPP
#define SOLMAP_SENSITIVITY_HPP

#include <optional>

#include "solmap/bvp.hpp"
#include "solmap/grid.hpp"
#include "solmap/implicit_ode.hpp"
#include "solmap/transport.hpp"

namespace solmap::sensitivity {

/** Perturbation direction: data components (reals or a grid function) plus an
 *  expression perturbation psi of the nonlinearity; `scale` multiplies all. */
struct Direction {
    std::vector<double> d_reals;          // IVP: {d_eta}; BVP: {d_eta0, d_eta1}
    std::optional<GridFn1D> d_data;       // transport: perturbation of y0
    std::optional<Expression> d_phi;      // psi, same variable list as phi
    double scale = 1.0;
};

struct DerivReport {
    double rel_sup_error = 0.0;  // against max(||variational||_sup, 1e-12)
    double eps = 0.0;
    double fd_norm = 0.0;
    double variational_norm = 0.0;
};

DerivReport compare(const CylFn& fd, const CylFn& variational, double eps);
DerivReport compare(const GridFn1D& fd, const GridFn1D& variational, double eps);

// ----------------------------------------------------------- transport ----

/** Central difference (Sigma(x+eps h) - Sigma(x-eps h)) / (2 eps). */
CylFn fd_transport(const transport::TransportProblem& problem,
                   const transport::PicardConfig& cfg, const Direction& h, double eps);

/** Variational solution: dy = bar(d_y0) + I(0, psi o [id,y] + a dy),
 *  a = d_xi phi o [id, y]; quadrature matches the nonlinear solve. */
CylFn variational_transport(const transport::TransportProblem& problem,
                            const transport::PicardConfig& cfg, const CylFn& y,
                            const Direction& h);

/** Mixed second difference and, when available, the analytic second variation
 *  (k = 2 variation formula evaluated at the solution). */
struct SecondVariationReport {
    CylFn mixed_fd;
    CylFn analytic;
    bool has_analytic = false;
    double rel_error = 0.0;
};

SecondVariationReport second_variation_transport(const transport::TransportProblem& problem,
                                                 const transport::PicardConfig& cfg,
                                                 const Direction& h1, const Direction& h2,
                                                 double eps);

/** log2(err(eps)/err(eps/2)) where err = sup distance of fd to variational. */
double richardson_order_transport(const transport::TransportProblem& problem,
                                  const transport::PicardConfig& cfg, const Direction& h,
                                  double eps);

// ----------------------------------------------------------------- IVP ----

GridFn1D fd_ivp(const implicit_ode::ImplicitIVP& problem, const Direction& h, double eps);

/** Integrating-factor solve of p3 u' + p2 u = -psi o [id; y, y'], u(0)=d_eta. */
GridFn1D variational_ivp(const implicit_ode::IntegrateResult& solved, const Direction& h);

// ----------------------------------------------------------------- BVP ----

GridFn1D fd_bvp(const bvp::BVProblem& problem, const Direction& h, double eps);

/** Linear-system solve of u'' - p3 u' - p2 u = psi + p2 dbar + p3 dbar',
 *  u = dbar + (zero-boundary part), dbar affine from (d_eta0, d_eta1). */
GridFn1D variational_bvp(const bvp::BVProblem& problem, const GridFn1D& y, const Direction& h);

}  // namespace solmap::sensitivity

#endif
