#include "solmap/sensitivity.hpp"

#include <cmath>

namespace solmap::sensitivity {

namespace {

// base + (c1 psi1 + c2 psi2): the psi-sum is grouped so direction swap only
// commutes one addition and stays bit-identical
Expression perturbed_phi(const Expression& base, const Direction& h1, double c1,
                         const Direction* h2 = nullptr, double c2 = 0.0) {
    if (!h2 || !h2->d_phi) {
        if (!h1.d_phi) return base;
        return base.plus_scaled(*h1.d_phi, c1 * h1.scale);
    }
    if (!h1.d_phi) return base.plus_scaled(*h2->d_phi, c2 * h2->scale);
    Expression sum = Expression::constant(0.0, base.variables())
                         .plus_scaled(*h1.d_phi, c1 * h1.scale)
                         .plus_scaled(*h2->d_phi, c2 * h2->scale);
    return base.plus_scaled(sum, 1.0);
}

GridFn1D perturbed_y0(const GridFn1D& y0, const Direction& h1, double c1,
                      const Direction* h2 = nullptr, double c2 = 0.0) {
    std::vector<double> v = y0.values();
    for (int k = 0; k < y0.n_nodes(); ++k) {
        double d1 = h1.d_data ? (*h1.d_data)[k] * c1 * h1.scale : 0.0;
        double d2 = (h2 && h2->d_data) ? (*h2->d_data)[k] * c2 * h2->scale : 0.0;
        v[static_cast<std::size_t>(k)] += d1 + d2;
    }
    return GridFn1D(y0.a(), y0.b(), std::move(v));
}

CylFn solve_corner(const transport::TransportProblem& problem,
                   const transport::PicardConfig& cfg, const Direction& h1, double c1,
                   const Direction* h2 = nullptr, double c2 = 0.0) {
    transport::TransportProblem p{perturbed_y0(problem.y0, h1, c1, h2, c2),
                                  perturbed_phi(problem.phi, h1, c1, h2, c2), problem.T};
    transport::SolveReport rep = transport::solve(p, cfg);
    if (!rep.complete)
        throw SolveError(SolveError::Kind::NoConvergence, "fd corner solve incomplete");
    return rep.y;
}

}  // namespace

DerivReport compare(const CylFn& fd, const CylFn& variational, double eps) {
    DerivReport r;
    r.eps = eps;
    r.fd_norm = fd.sup_norm();
    r.variational_norm = variational.sup_norm();
    r.rel_sup_error = sup_distance(fd, variational) / std::max(r.variational_norm, 1e-12);
    return r;
}

DerivReport compare(const GridFn1D& fd, const GridFn1D& variational, double eps) {
    DerivReport r;
    r.eps = eps;
    r.fd_norm = fd.sup_norm();
    r.variational_norm = variational.sup_norm();
    r.rel_sup_error = sup_distance(fd, variational) / std::max(r.variational_norm, 1e-12);
    return r;
}

CylFn fd_transport(const transport::TransportProblem& problem,
                   const transport::PicardConfig& cfg, const Direction& h, double eps) {
    CylFn plus = solve_corner(problem, cfg, h, eps);
    CylFn minus = solve_corner(problem, cfg, h, -eps);
    return (1.0 / (2.0 * eps)) * (plus - minus);
}

CylFn variational_transport(const transport::TransportProblem& problem,
                            const transport::PicardConfig& cfg, const CylFn& y,
                            const Direction& h) {
    transport::Nonlinearity phi = transport::Nonlinearity::from(problem.phi);
    const int nt = y.nt(), ntheta = y.ntheta();
    const double dt = y.dt();

    CylFn a(y.T(), nt, ntheta);
    for (int j = 0; j <= nt; ++j)
        for (int m = 0; m < ntheta; ++m)
            a.at(j, m) = phi.d_xi(j * dt, y.eta_node(m), y(j, m));

    CylFn v(y.T(), nt, ntheta);
    if (h.d_data) {
        GridFn1D scaled = h.scale * (*h.d_data);
        v = transport::bar_y0(scaled, y.T());
    }
    if (h.d_phi) {
        CylFn psi_on = compose(*h.d_phi, y);
        CylFn integral = transport::char_integral(0.0, psi_on, cfg.quad);
        v = v + h.scale * integral;
    }

    transport::LinearizedOptions opts;
    opts.tol = cfg.tol;
    opts.quad = cfg.quad;
    return transport::linearized_solve(a, v, opts);
}

SecondVariationReport second_variation_transport(const transport::TransportProblem& problem,
                                                 const transport::PicardConfig& cfg,
                                                 const Direction& h1, const Direction& h2,
                                                 double eps) {
    CylFn pp = solve_corner(problem, cfg, h1, eps, &h2, eps);
    CylFn pm = solve_corner(problem, cfg, h1, eps, &h2, -eps);
    CylFn mp = solve_corner(problem, cfg, h1, -eps, &h2, eps);
    CylFn mm = solve_corner(problem, cfg, h1, -eps, &h2, -eps);

    SecondVariationReport rep;
    // grouped so that swapping h1 and h2 commutes single additions only
    rep.mixed_fd = (1.0 / (4.0 * eps * eps)) * ((pp + mm) - (pm + mp));

    transport::SolveReport base = transport::solve(problem, cfg);
    CylFn d1 = variational_transport(problem, cfg, base.y, h1);
    CylFn d2 = variational_transport(problem, cfg, base.y, h2);

    transport::Nonlinearity phi = transport::Nonlinearity::from(problem.phi);
    const int nt = base.y.nt(), ntheta = base.y.ntheta();
    const double dt = base.y.dt();
    CylFn a(base.y.T(), nt, ntheta);
    CylFn w(base.y.T(), nt, ntheta);
    std::optional<transport::Nonlinearity> psi1, psi2;
    if (h1.d_phi) psi1 = transport::Nonlinearity::from(*h1.d_phi);
    if (h2.d_phi) psi2 = transport::Nonlinearity::from(*h2.d_phi);
    for (int j = 0; j <= nt; ++j)
        for (int m = 0; m < ntheta; ++m) {
            double t = j * dt, eta = base.y.eta_node(m), yv = base.y(j, m);
            a.at(j, m) = phi.d_xi(t, eta, yv);
            double acc = phi.d_xi_xi(t, eta, yv) * d1(j, m) * d2(j, m);
            if (psi1) acc += h1.scale * psi1->d_xi(t, eta, yv) * d2(j, m);
            if (psi2) acc += h2.scale * psi2->d_xi(t, eta, yv) * d1(j, m);
            w.at(j, m) = acc;
        }
    CylFn v2 = transport::char_integral(0.0, w, cfg.quad);
    transport::LinearizedOptions opts;
    opts.tol = cfg.tol;
    opts.quad = cfg.quad;
    rep.analytic = transport::linearized_solve(a, v2, opts);
    rep.has_analytic = true;
    rep.rel_error =
        sup_distance(rep.mixed_fd, rep.analytic) / std::max(rep.analytic.sup_norm(), 1e-12);
    return rep;
}

double richardson_order_transport(const transport::TransportProblem& problem,
                                  const transport::PicardConfig& cfg, const Direction& h,
                                  double eps) {
    transport::SolveReport base = transport::solve(problem, cfg);
    CylFn var = variational_transport(problem, cfg, base.y, h);
    double e1 = sup_distance(fd_transport(problem, cfg, h, eps), var);
    double e2 = sup_distance(fd_transport(problem, cfg, h, 0.5 * eps), var);
    if (e2 <= 0.0) return 2.0;  // at the discretization floor
    return std::log2(e1 / e2);
}

GridFn1D fd_ivp(const implicit_ode::ImplicitIVP& problem, const Direction& h, double eps) {
    double d_eta = h.d_reals.empty() ? 0.0 : h.d_reals[0];
    auto run = [&](double sign) {
        implicit_ode::ImplicitIVP p{problem.eta + sign * eps * h.scale * d_eta,
                                    perturbed_phi(problem.phi, h, sign * eps), problem.n};
        return implicit_ode::integrate(p).y;
    };
    GridFn1D plus = run(1.0);
    GridFn1D minus = run(-1.0);
    return (1.0 / (2.0 * eps)) * (plus - minus);
}

GridFn1D variational_ivp(const implicit_ode::IntegrateResult& solved, const Direction& h) {
    const int n = solved.y.n_nodes();
    std::vector<double> g(static_cast<std::size_t>(n), 0.0);
    if (h.d_phi) {
        const Expression& psi = *h.d_phi;
        std::vector<double> env(psi.variables().size(), 0.0);
        int it = psi.var_index("t").value_or(-1);
        int i1 = psi.var_index("xi1").value_or(-1);
        int i2 = psi.var_index("xi2").value_or(-1);
        for (int k = 0; k < n; ++k) {
            if (it >= 0) env[static_cast<std::size_t>(it)] = solved.y.node(k);
            if (i1 >= 0) env[static_cast<std::size_t>(i1)] = solved.y[k];
            if (i2 >= 0) env[static_cast<std::size_t>(i2)] = solved.slope[k];
            g[static_cast<std::size_t>(k)] = -h.scale * psi.eval(env);
        }
    }
    double u0 = h.d_reals.empty() ? 0.0 : h.scale * h.d_reals[0];
    return implicit_ode::variational_solve(solved.trace.p2, solved.trace.p3, u0,
                                           GridFn1D(solved.y.a(), solved.y.b(), std::move(g)));
}

GridFn1D fd_bvp(const bvp::BVProblem& problem, const Direction& h, double eps) {
    double d0 = h.d_reals.size() > 0 ? h.d_reals[0] : 0.0;
    double d1 = h.d_reals.size() > 1 ? h.d_reals[1] : 0.0;
    auto run = [&](double sign) {
        bvp::BVProblem p{problem.eta0 + sign * eps * h.scale * d0,
                         problem.eta1 + sign * eps * h.scale * d1,
                         perturbed_phi(problem.phi, h, sign * eps), problem.n};
        return bvp::newton_solve(p).y;
    };
    GridFn1D plus = run(1.0);
    GridFn1D minus = run(-1.0);
    return (1.0 / (2.0 * eps)) * (plus - minus);
}

GridFn1D variational_bvp(const bvp::BVProblem& problem, const GridFn1D& y, const Direction& h) {
    const int total = y.n_nodes();
    const double hh = y.h();
    // slope of the solution by the module's order-2 stencils
    std::vector<double> yp(static_cast<std::size_t>(total));
    yp[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * hh);
    for (int k = 1; k < total - 1; ++k) yp[static_cast<std::size_t>(k)] = (y[k + 1] - y[k - 1]) / (2.0 * hh);
    yp[static_cast<std::size_t>(total - 1)] =
        (3.0 * y[total - 1] - 4.0 * y[total - 2] + y[total - 3]) / (2.0 * hh);

    Expression p2e = problem.phi.differentiate("xi1");
    Expression p3e = problem.phi.differentiate("xi2");
    std::vector<double> env(problem.phi.variables().size(), 0.0);
    int it = problem.phi.var_index("t").value_or(-1);
    int i1 = problem.phi.var_index("xi1").value_or(-1);
    int i2 = problem.phi.var_index("xi2").value_or(-1);

    double d0 = h.d_reals.size() > 0 ? h.scale * h.d_reals[0] : 0.0;
    double d1 = h.d_reals.size() > 1 ? h.scale * h.d_reals[1] : 0.0;
    GridFn1D dbar = bvp::eta_bar(d0, d1, total);
    const double dbar_slope = d1 - d0;

    std::vector<double> p2v(static_cast<std::size_t>(total)), p3v(static_cast<std::size_t>(total)),
        rhs(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k) {
        if (it >= 0) env[static_cast<std::size_t>(it)] = y.node(k);
        if (i1 >= 0) env[static_cast<std::size_t>(i1)] = y[k];
        if (i2 >= 0) env[static_cast<std::size_t>(i2)] = yp[static_cast<std::size_t>(k)];
        p2v[static_cast<std::size_t>(k)] = p2e.eval(env);
        p3v[static_cast<std::size_t>(k)] = p3e.eval(env);
        double psi = 0.0;
        if (h.d_phi) psi = h.scale * h.d_phi->eval(env);
        rhs[static_cast<std::size_t>(k)] = psi + p2v[static_cast<std::size_t>(k)] * dbar[k] +
                                           p3v[static_cast<std::size_t>(k)] * dbar_slope;
    }
    GridFn1D u = bvp::linearized_bvp_solve(GridFn1D(0.0, 1.0, p2v), GridFn1D(0.0, 1.0, p3v),
                                           GridFn1D(0.0, 1.0, rhs));
    return dbar + u;
}

}  // namespace solmap::sensitivity
