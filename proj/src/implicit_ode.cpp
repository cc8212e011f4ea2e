#include "solmap/implicit_ode.hpp"

#include <cmath>

#include "solmap/quad.hpp"

namespace solmap::implicit_ode {

namespace {

struct PhiEval {
    const Expression& phi;
    Expression p2, p3;
    int it, i1, i2;
    std::vector<double> env;

    explicit PhiEval(const Expression& e)
        : phi(e), p2(e.differentiate("xi1")), p3(e.differentiate("xi2")),
          it(e.var_index("t").value_or(-1)), i1(e.var_index("xi1").value_or(-1)),
          i2(e.var_index("xi2").value_or(-1)), env(e.variables().size(), 0.0) {}

    void bind(double s, double y, double w) {
        if (it >= 0) env[static_cast<std::size_t>(it)] = s;
        if (i1 >= 0) env[static_cast<std::size_t>(i1)] = y;
        if (i2 >= 0) env[static_cast<std::size_t>(i2)] = w;
    }
    double value(double s, double y, double w) {
        bind(s, y, w);
        return phi.eval(env);
    }
    double dp2(double s, double y, double w) {
        bind(s, y, w);
        return p2.eval(env);
    }
    double dp3(double s, double y, double w) {
        bind(s, y, w);
        return p3.eval(env);
    }
};

double newton_slope(PhiEval& f, double s, double y, double w_guess) {
    double w = w_guess;
    const double tol = 1e-13;
    double fw = f.value(s, y, w);
    for (int k = 0; k < 80; ++k) {
        if (std::abs(fw) <= tol) return w;
        double d = f.dp3(s, y, w);
        if (d == 0.0 || !std::isfinite(d))
            throw SolveError(SolveError::Kind::Regularity,
                             "resolve_slope: vanishing d_xi2 phi at s=" + std::to_string(s));
        double step = fw / d;
        double w_new = w - step;
        double f_new = f.value(s, y, w_new);
        // halve when the full step overshoots
        for (int h = 0; h < 40 && std::abs(f_new) > std::abs(fw) && std::abs(step) > 1e-16;
             ++h) {
            step *= 0.5;
            w_new = w - step;
            f_new = f.value(s, y, w_new);
        }
        w = w_new;
        fw = f_new;
    }
    if (std::abs(fw) <= 1e-10) return w;  // stagnated but close
    throw SolveError(SolveError::Kind::NoConvergence,
                     "resolve_slope: Newton stagnation at s=" + std::to_string(s));
}

}  // namespace

double resolve_slope(const Expression& phi, const Expression&, double s, double y,
                     double w_guess) {
    PhiEval f(phi);
    return newton_slope(f, s, y, w_guess);
}

IntegrateResult integrate(const ImplicitIVP& problem, double regularity_threshold) {
    if (problem.n < 8) throw GridError("implicit ivp: need n >= 8");
    const int n = problem.n;
    const double h = 1.0 / n;
    PhiEval f(problem.phi);

    std::vector<double> yv(static_cast<std::size_t>(n + 1));
    std::vector<double> wv(static_cast<std::size_t>(n + 1));
    std::vector<double> p2v(static_cast<std::size_t>(n + 1));
    std::vector<double> p3v(static_cast<std::size_t>(n + 1));

    double y = problem.eta;
    double w = newton_slope(f, 0.0, y, 0.0);
    for (int k = 0; k <= n; ++k) {
        double s = h * k;
        w = newton_slope(f, s, y, w);
        yv[static_cast<std::size_t>(k)] = y;
        wv[static_cast<std::size_t>(k)] = w;
        p2v[static_cast<std::size_t>(k)] = f.dp2(s, y, w);
        p3v[static_cast<std::size_t>(k)] = f.dp3(s, y, w);
        if (k == n) break;
        double k1 = w;
        double k2 = newton_slope(f, s + 0.5 * h, y + 0.5 * h * k1, k1);
        double k3 = newton_slope(f, s + 0.5 * h, y + 0.5 * h * k2, k2);
        double k4 = newton_slope(f, s + h, y + h * k3, k3);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        w = k4;  // warm start for the next node
    }

    IntegrateResult res;
    res.y = GridFn1D(0.0, 1.0, std::move(yv));
    res.slope = GridFn1D(0.0, 1.0, std::move(wv));
    res.trace.p2 = GridFn1D(0.0, 1.0, std::move(p2v));
    res.trace.p3 = GridFn1D(0.0, 1.0, std::move(p3v));
    double mn = std::abs(res.trace.p3[0]);
    for (int k = 0; k <= n; ++k) mn = std::min(mn, std::abs(res.trace.p3[k]));
    res.trace.min_abs_p3 = mn;
    res.trace.regular = mn > regularity_threshold;
    return res;
}

GridFn1D variational_solve(const GridFn1D& p2, const GridFn1D& p3, double u0,
                           const GridFn1D& g) {
    const int n = p2.n_nodes();
    if (p3.n_nodes() != n || g.n_nodes() != n)
        throw GridError("variational_solve: grid mismatch");
    for (int k = 0; k < n; ++k)
        if (p3[k] == 0.0)
            throw SolveError(SolveError::Kind::Regularity,
                             "variational_solve: p3 vanishes at node " + std::to_string(k));
    const double h = p2.h();

    std::vector<double> ratio(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) ratio[static_cast<std::size_t>(k)] = p2[k] / p3[k];
    std::vector<double> A = cumulative_integral(ratio, h, Quadrature::Simpson4);

    std::vector<double> integrand(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        integrand[static_cast<std::size_t>(k)] =
            std::exp(A[static_cast<std::size_t>(k)]) * g[k] / p3[k];
    std::vector<double> inner = cumulative_integral(integrand, h, Quadrature::Simpson4);

    std::vector<double> u(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        u[static_cast<std::size_t>(k)] =
            std::exp(-A[static_cast<std::size_t>(k)]) * (u0 + inner[static_cast<std::size_t>(k)]);
    return GridFn1D(p2.a(), p2.b(), std::move(u));
}

std::vector<ScanRow> regularity_scan(const Expression& phi_family, const std::string& parameter,
                                     const std::vector<double>& values, double eta, int n) {
    std::vector<ScanRow> rows;
    for (double c : values) {
        ScanRow row;
        row.parameter = c;
        try {
            ImplicitIVP p{eta, phi_family.bind(parameter, c), n};
            IntegrateResult r = integrate(p);
            row.min_abs_p3 = r.trace.min_abs_p3;
            row.regular = r.trace.regular;
            row.solved = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace solmap::implicit_ode
