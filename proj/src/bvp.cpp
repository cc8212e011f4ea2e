#include "solmap/bvp.hpp"

#include <cmath>

#include "solmap/quad.hpp"

namespace solmap::bvp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// first derivative at every node: central inside, 3-point one-sided at the ends
std::vector<double> derivative(const std::vector<double>& u, double h) {
    const int n = static_cast<int>(u.size());
    std::vector<double> d(u.size());
    d[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    for (int k = 1; k < n - 1; ++k)
        d[static_cast<std::size_t>(k)] =
            (u[static_cast<std::size_t>(k + 1)] - u[static_cast<std::size_t>(k - 1)]) /
            (2.0 * h);
    d[static_cast<std::size_t>(n - 1)] =
        (3.0 * u[static_cast<std::size_t>(n - 1)] - 4.0 * u[static_cast<std::size_t>(n - 2)] +
         u[static_cast<std::size_t>(n - 3)]) /
        (2.0 * h);
    return d;
}

struct PhiEval {
    Expression phi, p2, p3;
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

}  // namespace

GridFn1D green_ell(const GridFn1D& z) {
    const double h = z.h();
    std::vector<double> first = cumulative_integral(z.values(), h, Quadrature::Simpson4);
    std::vector<double> second = cumulative_integral(first, h, Quadrature::Simpson4);
    const double z2_at_1 = second.back();
    const int n = z.n_nodes();
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        y[static_cast<std::size_t>(k)] = second[static_cast<std::size_t>(k)] - z2_at_1 * z.node(k);
    y.front() = 0.0;
    y.back() = 0.0;
    return GridFn1D(z.a(), z.b(), std::move(y));
}

GridFn1D eta_bar(double eta0, double eta1, int n_nodes) {
    std::vector<double> v(static_cast<std::size_t>(n_nodes));
    for (int k = 0; k < n_nodes; ++k)
        v[static_cast<std::size_t>(k)] = eta0 + (eta1 - eta0) * k / (n_nodes - 1);
    return GridFn1D(0.0, 1.0, std::move(v));
}

LinearizedBVP assemble_linearized(const GridFn1D& p2, const GridFn1D& p3) {
    if (p2.n_nodes() != p3.n_nodes()) throw GridError("assemble_linearized: grid mismatch");
    const int total = p2.n_nodes();
    const int n = total - 2;
    const double h = p2.h();
    LinearizedBVP lin;
    lin.p2 = p2;
    lin.p3 = p3;
    lin.op = DenseMatrix(n, n);
    for (int k = 1; k <= n; ++k) {
        int row = k - 1;
        double c2 = 1.0 / (h * h);
        double c1 = p3[k] / (2.0 * h);
        if (k - 1 >= 1) lin.op(row, k - 2) = c2 + c1;
        lin.op(row, row) = -2.0 * c2 - p2[k];
        if (k + 1 <= n) lin.op(row, k) = c2 - c1;
    }
    lin.op_norm = lin.op.inf_norm();
    lin.sigma_min = smallest_singular_value(lin.op, lin.kernel, 60);
    return lin;
}

GridFn1D linearized_bvp_solve(const GridFn1D& p2, const GridFn1D& p3, const GridFn1D& rhs) {
    LinearizedBVP lin = assemble_linearized(p2, p3);
    if (lin.near_singular())
        throw SolveError(SolveError::Kind::Regularity,
                         "linearized bvp: singular operator (resonance)");
    const int n = lin.op.rows();
    if (rhs.n_nodes() != n + 2) throw GridError("linearized_bvp_solve: grid mismatch");
    std::vector<double> b(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) b[static_cast<std::size_t>(k)] = rhs[k + 1];
    LuFactor lu(lin.op);
    std::vector<double> ui = lu.solve(b);
    std::vector<double> u(static_cast<std::size_t>(n + 2), 0.0);
    for (int k = 0; k < n; ++k) u[static_cast<std::size_t>(k + 1)] = ui[static_cast<std::size_t>(k)];
    return GridFn1D(rhs.a(), rhs.b(), std::move(u));
}

NewtonResult newton_solve(const BVProblem& problem, const GridFn1D* init, double tol,
                          int max_steps) {
    if (problem.n < 16) throw GridError("bvp: need n >= 16 interior nodes");
    const int n = problem.n;
    const int total = n + 2;
    const double h = 1.0 / (n + 1);
    PhiEval f(problem.phi);
    GridFn1D bar = eta_bar(problem.eta0, problem.eta1, total);
    const double bar_slope = problem.eta1 - problem.eta0;

    std::vector<double> w(static_cast<std::size_t>(total), 0.0);
    if (init) {
        if (init->n_nodes() != total) throw GridError("bvp: init grid mismatch");
        w = init->values();
        w.front() = 0.0;
        w.back() = 0.0;
    }

    auto f0_of = [&](const std::vector<double>& wv, std::vector<double>& z_out) {
        std::vector<double> wp = derivative(wv, h);
        z_out.resize(wv.size());
        for (int k = 0; k < total; ++k)
            z_out[static_cast<std::size_t>(k)] =
                f.value(h * k, bar[k] + wv[static_cast<std::size_t>(k)],
                        bar_slope + wp[static_cast<std::size_t>(k)]);
        GridFn1D ell = green_ell(GridFn1D(0.0, 1.0, z_out));
        std::vector<double> r(wv.size());
        for (int k = 0; k < total; ++k) r[static_cast<std::size_t>(k)] = wv[static_cast<std::size_t>(k)] - ell[k];
        return r;
    };

    auto sup = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };

    NewtonResult out;
    std::vector<double> z(static_cast<std::size_t>(total));
    std::vector<double> f0 = f0_of(w, z);
    double res = sup(f0);
    out.report.residuals.push_back(res);

    for (int step = 0; step < max_steps && res > tol; ++step) {
        // p2, p3 along the current iterate
        std::vector<double> wp = derivative(w, h);
        std::vector<double> p2v(static_cast<std::size_t>(total)), p3v(static_cast<std::size_t>(total));
        for (int k = 0; k < total; ++k) {
            double s = h * k;
            double yk = bar[k] + w[static_cast<std::size_t>(k)];
            double dk = bar_slope + wp[static_cast<std::size_t>(k)];
            p2v[static_cast<std::size_t>(k)] = f.dp2(s, yk, dk);
            p3v[static_cast<std::size_t>(k)] = f.dp3(s, yk, dk);
        }

        // J = I - G, G e_j = green_ell(p3 (e_j)' + p2 e_j) at interior nodes
        DenseMatrix J(n, n);
        std::vector<double> ej(static_cast<std::size_t>(total), 0.0);
        for (int j = 1; j <= n; ++j) {
            ej[static_cast<std::size_t>(j)] = 1.0;
            std::vector<double> ejp = derivative(ej, h);
            std::vector<double> g(static_cast<std::size_t>(total));
            for (int k = 0; k < total; ++k)
                g[static_cast<std::size_t>(k)] =
                    p3v[static_cast<std::size_t>(k)] * ejp[static_cast<std::size_t>(k)] +
                    p2v[static_cast<std::size_t>(k)] * ej[static_cast<std::size_t>(k)];
            GridFn1D col = green_ell(GridFn1D(0.0, 1.0, g));
            for (int k = 1; k <= n; ++k)
                J(k - 1, j - 1) = (k == j ? 1.0 : 0.0) - col[k];
            ej[static_cast<std::size_t>(j)] = 0.0;
        }

        LuFactor lu(J);
        if (lu.singular())
            throw SolveError(SolveError::Kind::Regularity,
                             "bvp newton: singular linearization (resonance)");
        std::vector<double> rhs(static_cast<std::size_t>(n));
        for (int k = 1; k <= n; ++k) rhs[static_cast<std::size_t>(k - 1)] = -f0[static_cast<std::size_t>(k)];
        std::vector<double> du = lu.solve(rhs);

        double lambda = 1.0;
        std::vector<double> w_new(w);
        std::vector<double> f0_new;
        double res_new = res;
        for (int halving = 0; halving <= 30; ++halving) {
            for (int k = 1; k <= n; ++k)
                w_new[static_cast<std::size_t>(k)] =
                    w[static_cast<std::size_t>(k)] + lambda * du[static_cast<std::size_t>(k - 1)];
            f0_new = f0_of(w_new, z);
            res_new = sup(f0_new);
            if (res_new < res || halving == 30) break;
            lambda *= 0.5;
        }
        w = w_new;
        f0 = f0_new;
        res = res_new;
        out.report.residuals.push_back(res);
        out.report.steps = step + 1;
    }
    out.report.converged = res <= tol;
    if (!out.report.converged)
        throw SolveError(SolveError::Kind::NoConvergence,
                         "bvp newton: no convergence (residual " + std::to_string(res) + ")");

    // final linearization diagnostics (second-order-form operator)
    std::vector<double> wp = derivative(w, h);
    std::vector<double> p2v(static_cast<std::size_t>(total)), p3v(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k) {
        double s = h * k;
        p2v[static_cast<std::size_t>(k)] = f.dp2(s, bar[k] + w[static_cast<std::size_t>(k)],
                                                 bar_slope + wp[static_cast<std::size_t>(k)]);
        p3v[static_cast<std::size_t>(k)] = f.dp3(s, bar[k] + w[static_cast<std::size_t>(k)],
                                                 bar_slope + wp[static_cast<std::size_t>(k)]);
    }
    LinearizedBVP lin = assemble_linearized(GridFn1D(0.0, 1.0, p2v), GridFn1D(0.0, 1.0, p3v));
    out.report.sigma_min = lin.sigma_min;
    out.report.op_norm = lin.op_norm;
    out.report.near_singular = lin.near_singular();

    std::vector<double> y(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k) y[static_cast<std::size_t>(k)] = bar[k] + w[static_cast<std::size_t>(k)];
    out.y = GridFn1D(0.0, 1.0, std::move(y));
    return out;
}

std::vector<ResonancePoint> resonance_scan(double rmin, double rmax, int steps, int n_interior) {
    std::vector<ResonancePoint> table;
    table.reserve(static_cast<std::size_t>(steps));
    const int total = n_interior + 2;
    std::vector<double> zeros(static_cast<std::size_t>(total), 0.0);
    GridFn1D p3(0.0, 1.0, zeros);
    for (int i = 0; i < steps; ++i) {
        double r = steps == 1 ? rmin : rmin + (rmax - rmin) * i / (steps - 1);
        std::vector<double> p2v(static_cast<std::size_t>(total), r);
        LinearizedBVP lin = assemble_linearized(GridFn1D(0.0, 1.0, p2v), p3);
        table.push_back({r, lin.sigma_min});
    }
    return table;
}

std::vector<ResonancePoint> scan_dips(const std::vector<ResonancePoint>& table, double ceiling) {
    std::vector<ResonancePoint> dips;
    for (std::size_t i = 1; i + 1 < table.size(); ++i) {
        if (table[i].sigma_min < ceiling && table[i].sigma_min <= table[i - 1].sigma_min &&
            table[i].sigma_min <= table[i + 1].sigma_min)
            dips.push_back(table[i]);
    }
    return dips;
}

OrthogonalityReport range_orthogonality_check(int n_mode, const GridFn1D& v) {
    const int total = v.n_nodes();
    const int n = total - 2;
    const double h = v.h();
    const double r = -static_cast<double>(n_mode) * n_mode * kPi * kPi;

    std::vector<double> p2v(static_cast<std::size_t>(total), r);
    std::vector<double> zeros(static_cast<std::size_t>(total), 0.0);
    LinearizedBVP lin = assemble_linearized(GridFn1D(0.0, 1.0, p2v), GridFn1D(0.0, 1.0, zeros));

    OrthogonalityReport rep;
    rep.sigma_min = lin.sigma_min;

    // rhs = v'' at the interior nodes
    std::vector<double> rhs(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
        rhs[static_cast<std::size_t>(k - 1)] = (v[k - 1] - 2.0 * v[k] + v[k + 1]) / (h * h);

    // int_0^1 v sin(n pi t) by the order-4 cumulative rule
    std::vector<double> prod(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k)
        prod[static_cast<std::size_t>(k)] = v[k] * std::sin(n_mode * kPi * v.node(k));
    rep.sine_integral = cumulative_integral(prod, h, Quadrature::Simpson4).back();

    double rhs_norm = norm2(rhs);
    if (rhs_norm == 0.0) {
        rep.residual = 0.0;
        rep.ls_residual = 0.0;
        rep.solvable = true;
        return rep;
    }
    const std::vector<double>& k = lin.kernel;
    double corr = std::abs(dot(k, rhs)) / (norm2(k) * rhs_norm);
    rep.residual = corr;

    // deflated solve: strip the kernel component, solve, strip again
    std::vector<double> rhs_defl = rhs;
    double kp = dot(k, rhs) / dot(k, k);
    for (std::size_t i = 0; i < rhs_defl.size(); ++i) rhs_defl[i] -= kp * k[i];
    LuFactor lu(lin.op);
    if (!lu.singular()) {
        std::vector<double> u = lu.solve(rhs_defl);
        double up = dot(k, u) / dot(k, k);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] -= up * k[i];
        std::vector<double> au = lin.op.apply(u);
        double err = 0.0;
        for (std::size_t i = 0; i < au.size(); ++i) {
            double d = au[i] - rhs_defl[i];
            err += d * d;
        }
        rep.ls_residual = std::sqrt(err) / rhs_norm;
    } else {
        rep.ls_residual = corr;
    }
    rep.solvable = corr <= 1e-6;
    return rep;
}

}  // namespace solmap::bvp
