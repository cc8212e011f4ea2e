#include "solmap/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace solmap::transport {

namespace {

// ---------------------------------------------------------------- cutoff ---

double chi0(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    return std::exp(1.0 / ((s - 1.0) * (s - 2.0)));
}

double chi0_d1(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    double p = (s - 1.0) * (s - 2.0);
    return chi0(s) * (-(2.0 * s - 3.0) / (p * p));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

double chi0_mass() {
    static const double mass = integrate([](double s) { return chi0(s); }, 1.0, 2.0, 1e-15);
    return mass;
}

// normalized tail integral: (int_1^x chi0) / (int_1^2 chi0) for x in [1,2]
double chi_tail(double x) {
    if (x <= 1.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return integrate([](double s) { return chi0(s); }, 1.0, x, 1e-15) / chi0_mass();
}

}  // namespace

double cutoff_chi(double s) {
    double a = std::abs(s);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    return 1.0 - chi_tail(a);
}

double cutoff_chi_d1(double s) {
    return (chi0(-s) - chi0(s)) / chi0_mass();
}

double cutoff_chi_d2(double s) {
    return (-chi0_d1(-s) - chi0_d1(s)) / chi0_mass();
}

// ---------------------------------------------------------- Nonlinearity ---

Nonlinearity Nonlinearity::from(const Expression& phi) {
    Nonlinearity n;
    n.phi_ = phi;
    n.phi_eta_ = phi.differentiate("eta");
    n.phi_xi_ = phi.differentiate("xi");
    n.phi_eta_xi_ = n.phi_xi_.differentiate("eta");
    n.phi_xi_xi_ = n.phi_xi_.differentiate("xi");
    n.it_ = phi.var_index("t").value_or(-1);
    n.ie_ = phi.var_index("eta").value_or(-1);
    n.ix_ = phi.var_index("xi").value_or(-1);
    n.env_size_ = phi.variables().size();
    n.uses_t_ = n.it_ >= 0 && phi.uses_variable(n.it_);
    n.uses_eta_ = n.ie_ >= 0 && phi.uses_variable(n.ie_);
    n.uses_xi_ = n.ix_ >= 0 && phi.uses_variable(n.ix_);
    return n;
}

Nonlinearity Nonlinearity::with_cutoff(double level) const {
    Nonlinearity n = *this;
    n.level_ = level;
    n.uses_xi_ = true;  // the chi factor depends on xi
    return n;
}

double Nonlinearity::eval(const Expression& e, double t, double eta, double xi) const {
    double env[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::vector<double> big;
    std::span<double> s;
    if (env_size_ <= 8) {
        s = std::span<double>(env, env_size_);
    } else {
        big.assign(env_size_, 0.0);
        s = big;
    }
    if (it_ >= 0) s[static_cast<std::size_t>(it_)] = t;
    if (ie_ >= 0) s[static_cast<std::size_t>(ie_)] = eta;
    if (ix_ >= 0) s[static_cast<std::size_t>(ix_)] = xi;
    return e.eval(s);
}

double Nonlinearity::value(double t, double eta, double xi) const {
    double v = eval(phi_, t, eta, xi);
    if (level_ <= 0.0) return v;
    return cutoff_chi(xi / level_) * v;
}

double Nonlinearity::d_eta(double t, double eta, double xi) const {
    double v = eval(phi_eta_, t, eta, xi);
    if (level_ <= 0.0) return v;
    return cutoff_chi(xi / level_) * v;
}

double Nonlinearity::d_xi(double t, double eta, double xi) const {
    double v = eval(phi_xi_, t, eta, xi);
    if (level_ <= 0.0) return v;
    double c = cutoff_chi(xi / level_);
    double c1 = cutoff_chi_d1(xi / level_) / level_;
    return c1 * eval(phi_, t, eta, xi) + c * v;
}

double Nonlinearity::d_eta_xi(double t, double eta, double xi) const {
    double v = eval(phi_eta_xi_, t, eta, xi);
    if (level_ <= 0.0) return v;
    double c = cutoff_chi(xi / level_);
    double c1 = cutoff_chi_d1(xi / level_) / level_;
    return c1 * eval(phi_eta_, t, eta, xi) + c * v;
}

double Nonlinearity::d_xi_xi(double t, double eta, double xi) const {
    double v = eval(phi_xi_xi_, t, eta, xi);
    if (level_ <= 0.0) return v;
    double c = cutoff_chi(xi / level_);
    double c1 = cutoff_chi_d1(xi / level_) / level_;
    double c2 = cutoff_chi_d2(xi / level_) / (level_ * level_);
    return c2 * eval(phi_, t, eta, xi) + 2.0 * c1 * eval(phi_xi_, t, eta, xi) + c * v;
}

// ------------------------------------------------------------- transport ---

namespace {

void check_coupled(const GridFn1D& y0, double T, int& ntheta, int& nt) {
    if (std::abs(y0.a()) > 1e-12 || std::abs(y0.b() - 1.0) > 1e-12)
        throw GridError("transport: y0 must live on [0,1]");
    ntheta = y0.n_nodes() - 1;
    double ep = std::abs(y0[0] - y0[ntheta]);
    if (ep > 1e-9 * (1.0 + std::abs(y0[0])))
        throw GridError("transport: y0 endpoint values must agree (periodic)");
    double cells = T * ntheta;
    nt = static_cast<int>(std::lround(cells));
    if (nt < 1 || std::abs(cells - nt) > 1e-9)
        throw GridError("transport: dt = dtheta requires T * ntheta to be an integer");
}

// Causal quadrature step S_j - S_{j-1} along a characteristic; `get(j)`
// returns the integrand at absolute time index j.
template <typename Get>
double causal_step(int j, double h, Quadrature quad, Get&& get) {
    if (quad == Quadrature::Trapezoid || j == 1)
        return 0.5 * h * (get(j - 1) + get(j));
    if (j == 2) return h / 12.0 * (-get(0) + 8.0 * get(1) + 5.0 * get(2));
    return h / 24.0 * (get(j - 3) - 5.0 * get(j - 2) + 19.0 * get(j - 1) + 9.0 * get(j));
}

int wrap(int m, int n) {
    m %= n;
    return m < 0 ? m + n : m;
}

/** Shared window-marching state for the nonlinear and linear solvers.
 *  fgrid holds integrand values at solved nodes; base[c] carries the
 *  cumulative integral from t=0 up to the current window start along
 *  characteristic c (the lattice line m = c + j mod ntheta). */
template <typename Integrand>
class Marcher {
  public:
    Marcher(double T, int nt, int ntheta, Quadrature quad, Integrand f)
        : nt_(nt), ntheta_(ntheta), dt_(T / nt), quad_(quad), f_(std::move(f)),
          fgrid_(T, nt, ntheta), base_(static_cast<std::size_t>(ntheta), 0.0) {}

    // Picard iteration for z = z0 + I(t_j0, f(., z)) on window rows j0..j0+n.
    // `z` enters as the initial iterate (n+1 rows) and leaves as the fixed point.
    PicardResult iterate(int j0, int n, const CylFn& z0, CylFn z, double tol, int max_iter) {
        PicardResult res;
        res.max_abs = z.sup_norm();
        CylFn next = z;
        double prev_delta = -1.0;
        for (int k = 1; k <= max_iter; ++k) {
            for (int c = 0; c < ntheta_; ++c) {
                double acc = 0.0;
                auto get = [&](int j) {
                    int m = wrap(c + j, ntheta_);
                    if (j < j0) return fgrid_(j, m);
                    return f_(j, m, z(j - j0, m));
                };
                for (int jw = 1; jw <= n; ++jw) {
                    acc += causal_step(j0 + jw, dt_, quad_, get);
                    next.at(jw, wrap(c + j0 + jw, ntheta_)) =
                        z0(jw, wrap(c + j0 + jw, ntheta_)) + acc;
                }
            }
            // row 0 is pinned by z0 (the integral vanishes at the window start)
            std::copy(z0.slice(0).begin(), z0.slice(0).end(), next.slice(0).begin());
            double delta = sup_distance(next, z);
            res.max_abs = std::max(res.max_abs, next.sup_norm());
            z = next;
            res.iterations = k;
            if (prev_delta > 0.0) res.ratios.push_back(delta / prev_delta);
            if (delta <= tol) {
                res.z = std::move(z);
                return res;
            }
            prev_delta = delta;
        }
        throw SolveError(SolveError::Kind::NoConvergence,
                         "picard: no convergence within max iterations (window at t=" +
                             std::to_string(j0 * dt_) + ")");
    }

    // Accept a converged window: record integrand values and advance base.
    void commit(int j0, int n, const CylFn& z) {
        for (int c = 0; c < ntheta_; ++c) {
            auto get = [&](int j) {
                int m = wrap(c + j, ntheta_);
                if (j < j0) return fgrid_(j, m);
                return f_(j, m, z(j - j0, m));
            };
            double acc = base_[static_cast<std::size_t>(c)];
            for (int jw = 1; jw <= n; ++jw) acc += causal_step(j0 + jw, dt_, quad_, get);
            base_[static_cast<std::size_t>(c)] = acc;
        }
        for (int jw = (j0 == 0 ? 0 : 1); jw <= n; ++jw) {
            int j = j0 + jw;
            for (int m = 0; m < ntheta_; ++m) fgrid_.at(j, m) = f_(j, m, z(jw, m));
        }
    }

    double base(int c) const { return base_[static_cast<std::size_t>(c)]; }

  private:
    int nt_, ntheta_;
    double dt_;
    Quadrature quad_;
    Integrand f_;
    CylFn fgrid_;
    std::vector<double> base_;
};

double slice_c01_norm(std::span<const double> s, double dtheta) {
    double m = 0.0;
    for (double x : s) m = std::max(m, std::abs(x));
    for (double x : d_theta_slice(s, dtheta)) m = std::max(m, std::abs(x));
    return m;
}

struct SampledSups {
    double phi0 = 0.0;   // sup |phi(.,.,0)|
    double s2 = 0.0;     // sup |d_eta phi|
    double s3 = 0.0;     // sup |d_xi phi|
    double s23 = 0.0;    // sup |d_eta d_xi phi|
    double s33 = 0.0;    // sup |d_xi^2 phi|
};

SampledSups sample_sups(const Nonlinearity& phi, double t0, double t2, int ntheta,
                        double xi_window) {
    SampledSups s;
    // sampling collapses along variables phi does not use
    const int nts = phi.uses_t() ? 17 : 1;
    const int nes = phi.uses_eta() ? std::min(ntheta, 33) : 1;
    const int nxs = phi.uses_xi() ? 65 : 3;
    for (int a = 0; a < nts; ++a) {
        double t = nts == 1 ? t0 : t0 + (t2 - t0) * a / (nts - 1);
        for (int b = 0; b < nes; ++b) {
            double eta = static_cast<double>(b) / nes;
            s.phi0 = std::max(s.phi0, std::abs(phi.value(t, eta, 0.0)));
            for (int c = 0; c < nxs; ++c) {
                double xi = -xi_window + 2.0 * xi_window * c / (nxs - 1);
                s.s2 = std::max(s.s2, std::abs(phi.d_eta(t, eta, xi)));
                s.s3 = std::max(s.s3, std::abs(phi.d_xi(t, eta, xi)));
                s.s23 = std::max(s.s23, std::abs(phi.d_eta_xi(t, eta, xi)));
                s.s33 = std::max(s.s33, std::abs(phi.d_xi_xi(t, eta, xi)));
            }
        }
    }
    return s;
}

}  // namespace

CylFn bar_y0(const GridFn1D& y0, double T) {
    int ntheta = 0, nt = 0;
    check_coupled(y0, T, ntheta, nt);
    CylFn out(T, nt, ntheta);
    for (int j = 0; j <= nt; ++j)
        for (int m = 0; m < ntheta; ++m) out.at(j, m) = y0[wrap(m - j, ntheta)];
    return out;
}

CylFn char_integral(double a_time, const CylFn& z, Quadrature quad) {
    if (std::abs(z.T() * z.ntheta() / z.nt() - 1.0) > 1e-9)
        throw GridError("char_integral: grid must have dt = dtheta");
    double cells = a_time / z.dt();
    int ja = static_cast<int>(std::lround(cells));
    if (ja < 0 || ja > z.nt() || std::abs(cells - ja) > 1e-9)
        throw GridError("char_integral: anchor must lie on the time grid");
    const int nt = z.nt(), ntheta = z.ntheta();
    CylFn out(z.T(), nt, ntheta);
    std::vector<double> F(static_cast<std::size_t>(nt + 1));
    for (int c = 0; c < ntheta; ++c) {
        auto get = [&](int j) { return z(j, wrap(c + j, ntheta)); };
        F[0] = 0.0;
        for (int j = 1; j <= nt; ++j) F[static_cast<std::size_t>(j)] =
            F[static_cast<std::size_t>(j - 1)] + causal_step(j, z.dt(), quad, get);
        for (int j = 0; j <= nt; ++j)
            out.at(j, wrap(c + j, ntheta)) =
                F[static_cast<std::size_t>(j)] - F[static_cast<std::size_t>(ja)];
    }
    return out;
}

Constants lemma_constants(const Nonlinearity& phi, double t0, double t2, int ntheta,
                          double data_bound, double xi_window, double safety) {
    SampledSups s = sample_sups(phi, t0, t2, ntheta, xi_window);
    Constants c;
    c.M0 = safety * std::max(s.phi0, s.s3);
    c.M1 = safety * std::max({s.phi0, s.s2, s.s3});
    c.M = safety * std::max({s.s3, s.s23, s.s33});
    c.R = 4.0 * (1.0 + data_bound);
    c.L = t2 - t0;
    if (c.M > 0.0) c.L = std::min(c.L, 1.0 / (3.0 * c.M * c.R));
    c.alpha = c.L * c.M * (2.0 + c.R);
    return c;
}

PicardResult picard_step(const CylFn& z0, const Nonlinearity& phi, double t_offset,
                         const PicardConfig& cfg, const CylFn* first_iterate) {
    auto f = [&phi, t_offset, &z0](int j, int m, double zv) {
        return phi.value(t_offset + j * z0.dt(), z0.eta_node(m), zv);
    };
    Marcher<decltype(f)> marcher(z0.T(), z0.nt(), z0.ntheta(), cfg.quad, f);
    CylFn init = z0;
    if (first_iterate) {
        if (!first_iterate->same_grid(z0)) throw GridError("picard_step: iterate grid mismatch");
        init = *first_iterate;
    } else if (cfg.init == InitPolicy::ConstantValue) {
        for (double& e : init.values()) e = cfg.init_value;
    }
    return marcher.iterate(0, z0.nt(), z0, std::move(init), cfg.tol, cfg.max_iter);
}

SolveReport solve(const TransportProblem& problem, const PicardConfig& cfg) {
    int ntheta = 0, nt = 0;
    check_coupled(problem.y0, problem.T, ntheta, nt);
    const double dt = problem.T / nt;

    CylFn ybar = bar_y0(problem.y0, problem.T);
    double A0 = slice_c01_norm(ybar.slice(0), ybar.dtheta());

    Nonlinearity plain = Nonlinearity::from(problem.phi);
    Nonlinearity phi = plain;
    SolveReport rep;

    // Lemma-d cutoff: on when the xi-slope keeps growing past the sample window
    double Xi0 = 2.0 * (1.0 + A0);
    SampledSups g1 = sample_sups(plain, 0.0, problem.T, ntheta, Xi0);
    SampledSups g2 = sample_sups(plain, 0.0, problem.T, ntheta, 2.0 * Xi0);
    bool growing = g2.s3 > g1.s3 * 1.001 + 1e-12;
    bool use_cutoff = cfg.cutoff == 1 || (cfg.cutoff < 0 && growing);
    if (use_cutoff) {
        double Mboot = cfg.safety * std::max({g1.s3, g1.s23, g1.s33});
        double level = (1.0 + A0) * std::exp(std::min(Mboot * problem.T, 600.0));
        phi = plain.with_cutoff(level);
        rep.cutoff_active = true;
        rep.cutoff_level = level;
    }

    rep.y = CylFn(problem.T, nt, ntheta);
    std::copy(ybar.slice(0).begin(), ybar.slice(0).end(), rep.y.slice(0).begin());

    auto f = [&phi, dt, &rep](int j, int m, double zv) {
        return phi.value(j * dt, rep.y.eta_node(m), zv);
    };
    Marcher<decltype(f)> marcher(problem.T, nt, ntheta, cfg.quad, f);

    int j0 = 0;
    int windows_done = 0;
    while (j0 < nt) {
        double A = slice_c01_norm(rep.y.slice(j0), rep.y.dtheta());
        double Xi = cfg.xi_window > 0.0 ? cfg.xi_window : 1.0 + A;
        bool accepted = false;
        for (int attempt = 0; attempt < 8 && !accepted; ++attempt) {
            // constants over a horizon that covers the eventual window
            int rem = nt - j0;
            int hz = std::min(rem, 16);
            Constants con;
            while (true) {
                con = lemma_constants(phi, j0 * dt, (j0 + hz) * dt, ntheta, A, Xi, cfg.safety);
                int want = con.M > 0.0
                               ? static_cast<int>(std::floor(1.0 / (3.0 * con.M * con.R) / dt +
                                                             1e-12))
                               : rem;
                if (want > hz && hz < rem) {
                    hz = std::min(rem, std::max(2 * hz, want));
                    continue;
                }
                break;
            }
            int n_cells;
            if (cfg.policy == StepPolicy::FixedCount) {
                int total = std::max(1, cfg.fixed_steps);
                int next_boundary = static_cast<int>(
                    std::lround(static_cast<double>(nt) * (windows_done + 1) / total));
                n_cells = std::max(1, std::min(rem, next_boundary - j0));
            } else {
                n_cells = con.M > 0.0 ? static_cast<int>(std::floor(con.L / dt + 1e-12)) : rem;
                n_cells = std::min(n_cells, rem);
                if (n_cells == 0) {
                    double alpha1 = dt * con.M * (2.0 + con.R);
                    if (alpha1 <= 0.5) {
                        n_cells = 1;
                    } else {
                        rep.complete = false;
                        rep.solved_until = j0 * dt;
                        rep.blowup_estimate = j0 * dt + 3.0 * con.L;
                        rep.residual_sup = std::numeric_limits<double>::quiet_NaN();
                        return rep;
                    }
                }
            }

            // window-local data z0 and initial iterate
            CylFn z0(n_cells * dt, n_cells, ntheta);
            for (int jw = 0; jw <= n_cells; ++jw)
                for (int m = 0; m < ntheta; ++m)
                    z0.at(jw, m) = ybar(j0 + jw, m) + marcher.base(wrap(m - (j0 + jw), ntheta));
            CylFn init = z0;
            if (cfg.init == InitPolicy::ConstantValue)
                for (double& e : init.values()) e = cfg.init_value;

            PicardResult pr =
                marcher.iterate(j0, n_cells, z0, std::move(init), cfg.tol, cfg.max_iter);

            if (cfg.xi_window <= 0.0 && pr.max_abs > Xi) {
                Xi = std::max(2.0 * Xi, 1.05 * pr.max_abs);
                continue;  // recompute constants and redo the window
            }

            marcher.commit(j0, n_cells, pr.z);
            for (int jw = 1; jw <= n_cells; ++jw)
                std::copy(pr.z.slice(jw).begin(), pr.z.slice(jw).end(),
                          rep.y.slice(j0 + jw).begin());

            StepRecord rec;
            rec.t0 = j0 * dt;
            rec.t2 = (j0 + n_cells) * dt;
            rec.A = A;
            rec.c = con;
            rec.c.L = n_cells * dt;
            rec.c.alpha = rec.c.L * con.M * (2.0 + con.R);
            rec.xi_window = Xi;
            rec.iterations = pr.iterations;
            rec.contraction = pr.ratios.empty()
                                  ? 0.0
                                  : *std::max_element(pr.ratios.begin(), pr.ratios.end());
            rep.steps.push_back(rec);

            j0 += n_cells;
            ++windows_done;
            accepted = true;
        }
        if (!accepted)
            throw SolveError(SolveError::Kind::NoConvergence,
                             "transport solve: xi window failed to stabilize");
    }

    rep.complete = true;
    rep.solved_until = problem.T;
    rep.y.check_finite("transport solution");
    rep.residual_sup = residual_sup(rep.y, problem);

    // regularity = linearized problem solvable at the solution
    try {
        CylFn a(problem.T, nt, ntheta);
        for (int j = 0; j <= nt; ++j)
            for (int m = 0; m < ntheta; ++m)
                a.at(j, m) = plain.d_xi(j * dt, a.eta_node(m), rep.y(j, m));
        CylFn ones(problem.T, nt, ntheta);
        for (double& e : ones.values()) e = 1.0;
        linearized_solve(a, ones);
        rep.regular = true;
    } catch (const SolveError&) {
        rep.regular = false;
    }
    return rep;
}

CylFn linearized_solve(const CylFn& a, const CylFn& v, const LinearizedOptions& opts) {
    if (!a.same_grid(v)) throw GridError("linearized_solve: grid mismatch");
    if (std::abs(v.T() * v.ntheta() / v.nt() - 1.0) > 1e-9)
        throw GridError("linearized_solve: grid must have dt = dtheta");
    const int nt = v.nt(), ntheta = v.ntheta();
    const double dt = v.dt();
    double supa = a.sup_norm();
    int win = supa > 0.0 ? std::max(1, static_cast<int>(std::floor(1.0 / (12.0 * supa) / dt)))
                         : nt;

    CylFn u(v.T(), nt, ntheta);
    std::copy(v.slice(0).begin(), v.slice(0).end(), u.slice(0).begin());

    auto f = [&a, &u](int j, int m, double uv) { return a(j, m) * uv; };
    Marcher<decltype(f)> marcher(v.T(), nt, ntheta, opts.quad, f);

    int j0 = 0;
    bool first = true;
    while (j0 < nt) {
        int n = std::min(win, nt - j0);
        CylFn z0(n * dt, n, ntheta);
        for (int jw = 0; jw <= n; ++jw)
            for (int m = 0; m < ntheta; ++m)
                z0.at(jw, m) = v(j0 + jw, m) + marcher.base(wrap(m - (j0 + jw), ntheta));
        CylFn init = z0;
        if (first && opts.first_iterate) {
            if (!opts.first_iterate->same_grid(v))
                throw GridError("linearized_solve: iterate grid mismatch");
            for (int jw = 0; jw <= n; ++jw)
                std::copy(opts.first_iterate->slice(j0 + jw).begin(),
                          opts.first_iterate->slice(j0 + jw).end(), init.slice(jw).begin());
        }
        PicardResult pr = marcher.iterate(j0, n, z0, std::move(init), opts.tol, opts.max_iter);
        marcher.commit(j0, n, pr.z);
        for (int jw = 1; jw <= n; ++jw)
            std::copy(pr.z.slice(jw).begin(), pr.z.slice(jw).end(), u.slice(j0 + jw).begin());
        j0 += n;
        first = false;
    }
    return u;
}

double apriori_margin(const CylFn& v, const Nonlinearity& phi, const CylFn& y, int i,
                      double safety, double xi_window) {
    if (i != 0 && i != 1) throw std::invalid_argument("apriori_margin: i must be 0 or 1");
    double Xi = std::max({xi_window, 1.05 * y.sup_norm(), 1e-6});
    SampledSups s = sample_sups(phi, 0.0, y.T(), y.ntheta(), Xi);
    double Mi = i == 0 ? safety * std::max(s.phi0, s.s3)
                       : safety * std::max({s.phi0, s.s2, s.s3});
    double L = y.T();
    double bound = (1.0 + c0i_norm(v, i)) * std::exp(L * Mi) - 1.0;
    return bound - c0i_norm(y, i);
}

double uniqueness_probe(const TransportProblem& problem, const PicardConfig& cfg, double init1,
                        double init2) {
    PicardConfig c1 = cfg;
    c1.init = InitPolicy::ConstantValue;
    c1.init_value = init1;
    PicardConfig c2 = c1;
    c2.init_value = init2;
    SolveReport r1 = solve(problem, c1);
    SolveReport r2 = solve(problem, c2);
    if (!r1.complete || !r2.complete)
        throw SolveError(SolveError::Kind::NoConvergence, "uniqueness_probe: solve incomplete");
    return sup_distance(r1.y, r2.y);
}

double residual_sup(const CylFn& y, const TransportProblem& problem) {
    CylFn dty = d_time(y, y.nt() >= 4 ? 4 : 2);
    CylFn dhy = d_theta(y, 1);
    CylFn rhs = compose(problem.phi, y);
    double m = 0.0;
    for (int j = 0; j <= y.nt(); ++j)
        for (int mm = 0; mm < y.ntheta(); ++mm)
            m = std::max(m, std::abs(dty(j, mm) + dhy(j, mm) - rhs(j, mm)));
    return m;
}

}  // namespace solmap::transport
