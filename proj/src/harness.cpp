#include "solmap/harness.hpp"

#include <cmath>
#include <random>

namespace solmap::harness {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
}

std::vector<PairError> consistency_check(const transport::TransportProblem& base,
                                         const transport::PicardConfig& cfg,
                                         const LevelLadder& ladder) {
    const std::size_t L = ladder.horizons.size();
    std::vector<CylFn> solutions(L);
    std::vector<bool> solved(L, false);
    std::vector<std::string> errors(L);
    for (std::size_t i = 0; i < L; ++i) {
        try {
            transport::TransportProblem p{base.y0, base.phi, ladder.horizons[i]};
            transport::SolveReport rep = transport::solve(p, cfg);
            if (!rep.complete) throw SolveError(SolveError::Kind::Stagnation, "incomplete");
            solutions[i] = rep.y;
            solved[i] = true;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    std::vector<PairError> out;
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j) {
            PairError pe;
            pe.i = static_cast<int>(i);
            pe.j = static_cast<int>(j);
            if (solved[i] && solved[j]) {
                pe.error = sup_distance(restrict_time(solutions[j], ladder.horizons[i]),
                                        solutions[i]);
                pe.ok = true;
            } else {
                pe.message = !solved[i] ? errors[i] : errors[j];
            }
            out.push_back(pe);
        }
    return out;
}

CylFn random_trig_cylfn(double T, int nt, int ntheta, std::uint64_t seed, int modes,
                        double amplitude) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    struct Mode {
        double amp, phase, speed;
        int k;
    };
    std::vector<Mode> ms;
    for (int k = 0; k <= modes; ++k)
        ms.push_back({amplitude * uni(rng) / (k + 1.0), kTwoPi * uni(rng), uni(rng), k});
    CylFn f(T, nt, ntheta);
    for (int j = 0; j <= nt; ++j)
        for (int m = 0; m < ntheta; ++m) {
            double t = f.t_node(j), eta = f.eta_node(m);
            double v = 0.0;
            for (const Mode& md : ms)
                v += md.amp * std::cos(kTwoPi * md.k * eta + md.phase + md.speed * t);
            f.at(j, m) = v;
        }
    return f;
}

BijectivityReport bijectivity_probe(const CylFn& a, int trials, std::uint64_t seed, double tol,
                                    Quadrature quad) {
    BijectivityReport rep;
    rep.trials = trials;
    if (trials <= 0) {
        rep.vacuous = true;
        return rep;
    }
    transport::LinearizedOptions opts;
    opts.tol = tol;
    opts.quad = quad;
    for (int trial = 0; trial < trials; ++trial) {
        CylFn v = random_trig_cylfn(a.T(), a.nt(), a.ntheta(), seed + 1000 * trial + 1);
        CylFn u = transport::linearized_solve(a, v, opts);
        CylFn res = u - v - transport::char_integral(0.0, [&] {
                        CylFn au = a;
                        std::vector<double>& av = au.values();
                        const std::vector<double>& uv = u.values();
                        for (std::size_t i = 0; i < av.size(); ++i) av[i] *= uv[i];
                        return au;
                    }(), quad);
        rep.max_residual = std::max(rep.max_residual, res.sup_norm());
    }
    // injectivity: v = 0 must return the zero solution from any start
    CylFn zero(a.T(), a.nt(), a.ntheta());
    CylFn start = random_trig_cylfn(a.T(), a.nt(), a.ntheta(), seed + 7);
    transport::LinearizedOptions inj = opts;
    inj.first_iterate = &start;
    CylFn u0 = transport::linearized_solve(a, zero, inj);
    rep.injectivity = u0.sup_norm();
    return rep;
}

std::vector<BootstrapRow> bootstrap_check(const Expression& y0_expr, const Expression& phi,
                                          double T, const transport::PicardConfig& cfg,
                                          int i_max, const std::vector<int>& nthetas) {
    std::vector<BootstrapRow> rows;
    for (int n : nthetas) {
        GridFn1D y0 = GridFn1D::sample(0.0, 1.0, n + 1, y0_expr, "eta");
        transport::TransportProblem p{y0, phi, T};
        transport::SolveReport rep = transport::solve(p, cfg);
        if (!rep.complete)
            throw SolveError(SolveError::Kind::Stagnation, "bootstrap: solve incomplete");
        BootstrapRow row;
        row.ntheta = n;
        for (int i = 0; i <= i_max; ++i) row.norms.push_back(c0i_norm(rep.y, i));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ExpLevelVerdict> exp_counterexample(const GridFn1D& x, int i_max) {
    if (i_max < 1) throw std::invalid_argument("exp_counterexample: i_max >= 1");
    const int n = x.n_nodes();
    std::vector<ExpLevelVerdict> out;
    for (int level = 1; level <= i_max; ++level) {
        double lo = -static_cast<double>(level), hi = static_cast<double>(level);
        ExpLevelVerdict v;
        v.level = level;
        bool seen = false;
        for (int k = 0; k < n; ++k) {
            double s = x.node(k);
            if (s < lo - 1e-12 || s > hi + 1e-12) continue;
            if (!seen || x[k] < v.min_x) v.min_x = x[k];
            seen = true;
        }
        if (!seen) throw GridError("exp_counterexample: level exceeds the grid");
        v.success = v.min_x > 0.0;
        out.push_back(v);
    }
    return out;
}

}  // namespace solmap::harness
