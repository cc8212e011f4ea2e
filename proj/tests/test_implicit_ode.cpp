#include <doctest.h>

#include <cmath>

#include "solmap/implicit_ode.hpp"

using namespace solmap;
using namespace solmap::implicit_ode;

namespace {
const std::vector<std::string> kVars = {"t", "xi1", "xi2"};
}

TEST_CASE("resolve_slope on affine and cubic roots") {
    Expression aff = Expression::parse("xi2 - t", kVars);
    Expression d = aff.differentiate("xi2");
    CHECK(resolve_slope(aff, 0.5, 7.0, 0.0) == doctest::Approx(0.5).epsilon(1e-13));

    Expression rel = Expression::parse("xi2 - xi1", kVars);
    CHECK(resolve_slope(rel, 0.0, 2.0, 0.0) == doctest::Approx(2.0).epsilon(1e-13));

    // oracle: bisection on [0,1] for xi2^3 + xi2 - 1
    Expression cub = Expression::parse("xi2^3 + xi2 - 1", kVars);
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 60; ++k) {
        double mid = 0.5 * (lo + hi);
        double v = mid * mid * mid + mid - 1.0;
        (v < 0.0 ? lo : hi) = mid;
    }
    double root = 0.5 * (lo + hi);
    CHECK(root == doctest::Approx(0.6823278).epsilon(1e-6));
    CHECK(resolve_slope(cub, 0.0, 0.0, 0.0) == doctest::Approx(root).epsilon(1e-12));
}

TEST_CASE("integrate quadrature and closed forms") {
    // y' = s from eta = 0: y = s^2/2, RK4 exact on polynomial slopes
    IntegrateResult r1 = integrate({0.0, Expression::parse("xi2 - t", kVars), 100});
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
        double s = r1.y.node(k);
        worst = std::max(worst, std::abs(r1.y[k] - 0.5 * s * s));
    }
    CHECK(worst < 1e-10);
    CHECK(r1.trace.regular);

    // y' = y from eta = 1: y = e^s
    IntegrateResult r2 = integrate({1.0, Expression::parse("xi2 - xi1", kVars), 100});
    worst = 0.0;
    for (int k = 0; k <= 100; ++k)
        worst = std::max(worst, std::abs(r2.y[k] - std::exp(r2.y.node(k))));
    CHECK(worst < 1e-8);

    // phi = xi2: zero slope keeps y constant
    IntegrateResult r3 = integrate({3.0, Expression::parse("xi2", kVars), 64});
    CHECK(sup_distance(r3.y, GridFn1D(0, 1, std::vector<double>(65, 3.0))) <
          1e-14);
}

TEST_CASE("solution relation holds along converged trajectories") {
    Expression phi = Expression::parse("xi2 - sin(xi1) - t", kVars);
    IntegrateResult r = integrate({0.3, phi, 128});
    std::vector<double> env(3);
    double worst = 0.0;
    for (int k = 0; k <= 128; ++k) {
        env[0] = r.y.node(k);
        env[1] = r.y[k];
        env[2] = r.slope[k];
        worst = std::max(worst, std::abs(phi.eval(env)));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("variational_solve closed forms and linearity") {
    const int n = 201;
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
    GridFn1D one(0, 1, ones), zero(0, 1, zeros);

    // p2 = 0, p3 = 1, u0 = 0, g = 1: u = t
    GridFn1D u1 = variational_solve(zero, one, 0.0, one);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(u1[k] - u1.node(k)));
    CHECK(worst < 1e-12);

    // p2 = p3 = 1, u0 = 1, g = 0: u = e^{-t}
    GridFn1D u2 = variational_solve(one, one, 1.0, zero);
    worst = 0.0;
    for (int k = 0; k < n; ++k) worst = std::max(worst, std::abs(u2[k] - std::exp(-u2.node(k))));
    CHECK(worst < 1e-8);

    // g = 0, u0 = 0: u = 0
    CHECK(variational_solve(one, one, 0.0, zero).sup_norm() == doctest::Approx(0.0));

    // linear in (u0, g)
    std::vector<double> gv(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) gv[static_cast<std::size_t>(k)] = std::sin(3.0 * k / (n - 1.0));
    GridFn1D g(0, 1, gv);
    GridFn1D lhs = variational_solve(one, one, 2.0, 3.0 * g);
    GridFn1D rhs = axpy(3.0, variational_solve(one, one, 0.0, g),
                        variational_solve(one, one, 2.0, zero));
    CHECK(sup_distance(lhs, rhs) < 1e-12);

    // vanishing p3 is a regularity failure
    CHECK_THROWS_AS(variational_solve(one, zero, 0.0, one), SolveError);
}

TEST_CASE("regularity scan flags the vanishing-p3 family") {
    // phi = xi2 - c: p3 = 1 for every c
    Expression fam1 = Expression::parse("xi2 - c", {"t", "xi1", "xi2", "c"});
    std::vector<ScanRow> rows = regularity_scan(fam1, "c", {-1.0, 0.0, 2.0}, 0.0, 64);
    for (const ScanRow& r : rows) {
        CHECK(r.solved);
        CHECK(r.regular);
        CHECK(r.min_abs_p3 == doctest::Approx(1.0));
    }

    // phi = xi2^2 - t: y' = sqrt(s), p3 = 2 y' -> 0 at s = 0
    Expression fam2 = Expression::parse("xi2^2 - t + 0*c", {"t", "xi1", "xi2", "c"});
    std::vector<ScanRow> rows2 = regularity_scan(fam2, "c", {0.0}, 0.0, 64);
    CHECK(rows2[0].solved);
    CHECK(!rows2[0].regular);

    CHECK(regularity_scan(fam1, "c", {}, 0.0, 64).empty());
}

TEST_CASE("irregular trace is flagged but integration continues") {
    IntegrateResult r = integrate({0.0, Expression::parse("xi2^2 - t", kVars), 64});
    CHECK(!r.trace.regular);
    CHECK(r.trace.min_abs_p3 <= 1e-8);
    // the positive branch y = (2/3) s^{3/2} is still followed approximately
    CHECK(r.y[64] == doctest::Approx(2.0 / 3.0).epsilon(1e-2));
}
