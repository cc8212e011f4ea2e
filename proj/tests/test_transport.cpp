#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "solmap/transport.hpp"

using namespace solmap;
using namespace solmap::transport;

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
const std::vector<std::string> kVars = {"t", "eta", "xi"};

GridFn1D sine_data(int ntheta, double amp = 1.0) {
    std::vector<double> v(static_cast<std::size_t>(ntheta) + 1);
    for (int m = 0; m <= ntheta; ++m)
        v[static_cast<std::size_t>(m)] = amp * std::sin(kTwoPi * m / ntheta);
    return GridFn1D(0.0, 1.0, std::move(v));
}

GridFn1D const_data(int ntheta, double c) {
    return GridFn1D(0.0, 1.0, std::vector<double>(static_cast<std::size_t>(ntheta) + 1, c));
}

// 64-point Gauss-Legendre on [a,b]: independent oracle for the cutoff mass
double gauss_integral(const std::function<double(double)>& f, double a, double b) {
    static const int n = 64;
    static std::vector<double> x, w;
    if (x.empty()) {
        // nodes by Newton iteration on Legendre polynomials
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x.push_back(t);
            w.push_back(2.0 / ((1.0 - t * t) * dp * dp));
        }
    }
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[static_cast<std::size_t>(i)] * f(mid + half * x[static_cast<std::size_t>(i)]);
    return s * half;
}
}  // namespace

TEST_CASE("bar_y0 transports data along characteristics") {
    GridFn1D c = const_data(64, 2.5);
    CylFn b = bar_y0(c, 1.0);
    CHECK(b.sup_norm() == doctest::Approx(2.5));
    for (int j = 0; j <= b.nt(); ++j) CHECK(b(j, 13) == doctest::Approx(2.5));

    GridFn1D s = sine_data(64);
    CylFn bs = bar_y0(s, 1.0);
    // at (t, eta) = (0.25, 0.25): y0(0) = 0, exactly on nodes
    CHECK(bs(16, 16) == doctest::Approx(std::sin(0.0)).epsilon(1e-15));
    CHECK(bs(16, 32) == doctest::Approx(std::sin(kTwoPi * 0.25)).epsilon(1e-12));
}

TEST_CASE("transported data solves the homogeneous equation to stencil order") {
    GridFn1D s = sine_data(256);
    CylFn b = bar_y0(s, 1.0);
    TransportProblem hom{s, Expression::constant(0.0, kVars), 1.0};
    CHECK(residual_sup(b, hom) < 1e-6);
}

TEST_CASE("char_integral exactness") {
    CylFn z(1.0, 64, 64);
    CHECK(char_integral(0.0, z).sup_norm() == doctest::Approx(0.0));

    for (double& e : z.values()) e = 3.0;
    CylFn c = char_integral(0.0, z);
    for (int j = 0; j <= 64; ++j)
        CHECK(c(j, 5) == doctest::Approx(3.0 * z.t_node(j)).epsilon(1e-14));

    // z(t,eta) = t: the integrand along a characteristic is tau, so the
    // integral is t^2/2; trapezoid is exact on linear integrands
    CylFn zt(1.0, 64, 64);
    for (int j = 0; j <= 64; ++j)
        for (int m = 0; m < 64; ++m) zt.at(j, m) = zt.t_node(j);
    CylFn ct = char_integral(0.0, zt);
    for (int j = 0; j <= 64; ++j)
        CHECK(ct(j, 9) == doctest::Approx(0.5 * zt.t_node(j) * zt.t_node(j)).epsilon(1e-14));

    // anchored at a: vanishes on the anchor slice, signed before it
    CylFn ca = char_integral(0.5, z);
    for (int m = 0; m < 64; ++m) CHECK(ca(32, m) == doctest::Approx(0.0));
    CHECK(ca(0, 7) == doctest::Approx(-1.5).epsilon(1e-14));
}

TEST_CASE("char_integral is linear in z") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    CylFn u(0.5, 32, 64), v(0.5, 32, 64);
    for (double& e : u.values()) e = uni(rng);
    for (double& e : v.values()) e = uni(rng);
    for (Quadrature q : {Quadrature::Trapezoid, Quadrature::Simpson4}) {
        CylFn lhs = char_integral(0.0, axpy(2.0, u, v), q);
        CylFn rhs = axpy(2.0, char_integral(0.0, u, q), char_integral(0.0, v, q));
        CHECK(sup_distance(lhs, rhs) < 1e-13);
    }
}

TEST_CASE("discrete fundamental identity (d_t + d_theta) I(0,z) = z under refinement") {
    auto err_at = [](int n) {
        CylFn z(1.0, n, n);
        for (int j = 0; j <= n; ++j)
            for (int m = 0; m < n; ++m)
                z.at(j, m) = std::sin(kTwoPi * z.eta_node(m)) * std::cos(z.t_node(j));
        CylFn I = char_integral(0.0, z);
        CylFn lhs = d_time(I, 4) + d_theta(I, 1);
        return sup_distance(lhs, z);
    };
    double e1 = err_at(64), e2 = err_at(128);
    CHECK(e2 < 1e-3);
    CHECK(e1 / e2 > 3.5);  // quadrature is order 2, stencils order 4
}

TEST_CASE("cutoff chi plateau, support, and normalization") {
    CHECK(cutoff_chi(3.0) == doctest::Approx(0.0));
    CHECK(cutoff_chi(-3.0) == doctest::Approx(0.0));
    CHECK(cutoff_chi(2.0) == doctest::Approx(0.0));
    CHECK(cutoff_chi(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cutoff_chi(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cutoff_chi(-1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cutoff_chi(1.5) == doctest::Approx(cutoff_chi(-1.5)).epsilon(1e-12));
    CHECK(cutoff_chi(1.5) > 0.0);
    CHECK(cutoff_chi(1.5) < 1.0);

    // independent Gauss-Legendre oracle: chi(0) = (int chi0)^{-1} int_{-2}^{0} chi0(-s) ds
    auto chi0 = [](double s) {
        return (s > 1.0 && s < 2.0) ? std::exp(1.0 / ((s - 1.0) * (s - 2.0))) : 0.0;
    };
    double mass = gauss_integral(chi0, 1.0, 2.0);
    double below0 = gauss_integral([&](double s) { return chi0(-s); }, -2.0, -1.0);
    CHECK(below0 / mass == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cutoff chi derivatives match finite differences") {
    const double h = 1e-6;
    for (double s : {-1.7, -1.2, 1.3, 1.5, 1.9}) {
        double fd1 = (cutoff_chi(s + h) - cutoff_chi(s - h)) / (2 * h);
        CHECK(cutoff_chi_d1(s) == doctest::Approx(fd1).epsilon(1e-6));
        double fd2 = (cutoff_chi_d1(s + h) - cutoff_chi_d1(s - h)) / (2 * h);
        CHECK(cutoff_chi_d2(s) == doctest::Approx(fd2).epsilon(1e-5));
    }
}

TEST_CASE("lemma constants for the spec triples") {
    Nonlinearity zero = Nonlinearity::from(Expression::constant(0.0, kVars));
    Constants c0 = lemma_constants(zero, 0.0, 0.7, 64, 1.0, 2.0);
    CHECK(c0.M0 == doctest::Approx(0.0));
    CHECK(c0.M1 == doctest::Approx(0.0));
    CHECK(c0.M == doctest::Approx(0.0));
    CHECK(c0.L == doctest::Approx(0.7));
    CHECK(c0.alpha == doctest::Approx(0.0));

    Nonlinearity lin = Nonlinearity::from(Expression::parse("xi", kVars));
    Constants c1 = lemma_constants(lin, 0.0, 1.0, 64, 1.0, 5.0);
    CHECK(c1.M == doctest::Approx(1.25));

    // dense-sampling oracle for phi = xi^2 over [-2,2]: sup|2 xi| = 4, sup|2| = 2
    Nonlinearity sq = Nonlinearity::from(Expression::parse("xi^2", kVars));
    Constants c2 = lemma_constants(sq, 0.0, 1.0, 64, 1.0, 2.0);
    CHECK(c2.M == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(c2.R == doctest::Approx(8.0));
}

TEST_CASE("picard_step on trivial fixed points") {
    GridFn1D half = const_data(64, 0.5);
    CylFn z0 = bar_y0(half, 0.25);

    PicardConfig cfg;
    Nonlinearity zero = Nonlinearity::from(Expression::constant(0.0, kVars));
    PicardResult r = picard_step(z0, zero, 0.0, cfg);
    CHECK(r.iterations == 1);
    CHECK(sup_distance(r.z, z0) == doctest::Approx(0.0));

    // an already-converged iterate returns after one zero-update sweep
    Nonlinearity sq = Nonlinearity::from(Expression::parse("xi^2", kVars));
    PicardResult r1 = picard_step(z0, sq, 0.0, cfg);
    PicardResult r2 = picard_step(z0, sq, 0.0, cfg, &r1.z);
    CHECK(r2.iterations <= 2);
    CHECK(sup_distance(r2.z, r1.z) < 2e-12);
}

TEST_CASE("picard_step ratios on the first window of the paper problem") {
    GridFn1D half = const_data(128, 0.5);
    CylFn full = bar_y0(half, 1.5);
    // first lemma-c window for A = 1/2, Xi = 1 + A: M = 1.25*3, R = 6
    Nonlinearity sq = Nonlinearity::from(Expression::parse("xi^2", kVars));
    Constants con = lemma_constants(sq, 0.0, 1.5, 128, 0.5, 1.5);
    int cells = static_cast<int>(std::floor(con.L * 128));
    REQUIRE(cells >= 1);
    CylFn z0(cells / 128.0, cells, 128);
    for (int j = 0; j <= cells; ++j)
        for (int m = 0; m < 128; ++m) z0.at(j, m) = 0.5;
    PicardConfig cfg;
    PicardResult r = picard_step(z0, sq, 0.0, cfg);
    CHECK(!r.ratios.empty());
    for (double ratio : r.ratios) CHECK(ratio <= 0.55);
    for (double ratio : r.ratios) CHECK(ratio <= con.alpha + 0.05);
}

TEST_CASE("solve: zero nonlinearity reproduces transported data exactly") {
    GridFn1D s = sine_data(64);
    TransportProblem p{s, Expression::constant(0.0, kVars), 1.0};
    SolveReport rep = solve(p);
    CHECK(rep.complete);
    CHECK(sup_distance(rep.y, bar_y0(s, 1.0)) == doctest::Approx(0.0));
    CHECK(rep.regular);
}

TEST_CASE("solve: paper example y0 = 1/2, phi = xi^2 has solution (2-t)^{-1}") {
    GridFn1D half = const_data(64, 0.5);
    TransportProblem p{half, Expression::parse("xi^2", kVars), 1.5};
    SolveReport rep = solve(p);
    REQUIRE(rep.complete);
    CHECK(rep.cutoff_active);  // xi^2 grows beyond every window
    double worst = 0.0;
    for (int j = 0; j <= rep.y.nt(); ++j)
        for (int m = 0; m < rep.y.ntheta(); ++m)
            worst = std::max(worst, std::abs(rep.y(j, m) - 1.0 / (2.0 - rep.y.t_node(j))));
    CHECK(worst < 5e-4);
    for (const StepRecord& st : rep.steps) {
        CHECK(st.c.alpha <= 0.5);
        CHECK(st.contraction <= 0.55);
    }
    CHECK(rep.regular);
}

TEST_CASE("solve: linear phi = xi against the characteristics closed form") {
    // oracle: along each characteristic Y' = Y, so y = e^t y0(eta - t)
    GridFn1D s = sine_data(128);
    TransportProblem p{s, Expression::parse("xi", kVars), 1.0};
    SolveReport rep = solve(p);
    REQUIRE(rep.complete);
    double worst = 0.0;
    for (int j = 0; j <= rep.y.nt(); ++j)
        for (int m = 0; m < rep.y.ntheta(); ++m) {
            double t = rep.y.t_node(j), eta = rep.y.eta_node(m);
            worst = std::max(worst,
                             std::abs(rep.y(j, m) -
                                      std::exp(t) * std::sin(kTwoPi * (eta - t))));
        }
    CHECK(worst < 1e-4);
}

TEST_CASE("solve honours the fixed-count step policy") {
    GridFn1D half = const_data(64, 0.5);
    TransportProblem p{half, Expression::parse("xi^2", kVars), 0.5};
    PicardConfig cfg;
    cfg.policy = StepPolicy::FixedCount;
    cfg.fixed_steps = 8;
    SolveReport rep = solve(p, cfg);
    CHECK(rep.complete);
    CHECK(rep.steps.size() == 8);
    double worst = 0.0;
    for (int j = 0; j <= rep.y.nt(); ++j)
        worst = std::max(worst, std::abs(rep.y(j, 0) - 1.0 / (2.0 - rep.y.t_node(j))));
    CHECK(worst < 1e-3);
}

TEST_CASE("linearized_solve closed forms") {
    CylFn a0(1.0, 64, 64), v(1.0, 64, 64);
    for (double& e : v.values()) e = 0.7;
    CHECK(sup_distance(linearized_solve(a0, v), v) == doctest::Approx(0.0));

    CylFn a1(1.0, 256, 256), one(1.0, 256, 256);
    for (double& e : a1.values()) e = 1.0;
    for (double& e : one.values()) e = 1.0;
    CylFn u = linearized_solve(a1, one);
    double worst = 0.0;
    for (int j = 0; j <= 256; ++j)
        worst = std::max(worst, std::abs(u(j, 3) - std::exp(u.t_node(j))));
    CHECK(worst < 1e-6);

    CylFn zero(1.0, 64, 64);
    CHECK(linearized_solve(a1.values().size() == zero.values().size() ? CylFn(1.0, 64, 64) : a0,
                           zero)
              .sup_norm() == doctest::Approx(0.0));
}

TEST_CASE("linearized_solve is linear in v") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    CylFn a(0.5, 32, 64), v1(0.5, 32, 64), v2(0.5, 32, 64);
    for (double& e : a.values()) e = uni(rng);
    for (double& e : v1.values()) e = uni(rng);
    for (double& e : v2.values()) e = uni(rng);
    CylFn lhs = linearized_solve(a, axpy(2.0, v1, v2));
    CylFn rhs = axpy(2.0, linearized_solve(a, v1), linearized_solve(a, v2));
    CHECK(sup_distance(lhs, rhs) / std::max(1.0, rhs.sup_norm()) < 1e-10);
}

TEST_CASE("apriori margins") {
    // phi = 0: bound equals ||v|| exactly, margin 0 up to rounding
    GridFn1D s = sine_data(64, 0.5);
    TransportProblem p0{s, Expression::constant(0.0, kVars), 1.0};
    SolveReport r0 = solve(p0);
    Nonlinearity zero = Nonlinearity::from(p0.phi);
    CylFn v = bar_y0(s, 1.0);
    double m0 = apriori_margin(v, zero, r0.y, 0);
    CHECK(std::abs(m0) < 1e-12);

    // the paper problem at T = 1: margin must be nonnegative
    GridFn1D half = const_data(64, 0.5);
    TransportProblem p1{half, Expression::parse("xi^2", kVars), 1.0};
    SolveReport r1 = solve(p1);
    Nonlinearity sq = Nonlinearity::from(p1.phi);
    CylFn v1 = bar_y0(half, 1.0);
    CHECK(apriori_margin(v1, sq, r1.y, 0) >= 0.0);
    CHECK(apriori_margin(v1, sq, r1.y, 1) >= 0.0);

    // v = 0 and phi(.,.,0) = 0: solution is 0, margin equals the bound
    GridFn1D z0 = const_data(64, 0.0);
    TransportProblem pz{z0, Expression::parse("xi", kVars), 1.0};
    SolveReport rz = solve(pz);
    CHECK(rz.y.sup_norm() == doctest::Approx(0.0));
    Nonlinearity lin = Nonlinearity::from(pz.phi);
    double mz = apriori_margin(bar_y0(z0, 1.0), lin, rz.y, 0);
    CHECK(mz == doctest::Approx(std::exp(1.25) - 1.0).epsilon(1e-9));
}

TEST_CASE("lemma b(2) lipschitz estimate holds with sampled constants") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Nonlinearity sq = Nonlinearity::from(Expression::parse("xi^2", kVars));
    const double T = 0.25;
    const int n = 64;
    const double R = 2.0;
    Constants con = lemma_constants(sq, 0.0, T, n, 0.0, 1.05 * R);
    auto random_in_ball = [&](std::uint64_t seed) {
        std::mt19937_64 r2(seed);
        CylFn f(T, 16, n);
        double a0 = uni(r2), a1 = uni(r2), ph = uni(r2);
        for (int j = 0; j <= 16; ++j)
            for (int m = 0; m < n; ++m)
                f.at(j, m) = 0.5 * a0 + 0.3 * a1 * std::cos(kTwoPi * f.eta_node(m) + ph);
        return f;
    };
    for (int trial = 0; trial < 20; ++trial) {
        CylFn u = random_in_ball(1000 + trial);
        CylFn w = random_in_ball(2000 + trial);
        auto phi_of = [&](const CylFn& g) {
            CylFn out = g;
            for (double& e : out.values()) e = e * e;
            return out;
        };
        double lhs = c0i_norm(char_integral(0.0, phi_of(u)) - char_integral(0.0, phi_of(w)), 1);
        double rhs = T * con.M * (2.0 + R) * c0i_norm(u - w, 1);
        CHECK(lhs <= rhs * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("uniqueness probe") {
    GridFn1D half = const_data(64, 0.5);
    TransportProblem p{half, Expression::parse("xi^2", kVars), 1.0};
    PicardConfig cfg;
    CHECK(uniqueness_probe(p, cfg, 0.5, 0.5) == doctest::Approx(0.0));
    CHECK(uniqueness_probe(p, cfg, 0.5, 0.0) <= 1e-10);

    TransportProblem p0{half, Expression::constant(0.0, kVars), 1.0};
    CHECK(uniqueness_probe(p0, cfg, 0.3, -0.2) == doctest::Approx(0.0));
}

TEST_CASE("residual diagnostics") {
    // y = 0 with phi = t: residual is sup |0 - t| = T
    GridFn1D z = const_data(64, 0.0);
    TransportProblem pt{z, Expression::parse("t", kVars), 1.0};
    CylFn zero(1.0, 64, 64);
    CHECK(residual_sup(zero, pt) == doctest::Approx(1.0));

    // the paper solution's residual shrinks at order >= 2 under refinement
    auto res_at = [](int n) {
        GridFn1D half = const_data(n, 0.5);
        TransportProblem p{half, Expression::parse("xi^2", kVars), 1.0};
        return solve(p).residual_sup;
    };
    double r1 = res_at(32), r2 = res_at(64);
    CHECK(r1 / r2 > 3.5);
}

TEST_CASE("solve reports stagnation instead of diverging") {
    // y' = 1 + xi^2 from y0 = 0 blows up at t = pi/2 < 2
    GridFn1D z = const_data(32, 0.0);
    TransportProblem p{z, Expression::parse("1 + xi^2", kVars), 2.0};
    SolveReport rep = solve(p);
    CHECK(!rep.complete);
    CHECK(rep.solved_until < 2.0);
    CHECK(rep.solved_until > 1.0);  // blow-up at pi/2 ~ 1.57
    CHECK(rep.blowup_estimate > rep.solved_until);
}
