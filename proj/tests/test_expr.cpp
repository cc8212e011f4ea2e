#include <doctest.h>

#include <cmath>
#include <random>

#include "solmap/expr.hpp"

using solmap::DomainError;
using solmap::Expression;
using solmap::ParseError;

namespace {
const std::vector<std::string> kVars = {"t", "eta", "xi"};

double ev(const Expression& e, double t, double eta, double xi) {
    double env[3] = {t, eta, xi};
    return e.eval(std::span<const double>(env, 3));
}
}  // namespace

TEST_CASE("parse and evaluate basics") {
    CHECK(ev(Expression::parse("xi^2", kVars), 0, 0, 3) == doctest::Approx(9.0));
    CHECK(std::abs(ev(Expression::parse("sin(pi*eta)", kVars), 0, 1, 0)) < 1e-15);
    CHECK(ev(Expression::parse("t + eta*xi", kVars), 1, 2, 3) == doctest::Approx(7.0));
    CHECK(ev(Expression::parse("exp(1)", kVars), 0, 0, 0) ==
          doctest::Approx(2.718281828459045).epsilon(1e-15));
    CHECK(ev(Expression::parse("2*xi - -3", kVars), 0, 0, 1) == doctest::Approx(5.0));
    CHECK(ev(Expression::parse("-xi^2", kVars), 0, 0, 2) == doctest::Approx(-4.0));
    CHECK(ev(Expression::parse("xi^(-2)", kVars), 0, 0, 2) == doctest::Approx(0.25));
    CHECK(ev(Expression::parse("1 - 2 - 3", kVars), 0, 0, 0) == doctest::Approx(-4.0));
    CHECK(ev(Expression::parse("8/4/2", kVars), 0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(Expression::parse("xi +", kVars), ParseError);
    try {
        Expression::parse("xi +", kVars);
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(Expression::parse("", kVars), ParseError);
    CHECK_THROWS_AS(Expression::parse("bogus + 1", kVars), ParseError);
    CHECK_THROWS_AS(Expression::parse("sin 3", kVars), ParseError);
    CHECK_THROWS_AS(Expression::parse("xi^eta", kVars), ParseError);
}

TEST_CASE("evaluation domain errors") {
    Expression inv = Expression::parse("1/xi", kVars);
    CHECK_THROWS_AS(ev(inv, 0, 0, 0), DomainError);
    CHECK(ev(inv, 0, 0, 2) == doctest::Approx(0.5));
    Expression lg = Expression::parse("log(xi)", kVars);
    CHECK_THROWS_AS(ev(lg, 0, 0, -1), DomainError);
    CHECK_THROWS_AS(ev(lg, 0, 0, 0), DomainError);
    Expression ov = Expression::parse("exp(xi)", kVars);
    CHECK_THROWS_AS(ev(ov, 0, 0, 1e9), DomainError);  // non-finite result
}

TEST_CASE("derivatives match calculus") {
    Expression e1 = Expression::parse("xi^2", kVars).differentiate("xi");
    for (double x : {-2.0, 0.0, 1.5}) CHECK(ev(e1, 0, 0, x) == doctest::Approx(2 * x));

    Expression e2 = Expression::parse("sin(2*pi*eta)", kVars).differentiate("eta");
    for (double x : {-0.3, 0.1, 0.7})
        CHECK(ev(e2, 0, x, 0) ==
              doctest::Approx(2 * M_PI * std::cos(2 * M_PI * x)).epsilon(1e-13));

    Expression e3 = Expression::parse("exp(t*xi)", kVars).differentiate("xi");
    CHECK(ev(e3, 0.5, 0, 2.0) == doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-13));

    // derivative w.r.t. an absent variable is zero
    Expression e4 = Expression::parse("sin(eta)", kVars).differentiate("xi");
    CHECK(ev(e4, 0, 0.3, 0) == doctest::Approx(0.0));
}

namespace {

// random expression generator for the FD property test
Expression random_expr(std::mt19937_64& rng, int depth);

std::string random_leaf(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 4);
    switch (pick(rng)) {
        case 0: return "t";
        case 1: return "eta";
        case 2: return "xi";
        case 3: return "pi";
        default: {
            std::uniform_real_distribution<double> c(-2.0, 2.0);
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6f", c(rng));
            return buf;
        }
    }
}

std::string random_text(std::mt19937_64& rng, int depth) {
    if (depth <= 0) return random_leaf(rng);
    std::uniform_int_distribution<int> pick(0, 7);
    std::string a = random_text(rng, depth - 1);
    std::string b = random_text(rng, depth - 1);
    switch (pick(rng)) {
        case 0: return "(" + a + " + " + b + ")";
        case 1: return "(" + a + " - " + b + ")";
        case 2: return "(" + a + ")*(" + b + ")";
        case 3: return "sin(" + a + ")";
        case 4: return "cos(" + a + ")";
        case 5: return "(" + a + ")^2";
        case 6: return "-(" + a + ")";
        default: return "(" + a + " + " + b + ")";
    }
}

}  // namespace

TEST_CASE("symbolic derivative agrees with central differences on random expressions") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Expression e = Expression::parse(random_text(rng, 3), kVars);
        for (const char* var : {"t", "eta", "xi"}) {
            Expression d = e.differentiate(var);
            double p[3] = {pt(rng), pt(rng), pt(rng)};
            int vi = var[0] == 't' ? 0 : (var[0] == 'e' ? 1 : 2);
            const double h = 1e-6;
            double lo[3] = {p[0], p[1], p[2]}, hi[3] = {p[0], p[1], p[2]};
            lo[vi] -= h;
            hi[vi] += h;
            double fd, an;
            try {
                fd = (e.eval(std::span<const double>(hi, 3)) -
                      e.eval(std::span<const double>(lo, 3))) /
                     (2 * h);
                an = d.eval(std::span<const double>(p, 3));
            } catch (const DomainError&) {
                continue;  // singular sample point
            }
            double scale = std::max({1.0, std::abs(fd), std::abs(an)});
            CHECK(std::abs(fd - an) / scale < 1e-6);
            ++checked;
        }
    }
    CHECK(checked > 150);
}

TEST_CASE("print round-trips to an identically evaluating expression") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        Expression e = Expression::parse(random_text(rng, 3), kVars);
        Expression back = Expression::parse(e.to_string(), kVars);
        for (int k = 0; k < 5; ++k) {
            double p[3] = {pt(rng), pt(rng), pt(rng)};
            double a, b;
            try {
                a = e.eval(std::span<const double>(p, 3));
                b = back.eval(std::span<const double>(p, 3));
            } catch (const DomainError&) {
                continue;
            }
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("bind substitutes a variable") {
    Expression fam = Expression::parse("xi2 - c", {"t", "xi1", "xi2", "c"});
    Expression fixed = fam.bind("c", 2.5);
    double env[4] = {0, 0, 4.0, 999.0};  // bound variable slot is ignored
    CHECK(fixed.eval(std::span<const double>(env, 4)) == doctest::Approx(1.5));
}

TEST_CASE("plus_scaled combines expressions") {
    Expression phi = Expression::parse("xi^2", kVars);
    Expression psi = Expression::parse("sin(2*pi*eta)", kVars);
    Expression c = phi.plus_scaled(psi, 0.25);
    CHECK(ev(c, 0, 0.25, 3) == doctest::Approx(9.0 + 0.25 * std::sin(M_PI / 2)));
}
