#include <doctest.h>

#include <cmath>
#include <random>

#include "solmap/linalg.hpp"

using namespace solmap;

TEST_CASE("lu solves a random well-conditioned system") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const int n = 40;
    DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = uni(rng);
        a(i, i) += n;  // diagonally dominant
    }
    std::vector<double> x_true(static_cast<std::size_t>(n));
    for (double& e : x_true) e = uni(rng);
    std::vector<double> b = a.apply(x_true);
    LuFactor lu(a);
    std::vector<double> x = lu.solve(b);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(x[static_cast<std::size_t>(i)] -
                                         x_true[static_cast<std::size_t>(i)]));
    CHECK(worst < 1e-11);

    std::vector<double> bt = a.apply_transpose(x_true);
    std::vector<double> xt = lu.solve_transpose(bt);
    worst = 0.0;
    for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(xt[static_cast<std::size_t>(i)] -
                                         x_true[static_cast<std::size_t>(i)]));
    CHECK(worst < 1e-11);
}

TEST_CASE("lu needs pivoting on a zero leading entry") {
    DenseMatrix a(2, 2);
    a(0, 0) = 0.0;
    a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = 0.0;
    LuFactor lu(a);
    CHECK(!lu.singular());
    std::vector<double> b = {2.0, 3.0};
    std::vector<double> x = lu.solve(b);
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("singular matrix is detected") {
    DenseMatrix a(3, 3);
    for (int j = 0; j < 3; ++j) {
        a(0, j) = 1.0;
        a(1, j) = 2.0;  // row 1 = 2 * row 0
        a(2, j) = static_cast<double>(j);
    }
    LuFactor lu(a);
    CHECK(lu.singular());
    CHECK(smallest_singular_value(a) == doctest::Approx(0.0));
}

TEST_CASE("smallest singular value of a diagonal matrix") {
    DenseMatrix a(5, 5);
    double d[5] = {3.0, -0.25, 7.0, 1.5, -4.0};
    for (int i = 0; i < 5; ++i) a(i, i) = d[i];
    CHECK(smallest_singular_value(a) == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("smallest singular value direction is the bottom mode") {
    DenseMatrix a(4, 4);
    double d[4] = {5.0, 2.0, 1e-3, 8.0};
    for (int i = 0; i < 4; ++i) a(i, i) = d[i];
    std::vector<double> dir;
    double s = smallest_singular_value(a, dir, 80);
    CHECK(s == doctest::Approx(1e-3).epsilon(1e-6));
    CHECK(std::abs(dir[2]) > 0.999);
}
