#ifndef SOLMAP_HOLO_HPP
#define SOLMAP_HOLO_HPP

#include <complex>
#include <vector>

#include "solmap/transport.hpp"  // SolveError

namespace solmap::holo {

using Complex = std::complex<double>;

/** Truncated complex Taylor series sum c_k eta^k, k = 0..N. */
class PowerSeries {
  public:
    PowerSeries() = default;
    explicit PowerSeries(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {}
    static PowerSeries zero(int order) { return PowerSeries(std::vector<Complex>(order + 1)); }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    Complex operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    Complex& at(int k) { return c_[static_cast<std::size_t>(k)]; }
    const std::vector<Complex>& coeffs() const { return c_; }

    Complex eval(Complex eta) const;  // Horner

    PowerSeries truncated(int order) const;

  private:
    std::vector<Complex> c_;
};

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b);
PowerSeries operator-(const PowerSeries& a, const PowerSeries& b);
PowerSeries operator*(Complex s, const PowerSeries& a);
/** Cauchy product truncated to the shorter order. */
PowerSeries mul(const PowerSeries& a, const PowerSeries& b);
/** Antiderivative with zero constant term (order grows by 1). */
PowerSeries integrate(const PowerSeries& a);
PowerSeries differentiate(const PowerSeries& a);
/** exp of a series by the standard convolution recurrence. */
PowerSeries exp_series(const PowerSeries& a);
/** log(1 + x)-style: series log for c_0 != 0. */
PowerSeries log_series(const PowerSeries& a);

/** phi(eta, xi) = sum c_{m,k} eta^m xi^k with finite support. */
class BiSeries {
  public:
    BiSeries(int max_m, int max_k)
        : m_(max_m), k_(max_k),
          c_(static_cast<std::size_t>(max_m + 1) * (max_k + 1), Complex(0.0, 0.0)) {}

    int max_m() const { return m_; }
    int max_k() const { return k_; }
    Complex at(int m, int k) const { return c_[static_cast<std::size_t>(m) * (k_ + 1) + k]; }
    Complex& at(int m, int k) { return c_[static_cast<std::size_t>(m) * (k_ + 1) + k]; }

  private:
    int m_, k_;
    std::vector<Complex> c_;
};

/** Taylor solution of y' = phi(eta, y), y(0) = y0, order N, by the degree
 *  recursion (n+1) y_{n+1} = [eta^n] phi(eta, y). Coefficients above 1e300
 *  raise an overflow error carrying the index. */
PowerSeries taylor_solve(Complex y0, const BiSeries& phi, int order);

/** Root-test radius via linear regression of log|c_n| against n over the top
 *  `tail` fraction of the nonzero coefficients (>= 20 required). */
double radius_estimate(const PowerSeries& s, double tail = 0.25);

struct CounterexampleRow {
    int n = 0;
    double sup_distance = 0.0;  // sup over |eta| <= r of |y_n - y^1|
};

struct CounterexampleReport {
    std::vector<CounterexampleRow> rows;
    double y1_radius_estimate = 0.0;  // from the Taylor solution of y' = xi^2/s
    double r = 0.0, s = 0.0;
};

/** Non-extension counterexample: y_n = a_n s (s - a_n^2 eta)^{-1} with
 *  a_n = 1 - 1/n converge to y^1 = s (s - eta)^{-1} on |eta| <= r only. */
CounterexampleReport counterexample_run(double r, double s, int n_max);

/** Closed-form linearized solution u = e^A (u0 + int e^{-A} v'), A = int a. */
PowerSeries linearized_holo_solve(const PowerSeries& a, Complex u0, const PowerSeries& v);

struct EmptyInteriorReport {
    bool blows_up_inside = false;
    bool entire = false;
    double estimated_radius = 0.0;
    double analytic_radius = 0.0;  // (n eps)^{-1/(n+1)}
};

/** Family phi = n(n+1) eta^n xi^2, y0 = eps: blow-up inside the unit disc
 *  exactly when n eps > 1. */
EmptyInteriorReport empty_interior_demo(double eps, int n, int order = 200);

}  // namespace solmap::holo

#endif
