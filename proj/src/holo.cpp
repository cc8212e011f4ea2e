#include "solmap/holo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace solmap::holo {

Complex PowerSeries::eval(Complex eta) const {
    Complex acc(0.0, 0.0);
    for (int k = order(); k >= 0; --k) acc = acc * eta + c_[static_cast<std::size_t>(k)];
    return acc;
}

PowerSeries PowerSeries::truncated(int order) const {
    std::vector<Complex> v(static_cast<std::size_t>(order) + 1, Complex(0.0, 0.0));
    for (int k = 0; k <= std::min(order, this->order()); ++k)
        v[static_cast<std::size_t>(k)] = c_[static_cast<std::size_t>(k)];
    return PowerSeries(std::move(v));
}

PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
    int n = std::max(a.order(), b.order());
    PowerSeries r = PowerSeries::zero(n);
    for (int k = 0; k <= n; ++k)
        r.at(k) = (k <= a.order() ? a[k] : Complex(0.0)) + (k <= b.order() ? b[k] : Complex(0.0));
    return r;
}

PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
    return a + Complex(-1.0, 0.0) * b;
}

PowerSeries operator*(Complex s, const PowerSeries& a) {
    PowerSeries r = a;
    for (int k = 0; k <= r.order(); ++k) r.at(k) *= s;
    return r;
}

PowerSeries mul(const PowerSeries& a, const PowerSeries& b) {
    int n = std::min(a.order() + b.order(), std::max(a.order(), b.order()));
    PowerSeries r = PowerSeries::zero(n);
    for (int i = 0; i <= a.order(); ++i) {
        if (a[i] == Complex(0.0)) continue;
        for (int j = 0; j <= b.order() && i + j <= n; ++j)
            r.at(i + j) += a[i] * b[j];
    }
    return r;
}

PowerSeries integrate(const PowerSeries& a) {
    PowerSeries r = PowerSeries::zero(a.order() + 1);
    for (int k = 0; k <= a.order(); ++k) r.at(k + 1) = a[k] / Complex(k + 1.0, 0.0);
    return r;
}

PowerSeries differentiate(const PowerSeries& a) {
    if (a.order() == 0) return PowerSeries::zero(0);
    PowerSeries r = PowerSeries::zero(a.order() - 1);
    for (int k = 1; k <= a.order(); ++k) r.at(k - 1) = Complex(static_cast<double>(k), 0.0) * a[k];
    return r;
}

PowerSeries exp_series(const PowerSeries& a) {
    // b' = a' b  =>  n b_n = sum_{k=1}^{n} k a_k b_{n-k}
    PowerSeries b = PowerSeries::zero(a.order());
    b.at(0) = std::exp(a[0]);
    for (int n = 1; n <= a.order(); ++n) {
        Complex s(0.0, 0.0);
        for (int k = 1; k <= n; ++k) s += Complex(static_cast<double>(k), 0.0) * a[k] * b[n - k];
        b.at(n) = s / Complex(static_cast<double>(n), 0.0);
    }
    return b;
}

PowerSeries log_series(const PowerSeries& a) {
    if (a[0] == Complex(0.0))
        throw SolveError(SolveError::Kind::Domain, "log_series: vanishing constant term");
    // b' = a'/a  =>  n a_0 b_n = n a_n - sum_{k=1}^{n-1} k b_k a_{n-k}
    PowerSeries b = PowerSeries::zero(a.order());
    b.at(0) = std::log(a[0]);
    for (int n = 1; n <= a.order(); ++n) {
        Complex s = Complex(static_cast<double>(n), 0.0) * a[n];
        for (int k = 1; k < n; ++k) s -= Complex(static_cast<double>(k), 0.0) * b[k] * a[n - k];
        b.at(n) = s / (Complex(static_cast<double>(n), 0.0) * a[0]);
    }
    return b;
}

PowerSeries taylor_solve(Complex y0, const BiSeries& phi, int order) {
    if (order < 1) throw std::invalid_argument("taylor_solve: order >= 1 required");
    const int N = order;
    const int K = phi.max_k();
    // z[k][j] = [eta^j] y(eta)^k, filled in degree-major order
    std::vector<std::vector<Complex>> z(static_cast<std::size_t>(K) + 1,
                                        std::vector<Complex>(static_cast<std::size_t>(N) + 1));
    PowerSeries y = PowerSeries::zero(N);
    y.at(0) = y0;
    z[0][0] = Complex(1.0, 0.0);

    for (int j = 0; j <= N; ++j) {
        // powers at degree j from y coefficients up to degree j
        for (int k = 1; k <= K; ++k) {
            Complex s(0.0, 0.0);
            for (int i = 0; i <= j; ++i) s += z[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)] * y[j - i];
            z[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = s;
        }
        if (j == N) break;
        Complex w(0.0, 0.0);
        for (int m = 0; m <= std::min(j, phi.max_m()); ++m)
            for (int k = 0; k <= K; ++k) {
                Complex c = phi.at(m, k);
                if (c != Complex(0.0)) w += c * z[static_cast<std::size_t>(k)][static_cast<std::size_t>(j - m)];
            }
        Complex next = w / Complex(j + 1.0, 0.0);
        if (std::abs(next) > 1e300)
            throw SolveError(SolveError::Kind::Domain,
                             "taylor_solve: coefficient overflow at index " +
                                 std::to_string(j + 1));
        y.at(j + 1) = next;
    }
    return y;
}

double radius_estimate(const PowerSeries& s, double tail) {
    std::vector<std::pair<int, double>> nz;
    for (int k = 0; k <= s.order(); ++k) {
        double a = std::abs(s[k]);
        if (a > 1e-300) nz.emplace_back(k, std::log(a));
    }
    std::size_t want = static_cast<std::size_t>(std::ceil(tail * static_cast<double>(nz.size())));
    want = std::max<std::size_t>(want, 20);
    if (nz.size() < 20)
        throw SolveError(SolveError::Kind::Domain,
                         "radius_estimate: need at least 20 nonzero tail coefficients");
    want = std::min(want, nz.size());
    std::size_t from = nz.size() - want;

    // least squares line log|c_n| = a + b n over the tail
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double cnt = static_cast<double>(want);
    for (std::size_t i = from; i < nz.size(); ++i) {
        double x = nz[i].first, yv = nz[i].second;
        sx += x;
        sy += yv;
        sxx += x * x;
        sxy += x * yv;
    }
    double denom = cnt * sxx - sx * sx;
    if (denom == 0.0)
        throw SolveError(SolveError::Kind::Domain, "radius_estimate: degenerate tail");
    double slope = (cnt * sxy - sx * sy) / denom;
    return std::exp(-slope);
}

namespace {

double sup_on_circle(double radius, const std::function<Complex(Complex)>& f, int samples = 4096) {
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
        double ang = 2.0 * 3.14159265358979323846 * i / samples;
        Complex eta = std::polar(radius, ang);
        m = std::max(m, std::abs(f(eta)));
    }
    return m;
}

}  // namespace

CounterexampleReport counterexample_run(double r, double s, int n_max) {
    if (!(0.0 < r && r < s && s < 1.0))
        throw std::invalid_argument("counterexample_run: need 0 < r < s < 1");
    CounterexampleReport rep;
    rep.r = r;
    rep.s = s;
    auto y1 = [s](Complex eta) { return s / (s - eta); };
    for (int n = 1; n <= n_max; ++n) {
        double an = 1.0 - 1.0 / n;
        auto yn = [s, an](Complex eta) { return an * s / (s - an * an * eta); };
        double d = sup_on_circle(r, [&](Complex eta) { return yn(eta) - y1(eta); });
        rep.rows.push_back({n, d});
    }
    // y^1 solves y' = xi^2 / s with y(0) = 1; its series certifies radius ~ s < 1
    BiSeries phi(0, 2);
    phi.at(0, 2) = Complex(1.0 / s, 0.0);
    PowerSeries series = taylor_solve(Complex(1.0, 0.0), phi, 200);
    rep.y1_radius_estimate = radius_estimate(series);
    return rep;
}

PowerSeries linearized_holo_solve(const PowerSeries& a, Complex u0, const PowerSeries& v) {
    int n = std::max(a.order(), v.order());
    PowerSeries A = integrate(a).truncated(n);
    PowerSeries eA = exp_series(A);
    PowerSeries emA = exp_series(Complex(-1.0, 0.0) * A);
    PowerSeries vp = differentiate(v).truncated(n);
    PowerSeries inner = integrate(mul(emA, vp)).truncated(n);
    PowerSeries u0s = PowerSeries::zero(n);
    u0s.at(0) = u0;
    return mul(eA, u0s + inner).truncated(n);
}

EmptyInteriorReport empty_interior_demo(double eps, int n, int order) {
    EmptyInteriorReport rep;
    rep.analytic_radius =
        n * eps > 0.0 ? std::pow(n * eps, -1.0 / (n + 1)) : std::numeric_limits<double>::infinity();
    if (eps == 0.0) {
        rep.entire = true;
        rep.estimated_radius = std::numeric_limits<double>::infinity();
        return rep;
    }
    BiSeries phi(n, 2);
    phi.at(n, 2) = Complex(static_cast<double>(n) * (n + 1), 0.0);
    PowerSeries y = taylor_solve(Complex(eps, 0.0), phi, order);
    rep.estimated_radius = radius_estimate(y);
    rep.blows_up_inside = rep.estimated_radius < 1.0 - 1e-3;
    return rep;
}

}  // namespace solmap::holo
