#include "solmap/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace solmap {

std::vector<double> DenseMatrix::apply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != c_) throw std::invalid_argument("apply: size mismatch");
    std::vector<double> y(static_cast<std::size_t>(r_), 0.0);
    for (int i = 0; i < r_; ++i) {
        double s = 0.0;
        const double* row = v_.data() + static_cast<std::size_t>(i) * c_;
        for (int j = 0; j < c_; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

std::vector<double> DenseMatrix::apply_transpose(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != r_)
        throw std::invalid_argument("apply_transpose: size mismatch");
    std::vector<double> y(static_cast<std::size_t>(c_), 0.0);
    for (int i = 0; i < r_; ++i) {
        const double* row = v_.data() + static_cast<std::size_t>(i) * c_;
        double xi = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < c_; ++j) y[static_cast<std::size_t>(j)] += row[j] * xi;
    }
    return y;
}

double DenseMatrix::inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < r_; ++i) {
        double s = 0.0;
        for (int j = 0; j < c_; ++j) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

LuFactor::LuFactor(DenseMatrix a) : lu_(std::move(a)) {
    const int n = lu_.rows();
    if (lu_.cols() != n) throw std::invalid_argument("LuFactor: square matrix required");
    piv_.resize(static_cast<std::size_t>(n));
    double scale = lu_.inf_norm();
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(lu_(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        piv_[static_cast<std::size_t>(k)] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        if (best <= scale * 1e-300) {
            singular_ = true;
            continue;
        }
        double inv = 1.0 / lu_(k, k);
        for (int i = k + 1; i < n; ++i) {
            double m = lu_(i, k) * inv;
            lu_(i, k) = m;
            if (m == 0.0) continue;
            for (int j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
        }
    }
}

std::vector<double> LuFactor::solve(std::span<const double> b) const {
    const int n = lu_.rows();
    if (singular_) throw std::runtime_error("LuFactor::solve: singular matrix");
    std::vector<double> x(b.begin(), b.end());
    for (int k = 0; k < n; ++k) {
        int p = piv_[static_cast<std::size_t>(k)];
        if (p != k) std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(p)]);
        // forward substitution folded into the sweep
        for (int i = k + 1; i < n; ++i)
            x[static_cast<std::size_t>(i)] -= lu_(i, k) * x[static_cast<std::size_t>(k)];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / lu_(i, i);
    }
    return x;
}

std::vector<double> LuFactor::solve_transpose(std::span<const double> b) const {
    // PA = LU  =>  A^T = U^T L^T P, solve U^T z = b, L^T w = z, then x = P^T w
    const int n = lu_.rows();
    if (singular_) throw std::runtime_error("LuFactor::solve_transpose: singular matrix");
    std::vector<double> x(b.begin(), b.end());
    for (int i = 0; i < n; ++i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) s -= lu_(j, i) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / lu_(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= lu_(j, i) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s;
    }
    for (int k = n - 1; k >= 0; --k) {
        int p = piv_[static_cast<std::size_t>(k)];
        if (p != k) std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(p)]);
    }
    return x;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double smallest_singular_value(const DenseMatrix& a, std::vector<double>& direction,
                               int iterations) {
    const int n = a.rows();
    LuFactor lu(a);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = 1.0 + 0.5 * std::sin(0.7 * (i + 1));
    double nv = norm2(v);
    for (double& e : v) e /= nv;

    if (lu.singular()) {
        direction = v;
        return 0.0;
    }
    double mu = 0.0;  // dominant eigenvalue of (A^T A)^{-1} = 1/sigma_min^2
    for (int it = 0; it < iterations; ++it) {
        // w = (A^T A)^{-1} v = A^{-1} A^{-T} v
        std::vector<double> w = lu.solve(lu.solve_transpose(v));
        double nw = norm2(w);
        if (!(nw > 0.0) || !std::isfinite(nw)) break;
        double mu_new = dot(w, v);  // Rayleigh quotient with the previous unit vector
        for (double& e : w) e /= nw;
        v = std::move(w);
        if (it > 4 && std::abs(mu_new - mu) <= 1e-12 * std::abs(mu_new)) {
            mu = mu_new;
            break;
        }
        mu = mu_new;
    }
    direction = v;
    return mu > 0.0 ? 1.0 / std::sqrt(mu) : 0.0;
}

double smallest_singular_value(const DenseMatrix& a, int iterations) {
    std::vector<double> dir;
    return smallest_singular_value(a, dir, iterations);
}

}  // namespace solmap
